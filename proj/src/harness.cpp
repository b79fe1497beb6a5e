#include "gcmlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "gcmlab/estimators.hpp"
#include "gcmlab/hull.hpp"
#include "gcmlab/pava.hpp"

namespace gcmlab {

double norm_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

// Acklam's rational approximation refined by one Halley step.
double norm_ppf(double p) {
  detail::require(p > 0.0 && p < 1.0, "norm_ppf: p in (0,1)");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00, 2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = norm_cdf(x) - p;
  const double u = e * 2.5066282746310005024 * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

Interval DensityTruth::support() const {
  return kind == Kind::linear_increasing ? Interval{-1.0, 0.0}
                                         : Interval{0.0, 1.0};
}

double DensityTruth::f(double t) const {
  if (kind == Kind::linear_increasing) return 2.0 * (1.0 + t);
  const double u = 1.0 - t;
  return 3.0 * u * u;
}

double DensityTruth::f_prime(double t) const {
  return kind == Kind::linear_increasing ? 2.0 : -6.0 * (1.0 - t);
}

double DensityTruth::f_second(double t) const {
  (void)t;
  return kind == Kind::linear_increasing ? 0.0 : 6.0;
}

double DensityTruth::F(double t) const {
  const Interval s = support();
  if (t <= s.lo) return 0.0;
  if (t >= s.hi) return 1.0;
  if (kind == Kind::linear_increasing) return (1.0 + t) * (1.0 + t);
  const double u = 1.0 - t;
  return 1.0 - u * u * u;
}

double DensityTruth::F_inv(double u) const {
  if (kind == Kind::linear_increasing) return std::sqrt(u) - 1.0;
  return 1.0 - std::cbrt(1.0 - u);
}

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::isoreg: return "isoreg";
    case Scenario::convexreg: return "convexreg";
    case Scenario::isokernel: return "isokernel";
    case Scenario::grenander: return "grenander";
    case Scenario::convexdensity: return "convexdensity";
  }
  return "?";
}

Scenario scenario_by_name(const std::string& name) {
  if (name == "isoreg") return Scenario::isoreg;
  if (name == "convexreg") return Scenario::convexreg;
  if (name == "isokernel") return Scenario::isokernel;
  if (name == "grenander") return Scenario::grenander;
  if (name == "convexdensity") return Scenario::convexdensity;
  throw std::invalid_argument("unknown scenario '" + name + "'");
}

void ExperimentConfig::validate() const {
  detail::require(!n_grid.empty(), "config: empty n grid");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    detail::require(n_grid[i] >= 16, "config: n must be >= 16");
    if (i > 0)
      detail::require(n_grid[i] > n_grid[i - 1],
                      "config: n grid must be increasing");
  }
  detail::require(replications >= 100, "config: need R >= 100 replications");

  const bool regression = scenario == Scenario::isoreg ||
                          scenario == Scenario::convexreg ||
                          scenario == Scenario::isokernel;
  if (regression) {
    detail::require(t0 > 0.0 && t0 < 1.0, "config: t0 must be interior to (0,1)");
    if (scenario == Scenario::convexreg) {
      if (!(reg_truth.m_second() > 0.0))
        throw std::invalid_argument(
            "Theorem 4 hypothesis violated: m''(t0) > 0 required");
    } else {
      if (!(reg_truth.m_prime(t0) > 0.0))
        throw std::invalid_argument(
            "Theorem 3 hypothesis violated: m'(t0) > 0 required");
      if (reg_truth.m_prime(0.0) < 0.0 || reg_truth.m_prime(1.0) < 0.0)
        throw std::invalid_argument(
            "Theorem 3 hypothesis violated: m must be increasing on [0,1]");
    }
    if (scenario != Scenario::isoreg) {
      detail::require(bandwidth_a > 0.0, "config: bandwidth constant a > 0");
      detail::require(bandwidth_exp < 0.0 && bandwidth_exp > -1.0,
                      "config: bandwidth exponent must lie in (-1, 0)");
    }
  } else {
    const Interval s = dens_truth.support();
    detail::require(t0 > s.lo && t0 < s.hi,
                    "config: t0 must be interior to the density support");
    if (scenario == Scenario::grenander) {
      if (dens_truth.kind != DensityTruth::Kind::linear_increasing)
        throw std::invalid_argument(
            "Theorem 10 hypothesis violated: increasing density required");
      if (!(dens_truth.f_prime(t0) > 0.0))
        throw std::invalid_argument(
            "Theorem 10 hypothesis violated: f'(t0) > 0 required");
      if (dependence.kind == DependenceModel::Kind::lrd) {
        if (dependence.rank != 1 || !(dependence.d < 0.5))
          throw std::invalid_argument(
              "Theorem 11 hypothesis violated: rank 1 and d < 1/2 required");
      }
    } else {
      if (dens_truth.kind != DensityTruth::Kind::convex_decreasing ||
          !(dens_truth.f_second(t0) > 0.0))
        throw std::invalid_argument(
            "Theorem 12 hypothesis violated: convex density with f''(t0) > 0 "
            "required");
      if (dependence.kind == DependenceModel::Kind::lrd)
        throw std::invalid_argument(
            "Theorem 12 does not cover long range dependence (the limit "
            "process degenerates)");
      detail::require(bandwidth_a > 0.0 && bandwidth_exp < 0.0 &&
                          bandwidth_exp > -1.0,
                      "config: bandwidth rule invalid");
    }
  }
}

double theoretical_exponent(const ExperimentConfig& cfg) {
  const bool lrd = cfg.dependence.kind == DependenceModel::Kind::lrd;
  const double rd = double(cfg.dependence.rank) * cfg.dependence.d;
  switch (cfg.scenario) {
    case Scenario::isoreg:
      return lrd ? -rd / (2.0 + rd) : -1.0 / 3.0;
    case Scenario::grenander:
      return lrd ? -cfg.dependence.d / 2.0 : -1.0 / 3.0;
    case Scenario::isokernel: {
      if (lrd) return -rd / (2.0 + rd);
      const double bias_exp = 2.0 * cfg.bandwidth_exp;
      const double noise_exp = -(1.0 + cfg.bandwidth_exp) / 2.0;
      return std::max(bias_exp, noise_exp);
    }
    case Scenario::convexreg:
    case Scenario::convexdensity:
      return 2.0 * cfg.bandwidth_exp;
  }
  return 0.0;
}

double ks_distance_to_cdf(std::vector<double> sample,
                          const std::function<double(double)>& cdf) {
  detail::require(!sample.empty(), "ks_distance_to_cdf: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = double(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double F = cdf(sample[i]);
    d = std::max(d, std::abs(double(i + 1) / n - F));
    d = std::max(d, std::abs(double(i) / n - F));
  }
  return d;
}

namespace {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("GCMLAB_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : int(hw);
}

void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& body) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const int workers = std::min<std::size_t>(threads, count);
  pool.reserve(workers);
  std::atomic<bool> failed{false};
  std::string error_message;
  std::mutex error_mu;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count || failed.load()) return;
        try {
          body(i);
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lock(error_mu);
          failed.store(true);
          if (error_message.empty()) error_message = e.what();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failed.load()) throw std::runtime_error(error_message);
}

//! Per-n immutable context shared by all replications.
struct ScenarioContext {
  const ExperimentConfig* cfg = nullptr;
  std::size_t n = 0;
  std::size_t n_index = 0;
  double h = 0.0;
  double dn = 1.0;
  double c1 = 1.0;
  double truth_at_t0 = 0.0;   // centering value m(t0) / f(t0) / x'_bn(t0)
  double bias_const = 0.0;    // asymptotic bias (convex scenarios)
  double sigma_tilde = 1.0;   // sd of sum_{i<=ntilde} eps (integral stat)
  std::size_t i_star = 0;     // design index nearest t0 (isoreg)
  KernelSpec kernel = KernelSpec::epanechnikov();
  std::shared_ptr<StepKernelSmoother> truth_smoother;  // isokernel centering
  int thm5_regime = 0;  // isokernel: 0 = thm6 (h >> n^-1/3), 1 = thm5 (h ~ n^-1/3)
  double eta1_prime = 0.0;    // grenander LRD
};

struct RepOutput {
  double raw_err = 0.0;
  double integral_stat = 0.0;
  double small_bias_stat = 0.0;
};

std::vector<double> simulate_density_obs(const ExperimentConfig& cfg,
                                         std::size_t n, Rng& rng) {
  std::vector<double> obs(n);
  switch (cfg.dependence.kind) {
    case DependenceModel::Kind::iid:
      for (auto& t : obs) t = cfg.dens_truth.F_inv(rng.uniform01());
      return obs;
    case DependenceModel::Kind::ar1: {
      const auto x = gen_ar1(cfg.dependence, n, rng);
      const double marg_sd =
          cfg.dependence.sd / std::sqrt(1.0 - cfg.dependence.rho * cfg.dependence.rho);
      for (std::size_t i = 0; i < n; ++i)
        obs[i] = cfg.dens_truth.F_inv(norm_cdf(x[i] / marg_sd));
      return obs;
    }
    case DependenceModel::Kind::lrd: {
      const auto xi = gen_fgn(cfg.dependence.hurst(), n, rng);
      for (std::size_t i = 0; i < n; ++i)
        obs[i] = cfg.dens_truth.F_inv(norm_cdf(xi[i]));
      return obs;
    }
  }
  throw std::logic_error("unknown dependence kind");
}

RepOutput run_one_rep(const ScenarioContext& ctx, std::size_t rep) {
  const ExperimentConfig& cfg = *ctx.cfg;
  Rng rng(cfg.seed, replication_stream(ctx.n_index + 1, rep));
  RepOutput out;

  switch (cfg.scenario) {
    case Scenario::isoreg: {
      const auto eps = gen_errors(cfg.dependence, ctx.n, rng);
      std::vector<double> y(ctx.n);
      for (std::size_t i = 0; i < ctx.n; ++i)
        y[i] = cfg.reg_truth.m(double(i + 1) / double(ctx.n)) + eps[i];
      RegressionSample sample(std::move(y));
      const ConvexFit hull = gcm(cumulative_sum_diagram(sample));
      const double t_read = (double(ctx.i_star) - 0.5) / double(ctx.n);
      const double mhat = hull.slope_at(t_read);
      out.raw_err = mhat - ctx.truth_at_t0;
      if (cfg.record_integral_stat) {
        const double T_t0 = hull(cfg.t0);
        out.integral_stat = double(ctx.n) *
                            (T_t0 - cfg.reg_truth.M(cfg.t0)) / ctx.sigma_tilde;
      }
      return out;
    }
    case Scenario::isokernel: {
      const auto eps = gen_errors(cfg.dependence, ctx.n, rng);
      std::vector<double> y(ctx.n);
      for (std::size_t i = 0; i < ctx.n; ++i)
        y[i] = cfg.reg_truth.m(double(i + 1) / double(ctx.n)) + eps[i];
      RegressionSample sample(std::move(y));
      const IsotonizedKernelFit fit =
          isotonized_kernel_regression(sample, ctx.kernel, ctx.h);
      out.raw_err = fit(cfg.t0) - ctx.truth_at_t0;
      const GridFunction xn(fit.grid, fit.xn_values);
      out.small_bias_stat = fit.hull(cfg.t0) - xn(cfg.t0);
      return out;
    }
    case Scenario::convexreg: {
      const auto eps = gen_errors(cfg.dependence, ctx.n, rng);
      std::vector<double> y(ctx.n);
      for (std::size_t i = 0; i < ctx.n; ++i)
        y[i] = cfg.reg_truth.m(double(i + 1) / double(ctx.n)) + eps[i];
      RegressionSample sample(std::move(y));
      const ConvexRegressionFit fit =
          convexified_kernel_regression(sample, ctx.kernel, ctx.h);
      out.raw_err = fit.fit(cfg.t0) - ctx.truth_at_t0;
      return out;
    }
    case Scenario::grenander: {
      auto obs = simulate_density_obs(cfg, ctx.n, rng);
      DensitySample sample(std::move(obs), cfg.dens_truth.support());
      const GrenanderFit fit = grenander_increasing(sample);
      out.raw_err = fit(cfg.t0) - ctx.truth_at_t0;
      return out;
    }
    case Scenario::convexdensity: {
      auto obs = simulate_density_obs(cfg, ctx.n, rng);
      DensitySample sample(std::move(obs), cfg.dens_truth.support());
      const ConvexDensityFit fit =
          convex_density_estimate(sample, ctx.kernel, ctx.h);
      out.raw_err = fit.fit(cfg.t0) - ctx.truth_at_t0;
      return out;
    }
  }
  throw std::logic_error("unknown scenario");
}

ScenarioContext make_context(const ExperimentConfig& cfg, std::size_t n_index) {
  ScenarioContext ctx;
  ctx.cfg = &cfg;
  ctx.n_index = n_index;
  ctx.n = cfg.n_grid[n_index];
  ctx.kernel = KernelSpec::by_name(cfg.kernel_name);
  const double dn_n = double(ctx.n);
  const bool lrd = cfg.dependence.kind == DependenceModel::Kind::lrd;
  const bool mixing = cfg.dependence.kind == DependenceModel::Kind::ar1;
  const double noise_scale =
      lrd ? 0.0
          : (mixing ? std::sqrt(kappa_squared(cfg.dependence)) : cfg.dependence.sd);

  switch (cfg.scenario) {
    case Scenario::isoreg: {
      ctx.truth_at_t0 = cfg.reg_truth.m(cfg.t0);
      ctx.i_star = std::size_t(
          std::clamp<long long>(std::llround(dn_n * cfg.t0), 1, long(ctx.n)));
      if (lrd) {
        const double eta_r = hermite_coeff(cfg.dependence.g, cfg.dependence.rank);
        const auto tc = thm3_constants(3, cfg.reg_truth.m_prime(cfg.t0), 0.0,
                                       eta_r, cfg.dependence.rank,
                                       cfg.dependence.d);
        ctx.c1 = tc.c1;
        ctx.dn = std::pow(dn_n, tc.dn.n_exp);
      } else {
        const auto tc =
            thm3_constants(mixing ? 2 : 1, cfg.reg_truth.m_prime(cfg.t0),
                           noise_scale);
        ctx.c1 = tc.c1;
        ctx.dn = std::pow(dn_n, -1.0 / 3.0);
      }
      const double ntilde = std::floor(dn_n * cfg.t0 - 0.5);
      ctx.sigma_tilde =
          std::sqrt(variance_scale(cfg.dependence, std::max(1.0, ntilde)).sigma_n_sq);
      return ctx;
    }
    case Scenario::isokernel: {
      ctx.h = cfg.bandwidth_a * std::pow(dn_n, cfg.bandwidth_exp);
      std::vector<double> mvals(ctx.n);
      for (std::size_t i = 0; i < ctx.n; ++i)
        mvals[i] = cfg.reg_truth.m(double(i + 1) / dn_n);
      ctx.truth_smoother =
          std::make_shared<StepKernelSmoother>(mvals, ctx.kernel, ctx.h);
      ctx.thm5_regime = std::abs(cfg.bandwidth_exp + 1.0 / 3.0) < 1e-9 ? 1 : 0;
      if (ctx.thm5_regime == 1) {
        ctx.dn = std::pow(dn_n, -1.0 / 3.0);
      } else if (cfg.bandwidth_exp > -1.0 / 3.0) {
        ctx.dn = 1.0 / std::sqrt(dn_n * ctx.h);  // Theorem 6 rate (nh)^{-1/2}
      } else {
        ctx.dn = std::pow(dn_n, -1.0 / 3.0);  // isotonic-regression regime
      }
      ctx.c1 = 1.0;
      ctx.truth_at_t0 = ctx.truth_smoother->derivative(cfg.t0);
      return ctx;
    }
    case Scenario::convexreg: {
      ctx.h = cfg.bandwidth_a * std::pow(dn_n, cfg.bandwidth_exp);
      ctx.dn = ctx.h * ctx.h;  // errors scale as d_n^2 with d_n = h
      ctx.c1 = 1.0;
      ctx.truth_at_t0 = cfg.reg_truth.m(cfg.t0);
      ctx.bias_const =
          0.5 * cfg.reg_truth.m_second() * ctx.kernel.second_moment();
      return ctx;
    }
    case Scenario::grenander: {
      ctx.truth_at_t0 = cfg.dens_truth.f(cfg.t0);
      if (lrd) {
        ctx.eta1_prime = norm_ppf(cfg.dens_truth.F(cfg.t0)) *
                         cfg.dens_truth.f(cfg.t0);
        ctx.c1 = 1.0 / std::abs(ctx.eta1_prime);
        ctx.dn = std::pow(dn_n, -cfg.dependence.d / 2.0);
      } else {
        const auto tc = thm10_constants(cfg.dens_truth.f(cfg.t0),
                                        cfg.dens_truth.f_prime(cfg.t0));
        ctx.c1 = tc.c1;
        ctx.dn = std::pow(dn_n, -1.0 / 3.0);
      }
      return ctx;
    }
    case Scenario::convexdensity: {
      ctx.h = cfg.bandwidth_a * std::pow(dn_n, cfg.bandwidth_exp);
      ctx.dn = ctx.h * ctx.h;
      ctx.c1 = 1.0;
      ctx.truth_at_t0 = cfg.dens_truth.f(cfg.t0);
      ctx.bias_const =
          0.5 * ctx.kernel.second_moment() * cfg.dens_truth.f_second(cfg.t0);
      return ctx;
    }
  }
  throw std::logic_error("unknown scenario");
}

//! Limit-law reference draws for the two-sample KS columns.
std::vector<double> make_limit_reference(const ExperimentConfig& cfg,
                                         std::size_t R) {
  const std::uint64_t ref_seed = cfg.seed ^ 0x9E3779B97F4A7C15ull;
  const bool lrd = cfg.dependence.kind == DependenceModel::Kind::lrd;
  const bool mixing = cfg.dependence.kind == DependenceModel::Kind::ar1;
  const KernelSpec kernel = KernelSpec::by_name(cfg.kernel_name);

  switch (cfg.scenario) {
    case Scenario::isoreg:
    case Scenario::grenander: {
      if (lrd) {
        if (cfg.scenario == Scenario::grenander) {
          // Theorem 11: standard normal limit (one-sample KS elsewhere)
          return {};
        }
        if (cfg.dependence.rank != 1) return {};
        LimitSpec spec;
        spec.p = 2.0;
        spec.A = 1.0;
        spec.driver = LimitDriver::fractional(cfg.dependence.hurst());
        std::vector<double> out;
        out.reserve(R);
        for (const auto& d : sample_limit_batch(spec, R, ref_seed))
          out.push_back(d.argmin);
        return out;
      }
      return chernoff_sample(R, 4.0, 1.0 / 512.0, ref_seed);
    }
    case Scenario::isokernel: {
      const double bexp = cfg.bandwidth_exp;
      if (std::abs(bexp + 1.0 / 3.0) < 1e-9) {
        // Theorem 5: slope of the hull of A s^2 + kernel-smoothed driver
        const double a = cfg.bandwidth_a;
        const double noise =
            lrd ? std::abs(hermite_coeff(cfg.dependence.g, cfg.dependence.rank))
                : (mixing ? std::sqrt(kappa_squared(cfg.dependence))
                          : cfg.dependence.sd);
        const auto tc = thm5_constants(lrd ? 3 : (mixing ? 2 : 1),
                                       cfg.reg_truth.m_prime(cfg.t0), noise, a);
        LimitSpec spec;
        spec.p = 2.0;
        spec.A = tc.A;
        spec.driver = LimitDriver::kernel_smoothed(
            LimitDriver::Weight::k, kernel, tc.driver_scale,
            lrd ? cfg.dependence.hurst() : 0.5);
        spec.c_max = 4.0;
        spec.delta = 1.0 / 256.0;
        std::vector<double> out;
        out.reserve(R);
        for (const auto& d : sample_limit_batch(spec, R, ref_seed))
          out.push_back(d.slope);
        return out;
      }
      if (bexp > -1.0 / 3.0 && !lrd) {
        // Theorem 6: N(0, noise^2 int k^2) sample
        const double noise = mixing ? std::sqrt(kappa_squared(cfg.dependence))
                                    : cfg.dependence.sd;
        const auto tc = thm6_constants(mixing ? 2 : 1, noise, kernel);
        std::vector<double> out(R);
        Rng rng(ref_seed, 1);
        for (auto& v : out) v = rng.normal(0.0, tc.limit_sd);
        return out;
      }
      return {};
    }
    case Scenario::convexreg:
    case Scenario::convexdensity: {
      if (lrd) return {};
      const double a = cfg.bandwidth_a;
      ThmConstants tc;
      const double noise = mixing ? std::sqrt(kappa_squared(cfg.dependence))
                                  : cfg.dependence.sd;
      if (cfg.scenario == Scenario::convexreg) {
        tc = thm4_constants(mixing ? 2 : 1, cfg.reg_truth.m_second(), noise, a,
                            kernel);
      } else {
        tc = thm12_constants(cfg.dens_truth.f(cfg.t0),
                             cfg.dens_truth.f_second(cfg.t0), a, kernel);
      }
      LimitSpec spec;
      spec.p = 2.0;
      spec.A = tc.A;
      spec.driver = LimitDriver::kernel_smoothed(LimitDriver::Weight::k_prime,
                                                 kernel, tc.driver_scale);
      spec.c_max = 4.0;
      spec.delta = 1.0 / 256.0;
      std::vector<double> out;
      out.reserve(R);
      for (const auto& d : sample_limit_batch(spec, R, ref_seed))
        out.push_back(tc.bias + d.driver_offset + d.t_value);
      return out;
    }
  }
  return {};
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const int threads = resolve_threads(cfg.threads);

  ExperimentReport report;
  report.scenario = scenario_name(cfg.scenario);
  report.seed = cfg.seed;
  report.target_exponent = theoretical_exponent(cfg);

  const std::size_t R = cfg.replications;
  if (cfg.compute_ks) {
    report.limit_reference = make_limit_reference(cfg, R);
    std::sort(report.limit_reference.begin(), report.limit_reference.end());
  }

  std::vector<double> ns, medians;
  for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
    const ScenarioContext ctx = make_context(cfg, ni);
    std::vector<RepOutput> reps(R);
    parallel_for(R, threads,
                 [&](std::size_t r) { reps[r] = run_one_rep(ctx, r); });

    PerNResult res;
    res.n = ctx.n;
    res.bandwidth = ctx.h;
    res.dn = ctx.dn;
    res.c1 = ctx.c1;
    res.scaled_errors.resize(R);
    std::vector<double> abs_raw(R);
    double msq = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
      res.scaled_errors[r] = ctx.c1 * reps[r].raw_err / ctx.dn;
      abs_raw[r] = std::abs(reps[r].raw_err);
      msq += reps[r].raw_err * reps[r].raw_err;
    }
    res.mean_sq_raw = msq / double(R);
    res.median_abs_raw = median(abs_raw);
    std::sort(res.scaled_errors.begin(), res.scaled_errors.end());

    if (cfg.scenario == Scenario::convexreg ||
        cfg.scenario == Scenario::convexdensity) {
      res.scaled_errors_debiased = res.scaled_errors;
      for (auto& v : res.scaled_errors_debiased) v -= ctx.bias_const;
    }
    if (cfg.scenario == Scenario::isoreg && cfg.record_integral_stat) {
      res.integral_stats.resize(R);
      for (std::size_t r = 0; r < R; ++r)
        res.integral_stats[r] = reps[r].integral_stat;
      std::sort(res.integral_stats.begin(), res.integral_stats.end());
    }
    if (cfg.scenario == Scenario::isokernel) {
      res.scaled_errors_debiased.resize(R);  // holds the small-bias statistic
      for (std::size_t r = 0; r < R; ++r)
        res.scaled_errors_debiased[r] = reps[r].small_bias_stat;
      std::sort(res.scaled_errors_debiased.begin(),
                res.scaled_errors_debiased.end());
    }

    res.quantile05 = quantile(res.scaled_errors, 0.05);
    res.quantile25 = quantile(res.scaled_errors, 0.25);
    res.quantile75 = quantile(res.scaled_errors, 0.75);
    res.quantile95 = quantile(res.scaled_errors, 0.95);

    if (cfg.compute_ks) {
      const bool lrd_grenander =
          cfg.scenario == Scenario::grenander &&
          cfg.dependence.kind == DependenceModel::Kind::lrd;
      if (lrd_grenander) {
        res.ks_vs_limit = ks_distance_to_cdf(res.scaled_errors, norm_cdf);
      } else if (!report.limit_reference.empty()) {
        res.ks_vs_limit =
            ks_distance(res.scaled_errors, report.limit_reference);
      }
    }

    ns.push_back(double(ctx.n));
    medians.push_back(res.median_abs_raw);
    report.per_n.push_back(std::move(res));
  }

  if (cfg.n_grid.size() >= 3) {
    report.rate = rate_regression(ns, medians);
  } else {
    report.rate.slope = std::numeric_limits<double>::quiet_NaN();
  }

  if (cfg.scenario == Scenario::isoreg && cfg.record_integral_stat &&
      cfg.dependence.kind != DependenceModel::Kind::lrd) {
    report.integral_ks =
        ks_distance_to_cdf(report.per_n.back().integral_stats, norm_cdf);
  }

  // tolerance gating
  if (cfg.tolerances.exponent_tol) {
    const double diff = std::abs(report.rate.slope - report.target_exponent);
    if (!(diff <= *cfg.tolerances.exponent_tol)) {
      report.pass = false;
      std::ostringstream os;
      os << "rate exponent " << report.rate.slope << " differs from target "
         << report.target_exponent << " by " << diff << " > "
         << *cfg.tolerances.exponent_tol;
      report.failures.push_back(os.str());
    }
  }
  if (cfg.tolerances.ks_tol) {
    const double ks = report.per_n.back().ks_vs_limit;
    if (!(ks >= 0.0 && ks <= *cfg.tolerances.ks_tol)) {
      report.pass = false;
      std::ostringstream os;
      os << "KS vs limit " << ks << " exceeds " << *cfg.tolerances.ks_tol
         << " at n = " << report.per_n.back().n;
      report.failures.push_back(os.str());
    }
  }

  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return report;
}

}  // namespace gcmlab
