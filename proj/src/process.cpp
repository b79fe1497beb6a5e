#include "gcmlab/process.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "gcmlab/estimators.hpp"
#include "gcmlab/fft.hpp"

namespace gcmlab {

DependenceModel DependenceModel::iid(double sd) {
  detail::require(sd > 0.0 && std::isfinite(sd), "iid model: sd must be > 0");
  DependenceModel m;
  m.kind = Kind::iid;
  m.sd = sd;
  return m;
}

DependenceModel DependenceModel::ar1(double rho, double innovation_sd) {
  detail::require(std::abs(rho) < 1.0, "ar1 model: |rho| < 1 required");
  detail::require(innovation_sd > 0.0, "ar1 model: innovation sd must be > 0");
  DependenceModel m;
  m.kind = Kind::ar1;
  m.rho = rho;
  m.sd = innovation_sd;
  return m;
}

DependenceModel DependenceModel::lrd(double d, Subordination g, int rank) {
  detail::require(rank >= 1, "lrd model: rank must be >= 1");
  detail::require(d > 0.0 && d * rank < 1.0,
                  "lrd model: need 0 < d < 1/rank");
  DependenceModel m;
  m.kind = Kind::lrd;
  m.d = d;
  m.g = std::move(g);
  m.rank = rank;
  return m;
}

DependenceModel DependenceModel::lrd_hurst(double H, Subordination g, int rank) {
  detail::require(H > 0.5 && H < 1.0, "lrd model: need 1/2 < H < 1");
  return lrd(2.0 - 2.0 * H, std::move(g), rank);
}

std::vector<double> gen_iid(const DependenceModel& model, std::size_t n,
                            Rng& rng) {
  std::vector<double> out(n);
  for (auto& v : out) v = rng.normal(0.0, model.sd);
  return out;
}

std::vector<double> gen_ar1(const DependenceModel& model, std::size_t n,
                            Rng& rng) {
  detail::require(model.kind == DependenceModel::Kind::ar1,
                  "gen_ar1: not an ar1 model");
  const double marginal_sd =
      model.sd / std::sqrt(1.0 - model.rho * model.rho);
  std::vector<double> out(n);
  double x = rng.normal(0.0, marginal_sd);  // stationary initialization
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) x = model.rho * x + rng.normal(0.0, model.sd);
    out[i] = x;
  }
  return out;
}

double fgn_autocov(double H, std::size_t k) {
  if (k == 0) return 1.0;
  const double kk = double(k);
  return 0.5 * (std::pow(kk + 1.0, 2.0 * H) - 2.0 * std::pow(kk, 2.0 * H) +
                std::pow(kk - 1.0, 2.0 * H));
}

namespace {

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

struct FgnPlan {
  std::size_t M;
  std::vector<double> sqrt_eigs;  // sqrt(lambda_j / M)
};

const FgnPlan& fgn_plan(double H, std::size_t n) {
  static std::map<std::pair<double, std::size_t>, std::unique_ptr<FgnPlan>> cache;
  static std::mutex mu;
  const std::size_t N = std::max<std::size_t>(next_pow2(n), 2);
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{H, N}];
  if (!slot) {
    auto plan = std::make_unique<FgnPlan>();
    plan->M = 2 * N;
    std::vector<double> lambda = fgn_embedding_eigenvalues(H, n);
    plan->sqrt_eigs.resize(plan->M);
    double max_l = 0.0, min_l = 0.0;
    for (double l : lambda) {
      max_l = std::max(max_l, l);
      min_l = std::min(min_l, l);
    }
    if (min_l < -1e-9 * std::max(1.0, max_l))
      throw std::runtime_error(
          "gen_fgn: circulant embedding not nonnegative definite");
    for (std::size_t j = 0; j < plan->M; ++j)
      plan->sqrt_eigs[j] = std::sqrt(std::max(lambda[j], 0.0) / double(plan->M));
    slot = std::move(plan);
  }
  return *slot;
}

}  // namespace

std::vector<double> fgn_embedding_eigenvalues(double H, std::size_t n) {
  detail::require(H > 0.0 && H < 1.0, "gen_fgn: need 0 < H < 1");
  const std::size_t N = std::max<std::size_t>(next_pow2(n), 2);
  const std::size_t M = 2 * N;
  std::vector<std::complex<double>> c(M);
  for (std::size_t j = 0; j <= N; ++j) c[j] = fgn_autocov(H, j);
  for (std::size_t j = N + 1; j < M; ++j) c[j] = fgn_autocov(H, M - j);
  fft_pow2(c, false);
  std::vector<double> lambda(M);
  for (std::size_t j = 0; j < M; ++j) lambda[j] = c[j].real();
  return lambda;
}

std::vector<double> gen_fgn(double H, std::size_t n, Rng& rng) {
  detail::require(n >= 1, "gen_fgn: n >= 1 required");
  detail::require(H > 0.0 && H < 1.0, "gen_fgn: need 0 < H < 1");
  if (H == 0.5) {
    std::vector<double> out(n);
    for (auto& v : out) v = rng.normal();
    return out;
  }
  const FgnPlan& plan = fgn_plan(H, n);
  const std::size_t M = plan.M;
  std::vector<std::complex<double>> a(M);
  a[0] = plan.sqrt_eigs[0] * rng.normal();
  a[M / 2] = plan.sqrt_eigs[M / 2] * rng.normal();
  const double inv_sqrt2 = 0.70710678118654752440;
  for (std::size_t j = 1; j < M / 2; ++j) {
    const double re = rng.normal() * inv_sqrt2;
    const double im = rng.normal() * inv_sqrt2;
    a[j] = plan.sqrt_eigs[j] * std::complex<double>(re, im);
    a[M - j] = std::conj(a[j]);
  }
  fft_pow2(a, false);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i].real();
  return out;
}

std::vector<double> subordinate(const std::vector<double>& xi,
                                const Subordination& g) {
  const double center = hermite_coeff(g, 0);
  std::vector<double> out(xi.size());
  for (std::size_t i = 0; i < xi.size(); ++i) out[i] = g(xi[i]) - center;
  return out;
}

std::vector<double> gen_errors(const DependenceModel& model, std::size_t n,
                               Rng& rng) {
  switch (model.kind) {
    case DependenceModel::Kind::iid:
      return gen_iid(model, n, rng);
    case DependenceModel::Kind::ar1:
      return gen_ar1(model, n, rng);
    case DependenceModel::Kind::lrd: {
      std::vector<double> xi = gen_fgn(model.hurst(), n, rng);
      if (model.g.kind == Subordination::Kind::identity) return xi;
      return subordinate(xi, model.g);
    }
  }
  throw std::logic_error("gen_errors: unknown model kind");
}

double kappa_squared(const DependenceModel& model) {
  switch (model.kind) {
    case DependenceModel::Kind::iid:
      return model.sd * model.sd;
    case DependenceModel::Kind::ar1: {
      const double denom = (1.0 - model.rho) * (1.0 - model.rho);
      return model.sd * model.sd / denom;
    }
    case DependenceModel::Kind::lrd:
      throw std::domain_error(
          "kappa_squared: undefined under long range dependence "
          "(sum |Cov(k)| diverges)");
  }
  throw std::logic_error("kappa_squared: unknown model kind");
}

double sigma_n_lrd(double n, int r, double d, double eta_r, double l0) {
  detail::require(r >= 1, "sigma_n_lrd: rank must be >= 1");
  if (!(r * d > 0.0 && r * d < 1.0))
    throw std::domain_error("sigma_n_lrd: need 0 < r d < 1");
  double r_fact = 1.0;
  for (int j = 2; j <= r; ++j) r_fact *= double(j);
  const double rd = double(r) * d;
  const double l1 = 2.0 / (r_fact * (1.0 - rd) * (2.0 - rd)) * std::pow(l0, r);
  return eta_r * eta_r * std::pow(n, 2.0 - rd) * l1;
}

double l0_fgn(double H) { return H * (2.0 * H - 1.0); }

VarianceScale variance_scale(const DependenceModel& model, double n) {
  switch (model.kind) {
    case DependenceModel::Kind::iid:
      return {model.sd * model.sd * n, 0.5, model.kind};
    case DependenceModel::Kind::ar1: {
      // Var(sum) = Var [n + 2 rho (n(1-rho) - (1-rho^n)) / (1-rho)^2]
      const double var = model.sd * model.sd / (1.0 - model.rho * model.rho);
      const double rho = model.rho;
      const double geom =
          rho * (double(n) * (1.0 - rho) - (1.0 - std::pow(rho, n))) /
          ((1.0 - rho) * (1.0 - rho));
      return {var * (double(n) + 2.0 * geom), 0.5, model.kind};
    }
    case DependenceModel::Kind::lrd: {
      const double eta_r = hermite_coeff(model.g, model.rank);
      const double s2 = sigma_n_lrd(n, model.rank, model.d, eta_r,
                                    l0_fgn(model.hurst()));
      return {s2, 1.0 - model.rank * model.d / 2.0, model.kind};
    }
  }
  throw std::logic_error("variance_scale: unknown model kind");
}

GridFunction partial_sum_process(const std::vector<double>& eps_two_sided,
                                 double sigma_n) {
  detail::require(sigma_n > 0.0, "partial_sum_process: sigma_n must be > 0");
  detail::require(eps_two_sided.size() % 2 == 1,
                  "partial_sum_process: need an odd-length two-sided array");
  const std::size_t n = eps_two_sided.size() / 2;
  detail::require(n >= 1, "partial_sum_process: need n >= 1");
  const auto eps = [&](long i) { return eps_two_sided[std::size_t(long(n) + i)]; };

  std::vector<double> knots(2 * n + 1), values(2 * n + 1);
  const double dn = double(n);
  // i = 0 knot: eps_0 / 2
  double acc = eps(0) / 2.0;
  knots[n] = 0.5 / dn;
  values[n] = acc / sigma_n;
  for (long i = 1; i <= long(n); ++i) {
    acc += eps(i);
    knots[std::size_t(long(n) + i)] = (double(i) + 0.5) / dn;
    values[std::size_t(long(n) + i)] = acc / sigma_n;
  }
  acc = -eps(0) / 2.0;
  for (long i = -1; i >= -long(n); --i) {
    knots[std::size_t(long(n) + i)] = (double(i) + 0.5) / dn;
    values[std::size_t(long(n) + i)] = acc / sigma_n;
    acc -= eps(i);  // prepare the next (more negative) value
  }
  return GridFunction(std::move(knots), std::move(values));
}

GridFunction rescale_local(const GridFunction& v, double t0, double dn,
                           double p) {
  detail::require(dn > 0.0, "rescale_local: dn must be > 0");
  detail::require(p > 1.0, "rescale_local: p must be > 1");
  if (t0 <= v.front_knot() || t0 >= v.back_knot())
    throw std::domain_error("rescale_local: t0 not interior to the domain");
  const double v0 = v(t0);
  const double scale = std::pow(dn, -p);
  std::vector<double> knots, values;
  knots.reserve(v.size() + 1);
  bool zero_inserted = false;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double s = (v.knots()[i] - t0) / dn;
    if (!zero_inserted && s >= 0.0) {
      if (s > 0.0) {
        knots.push_back(0.0);
        values.push_back(0.0);
      }
      zero_inserted = true;
    }
    knots.push_back(s);
    values.push_back(scale * (v.values()[i] - v0));
  }
  return GridFunction(std::move(knots), std::move(values), v.interp());
}

LocalEmpiricalProcess local_empirical_process(
    const std::vector<double>& observations, double t0, double delta_n,
    const std::function<double(double)>& cdf, double s_max, double ds,
    std::optional<double> plugin_bandwidth) {
  detail::require(delta_n > 0.0, "local_empirical_process: delta_n must be > 0");
  detail::require(!observations.empty(), "local_empirical_process: empty sample");
  std::vector<double> sorted = observations;
  std::sort(sorted.begin(), sorted.end());
  const double n = double(sorted.size());

  const double h =
      plugin_bandwidth.value_or(std::pow(n, -0.2));
  const double fhat = kernel_density_at(sorted, KernelSpec::epanechnikov(), h, t0);
  if (!(fhat > 0.0))
    throw std::runtime_error(
        "local_empirical_process: plug-in density at t0 is nonpositive, "
        "normalization degenerate");
  const double sigma = std::sqrt(n * delta_n * fhat);

  const auto count_le = [&](double t) {
    return double(std::upper_bound(sorted.begin(), sorted.end(), t) -
                  sorted.begin());
  };
  const double count0 = count_le(t0);
  const double F0 = cdf(t0);

  const std::size_t G = std::size_t(std::llround(2.0 * s_max / ds)) + 1;
  std::vector<double> knots(G), values(G);
  for (std::size_t g = 0; g < G; ++g) {
    const double s = -s_max + double(g) * ds;
    const double t = t0 + s * delta_n;
    knots[g] = s;
    values[g] = ((count_le(t) - count0) - n * (cdf(t) - F0)) / sigma;
  }
  return {GridFunction(std::move(knots), std::move(values)), sigma, fhat};
}

}  // namespace gcmlab
