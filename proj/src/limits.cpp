#include "gcmlab/limits.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include "gcmlab/grid_function.hpp"
#include "gcmlab/hull.hpp"
#include "gcmlab/process.hpp"

namespace gcmlab {

LimitDriver LimitDriver::brownian(double scale) {
  LimitDriver d;
  d.kind = Kind::bm;
  d.scale = scale;
  return d;
}

LimitDriver LimitDriver::fractional(double H, double scale) {
  detail::require(H > 0.0 && H < 1.0, "LimitDriver: need 0 < H < 1");
  LimitDriver d;
  d.kind = Kind::fbm;
  d.H = H;
  d.scale = scale;
  return d;
}

LimitDriver LimitDriver::linear_drift(double z_sd) {
  LimitDriver d;
  d.kind = Kind::linear;
  d.z_sd = z_sd;
  return d;
}

LimitDriver LimitDriver::kernel_smoothed(Weight w, KernelSpec kernel,
                                         double scale, double H) {
  LimitDriver d;
  d.kind = (H == 0.5) ? Kind::kernel_bm : Kind::kernel_fbm;
  d.weight = w;
  d.kernel = std::move(kernel);
  d.scale = scale;
  d.H = H;
  return d;
}

LimitDriver LimitDriver::rosenblatt_like(double d_mem, Subordination g, int rank,
                                         double scale) {
  detail::require(rank >= 2, "rosenblatt_like: rank >= 2 (use fbm for rank 1)");
  detail::require(d_mem > 0.0 && d_mem * rank < 1.0,
                  "rosenblatt_like: need 0 < d < 1/rank");
  LimitDriver d;
  d.kind = Kind::subordinated;
  d.H = 1.0 - d_mem / 2.0;
  d.g = std::move(g);
  d.rank = rank;
  d.scale = scale;
  return d;
}

double LimitDriver::beta() const {
  switch (kind) {
    case Kind::none:
    case Kind::bm:
    case Kind::kernel_bm:
      return 0.5;
    case Kind::fbm:
    case Kind::kernel_fbm:
      return H;
    case Kind::linear:
      return 1.0;
    case Kind::subordinated:
      return 1.0 - double(rank) * (2.0 - 2.0 * H) / 2.0;
  }
  return 0.5;
}

void LimitSpec::validate() const {
  detail::require(p > 1.0, "LimitSpec: p > 1 required");
  detail::require(A > 0.0, "LimitSpec: A > 0 required");
  detail::require(c_max > 0.0 && delta > 0.0, "LimitSpec: grid must be positive");
  detail::require(delta < c_max / 4.0, "LimitSpec: delta must be << c_max");
}

namespace {

std::vector<double> symmetric_grid(double c, double delta, std::size_t* zero_idx) {
  const std::size_t m = std::size_t(std::llround(c / delta));
  std::vector<double> s(2 * m + 1);
  for (std::size_t j = 0; j < s.size(); ++j)
    s[j] = (double(j) - double(m)) * delta;
  *zero_idx = m;
  return s;
}

// Path of the underlying w on a symmetric grid of spacing delta, half-width
// index m (so 2m+1 values). BM and exact two-sided fBm.
std::vector<double> sample_path(LimitDriver::Kind kind, double H, double delta,
                                std::size_t m, Rng& rng) {
  std::vector<double> w(2 * m + 1, 0.0);
  if (kind == LimitDriver::Kind::bm || H == 0.5) {
    const double sd = std::sqrt(delta);
    double acc = 0.0;
    for (std::size_t j = m + 1; j < w.size(); ++j) {
      acc += sd * rng.normal();
      w[j] = acc;
    }
    acc = 0.0;
    for (std::size_t j = m; j-- > 0;) {
      acc -= sd * rng.normal();
      w[j] = acc;
    }
    return w;
  }
  // fBm: one stationary fGn increment sequence across both sides keeps the
  // exact joint law of the two halves.
  const double sd = std::pow(delta, H);
  std::vector<double> xi = gen_fgn(H, 2 * m, rng);
  double acc = 0.0;
  for (std::size_t j = m + 1; j < w.size(); ++j) {
    acc += sd * xi[j - 1];  // increment over ((j-1)-m, j-m]
    w[j] = acc;
  }
  acc = 0.0;
  for (std::size_t j = m; j-- > 0;) {
    acc -= sd * xi[j];
    w[j] = acc;
  }
  return w;
}

struct SubordinatedPlan {
  GridFunction psp;  // two-sided partial-sum polygon of g(fGn) / sigma_n
};

// sigma_n^2 of subordinated sums via the Hermite expansion of the
// autocovariance: Cov(g(xi_0), g(xi_k)) = sum_j eta_j^2 gamma(k)^j / j!.
double subordinated_sigma_sq(const std::vector<double>& etas, double H,
                             std::size_t n) {
  std::vector<double> covs(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double gam = fgn_autocov(H, k);
    double g_pow = 1.0, fact = 1.0, c = 0.0;
    for (std::size_t j = 1; j < etas.size(); ++j) {
      g_pow *= gam;
      fact *= double(j);
      c += etas[j] * etas[j] * g_pow / fact;
    }
    covs[k] = c;
  }
  double var = double(n) * covs[0];
  for (std::size_t k = 1; k < n; ++k)
    var += 2.0 * double(n - k) * covs[k];
  return var;
}

}  // namespace

GridFunction sample_two_sided_bm(double c_max, double delta, double scale,
                                 Rng& rng) {
  std::size_t m = 0;
  std::vector<double> s = symmetric_grid(c_max, delta, &m);
  std::vector<double> w = sample_path(LimitDriver::Kind::bm, 0.5, delta, m, rng);
  for (auto& v : w) v *= scale;
  return GridFunction(std::move(s), std::move(w));
}

GridFunction sample_two_sided_fbm(double H, double c_max, double delta,
                                  double scale, Rng& rng) {
  detail::require(H > 0.0 && H < 1.0, "sample_two_sided_fbm: need 0 < H < 1");
  std::size_t m = 0;
  std::vector<double> s = symmetric_grid(c_max, delta, &m);
  std::vector<double> w = sample_path(LimitDriver::Kind::fbm, H, delta, m, rng);
  for (auto& v : w) v *= scale;
  return GridFunction(std::move(s), std::move(w));
}

namespace {

struct RawDraw {
  LimitDraw draw;
  bool stable = true;
};

RawDraw draw_once(const LimitSpec& spec, double c, Rng& rng) {
  std::size_t zero = 0;
  std::vector<double> s = symmetric_grid(c, spec.delta, &zero);
  const std::size_t G = s.size();
  std::vector<double> vt(G, 0.0);
  double offset = 0.0;

  const LimitDriver& drv = spec.driver;
  switch (drv.kind) {
    case LimitDriver::Kind::none:
      break;
    case LimitDriver::Kind::bm:
    case LimitDriver::Kind::fbm: {
      std::vector<double> w =
          sample_path(drv.kind, drv.H, spec.delta, zero, rng);
      for (std::size_t j = 0; j < G; ++j) vt[j] = drv.scale * w[j];
      break;
    }
    case LimitDriver::Kind::linear: {
      const double z = rng.normal(0.0, drv.z_sd);
      for (std::size_t j = 0; j < G; ++j) vt[j] = z * s[j];
      break;
    }
    case LimitDriver::Kind::kernel_bm:
    case LimitDriver::Kind::kernel_fbm: {
      // Path on the grid extended by the kernel support [-1, 1].
      const std::size_t K = std::size_t(std::llround(1.0 / spec.delta));
      const std::size_t me = zero + K;
      std::vector<double> w = sample_path(
          drv.kind == LimitDriver::Kind::kernel_bm ? LimitDriver::Kind::bm
                                                   : LimitDriver::Kind::fbm,
          drv.H, spec.delta, me, rng);
      std::vector<double> weights(2 * K + 1);
      for (std::size_t j = 0; j <= 2 * K; ++j) {
        const double u = (double(j) - double(K)) * spec.delta;
        const double kv = drv.weight == LimitDriver::Weight::k_prime
                              ? drv.kernel.k_prime(u)
                              : drv.kernel.k(u);
        const double trap = (j == 0 || j == 2 * K) ? 0.5 : 1.0;
        weights[j] = kv * trap * spec.delta;
      }
      // w(-u_j) at grid index me - j + K = me + K - j
      double off = 0.0;
      for (std::size_t j = 0; j <= 2 * K; ++j)
        off += weights[j] * w[me + K - j];
      offset = drv.scale * off;
      for (std::size_t i = 0; i < G; ++i) {
        // s_i - u_j at extended index (i + K) + (K - j)
        double acc = 0.0;
        const std::size_t base = i + 2 * K;
        for (std::size_t j = 0; j <= 2 * K; ++j)
          acc += weights[j] * w[base - j];
        vt[i] = drv.scale * (acc - off);
      }
      break;
    }
    case LimitDriver::Kind::subordinated: {
      const std::size_t nn = drv.n_approx;
      std::vector<double> xi = gen_fgn(drv.H, 2 * nn + 1, rng);
      std::vector<double> eps = subordinate(xi, drv.g);
      static std::map<std::pair<double, std::size_t>, double> sigma_cache;
      static std::mutex mu;
      double sigma_sq = 0.0;
      {
        std::lock_guard<std::mutex> lock(mu);
        auto key = std::make_pair(drv.H, nn);
        auto it = sigma_cache.find(key);
        if (it == sigma_cache.end()) {
          const auto etas = hermite_coeffs(drv.g, 12);
          it = sigma_cache.emplace(key,
                                   subordinated_sigma_sq(etas, drv.H, nn))
                   .first;
        }
        sigma_sq = it->second;
      }
      GridFunction psp = partial_sum_process(eps, std::sqrt(sigma_sq));
      const double cb = std::pow(c, drv.beta());
      for (std::size_t j = 0; j < G; ++j)
        vt[j] = drv.scale * cb * psp.eval_clamped(s[j] / c);
      const double v0 = vt[zero];  // vtilde(0) = 0 by definition
      for (auto& v : vt) v -= v0;
      break;
    }
  }

  std::vector<double> y(G);
  for (std::size_t j = 0; j < G; ++j)
    y[j] = spec.A * std::pow(std::abs(s[j]), spec.p) + vt[j];

  GridFunction yg(s, y);
  const ConvexFit hull = gcm(yg);

  RawDraw out;
  out.draw.t_value = hull(0.0);
  out.draw.slope = hull.slope_at(0.0);
  std::size_t imin = 0;
  for (std::size_t j = 1; j < G; ++j)
    if (y[j] < y[imin]) imin = j;
  out.draw.argmin = s[imin];
  out.draw.driver_offset = offset;
  out.draw.c_max_used = c;

  // Hull touch points bracketing 0 must stay in [-c/2, c/2].
  double left = -c, right = c;
  for (std::size_t j = 0; j < hull.knots.size(); ++j) {
    if (hull.knots[j] <= 0.0) left = hull.knots[j];
    if (hull.knots[j] >= 0.0) {
      right = hull.knots[j];
      break;
    }
  }
  out.stable = (std::abs(left) <= c / 2.0 && std::abs(right) <= c / 2.0);

  if (spec.keep_path) {
    out.draw.path_s = std::move(s);
    out.draw.path_y = std::move(y);
  }
  return out;
}

}  // namespace

LimitDraw sample_limit_functional(const LimitSpec& spec, Rng& rng) {
  spec.validate();

  const bool self_similar = spec.driver.kind == LimitDriver::Kind::bm ||
                            spec.driver.kind == LimitDriver::Kind::fbm;
  if (spec.standardize && self_similar) {
    const double beta = spec.driver.beta();
    const double lambda = std::pow(spec.driver.scale / spec.A,
                                   1.0 / (spec.p - beta));
    const double mu = spec.A * std::pow(lambda, spec.p);
    LimitSpec std_spec = spec;
    std_spec.A = 1.0;
    std_spec.driver.scale = 1.0;
    std_spec.standardize = false;
    LimitDraw d = sample_limit_functional(std_spec, rng);
    d.t_value *= mu;
    d.slope *= mu / lambda;
    d.argmin *= lambda;
    return d;
  }

  double c = spec.c_max;
  RawDraw rd;
  for (int attempt = 0; attempt < 3; ++attempt) {
    rd = draw_once(spec, c, rng);
    if (rd.stable) {
      rd.draw.flagged = false;
      return rd.draw;
    }
    c *= 2.0;
  }
  rd.draw.flagged = true;
  return rd.draw;
}

std::vector<LimitDraw> sample_limit_batch(const LimitSpec& spec, std::size_t R,
                                          std::uint64_t seed) {
  std::vector<LimitDraw> out;
  out.reserve(R);
  for (std::size_t r = 0; r < R; ++r) {
    Rng rng(seed, r);
    out.push_back(sample_limit_functional(spec, rng));
  }
  return out;
}

std::vector<double> chernoff_sample(std::size_t R, double c_max, double delta,
                                    std::uint64_t seed) {
  std::vector<double> out;
  out.reserve(R);
  std::size_t zero = 0;
  std::vector<double> s = symmetric_grid(c_max, delta, &zero);
  std::vector<double> y(s.size());
  for (std::size_t r = 0; r < R; ++r) {
    Rng rng(seed, r);
    std::vector<double> w =
        sample_path(LimitDriver::Kind::bm, 0.5, delta, zero, rng);
    std::size_t imin = 0;
    for (std::size_t j = 0; j < s.size(); ++j) {
      y[j] = s[j] * s[j] + w[j];
      if (y[j] < y[imin]) imin = j;
    }
    out.push_back(s[imin]);
  }
  return out;
}

RateExp rate_dn(RateExp a, RateExp b, double beta, double p) {
  detail::require(beta > 0.0, "rate_dn: beta > 0 required");
  if (p <= beta) throw std::domain_error("rate_dn: need p > beta");
  return {(a.n_exp - beta * b.n_exp) / (p - beta),
          (a.h_exp - beta * b.h_exp) / (p - beta)};
}

namespace {

// best small-denominator rational p/q for x, |den| <= 64
bool to_rational(double x, long* num, long* den) {
  for (long q = 1; q <= 64; ++q) {
    const double pd = x * double(q);
    const long p = std::lround(pd);
    if (std::abs(pd - double(p)) < 1e-9 * double(q)) {
      *num = p;
      *den = q;
      return true;
    }
  }
  return false;
}

std::string exp_to_string(const std::string& base, double e) {
  if (e == 0.0) return "";
  long num = 0, den = 1;
  std::ostringstream os;
  os << base << "^{";
  if (to_rational(e, &num, &den)) {
    if (den == 1)
      os << num;
    else
      os << num << "/" << den;
  } else {
    os << e;
  }
  os << "}";
  return os.str();
}

}  // namespace

std::string rate_to_string(const RateExp& r) {
  const std::string n_part = exp_to_string("n", r.n_exp);
  const std::string h_part = exp_to_string("h", r.h_exp);
  if (n_part.empty() && h_part.empty()) return "1";
  if (n_part.empty()) return h_part;
  if (h_part.empty()) return n_part;
  return n_part + " " + h_part;
}

namespace {
void require_pos(double v, const char* what) {
  if (!(v > 0.0))
    throw std::domain_error(std::string(what) + " must be positive");
}
}  // namespace

ThmConstants thm3_constants(int variant, double m_prime, double sigma_or_kappa,
                            double eta_r, int r, double d) {
  require_pos(m_prime, "m'(t0)");
  ThmConstants c;
  c.A = m_prime / 2.0;
  if (variant == 1 || variant == 2) {
    require_pos(sigma_or_kappa, variant == 1 ? "sigma" : "kappa");
    const double s = sigma_or_kappa;
    c.c1 = std::pow(2.0, -2.0 / 3.0) * std::pow(m_prime, -1.0 / 3.0) *
           std::pow(s, -2.0 / 3.0);
    c.c2 = std::pow(2.0, -1.0 / 3.0) * std::pow(m_prime, 1.0 / 3.0) *
           std::pow(s, -4.0 / 3.0);
    c.dn = {-1.0 / 3.0, 0.0};
    c.driver_scale = s;
    return c;
  }
  if (variant == 3) {
    require_pos(std::abs(eta_r), "|eta_r|");
    const double rd = double(r) * d;
    detail::require(rd > 0.0 && rd < 1.0, "thm3: need 0 < r d < 1");
    const double beta = 1.0 - rd / 2.0;
    const double e = std::abs(eta_r);
    c.c1 = std::pow(2.0, -1.0 / (2.0 - beta)) *
           std::pow(m_prime, (beta - 1.0) / (2.0 - beta)) *
           std::pow(e, -1.0 / (2.0 - beta));
    c.c2 = std::pow(2.0, -beta / (2.0 - beta)) *
           std::pow(m_prime, beta / (2.0 - beta)) *
           std::pow(e, -2.0 / (2.0 - beta));
    c.dn = {-rd / (2.0 + rd), 0.0};
    c.driver_scale = e;
    return c;
  }
  throw std::invalid_argument("thm3_constants: variant must be 1, 2 or 3");
}

ThmConstants thm10_constants(double f_t0, double fprime_t0) {
  require_pos(f_t0, "f(t0)");
  require_pos(fprime_t0, "f'(t0)");
  ThmConstants c;
  c.c1 = std::pow(f_t0, -1.0 / 3.0) * std::pow(0.5, 2.0 / 3.0) *
         std::pow(fprime_t0, -1.0 / 3.0);
  c.c2 = std::pow(f_t0, -2.0 / 3.0) * std::pow(0.5 * fprime_t0, 1.0 / 3.0);
  c.dn = {-1.0 / 3.0, 0.0};
  c.A = fprime_t0 / 2.0;
  c.driver_scale = 1.0;
  return c;
}

ThmConstants thm11_constants(double eta1_prime_t0, double d) {
  require_pos(std::abs(eta1_prime_t0), "|eta_1'(t0)|");
  detail::require(d > 0.0 && d < 0.5, "thm11: need 0 < d < 1/2 (rank 1)");
  ThmConstants c;
  c.c1 = 1.0 / std::abs(eta1_prime_t0);
  c.dn = {-d / 2.0, 0.0};
  c.limit_sd = 1.0;
  return c;
}

ThmConstants thm4_constants(int variant, double m_second, double noise_scale,
                            double a, const KernelSpec& kernel) {
  require_pos(m_second, "m''(t0)");
  require_pos(a, "bandwidth constant a");
  ThmConstants c;
  c.A = m_second / 2.0;
  c.bias = 0.5 * m_second * kernel.second_moment();
  if (variant == 1 || variant == 2) {
    require_pos(noise_scale, variant == 1 ? "sigma" : "kappa");
    c.driver_scale = noise_scale * std::pow(a, -2.5);
    c.dn = {-1.0 / 5.0, 0.0};
    return c;
  }
  if (variant == 3) {
    require_pos(std::abs(noise_scale), "|eta_r|");
    c.driver_scale = std::abs(noise_scale) * a;
    return c;
  }
  throw std::invalid_argument("thm4_constants: variant must be 1, 2 or 3");
}

ThmConstants thm5_constants(int variant, double m_prime, double noise_scale,
                            double a) {
  require_pos(m_prime, "m'(t0)");
  require_pos(a, "bandwidth constant a");
  ThmConstants c;
  c.A = m_prime / 2.0;
  if (variant == 1 || variant == 2) {
    require_pos(noise_scale, variant == 1 ? "sigma" : "kappa");
    c.driver_scale = noise_scale * std::pow(a, -1.5);
    c.dn = {-1.0 / 3.0, 0.0};
    return c;
  }
  if (variant == 3) {
    c.driver_scale = std::abs(noise_scale) * a;
    return c;
  }
  throw std::invalid_argument("thm5_constants: variant must be 1, 2 or 3");
}

ThmConstants thm6_constants(int variant, double noise_scale,
                            const KernelSpec& kernel) {
  require_pos(noise_scale, variant == 1 ? "sigma" : "kappa");
  ThmConstants c;
  c.limit_sd = noise_scale * std::sqrt(kernel.l2_norm_sq());
  c.dn = {-0.5, -0.5};
  return c;
}

ThmConstants thm12_constants(double f_t0, double f_second, double a,
                             const KernelSpec& kernel) {
  require_pos(f_t0, "f(t0)");
  require_pos(f_second, "f''(t0)");
  require_pos(a, "bandwidth constant a");
  ThmConstants c;
  c.A = f_second / 2.0;
  c.bias = 0.5 * kernel.second_moment() * f_second;
  c.driver_scale = std::pow(a, -2.5) * std::sqrt(f_t0);
  c.dn = {-1.0 / 5.0, 0.0};
  return c;
}

}  // namespace gcmlab
