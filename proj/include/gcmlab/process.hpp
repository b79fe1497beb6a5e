#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "gcmlab/grid_function.hpp"
#include "gcmlab/hermite.hpp"
#include "gcmlab/rng.hpp"

namespace gcmlab {

//! Error-law descriptor for the three dependence regimes.
struct DependenceModel {
  enum class Kind { iid, ar1, lrd };

  Kind kind = Kind::iid;
  double sd = 1.0;    // iid marginal sd, or ar1 innovation sd
  double rho = 0.0;   // ar1 coefficient, |rho| < 1
  double d = 0.5;     // lrd memory exponent, 0 < d < 1/rank
  Subordination g;    // lrd subordinating function
  int rank = 1;       // lrd Hermite rank of g

  static DependenceModel iid(double sd);
  static DependenceModel ar1(double rho, double innovation_sd);
  //! LRD with given d; the underlying Gaussian is fGn with H = 1 - d/2.
  static DependenceModel lrd(double d, Subordination g, int rank);
  static DependenceModel lrd_hurst(double H, Subordination g, int rank);

  double hurst() const { return 1.0 - d / 2.0; }
};

//! i.i.d. N(0, sd^2) draws; deterministic in (model, rng state).
std::vector<double> gen_iid(const DependenceModel& model, std::size_t n, Rng& rng);

//! Stationary Gaussian AR(1): Var = sd^2/(1-rho^2), Cov(k) = Var rho^k.
std::vector<double> gen_ar1(const DependenceModel& model, std::size_t n, Rng& rng);

//! Exact fractional Gaussian noise (unit marginal variance) by circulant
//! embedding of the fGn autocovariance. Throws if the embedding has negative
//! eigenvalues (which fGn never produces; checked anyway).
std::vector<double> gen_fgn(double H, std::size_t n, Rng& rng);

//! fGn autocovariance gamma(k) = (|k+1|^{2H} - 2 k^{2H} + |k-1|^{2H}) / 2.
double fgn_autocov(double H, std::size_t k);

//! Eigenvalues of the circulant embedding used for n samples at Hurst H.
std::vector<double> fgn_embedding_eigenvalues(double H, std::size_t n);

//! Elementwise g(xi_i), centered by the quadrature value of E g(xi).
std::vector<double> subordinate(const std::vector<double>& xi,
                                const Subordination& g);

//! Error draw for any regime (lrd = centered g(fGn)).
std::vector<double> gen_errors(const DependenceModel& model, std::size_t n,
                               Rng& rng);

//! Long-run variance kappa^2 = Cov(0) + 2 sum_k Cov(k) in closed form.
//! Throws std::domain_error for LRD (the sum diverges).
double kappa_squared(const DependenceModel& model);

//! Leading-order LRD partial-sum variance eta_r^2 n^{2-rd} l1(n) with
//! l1 = 2 l0^r / (r! (1-rd)(2-rd)). Default l0 = 1; pass l0_fgn(H) when the
//! underlying Gaussian is fGn rather than an exact k^{-d} covariance.
double sigma_n_lrd(double n, int r, double d, double eta_r, double l0 = 1.0);

//! Slowly-varying limit of the fGn covariance: gamma(k) ~ l0 k^{-d} with
//! l0 = H(2H - 1).
double l0_fgn(double H);

struct VarianceScale {
  double sigma_n_sq;
  double beta;  // self-similarity index: 1 - rd/2 for LRD, 1/2 otherwise
  DependenceModel::Kind regime;
};

//! sigma_n^2 = Var(sum_1^n eps_i): exact for iid and AR(1), leading-order
//! (with the fGn l0) for LRD.
VarianceScale variance_scale(const DependenceModel& model, double n);

//! Two-sided partial-sum polygon: knots t_i + 1/(2n) for i = -n..n with the
//! eps_0/2 offsets, linearly interpolated. eps holds indices -n..n, so its
//! length is odd and eps[n] is eps_0.
GridFunction partial_sum_process(const std::vector<double>& eps_two_sided,
                                 double sigma_n);

//! Local rescaling vtilde(s) = dn^{-p} (v(t0 + s dn) - v(t0)) on
//! dn^{-1}(J - t0); evaluate the result with eval_clamped for the constant
//! extrapolation beyond the data window.
GridFunction rescale_local(const GridFunction& v, double t0, double dn, double p);

struct LocalEmpiricalProcess {
  GridFunction w;        // the normalized local process on the s grid
  double sigma_est;      // plug-in sqrt(n delta f_hat(t0))
  double fhat_t0;        // kernel plug-in density value
};

//! Centered local empirical process around t0 at scale delta_n, normalized
//! by the plug-in sigma = sqrt(n delta_n f_hat(t0)). The centering needs the
//! true CDF F.
LocalEmpiricalProcess local_empirical_process(
    const std::vector<double>& observations, double t0, double delta_n,
    const std::function<double(double)>& cdf, double s_max = 4.0,
    double ds = 1.0 / 64.0, std::optional<double> plugin_bandwidth = {});

}  // namespace gcmlab
