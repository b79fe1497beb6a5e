#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gcmlab/grid_function.hpp"
#include "gcmlab/hermite.hpp"
#include "gcmlab/kernels.hpp"
#include "gcmlab/rng.hpp"

namespace gcmlab {

//! Driving process vtilde of the limit functional T(A|s|^p + vtilde(s))(0).
struct LimitDriver {
  enum class Kind {
    none,          // vtilde = 0
    bm,            // scale * two-sided Brownian motion
    fbm,           // scale * two-sided fractional Brownian motion
    linear,        // Z s with Z ~ N(0, z_sd^2)
    kernel_bm,     // scale * int (w(s-u) - w(-u)) weight(u) du, w = BM
    kernel_fbm,    // same with w = fBm(H)
    subordinated,  // two-sided partial sums of g(fGn), rank >= 2 approximation
  };
  enum class Weight { k, k_prime };

  Kind kind = Kind::none;
  double scale = 1.0;
  double H = 0.75;          // fbm / subordinated underlying Hurst
  double z_sd = 1.0;        // linear
  Weight weight = Weight::k_prime;
  KernelSpec kernel = KernelSpec::epanechnikov();
  Subordination g;          // subordinated
  int rank = 2;             // subordinated
  std::size_t n_approx = 1u << 15;  // subordinated partial-sum length

  double beta() const;  // self-similarity index of the underlying w

  static LimitDriver none() { return {}; }
  static LimitDriver brownian(double scale = 1.0);
  static LimitDriver fractional(double H, double scale = 1.0);
  static LimitDriver linear_drift(double z_sd);
  static LimitDriver kernel_smoothed(Weight w, KernelSpec kernel, double scale,
                                     double H = 0.5);
  static LimitDriver rosenblatt_like(double d, Subordination g, int rank,
                                     double scale = 1.0);
};

//! Specification of one limit draw T(A|s|^p + vtilde(s))(0).
struct LimitSpec {
  double p = 2.0;
  double A = 1.0;
  LimitDriver driver;
  double c_max = 8.0;
  double delta = 1.0 / 512.0;
  //! Rescale self-similar drivers to A = 1, scale = 1 coordinates before
  //! hulling (stabilizes truncation); only possible for bm/fbm drivers.
  bool standardize = true;
  //! Keep the drawn grid path in the LimitDraw (for diagnostics/tests).
  bool keep_path = false;

  void validate() const;
};

struct LimitDraw {
  double t_value = 0.0;       // T(y)(0)
  double slope = 0.0;         // T(y)'(0+)
  double argmin = 0.0;        // inf argmin_s y(s) on the grid
  double driver_offset = 0.0; // scale * int weight(u) w(-u) du (kernel kinds)
  bool flagged = false;       // still unstable after the redraw policy
  double c_max_used = 0.0;

  std::vector<double> path_s;  // populated when keep_path is set
  std::vector<double> path_y;
};

//! One draw of the limit functional. Draws whose hull segment through 0
//! touches outside [-c_max/2, c_max/2] are redrawn at doubled c_max (at most
//! twice) and flagged if still unstable.
LimitDraw sample_limit_functional(const LimitSpec& spec, Rng& rng);

//! R draws with per-draw counter-derived streams of the master seed.
std::vector<LimitDraw> sample_limit_batch(const LimitSpec& spec, std::size_t R,
                                          std::uint64_t seed);

//! Two-sided Brownian path on the symmetric grid, B(0) = 0.
GridFunction sample_two_sided_bm(double c_max, double delta, double scale,
                                 Rng& rng);

//! Two-sided fractional Brownian motion: cumulated fGn increments of one
//! stationary sequence spanning both sides, so the joint law across 0 is the
//! exact two-sided one.
GridFunction sample_two_sided_fbm(double H, double c_max, double delta,
                                  double scale, Rng& rng);

//! R draws of argmin_s (s^2 + B(s)) over the discretized two-sided path.
std::vector<double> chernoff_sample(std::size_t R, double c_max, double delta,
                                    std::uint64_t seed);

//! Exponents of n and h: d_n = n^{n_exp} h^{h_exp}.
struct RateExp {
  double n_exp = 0.0;
  double h_exp = 0.0;
};

//! d_n = (a_n b_n^{-beta})^{1/(p-beta)} as exponent arithmetic.
RateExp rate_dn(RateExp a, RateExp b, double beta, double p);

//! Pretty form such as "n^{-1/3}" (small-denominator rationals) for CLI use.
std::string rate_to_string(const RateExp& r);

//! Closed-form constants of the pointwise limit theorems.
struct ThmConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  RateExp dn;
  double A = 0.0;            // curvature of the limit parabola
  double driver_scale = 0.0; // c in front of the limit driver
  double bias = 0.0;         // deterministic bias term where applicable
  double limit_sd = 0.0;     // normal-limit standard deviation (Thm 6, 11)
};

ThmConstants thm3_constants(int variant, double m_prime, double sigma_or_kappa,
                            double eta_r = 1.0, int r = 1, double d = 0.5);
ThmConstants thm10_constants(double f_t0, double fprime_t0);
ThmConstants thm11_constants(double eta1_prime_t0, double d);
ThmConstants thm4_constants(int variant, double m_second, double noise_scale,
                            double a, const KernelSpec& kernel);
ThmConstants thm5_constants(int variant, double m_prime, double noise_scale,
                            double a);
ThmConstants thm6_constants(int variant, double noise_scale,
                            const KernelSpec& kernel);
ThmConstants thm12_constants(double f_t0, double f_second, double a,
                             const KernelSpec& kernel);

}  // namespace gcmlab
