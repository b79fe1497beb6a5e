#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gcmlab/limits.hpp"
#include "gcmlab/process.hpp"
#include "gcmlab/stats.hpp"

namespace gcmlab {

double norm_cdf(double x);
double norm_ppf(double p);

//! Closed-form regression truth m(t) = a0 + a1 t + a2 t^2.
struct RegressionTruth {
  double a0 = 0.0, a1 = 1.0, a2 = 0.0;

  double m(double t) const { return a0 + a1 * t + a2 * t * t; }
  double m_prime(double t) const { return a1 + 2.0 * a2 * t; }
  double m_second() const { return 2.0 * a2; }
  //! integral of m over [0, t]
  double M(double t) const {
    return a0 * t + 0.5 * a1 * t * t + a2 * t * t * t / 3.0;
  }
};

//! Closed-form density truths used by the density scenarios.
struct DensityTruth {
  enum class Kind {
    linear_increasing,  // f(t) = 2(1+t) on [-1, 0]
    convex_decreasing,  // f(t) = 3(1-t)^2 on [0, 1]
  };
  Kind kind = Kind::linear_increasing;

  Interval support() const;
  double f(double t) const;
  double f_prime(double t) const;
  double f_second(double t) const;
  double F(double t) const;
  double F_inv(double u) const;
};

enum class Scenario { isoreg, convexreg, isokernel, grenander, convexdensity };

std::string scenario_name(Scenario s);
Scenario scenario_by_name(const std::string& name);

struct Tolerances {
  std::optional<double> exponent_tol;  // |fitted - target| <= tol
  std::optional<double> ks_tol;        // KS vs the limit reference <= tol
};

struct ExperimentConfig {
  Scenario scenario = Scenario::isoreg;
  RegressionTruth reg_truth;
  DensityTruth dens_truth;
  double t0 = 0.5;
  DependenceModel dependence = DependenceModel::iid(1.0);
  std::vector<std::size_t> n_grid;
  std::size_t replications = 100;
  std::uint64_t seed = 1;
  //! bandwidth rule h = a n^(exp) for the kernel scenarios
  double bandwidth_a = 1.0;
  double bandwidth_exp = -0.2;
  std::string kernel_name = "epanechnikov";
  Tolerances tolerances;
  int threads = 0;  // 0: GCMLAB_THREADS env or hardware concurrency
  bool compute_ks = true;
  bool record_integral_stat = true;  // isoreg only

  //! Throws std::invalid_argument naming the violated theorem hypothesis.
  void validate() const;
};

struct PerNResult {
  std::size_t n = 0;
  double bandwidth = 0.0;
  double dn = 1.0;        // rate factor the errors are divided by
  double c1 = 1.0;        // theorem constant multiplying the scaled error
  std::vector<double> scaled_errors;         // sorted
  std::vector<double> scaled_errors_debiased;  // convex scenarios, sorted
  std::vector<double> integral_stats;        // isoreg, sorted
  double median_abs_raw = 0.0;
  double mean_sq_raw = 0.0;
  double ks_vs_limit = -1.0;  // negative when not computed
  double quantile05 = 0.0, quantile25 = 0.0, quantile75 = 0.0, quantile95 = 0.0;
};

struct ExperimentReport {
  std::string scenario;
  std::uint64_t seed = 0;
  std::vector<PerNResult> per_n;
  OlsFit rate;
  double target_exponent = 0.0;
  std::vector<double> limit_reference;  // sorted limit-law draws used in KS
  double integral_ks = -1.0;            // isoreg: KS of the Eq.-38 statistic
  double runtime_seconds = 0.0;
  bool pass = true;
  std::vector<std::string> failures;
};

//! Target exponent of the raw error under the configured regime.
double theoretical_exponent(const ExperimentConfig& cfg);

//! Run the full Monte Carlo experiment; deterministic in the config
//! (including under parallel execution).
ExperimentReport run_experiment(const ExperimentConfig& cfg);

//! One-sample Kolmogorov-Smirnov distance to a reference CDF.
double ks_distance_to_cdf(std::vector<double> sample,
                          const std::function<double(double)>& cdf);

}  // namespace gcmlab
