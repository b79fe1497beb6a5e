#pragma once

#include <limits>
#include <vector>

#include "gcmlab/grid_function.hpp"
#include "gcmlab/hull.hpp"
#include "gcmlab/kernels.hpp"

namespace gcmlab {

//! Regression observations on the equispaced design t_i = i/n, i = 1..n.
struct RegressionSample {
  std::vector<double> y;

  explicit RegressionSample(std::vector<double> responses);
  std::size_t n() const { return y.size(); }
  double t(std::size_t i) const { return double(i + 1) / double(y.size()); }
};

struct DensitySample {
  std::vector<double> observations;
  Interval support{-std::numeric_limits<double>::infinity(),
                   std::numeric_limits<double>::infinity()};

  DensitySample(std::vector<double> obs, Interval supp);
  std::size_t n() const { return observations.size(); }
};

//! The partial-sum polygon x_n of the regression data: piecewise linear with
//! x_n(t_i + 1/(2n)) = n^{-1} sum_{j<=i} y_j, zero on [0, 1/(2n)], and the
//! last half-width piece of slope y_n ending at t = 1.
GridFunction cumulative_polygon(const RegressionSample& sample);

//! Cumulative sum diagram: knots i/n for i = 0..n with the running means
//! n^{-1} sum_{j<=i} y_j. Its GCM slope on segment i is the isotonic fit at
//! t_i, exactly.
GridFunction cumulative_sum_diagram(const RegressionSample& sample);

//! Least-squares fit under the nondecreasing constraint, one value per
//! design point. Computed as the GCM slope process of the cumulative sum
//! diagram (equivalently unit-weight PAVA of y).
std::vector<double> isotonic_regression(const RegressionSample& sample);

//! Step empirical distribution function; jumps m/n at an order statistic of
//! multiplicity m, zero left of the smallest observation.
GridFunction empirical_cdf(const DensitySample& sample);

struct GrenanderFit {
  ConvexFit hull;         // GCM of the empirical CDF over (min obs, 0]
  GridFunction density;   // step slope process, right continuous
  double integral;        // of the density over (min obs, 0]; always 1

  double operator()(double t) const { return hull.slope_at(t); }
};

//! NPMLE of an increasing density supported on (-inf, 0]: the slope process
//! of the GCM of the empirical CDF.
GrenanderFit grenander_increasing(const DensitySample& sample);

//! Decreasing-density mirror on [0, inf): slope process of the LCM.
GrenanderFit grenander_decreasing(const DensitySample& sample);

//! Gasser-Muller smoother of the linear interpolant of {(t_i, y_i)}.
//! Exact on the window (1/n + h, 1 - h); outside, the kernel is renormalized
//! by its in-range mass and the value is flagged.
class GasserMullerSmoother {
public:
  GasserMullerSmoother(const RegressionSample& sample, KernelSpec kernel,
                       double h);

  double operator()(double t) const;
  //! Value plus a boundary flag (true when outside the exact window).
  std::pair<double, bool> eval_flagged(double t) const;
  bool in_exact_window(double t) const;
  Interval exact_window() const { return window_; }
  double bandwidth() const { return h_; }
  const KernelSpec& kernel() const { return kernel_; }

private:
  std::vector<double> y_;
  KernelSpec kernel_;
  double h_;
  Interval window_;
};

//! Smoother against the piecewise-constant interpolant of values given on
//! the cells (t_i - 1/(2n), t_i + 1/(2n)]. Provides both the regression
//! estimate m_n and its primitive x_n (closed form per cell).
class StepKernelSmoother {
public:
  StepKernelSmoother(std::vector<double> cell_values, KernelSpec kernel,
                     double h);

  //! m_n(t) = h^{-1} int k((t-u)/h) ytilde(u) du
  double derivative(double t) const;
  //! x_n(t) = int K((t-u)/h) ytilde(u) du, the primitive of m_n
  double primitive(double t) const;

  Interval exact_window() const { return window_; }

private:
  std::vector<double> y_;
  std::vector<double> prefix_;  // prefix sums of y * cell width
  KernelSpec kernel_;
  double h_;
  Interval window_;
};

//! Uniform evaluation grid of max(512, 4n) points used when a continuous
//! estimate is hulled.
std::vector<double> estimator_grid(Interval window, std::size_t n);

struct ConvexRegressionFit {
  ConvexFit fit;        // GCM of the smoothed curve on the grid
  double c;             // normalization: int fit / int x_n on the window
  double integral_xn;   // trapezoid integral of x_n over the grid
  Interval window;
  std::vector<double> grid;
  std::vector<double> xn_values;

  double normalized(double t) const { return fit(t) / c; }
};

//! GCM of the Gasser-Muller estimate plus the normalization constant that
//! matches its integral to the kernel estimate's.
ConvexRegressionFit convexified_kernel_regression(const RegressionSample& sample,
                                                  const KernelSpec& kernel,
                                                  double h);

struct IsotonizedKernelFit {
  ConvexFit hull;  // GCM of the smoothed primitive x_n on the grid
  Interval window;
  std::vector<double> grid;
  std::vector<double> xn_values;

  //! Monotone regression estimate: right slope of the hull.
  double operator()(double t) const { return hull.slope_at(t); }
};

//! Kernel smoothing followed by isotonic regression: the GCM slope process
//! of x_n(t) = int K((t-u)/h) ytilde_n(u) du.
IsotonizedKernelFit isotonized_kernel_regression(const RegressionSample& sample,
                                                 const KernelSpec& kernel,
                                                 double h);

struct ConvexDensityFit {
  ConvexFit fit;   // GCM of the kernel density estimate on the grid
  double In;       // trapezoid integral of the fit
  Interval window;
  std::vector<double> grid;
  std::vector<double> xn_values;
};

//! Kernel density estimate x_n(t) = (nh)^{-1} sum k((t - t_i)/h).
double kernel_density_at(const std::vector<double>& sorted_obs,
                         const KernelSpec& kernel, double h, double t);

//! GCM of the kernel density estimate of observations on [0, inf), with its
//! integral I_n over the window.
ConvexDensityFit convex_density_estimate(const DensitySample& sample,
                                         const KernelSpec& kernel, double h);

}  // namespace gcmlab
