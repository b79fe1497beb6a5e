#include "gcmlab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gcmlab/pava.hpp"

namespace gcmlab {

RegressionSample::RegressionSample(std::vector<double> responses)
    : y(std::move(responses)) {
  detail::require(y.size() >= 2, "RegressionSample: need n >= 2");
  for (double v : y)
    detail::require(std::isfinite(v), "RegressionSample: non-finite response");
}

DensitySample::DensitySample(std::vector<double> obs, Interval supp)
    : observations(std::move(obs)), support(supp) {
  detail::require(!observations.empty(), "DensitySample: empty sample");
  for (double v : observations) {
    detail::require(std::isfinite(v), "DensitySample: non-finite observation");
    detail::require(v >= support.lo && v <= support.hi,
                    "DensitySample: observation outside the declared support");
  }
}

GridFunction cumulative_polygon(const RegressionSample& sample) {
  const std::size_t n = sample.n();
  std::vector<double> knots, values;
  knots.reserve(n + 2);
  values.reserve(n + 2);
  knots.push_back(0.0);
  values.push_back(0.0);
  double cum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // x_n(t_i + 1/(2n)) = n^{-1} sum_{j <= i} y_j, zero at i = 0
    knots.push_back((2.0 * double(i) + 1.0) / (2.0 * double(n)));
    values.push_back(cum / double(n));
    cum += sample.y[i];
  }
  knots.push_back(1.0);
  values.push_back((cum - 0.5 * sample.y[n - 1]) / double(n));
  return GridFunction(std::move(knots), std::move(values));
}

GridFunction cumulative_sum_diagram(const RegressionSample& sample) {
  const std::size_t n = sample.n();
  std::vector<double> knots(n + 1), values(n + 1);
  knots[0] = 0.0;
  values[0] = 0.0;
  double cum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cum += sample.y[i];
    knots[i + 1] = double(i + 1) / double(n);
    values[i + 1] = cum / double(n);
  }
  return GridFunction(std::move(knots), std::move(values));
}

std::vector<double> isotonic_regression(const RegressionSample& sample) {
  return gcm_derivative_grid(cumulative_sum_diagram(sample));
}

GridFunction empirical_cdf(const DensitySample& sample) {
  std::vector<double> sorted = sample.observations;
  std::sort(sorted.begin(), sorted.end());
  const double n = double(sorted.size());
  std::vector<double> knots, values;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    knots.push_back(sorted[i]);
    values.push_back(double(i + 1) / n);
  }
  return GridFunction(std::move(knots), std::move(values),
                      Interp::step_right_continuous);
}

namespace {

// Lower-left corners of the empirical CDF step: the binding constraints for
// a convex minorant of a cadlag step function, plus the right endpoint.
GridFunction cdf_minorant_corners(const std::vector<double>& sorted,
                                  double right_end) {
  const double n = double(sorted.size());
  std::vector<double> knots, values;
  std::size_t below = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i > 0 && sorted[i] == sorted[i - 1]) {
      ++below;
      continue;
    }
    knots.push_back(sorted[i]);
    values.push_back(double(below) / n);
    ++below;
  }
  if (knots.empty() || knots.back() < right_end) {
    knots.push_back(right_end);
    values.push_back(1.0);
  } else {
    values.back() = 1.0;  // single knot exactly at the endpoint
  }
  return GridFunction(std::move(knots), std::move(values));
}

GridFunction slope_step_function(const ConvexFit& hull) {
  std::vector<double> knots = hull.knots;
  std::vector<double> values = hull.slopes;
  values.push_back(hull.slopes.back());  // value at and past the last vertex
  return GridFunction(std::move(knots), std::move(values),
                      Interp::step_right_continuous);
}

}  // namespace

GrenanderFit grenander_increasing(const DensitySample& sample) {
  for (double v : sample.observations)
    if (v > 0.0)
      throw std::domain_error(
          "grenander_increasing: observation above 0 (support is (-inf, 0])");
  std::vector<double> sorted = sample.observations;
  std::sort(sorted.begin(), sorted.end());
  GrenanderFit out{gcm(cdf_minorant_corners(sorted, 0.0)), GridFunction(), 0.0};
  out.density = slope_step_function(out.hull);
  out.integral = out.hull.values.back() - out.hull.values.front();
  return out;
}

GrenanderFit grenander_decreasing(const DensitySample& sample) {
  for (double v : sample.observations)
    if (v < 0.0)
      throw std::domain_error(
          "grenander_decreasing: observation below 0 (support is [0, inf))");
  std::vector<double> sorted = sample.observations;
  std::sort(sorted.begin(), sorted.end());
  // Upper corners (t_(i), i/n) anchored at (0, 0); the LCM slope process is
  // the decreasing NPMLE.
  const double n = double(sorted.size());
  std::vector<double> knots{0.0}, values{0.0};
  std::size_t count = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    ++count;
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    if (sorted[i] == 0.0) continue;  // merged into the anchor
    knots.push_back(sorted[i]);
    values.push_back(double(count) / n);
  }
  GrenanderFit out{lcm(GridFunction(std::move(knots), std::move(values))),
                   GridFunction(), 0.0};
  out.density = slope_step_function(out.hull);
  out.integral = out.hull.values.back() - out.hull.values.front();
  return out;
}

namespace {

Interval regression_window(std::size_t n, double h) {
  detail::require(h > 0.0, "bandwidth must be positive");
  const Interval w{1.0 / double(n) + h, 1.0 - h};
  detail::require(w.lo < w.hi,
                  "bandwidth too large: exact window (1/n + h, 1 - h) is empty");
  return w;
}

}  // namespace

GasserMullerSmoother::GasserMullerSmoother(const RegressionSample& sample,
                                           KernelSpec kernel, double h)
    : y_(sample.y),
      kernel_(std::move(kernel)),
      h_(h),
      window_(regression_window(sample.y.size(), h)) {}

bool GasserMullerSmoother::in_exact_window(double t) const {
  return t > window_.lo && t < window_.hi;
}

std::pair<double, bool> GasserMullerSmoother::eval_flagged(double t) const {
  const std::size_t n = y_.size();
  const double dn = double(n);
  // Interpolation segments [t_i, t_{i+1}] for i = 1..n-1 that meet [t-h, t+h].
  const double lo = std::max(t - h_, 1.0 / dn);
  const double hi = std::min(t + h_, 1.0);
  double acc = 0.0;
  if (lo < hi) {
    std::size_t i0 = static_cast<std::size_t>(
        std::max(0.0, std::floor(lo * dn - 1.0 + 1e-12)));
    for (std::size_t i = i0; i + 1 < n; ++i) {
      const double u0 = double(i + 1) / dn;
      const double u1 = double(i + 2) / dn;
      if (u0 >= hi) break;
      if (u1 <= lo) continue;
      const double b = (y_[i + 1] - y_[i]) * dn;     // segment slope
      const double alpha = y_[i] - b * u0;           // ybar(u) = alpha + b u
      const double wlo = (t - std::min(u1, hi)) / h_;
      const double whi = (t - std::max(u0, lo)) / h_;
      acc += (alpha + b * t) * (kernel_.M0(whi) - kernel_.M0(wlo)) -
             b * h_ * (kernel_.M1(whi) - kernel_.M1(wlo));
    }
  }
  if (in_exact_window(t)) return {acc, false};
  const double mass =
      kernel_.M0((t - 1.0 / dn) / h_) - kernel_.M0((t - 1.0) / h_);
  if (mass <= 0.0) return {0.0, true};
  return {acc / mass, true};
}

double GasserMullerSmoother::operator()(double t) const {
  return eval_flagged(t).first;
}

StepKernelSmoother::StepKernelSmoother(std::vector<double> cell_values,
                                       KernelSpec kernel, double h)
    : y_(std::move(cell_values)),
      kernel_(std::move(kernel)),
      h_(h),
      window_(regression_window(y_.size(), h)) {
  prefix_.resize(y_.size() + 1, 0.0);
  const double w = 1.0 / double(y_.size());
  for (std::size_t i = 0; i < y_.size(); ++i)
    prefix_[i + 1] = prefix_[i] + y_[i] * w;
}

double StepKernelSmoother::derivative(double t) const {
  const std::size_t n = y_.size();
  const double dn = double(n);
  double acc = 0.0;
  // cells (t_i - 1/(2n), t_i + 1/(2n)] that meet [t-h, t+h]
  const double lo = t - h_, hi = t + h_;
  const long i0 = std::max(0L, long(std::floor(lo * dn - 0.5)));
  for (std::size_t i = std::size_t(i0); i < n; ++i) {
    const double u0 = (2.0 * double(i) + 1.0) / (2.0 * dn);
    const double u1 = (2.0 * double(i) + 3.0) / (2.0 * dn);
    if (u0 >= hi) break;
    if (u1 <= lo) continue;
    acc += y_[i] * (kernel_.M0((t - u0) / h_) - kernel_.M0((t - u1) / h_));
  }
  return acc;
}

double StepKernelSmoother::primitive(double t) const {
  const std::size_t n = y_.size();
  const double dn = double(n);
  double acc = 0.0;
  // cells fully left of the kernel window contribute their plain integral
  const double lo = t - h_;
  const long full = std::min<long>(long(n), long(std::floor(lo * dn - 0.5)));
  if (full > 0) acc += prefix_[std::size_t(full)];
  for (std::size_t i = std::size_t(std::max(0L, full)); i < n; ++i) {
    const double u0 = (2.0 * double(i) + 1.0) / (2.0 * dn);
    const double u1 = (2.0 * double(i) + 3.0) / (2.0 * dn);
    if (u0 >= t + h_) break;
    acc += y_[i] * h_ *
           (kernel_.K2((t - u0) / h_) - kernel_.K2((t - u1) / h_));
  }
  return acc;
}

std::vector<double> estimator_grid(Interval window, std::size_t n) {
  const std::size_t G = std::max<std::size_t>(512, 4 * n);
  std::vector<double> grid(G);
  const double step = (window.hi - window.lo) / double(G - 1);
  for (std::size_t g = 0; g < G; ++g) grid[g] = window.lo + double(g) * step;
  grid.back() = window.hi;
  return grid;
}

namespace {

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    s += 0.5 * (y[i] + y[i + 1]) * (x[i + 1] - x[i]);
  return s;
}

}  // namespace

ConvexRegressionFit convexified_kernel_regression(const RegressionSample& sample,
                                                  const KernelSpec& kernel,
                                                  double h) {
  GasserMullerSmoother smoother(sample, kernel, h);
  ConvexRegressionFit out;
  out.window = smoother.exact_window();
  out.grid = estimator_grid(out.window, sample.n());
  out.xn_values.resize(out.grid.size());
  for (std::size_t g = 0; g < out.grid.size(); ++g)
    out.xn_values[g] = smoother(out.grid[g]);
  out.integral_xn = trapezoid(out.grid, out.xn_values);
  if (out.integral_xn <= 0.0)
    throw std::invalid_argument(
        "convexified_kernel_regression: kernel estimate has nonpositive "
        "integral, normalization degenerate");
  out.fit = gcm(GridFunction(out.grid, out.xn_values));
  out.c = out.fit.integral() / out.integral_xn;
  return out;
}

IsotonizedKernelFit isotonized_kernel_regression(const RegressionSample& sample,
                                                 const KernelSpec& kernel,
                                                 double h) {
  StepKernelSmoother smoother(sample.y, kernel, h);
  IsotonizedKernelFit out;
  out.window = smoother.exact_window();
  out.grid = estimator_grid(out.window, sample.n());
  out.xn_values.resize(out.grid.size());
  for (std::size_t g = 0; g < out.grid.size(); ++g)
    out.xn_values[g] = smoother.primitive(out.grid[g]);
  out.hull = gcm(GridFunction(out.grid, out.xn_values));
  return out;
}

double kernel_density_at(const std::vector<double>& sorted_obs,
                         const KernelSpec& kernel, double h, double t) {
  auto lo = std::lower_bound(sorted_obs.begin(), sorted_obs.end(), t - h);
  auto hi = std::upper_bound(sorted_obs.begin(), sorted_obs.end(), t + h);
  double acc = 0.0;
  for (auto it = lo; it != hi; ++it) acc += kernel.k((t - *it) / h);
  return acc / (double(sorted_obs.size()) * h);
}

ConvexDensityFit convex_density_estimate(const DensitySample& sample,
                                         const KernelSpec& kernel, double h) {
  detail::require(h > 0.0, "bandwidth must be positive");
  for (double v : sample.observations)
    if (v < 0.0)
      throw std::domain_error(
          "convex_density_estimate: observation below 0 (support is [0, inf))");
  std::vector<double> sorted = sample.observations;
  std::sort(sorted.begin(), sorted.end());

  // Valid window: h inside the declared support, so no boundary truncation
  // corrupts the hull. With half-infinite support the data range bounds it.
  const double lo = std::max(sample.support.lo, 0.0) + h;
  const double hi = std::isfinite(sample.support.hi) ? sample.support.hi - h
                                                     : sorted.back() + h;
  detail::require(lo < hi, "bandwidth too large for the declared support");

  ConvexDensityFit out;
  out.window = {lo, hi};
  out.grid = estimator_grid(out.window, sample.n());
  out.xn_values.resize(out.grid.size());
  for (std::size_t g = 0; g < out.grid.size(); ++g)
    out.xn_values[g] = kernel_density_at(sorted, kernel, h, out.grid[g]);
  out.fit = gcm(GridFunction(out.grid, out.xn_values));
  out.In = out.fit.integral();
  return out;
}

}  // namespace gcmlab
