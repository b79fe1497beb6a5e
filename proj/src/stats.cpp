#include "gcmlab/stats.hpp"

#include <algorithm>
#include <cmath>

#include "gcmlab/grid_function.hpp"

namespace gcmlab {

double ks_distance(std::vector<double> a, std::vector<double> b) {
  detail::require(!a.empty() && !b.empty(), "ks_distance: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = double(a.size()), nb = double(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    d = std::max(d, std::abs(double(i) / na - double(j) / nb));
  }
  return d;
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

double quantile(std::vector<double> v, double q) {
  detail::require(!v.empty(), "quantile: empty sample");
  detail::require(q >= 0.0 && q <= 1.0, "quantile: q in [0,1]");
  std::sort(v.begin(), v.end());
  const double pos = q * double(v.size() - 1);
  const std::size_t lo = std::size_t(pos);
  if (lo + 1 >= v.size()) return v.back();
  const double w = pos - double(lo);
  return v[lo] * (1.0 - w) + v[lo + 1] * w;
}

double mean(const std::vector<double>& v) {
  detail::require(!v.empty(), "mean: empty sample");
  double s = 0.0;
  for (double x : v) s += x;
  return s / double(v.size());
}

double variance(const std::vector<double>& v) {
  detail::require(v.size() >= 2, "variance: need >= 2 values");
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / double(v.size() - 1);
}

OlsFit ols(const std::vector<double>& x, const std::vector<double>& y) {
  detail::require(x.size() == y.size() && x.size() >= 2, "ols: bad input");
  const std::size_t n = x.size();
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  detail::require(sxx > 0.0, "ols: degenerate x");
  OlsFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (n > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      rss += r * r;
    }
    fit.slope_stderr = std::sqrt(rss / double(n - 2) / sxx);
  }
  return fit;
}

OlsFit rate_regression(const std::vector<double>& n_values,
                       const std::vector<double>& median_abs_errors) {
  detail::require(n_values.size() == median_abs_errors.size(),
                  "rate_regression: length mismatch");
  detail::require(n_values.size() >= 3, "rate_regression: need >= 3 sizes");
  std::vector<double> lx(n_values.size()), ly(n_values.size());
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    detail::require(n_values[i] > 0.0, "rate_regression: nonpositive n");
    if (!(median_abs_errors[i] > 0.0))
      throw std::invalid_argument(
          "rate_regression: nonpositive error summary (degenerate input)");
    lx[i] = std::log(n_values[i]);
    ly[i] = std::log(median_abs_errors[i]);
  }
  return ols(lx, ly);
}

}  // namespace gcmlab
