#pragma once

#include <vector>

namespace gcmlab {

//! Two-sample Kolmogorov-Smirnov statistic sup |ECDF_a - ECDF_b|.
double ks_distance(std::vector<double> a, std::vector<double> b);

double median(std::vector<double> v);
double quantile(std::vector<double> v, double q);
double mean(const std::vector<double>& v);
double variance(const std::vector<double>& v);

struct OlsFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

//! OLS of y on x (used for log-median-error on log-n rate fits).
OlsFit ols(const std::vector<double>& x, const std::vector<double>& y);

//! Fitted rate exponent: OLS slope of log(median_abs_error) on log(n).
//! Requires >= 3 distinct n and positive summaries.
OlsFit rate_regression(const std::vector<double>& n_values,
                       const std::vector<double>& median_abs_errors);

}  // namespace gcmlab
