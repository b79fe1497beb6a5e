#include "gcmlab/grid_function.hpp"

#include <algorithm>
#include <cmath>

namespace gcmlab {

namespace detail {
void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}
}  // namespace detail

GridFunction::GridFunction(std::vector<double> knots, std::vector<double> values,
                           Interp interp)
    : knots_(std::move(knots)), values_(std::move(values)), interp_(interp) {
  detail::require(!knots_.empty(), "GridFunction: empty knot vector");
  detail::require(knots_.size() == values_.size(),
                  "GridFunction: knots and values differ in length");
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    detail::require(std::isfinite(knots_[i]) && std::isfinite(values_[i]),
                    "GridFunction: non-finite knot or value");
    if (i > 0)
      detail::require(knots_[i] > knots_[i - 1],
                      "GridFunction: knots not strictly increasing");
  }
}

std::size_t GridFunction::segment_index(double t) const {
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  if (it == knots_.begin()) return npos;
  return static_cast<std::size_t>(it - knots_.begin()) - 1;
}

double GridFunction::operator()(double t) const {
  const std::size_t i = segment_index(t);
  if (interp_ == Interp::step_right_continuous) {
    if (i == npos) return 0.0;
    return values_[i];
  }
  if (i == npos || t > knots_.back()) {
    throw std::domain_error("GridFunction: evaluation outside knot range");
  }
  if (i + 1 == knots_.size()) return values_.back();
  const double w = (t - knots_[i]) / (knots_[i + 1] - knots_[i]);
  return values_[i] + w * (values_[i + 1] - values_[i]);
}

double GridFunction::eval_clamped(double t) const {
  t = std::clamp(t, knots_.front(), knots_.back());
  return (*this)(t);
}

GridFunction GridFunction::negated() const {
  std::vector<double> v(values_.size());
  std::transform(values_.begin(), values_.end(), v.begin(),
                 [](double x) { return -x; });
  GridFunction g;
  g.knots_ = knots_;
  g.values_ = std::move(v);
  g.interp_ = interp_;
  return g;
}

}  // namespace gcmlab
