#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gcmlab {

enum class Interp {
  step_right_continuous,
  piecewise_linear,
};

//! A real function on a finite knot grid, either a cadlag step function or
//! the piecewise-linear interpolant of its knot values.
//!
//! Step functions are taken to vanish left of the first knot (the empirical
//! distribution convention); linear ones are only defined on the knot range.
class GridFunction {
public:
  GridFunction() = default;

  GridFunction(std::vector<double> knots, std::vector<double> values,
               Interp interp = Interp::piecewise_linear);

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& values() const { return values_; }
  Interp interp() const { return interp_; }
  std::size_t size() const { return knots_.size(); }

  double front_knot() const { return knots_.front(); }
  double back_knot() const { return knots_.back(); }

  //! Value at t. Step mode: 0 left of the first knot, last value beyond the
  //! last knot. Linear mode: throws std::domain_error outside the knot range.
  double operator()(double t) const;

  //! Value at t with t clamped into the knot range (constant extrapolation).
  double eval_clamped(double t) const;

  //! Index of the last knot <= t, or npos if t precedes all knots.
  std::size_t segment_index(double t) const;

  GridFunction negated() const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
  std::vector<double> knots_;
  std::vector<double> values_;
  Interp interp_ = Interp::piecewise_linear;
};

namespace detail {
void require(bool cond, const std::string& msg);
}

}  // namespace gcmlab
