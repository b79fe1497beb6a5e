#pragma once

#include <optional>
#include <vector>

#include "gcmlab/grid_function.hpp"

namespace gcmlab {

//! Piecewise-linear convex minorant: hull vertices (a subset of the input
//! knots), their values, and the nondecreasing slopes in between.
//!
//! `touching` marks every input knot inside the fitted interval whose value
//! the hull attains, including knots interior to a collinear run that are not
//! kept as vertices.
struct ConvexFit {
  std::vector<double> knots;   // hull vertices, increasing
  std::vector<double> values;  // hull values at the vertices
  std::vector<double> slopes;  // per-segment, nondecreasing

  std::vector<double> input_knots;   // input knots inside the interval
  std::vector<double> input_values;  // hull values at those knots
  std::vector<bool> touching;        // hull == input there (within tol)

  double operator()(double t) const;

  //! Right derivative at t; the final segment slope at and past the last
  //! vertex.
  double slope_at(double t) const;

  //! Trapezoid integral of the fit between its first and last vertex.
  double integral() const;
};

//! Least concave majorant, the mirror image -gcm(-f).
using ConcaveFit = ConvexFit;

struct Interval {
  double lo;
  double hi;
};

//! Greatest convex minorant of the knot points of f restricted to
//! [interval.lo, interval.hi] (the whole knot range by default).
//!
//! Collinear runs keep their first and last knot as vertices; interior knots
//! of the run are reported as touching. `tol` is the absolute collinearity
//! tolerance.
ConvexFit gcm(const GridFunction& f, std::optional<Interval> interval = {},
              double tol = 1e-12);

//! Least concave majorant; identically -gcm(-f).
ConcaveFit lcm(const GridFunction& f, std::optional<Interval> interval = {},
               double tol = 1e-12);

//! Right-hand slope of gcm(f) at t, the max-min difference quotient over the
//! knots. At the last knot this extends to the final segment slope.
double gcm_slope_at(const GridFunction& f, double t,
                    std::optional<Interval> interval = {}, double tol = 1e-12);

}  // namespace gcmlab
