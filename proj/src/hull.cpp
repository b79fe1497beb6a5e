#include "gcmlab/hull.hpp"

#include <algorithm>
#include <cmath>

namespace gcmlab {

double ConvexFit::operator()(double t) const {
  if (t <= knots.front()) return values.front();
  if (t >= knots.back()) return values.back();
  auto it = std::upper_bound(knots.begin(), knots.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - knots.begin()) - 1;
  return values[i] + slopes[i] * (t - knots[i]);
}

double ConvexFit::slope_at(double t) const {
  if (slopes.empty())
    throw std::domain_error("ConvexFit: single-vertex fit has no slope");
  if (t >= knots[knots.size() - 2]) return slopes.back();
  auto it = std::upper_bound(knots.begin(), knots.end(), t);
  if (it == knots.begin())
    throw std::domain_error("ConvexFit: slope requested left of the fit");
  return slopes[static_cast<std::size_t>(it - knots.begin()) - 1];
}

double ConvexFit::integral() const {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i)
    s += 0.5 * (values[i] + values[i + 1]) * (knots[i + 1] - knots[i]);
  return s;
}

namespace {

// cross(a,b,c) > 0 when c lies strictly above the line through a and b.
double cross(double ax, double ay, double bx, double by, double cx, double cy) {
  return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
}

struct Restriction {
  std::vector<double> x;
  std::vector<double> y;
};

Restriction restrict_knots(const GridFunction& f,
                           const std::optional<Interval>& interval) {
  const auto& kn = f.knots();
  const auto& va = f.values();
  Restriction r;
  if (!interval) {
    r.x = kn;
    r.y = va;
    return r;
  }
  detail::require(interval->lo <= interval->hi, "gcm: interval lo > hi");
  detail::require(interval->lo >= kn.front() && interval->hi <= kn.back(),
                  "gcm: interval endpoints outside the knot range");
  for (std::size_t i = 0; i < kn.size(); ++i) {
    if (kn[i] >= interval->lo && kn[i] <= interval->hi) {
      r.x.push_back(kn[i]);
      r.y.push_back(va[i]);
    }
  }
  return r;
}

}  // namespace

ConvexFit gcm(const GridFunction& f, std::optional<Interval> interval,
              double tol) {
  Restriction r = restrict_knots(f, interval);
  const std::size_t n = r.x.size();
  if (n < 2) throw std::domain_error("gcm: fewer than 2 knots in the interval");

  // Monotone lower-hull sweep. cross/(x_i - x_a) is the vertical gap of the
  // middle point below the outer chord, so tol acts as an absolute value
  // tolerance; popping at gap <= tol drops interior collinear knots and keeps
  // the endpoints of each collinear run as vertices.
  std::vector<std::size_t> hull;
  hull.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2];
      const std::size_t b = hull[hull.size() - 1];
      const double c =
          cross(r.x[a], r.y[a], r.x[b], r.y[b], r.x[i], r.y[i]);
      if (c <= tol * (r.x[i] - r.x[a])) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(i);
  }

  ConvexFit fit;
  fit.knots.reserve(hull.size());
  fit.values.reserve(hull.size());
  for (std::size_t idx : hull) {
    fit.knots.push_back(r.x[idx]);
    fit.values.push_back(r.y[idx]);
  }
  fit.slopes.resize(fit.knots.size() > 1 ? fit.knots.size() - 1 : 0);
  for (std::size_t i = 0; i + 1 < fit.knots.size(); ++i) {
    fit.slopes[i] = (fit.values[i + 1] - fit.values[i]) /
                    (fit.knots[i + 1] - fit.knots[i]);
  }

  fit.input_knots = std::move(r.x);
  fit.input_values.resize(fit.input_knots.size());
  fit.touching.resize(fit.input_knots.size());
  for (std::size_t i = 0; i < fit.input_knots.size(); ++i) {
    fit.input_values[i] = fit(fit.input_knots[i]);
    fit.touching[i] = std::abs(fit.input_values[i] - r.y[i]) <= tol;
  }
  return fit;
}

ConcaveFit lcm(const GridFunction& f, std::optional<Interval> interval,
               double tol) {
  ConvexFit fit = gcm(f.negated(), interval, tol);
  for (auto& v : fit.values) v = -v;
  for (auto& s : fit.slopes) s = -s;
  for (auto& v : fit.input_values) v = -v;
  return fit;
}

double gcm_slope_at(const GridFunction& f, double t,
                    std::optional<Interval> interval, double tol) {
  const double lo = interval ? interval->lo : f.front_knot();
  const double hi = interval ? interval->hi : f.back_knot();
  if (t < lo || t > hi)
    throw std::domain_error("gcm_slope_at: t outside the interval");
  return gcm(f, interval, tol).slope_at(t);
}

}  // namespace gcmlab
