#include "gcmlab/pava.hpp"

#include <cmath>

#include "gcmlab/hull.hpp"

namespace gcmlab {

WeightedSequence WeightedSequence::with_unit_weights(std::vector<double> values) {
  WeightedSequence s;
  s.weights.assign(values.size(), 1.0);
  s.values = std::move(values);
  return s;
}

std::vector<double> pava(const WeightedSequence& seq) {
  const std::size_t n = seq.values.size();
  detail::require(n > 0, "pava: empty sequence");
  detail::require(seq.weights.size() == n,
                  "pava: values and weights differ in length");
  for (std::size_t i = 0; i < n; ++i) {
    detail::require(std::isfinite(seq.values[i]), "pava: non-finite value");
    detail::require(std::isfinite(seq.weights[i]) && seq.weights[i] > 0.0,
                    "pava: nonpositive weight");
  }

  struct Block {
    double mean;
    double weight;
    std::size_t count;
  };
  std::vector<Block> blocks;
  blocks.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    blocks.push_back({seq.values[i], seq.weights[i], 1});
    while (blocks.size() >= 2 &&
           blocks[blocks.size() - 2].mean >= blocks.back().mean) {
      Block b = blocks.back();
      blocks.pop_back();
      Block& a = blocks.back();
      const double w = a.weight + b.weight;
      a.mean = (a.mean * a.weight + b.mean * b.weight) / w;
      a.weight = w;
      a.count += b.count;
    }
  }

  std::vector<double> out;
  out.reserve(n);
  for (const Block& b : blocks) out.insert(out.end(), b.count, b.mean);
  return out;
}

std::vector<double> gcm_derivative_grid(const GridFunction& f, double tol) {
  detail::require(f.interp() == Interp::piecewise_linear,
                  "gcm_derivative_grid: needs a piecewise-linear function");
  detail::require(f.size() >= 2, "gcm_derivative_grid: needs >= 2 knots");
  const ConvexFit fit = gcm(f, {}, tol);
  std::vector<double> slopes(f.size() - 1);
  for (std::size_t i = 0; i + 1 < f.size(); ++i) {
    const double mid = 0.5 * (f.knots()[i] + f.knots()[i + 1]);
    slopes[i] = fit.slope_at(mid);
  }
  return slopes;
}

}  // namespace gcmlab
