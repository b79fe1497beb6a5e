#pragma once

#include <vector>

#include "gcmlab/grid_function.hpp"

namespace gcmlab {

struct WeightedSequence {
  std::vector<double> values;
  std::vector<double> weights;  // strictly positive

  static WeightedSequence with_unit_weights(std::vector<double> values);
};

//! Weighted least-squares projection onto nondecreasing vectors
//! (pool adjacent violators, linear time). Pooled blocks carry their
//! weighted mean.
std::vector<double> pava(const WeightedSequence& seq);

//! Per-segment slopes of gcm(f) for piecewise-linear f; equals pava applied
//! to the raw segment slopes weighted by the knot spacings.
std::vector<double> gcm_derivative_grid(const GridFunction& f,
                                        double tol = 1e-12);

}  // namespace gcmlab
