#pragma once

#include "abcde/dataset.hpp"

namespace abcde {

// Adapts past per-item weights to a present clustering: each cluster collects
// its members' past weights (0 where absent) and hands the total back out in
// proportion to intrinsic importance. Every item of `clustering` needs a
// strictly positive intrinsic weight (KeyMismatch / InvalidWeight otherwise).
WeightMap propagate_past_weights(const Assignment& clustering, const WeightMap& past_weights,
                                 const WeightMap& intrinsic);

enum class CombineMode { max, mean };

// Pointwise max (default) or mean of the Base-side and Exp-side weights.
// Throws KeyMismatch when the id sets differ.
WeightMap combine_weights(const WeightMap& base_weights, const WeightMap& exp_weights,
                          CombineMode mode = CombineMode::max);

}  // namespace abcde
