#pragma once

#include <cstddef>
#include <span>

namespace abcde {

struct WeightedMean {
  double mean = 0;
  // Standard error of the weighted mean where weights express relative
  // importance (Cochran's "Case I"):
  //   sqrt((Σw x²/Σw - mean²) · Σw² / ((Σw)² - Σw²)).
  // NaN when (Σw)² == Σw², i.e. a single effective observation.
  double std_err = 0;
  double weight_sum = 0;
  double n_effective = 0;  // Kish: (Σw)² / Σw²
  std::size_t count = 0;
};

// Requires values.size() == weights.size(); zero-weight entries are ignored.
WeightedMean weighted_mean(std::span<const double> values, std::span<const double> weights);

}  // namespace abcde
