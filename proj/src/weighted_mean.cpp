#include "abcde/weighted_mean.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "abcde/summation.hpp"

namespace abcde {

WeightedMean weighted_mean(std::span<const double> values, std::span<const double> weights) {
  WeightedMean out;
  std::vector<double> w, wx, w2;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!(weights[k] > 0)) continue;
    w.push_back(weights[k]);
    wx.push_back(weights[k] * values[k]);
    w2.push_back(weights[k] * weights[k]);
  }
  out.count = w.size();
  if (w.empty()) {
    out.mean = std::numeric_limits<double>::quiet_NaN();
    out.std_err = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  double sw = pairwise_sum(w);
  double sw2 = pairwise_sum(w2);
  out.weight_sum = sw;
  out.mean = pairwise_sum(wx) / sw;
  out.n_effective = sw * sw / sw2;

  // Second pass around the mean instead of Σw x²/Σw - mean².
  std::vector<double> dev;
  dev.reserve(w.size());
  for (std::size_t k = 0, kept = 0; k < values.size(); ++k) {
    if (!(weights[k] > 0)) continue;
    double d = values[k] - out.mean;
    dev.push_back(w[kept++] * d * d);
  }
  double variance = pairwise_sum(dev) / sw;
  double denom = sw * sw - sw2;
  if (denom > 0)
    out.std_err = std::sqrt(variance * sw2 / denom);
  else
    out.std_err = std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace abcde
