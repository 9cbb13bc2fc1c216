#pragma once

#include <span>

namespace abcde {

// Pairwise (tree) summation. Error grows with log(n) instead of n, and the
// result depends only on the order of `values`, never on thread scheduling.
double pairwise_sum(std::span<const double> values);

}  // namespace abcde
