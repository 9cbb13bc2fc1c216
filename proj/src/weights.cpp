#include "abcde/weights.hpp"

#include <algorithm>
#include <cmath>

#include "abcde/error.hpp"
#include "abcde/summation.hpp"

namespace abcde {

WeightMap propagate_past_weights(const Assignment& clustering, const WeightMap& past_weights,
                                 const WeightMap& intrinsic) {
  std::map<std::string, std::vector<std::string>, std::less<>> members;
  for (const auto& [item, cluster] : clustering) members[cluster].push_back(item);

  WeightMap out;
  std::vector<double> past, own;
  for (const auto& [cluster, items] : members) {
    past.clear();
    own.clear();
    for (const auto& item : items) {
      auto p = past_weights.find(item);
      if (p != past_weights.end()) {
        if (!(p->second >= 0) || !std::isfinite(p->second))
          throw Error(ErrorCode::invalid_weight, "negative past weight for '" + item + "'");
        past.push_back(p->second);
      }
      auto w = intrinsic.find(item);
      if (w == intrinsic.end())
        throw Error(ErrorCode::key_mismatch, "no intrinsic weight for '" + item + "'");
      if (!(w->second > 0) || !std::isfinite(w->second))
        throw Error(ErrorCode::invalid_weight, "intrinsic weight of '" + item + "' must be > 0");
      own.push_back(w->second);
    }
    double cluster_past = pairwise_sum(past);
    double cluster_own = pairwise_sum(own);
    for (std::size_t k = 0; k < items.size(); ++k)
      out[items[k]] = cluster_past * (own[k] / cluster_own);
  }
  return out;
}

WeightMap combine_weights(const WeightMap& base_weights, const WeightMap& exp_weights,
                          CombineMode mode) {
  if (base_weights.size() != exp_weights.size())
    throw Error(ErrorCode::key_mismatch, "weight maps cover different items");
  WeightMap out;
  auto b = base_weights.begin();
  auto e = exp_weights.begin();
  for (; b != base_weights.end(); ++b, ++e) {
    if (b->first != e->first)
      throw Error(ErrorCode::key_mismatch, "weight maps cover different items ('" + b->first +
                                               "' vs '" + e->first + "')");
    out.emplace_hint(out.end(), b->first,
                     mode == CombineMode::max ? std::max(b->second, e->second)
                                              : 0.5 * (b->second + e->second));
  }
  return out;
}

}  // namespace abcde
