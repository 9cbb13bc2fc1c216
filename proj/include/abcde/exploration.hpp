#pragma once

// Importance-sampled exploration of the impact.
//
// Affected items are drawn with replacement with probability proportional to
// weight(i) * JaccardDistance(i). Each unique sampled item carries
//   w(i) = dc(i) / Σ dc · JaccardDistance(T) / JaccardDistance(i)
// so that Σ_{i in slice} w(i)·m(i) estimates the slice's contribution to m(T).

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "abcde/impact.hpp"

namespace abcde {

struct SampledItem {
  std::string item_id;
  double weight = 0;
  std::int64_t draw_count = 0;
  double importance_weight = 0;
  ImpactTriple impact;
  Attributes attributes;
};

struct ItemSample {
  std::vector<SampledItem> items;  // ascending initial draw time
  std::uint64_t seed = 0;
  std::size_t n_unique_requested = 0;
  double horizon = 0;
  bool population_exhausted = false;
  ImpactTriple overall;  // exact m(T) of the dataset that was sampled
};

// Throws NoDiff when no item is affected.
ItemSample importance_sample_items(const ClusterDiff& diff, std::size_t n_unique,
                                   std::uint64_t seed, std::size_t shards = 1);

using SampledItemPredicate = std::function<bool(const SampledItem&)>;

struct SampleEstimate {
  double value = 0;    // Σ_{i in slice} w(i)·m(i)
  double std_err = 0;  // dc-weighted Case I standard error
  std::size_t count = 0;
  bool empty_slice = false;
};

// Throws EmptySample for an empty sample. An empty slice yields value 0 with
// empty_slice set. A null predicate selects everything.
SampleEstimate estimate_impact_from_sample(std::span<const SampledItem> sample, Metric metric,
                                           const SampledItemPredicate& in_slice = {});

struct SliceSummary {
  // Σ w(i) over the slice: estimates weight(slice ∩ Affected) / weight(T).
  SampleEstimate weight;
  SampleEstimate split_rate;
  SampleEstimate merge_rate;
  SampleEstimate jaccard_distance;
};

SliceSummary summarize_slice(std::span<const SampledItem> sample,
                             const SampledItemPredicate& in_slice = {});

struct GroupSummary {
  std::string value;  // attribute_text of the group key, "(missing)" when absent
  SliceSummary summary;
};

// Groups the slice by one attribute, largest `order_by` contribution first
// (ties by group value), keeping at most `top` groups.
std::vector<GroupSummary> group_slice(std::span<const SampledItem> sample,
                                      const std::string& attribute, Metric order_by,
                                      std::size_t top,
                                      const SampledItemPredicate& in_slice = {});

// Up to n slice members chosen without replacement with probability
// proportional to w(i); returns indices into `sample`.
std::vector<std::size_t> example_items(std::span<const SampledItem> sample, std::size_t n,
                                       std::uint64_t seed,
                                       const SampledItemPredicate& in_slice = {});

}  // namespace abcde
