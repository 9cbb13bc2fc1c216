#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "abcde/dataset.hpp"

namespace abcde {

enum class Metric { split, merge, jd };

std::string_view to_string(Metric metric);
// Accepts "split", "merge", "jd" (also "split_rate", "merge_rate",
// "jaccard_distance"). Returns nullopt for anything else.
std::optional<Metric> metric_from_string(std::string_view name);

struct ImpactTriple {
  double split_rate = 0;
  double merge_rate = 0;
  double jaccard_distance = 0;

  double get(Metric m) const {
    switch (m) {
      case Metric::split: return split_rate;
      case Metric::merge: return merge_rate;
      case Metric::jd: return jaccard_distance;
    }
    return 0;
  }
};

// Impact of one item, evaluated directly from the two member lists
// (membership test on the smaller cluster). Throws NotFound for unknown ids.
ImpactTriple impact_of_item(const Dataset& dataset, std::string_view item_id);
ImpactTriple impact_of_item(const Dataset& dataset, ItemIndex item);

// Precomputed view of the diff between Base and Exp.
//
// Every (Base cluster, Exp cluster) overlap is materialized once, which gives
// each item's overlap weight weight(Base(i) ∩ Exp(i)) and its impact triple in
// O(|T|) total. The dataset must outlive the diff.
class ClusterDiff {
 public:
  explicit ClusterDiff(const Dataset& dataset);

  const Dataset& dataset() const { return *dataset_; }

  const ImpactTriple& impact(ItemIndex i) const { return impacts_[i]; }
  // weight(Base(i) ∩ Exp(i)); always contains i itself.
  double overlap_weight(ItemIndex i) const { return overlaps_[overlap_of_[i]].weight; }
  // Members of Base(i) ∩ Exp(i), in item order.
  std::span<const ItemIndex> overlap_members(ItemIndex i) const {
    return overlaps_[overlap_of_[i]].members;
  }
  // Base(i) and Exp(i) differ in extent.
  bool affected(ItemIndex i) const { return affected_[i]; }

  ImpactTriple overall() const { return overall_; }
  double affected_weight() const { return affected_weight_; }

  // Weighted average over `items` (treated as a set; pass each item once).
  // Throws EmptySlice for an empty span.
  ImpactTriple of_set(std::span<const ItemIndex> items) const;

 private:
  struct Overlap {
    std::vector<ItemIndex> members;
    double weight = 0;
  };

  const Dataset* dataset_;
  std::vector<Overlap> overlaps_;
  std::vector<std::uint32_t> overlap_of_;
  std::vector<ImpactTriple> impacts_;
  std::vector<bool> affected_;
  ImpactTriple overall_;
  double affected_weight_ = 0;
};

ImpactTriple impact_of_set(const ClusterDiff& diff, std::span<const ItemIndex> items);
// Throws NotFound for unknown ids and EmptySlice for an empty set.
ImpactTriple impact_of_set(const Dataset& dataset, const std::set<std::string, std::less<>>& item_ids);

struct AffectedPartition {
  std::vector<ItemIndex> affected;
  std::vector<ItemIndex> unaffected;
};

// Membership is decided by extent equality, so renaming clusters does not
// make items affected.
AffectedPartition partition_affected(const ClusterDiff& diff);

struct ClusterContribution {
  std::string cluster_id;
  Side side = Side::base;
  double cluster_weight = 0;
  double metric_value = 0;  // metric of the cluster's member set
  double contribution = 0;  // cluster_weight * metric_value / weight(T)
};

enum class SideSelection { base, exp, interleaved };

// Clusters ranked by their contribution to the overall metric, descending.
// Ties go to Base before Exp, then to the lexicographically smaller id.
std::vector<ClusterContribution> most_affected_clusters(const ClusterDiff& diff,
                                                        SideSelection sides, Metric metric,
                                                        std::size_t top_n);

}  // namespace abcde
