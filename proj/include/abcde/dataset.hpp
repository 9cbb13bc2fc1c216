#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace abcde {

using AttributeValue = std::variant<bool, double, std::string>;
using Attributes = std::map<std::string, AttributeValue, std::less<>>;

struct ItemRecord {
  std::string item_id;
  double weight = 1.0;
  std::string base_cluster;
  std::string exp_cluster;
  Attributes attributes;
};

enum class Side { base, exp };

std::string_view to_string(Side side);

using ItemIndex = std::uint32_t;
using ClusterIndex = std::uint32_t;

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};

template <class V>
using StringMap = std::unordered_map<std::string, V, StringHash, std::equal_to<>>;

// One side (Base or Exp) of a dataset. Cluster indices follow the lexicographic
// order of cluster ids; members of a cluster are listed in item-index order.
class Clustering {
 public:
  std::size_t size() const { return ids_.size(); }
  const std::string& id(ClusterIndex c) const { return ids_[c]; }
  std::span<const ItemIndex> members(ClusterIndex c) const { return members_[c]; }
  double weight(ClusterIndex c) const { return weights_[c]; }
  std::optional<ClusterIndex> find(std::string_view cluster_id) const;

 private:
  friend class Dataset;
  std::vector<std::string> ids_;
  std::vector<std::vector<ItemIndex>> members_;
  std::vector<double> weights_;
  StringMap<ClusterIndex> lookup_;
};

// A validated pair of clusterings over one weighted item population T.
//
// Items are indexed 0..size()-1 in lexicographic item_id order, so two
// datasets built from the same rows in any order (or from shards merged in any
// order) are identical. Immutable once built.
class Dataset {
 public:
  // Validates and indexes `records`. Throws Error with DuplicateItem,
  // InvalidWeight (weight <= 0 or non-finite), MissingAssignment (empty cluster
  // id) or EmptyPopulation (no rows).
  static Dataset build(std::vector<ItemRecord> records);

  std::size_t size() const { return ids_.size(); }
  const std::string& id(ItemIndex i) const { return ids_[i]; }
  double weight(ItemIndex i) const { return weights_[i]; }
  const Attributes& attributes(ItemIndex i) const { return attributes_[i]; }
  double total_weight() const { return total_weight_; }

  const Clustering& clustering(Side side) const { return side == Side::base ? base_ : exp_; }
  ClusterIndex cluster_of(Side side, ItemIndex i) const {
    return side == Side::base ? base_of_[i] : exp_of_[i];
  }
  double cluster_weight_of(Side side, ItemIndex i) const {
    return clustering(side).weight(cluster_of(side, i));
  }
  std::span<const ItemIndex> cluster_members_of(Side side, ItemIndex i) const {
    return clustering(side).members(cluster_of(side, i));
  }

  std::optional<ItemIndex> find(std::string_view item_id) const;
  // Like find(), but throws Error(NotFound).
  ItemIndex index_of(std::string_view item_id) const;

  ItemRecord record(ItemIndex i) const;
  std::vector<ItemRecord> records() const;

  // Weight of a set of items, by pairwise summation in the given order.
  double weight_of(std::span<const ItemIndex> items) const;

 private:
  void index_side(const std::vector<std::string>& labels, Clustering& side,
                  std::vector<ClusterIndex>& cluster_of) const;

  std::vector<std::string> ids_;
  std::vector<double> weights_;
  std::vector<Attributes> attributes_;
  std::vector<ClusterIndex> base_of_;
  std::vector<ClusterIndex> exp_of_;
  Clustering base_;
  Clustering exp_;
  StringMap<ItemIndex> index_;
  double total_weight_ = 0;
};

using Assignment = std::map<std::string, std::string, std::less<>>;
using WeightMap = std::map<std::string, double, std::less<>>;

struct RestrictionReport {
  std::size_t common_count = 0;
  std::size_t removed_from_base_count = 0;
  std::size_t removed_from_exp_count = 0;
  double removed_weight_base = 0;
  double removed_weight_exp = 0;
  // First few removed ids (lexicographic), capped by the sample_cap argument.
  std::vector<std::string> sample_removed_base;
  std::vector<std::string> sample_removed_exp;
};

// Restricts both clusterings to the ids they share. Weights missing for a
// removed id count as 0 in the report; a common id without a weight is an
// InvalidWeight error. Throws EmptyPopulation for an empty intersection.
std::pair<Dataset, RestrictionReport> restrict_to_common(const Assignment& base,
                                                         const Assignment& exp,
                                                         const WeightMap& weights,
                                                         std::size_t sample_cap = 10);

}  // namespace abcde
