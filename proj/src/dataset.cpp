#include "abcde/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "abcde/error.hpp"
#include "abcde/summation.hpp"

namespace abcde {

std::string_view to_string(Side side) { return side == Side::base ? "base" : "exp"; }

std::optional<ClusterIndex> Clustering::find(std::string_view cluster_id) const {
  auto it = lookup_.find(cluster_id);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

void Dataset::index_side(const std::vector<std::string>& labels, Clustering& side,
                         std::vector<ClusterIndex>& cluster_of) const {
  side.ids_ = labels;
  std::sort(side.ids_.begin(), side.ids_.end());
  side.ids_.erase(std::unique(side.ids_.begin(), side.ids_.end()), side.ids_.end());
  side.lookup_.reserve(side.ids_.size());
  for (ClusterIndex c = 0; c < side.ids_.size(); ++c) side.lookup_.emplace(side.ids_[c], c);

  side.members_.assign(side.ids_.size(), {});
  cluster_of.resize(labels.size());
  for (ItemIndex i = 0; i < labels.size(); ++i) {
    ClusterIndex c = side.lookup_.find(labels[i])->second;
    cluster_of[i] = c;
    side.members_[c].push_back(i);
  }

  side.weights_.resize(side.ids_.size());
  for (ClusterIndex c = 0; c < side.ids_.size(); ++c) side.weights_[c] = weight_of(side.members_[c]);
}

Dataset Dataset::build(std::vector<ItemRecord> records) {
  if (records.empty()) throw Error(ErrorCode::empty_population, "dataset has no items");

  std::sort(records.begin(), records.end(),
            [](const ItemRecord& a, const ItemRecord& b) { return a.item_id < b.item_id; });

  Dataset ds;
  std::vector<std::string> base_labels, exp_labels;
  ds.ids_.reserve(records.size());
  for (std::size_t k = 0; k < records.size(); ++k) {
    auto& r = records[k];
    if (k > 0 && ds.ids_.back() == r.item_id)
      throw Error(ErrorCode::duplicate_item, "item_id '" + r.item_id + "' appears more than once");
    if (!std::isfinite(r.weight) || r.weight <= 0)
      throw Error(ErrorCode::invalid_weight,
                  "item '" + r.item_id + "' has weight " + std::to_string(r.weight));
    if (r.base_cluster.empty() || r.exp_cluster.empty())
      throw Error(ErrorCode::missing_assignment, "item '" + r.item_id + "' lacks a cluster id");
    ds.ids_.push_back(std::move(r.item_id));
    ds.weights_.push_back(r.weight);
    ds.attributes_.push_back(std::move(r.attributes));
    base_labels.push_back(std::move(r.base_cluster));
    exp_labels.push_back(std::move(r.exp_cluster));
  }

  ds.index_.reserve(ds.ids_.size());
  for (ItemIndex i = 0; i < ds.ids_.size(); ++i) ds.index_.emplace(ds.ids_[i], i);

  ds.index_side(base_labels, ds.base_, ds.base_of_);
  ds.index_side(exp_labels, ds.exp_, ds.exp_of_);
  ds.total_weight_ = pairwise_sum(ds.weights_);
  return ds;
}

std::optional<ItemIndex> Dataset::find(std::string_view item_id) const {
  auto it = index_.find(item_id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

ItemIndex Dataset::index_of(std::string_view item_id) const {
  auto i = find(item_id);
  if (!i) throw Error(ErrorCode::not_found, "unknown item '" + std::string(item_id) + "'");
  return *i;
}

ItemRecord Dataset::record(ItemIndex i) const {
  return ItemRecord{ids_[i], weights_[i], base_.id(base_of_[i]), exp_.id(exp_of_[i]),
                    attributes_[i]};
}

std::vector<ItemRecord> Dataset::records() const {
  std::vector<ItemRecord> out;
  out.reserve(size());
  for (ItemIndex i = 0; i < size(); ++i) out.push_back(record(i));
  return out;
}

double Dataset::weight_of(std::span<const ItemIndex> items) const {
  std::vector<double> w;
  w.reserve(items.size());
  for (ItemIndex i : items) w.push_back(weights_[i]);
  return pairwise_sum(w);
}

std::pair<Dataset, RestrictionReport> restrict_to_common(const Assignment& base,
                                                         const Assignment& exp,
                                                         const WeightMap& weights,
                                                         std::size_t sample_cap) {
  RestrictionReport report;
  auto weight_or_zero = [&](const std::string& id) {
    auto it = weights.find(id);
    return it == weights.end() ? 0.0 : it->second;
  };

  std::vector<ItemRecord> common;
  std::vector<double> dropped_base, dropped_exp;
  for (const auto& [id, cluster] : base) {
    auto other = exp.find(id);
    if (other == exp.end()) {
      ++report.removed_from_base_count;
      dropped_base.push_back(weight_or_zero(id));
      if (report.sample_removed_base.size() < sample_cap) report.sample_removed_base.push_back(id);
      continue;
    }
    auto w = weights.find(id);
    if (w == weights.end())
      throw Error(ErrorCode::invalid_weight, "no weight for common item '" + id + "'");
    common.push_back(ItemRecord{id, w->second, cluster, other->second, {}});
  }
  for (const auto& [id, cluster] : exp) {
    if (base.count(id)) continue;
    ++report.removed_from_exp_count;
    dropped_exp.push_back(weight_or_zero(id));
    if (report.sample_removed_exp.size() < sample_cap) report.sample_removed_exp.push_back(id);
  }
  report.removed_weight_base = pairwise_sum(dropped_base);
  report.removed_weight_exp = pairwise_sum(dropped_exp);
  report.common_count = common.size();

  if (common.empty())
    throw Error(ErrorCode::empty_population, "the two clusterings share no items");
  return {Dataset::build(std::move(common)), std::move(report)};
}

}  // namespace abcde
