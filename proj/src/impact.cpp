#include "abcde/impact.hpp"

#include <algorithm>
#include <unordered_map>

#include "abcde/error.hpp"
#include "abcde/summation.hpp"

namespace abcde {

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::split: return "split";
    case Metric::merge: return "merge";
    case Metric::jd: return "jd";
  }
  return "?";
}

std::optional<Metric> metric_from_string(std::string_view name) {
  if (name == "split" || name == "split_rate") return Metric::split;
  if (name == "merge" || name == "merge_rate") return Metric::merge;
  if (name == "jd" || name == "jaccard_distance") return Metric::jd;
  return std::nullopt;
}

namespace {

// Impact from the two cluster weights and the overlap. Exact zeros are
// produced from the counts so that unchanged extents never pick up rounding.
ImpactTriple triple_from(double base_w, double exp_w, double overlap_w, std::size_t base_n,
                         std::size_t exp_n, std::size_t overlap_n) {
  ImpactTriple t;
  double split_w = overlap_n == base_n ? 0.0 : std::max(0.0, base_w - overlap_w);
  double merge_w = overlap_n == exp_n ? 0.0 : std::max(0.0, exp_w - overlap_w);
  t.split_rate = split_w / base_w;
  t.merge_rate = merge_w / exp_w;
  if (split_w > 0 || merge_w > 0) t.jaccard_distance = (split_w + merge_w) / (overlap_w + split_w + merge_w);
  return t;
}

}  // namespace

ImpactTriple impact_of_item(const Dataset& dataset, ItemIndex item) {
  auto base = dataset.cluster_members_of(Side::base, item);
  auto exp = dataset.cluster_members_of(Side::exp, item);
  // Walk the smaller cluster and test membership in the other by cluster index.
  bool walk_base = base.size() <= exp.size();
  auto walked = walk_base ? base : exp;
  Side other = walk_base ? Side::exp : Side::base;
  ClusterIndex target = dataset.cluster_of(other, item);
  std::vector<ItemIndex> overlap;
  for (ItemIndex j : walked)
    if (dataset.cluster_of(other, j) == target) overlap.push_back(j);
  return triple_from(dataset.cluster_weight_of(Side::base, item),
                     dataset.cluster_weight_of(Side::exp, item), dataset.weight_of(overlap),
                     base.size(), exp.size(), overlap.size());
}

ImpactTriple impact_of_item(const Dataset& dataset, std::string_view item_id) {
  return impact_of_item(dataset, dataset.index_of(item_id));
}

ClusterDiff::ClusterDiff(const Dataset& dataset) : dataset_(&dataset) {
  const std::size_t n = dataset.size();
  overlap_of_.resize(n);
  std::unordered_map<std::uint64_t, std::uint32_t> cell_of;
  for (ItemIndex i = 0; i < n; ++i) {
    std::uint64_t key = (std::uint64_t{dataset.cluster_of(Side::base, i)} << 32) |
                        dataset.cluster_of(Side::exp, i);
    auto [it, inserted] = cell_of.try_emplace(key, static_cast<std::uint32_t>(overlaps_.size()));
    if (inserted) overlaps_.emplace_back();
    overlaps_[it->second].members.push_back(i);
    overlap_of_[i] = it->second;
  }
  for (auto& cell : overlaps_) cell.weight = dataset.weight_of(cell.members);

  impacts_.resize(n);
  affected_.resize(n);
  std::vector<double> affected_w;
  for (ItemIndex i = 0; i < n; ++i) {
    const auto& cell = overlaps_[overlap_of_[i]];
    auto base_n = dataset.cluster_members_of(Side::base, i).size();
    auto exp_n = dataset.cluster_members_of(Side::exp, i).size();
    impacts_[i] = triple_from(dataset.cluster_weight_of(Side::base, i),
                              dataset.cluster_weight_of(Side::exp, i), cell.weight, base_n, exp_n,
                              cell.members.size());
    affected_[i] = !(cell.members.size() == base_n && cell.members.size() == exp_n);
    if (affected_[i]) affected_w.push_back(dataset.weight(i));
  }
  affected_weight_ = pairwise_sum(affected_w);

  std::vector<ItemIndex> all(n);
  for (ItemIndex i = 0; i < n; ++i) all[i] = i;
  overall_ = of_set(all);
}

ImpactTriple ClusterDiff::of_set(std::span<const ItemIndex> items) const {
  if (items.empty()) throw Error(ErrorCode::empty_slice, "impact of an empty item set");
  std::vector<double> w, ws, wm, wj;
  w.reserve(items.size());
  ws.reserve(items.size());
  wm.reserve(items.size());
  wj.reserve(items.size());
  for (ItemIndex i : items) {
    double wi = dataset_->weight(i);
    w.push_back(wi);
    ws.push_back(wi * impacts_[i].split_rate);
    wm.push_back(wi * impacts_[i].merge_rate);
    wj.push_back(wi * impacts_[i].jaccard_distance);
  }
  double total = pairwise_sum(w);
  return ImpactTriple{pairwise_sum(ws) / total, pairwise_sum(wm) / total, pairwise_sum(wj) / total};
}

ImpactTriple impact_of_set(const ClusterDiff& diff, std::span<const ItemIndex> items) {
  return diff.of_set(items);
}

ImpactTriple impact_of_set(const Dataset& dataset,
                           const std::set<std::string, std::less<>>& item_ids) {
  std::vector<ItemIndex> items;
  items.reserve(item_ids.size());
  for (const auto& id : item_ids) items.push_back(dataset.index_of(id));
  std::sort(items.begin(), items.end());
  ClusterDiff diff(dataset);
  return diff.of_set(items);
}

AffectedPartition partition_affected(const ClusterDiff& diff) {
  AffectedPartition out;
  for (ItemIndex i = 0; i < diff.dataset().size(); ++i)
    (diff.affected(i) ? out.affected : out.unaffected).push_back(i);
  return out;
}

namespace {

void collect_side(const ClusterDiff& diff, Side side, Metric metric,
                  std::vector<ClusterContribution>& out) {
  const auto& ds = diff.dataset();
  const auto& clustering = ds.clustering(side);
  std::vector<double> terms;
  for (ClusterIndex c = 0; c < clustering.size(); ++c) {
    terms.clear();
    for (ItemIndex i : clustering.members(c)) terms.push_back(ds.weight(i) * diff.impact(i).get(metric));
    double mass = pairwise_sum(terms);
    ClusterContribution cc;
    cc.cluster_id = clustering.id(c);
    cc.side = side;
    cc.cluster_weight = clustering.weight(c);
    cc.metric_value = mass / cc.cluster_weight;
    cc.contribution = mass / ds.total_weight();
    out.push_back(std::move(cc));
  }
}

}  // namespace

std::vector<ClusterContribution> most_affected_clusters(const ClusterDiff& diff,
                                                        SideSelection sides, Metric metric,
                                                        std::size_t top_n) {
  std::vector<ClusterContribution> all;
  if (sides != SideSelection::exp) collect_side(diff, Side::base, metric, all);
  if (sides != SideSelection::base) collect_side(diff, Side::exp, metric, all);
  auto before = [](const ClusterContribution& a, const ClusterContribution& b) {
    if (a.contribution != b.contribution) return a.contribution > b.contribution;
    if (a.side != b.side) return a.side == Side::base;
    return a.cluster_id < b.cluster_id;
  };
  std::size_t keep = std::min(top_n, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(), before);
  all.resize(keep);
  return all;
}

}  // namespace abcde
