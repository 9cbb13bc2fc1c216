#include "abcde/exploration.hpp"

#include <algorithm>
#include <map>

#include "abcde/error.hpp"
#include "abcde/sampler.hpp"
#include "abcde/slice.hpp"
#include "abcde/summation.hpp"
#include "abcde/weighted_mean.hpp"

namespace abcde {

ItemSample importance_sample_items(const ClusterDiff& diff, std::size_t n_unique,
                                   std::uint64_t seed, std::size_t shards) {
  const auto& ds = diff.dataset();
  const double jd_total = diff.overall().jaccard_distance;
  if (!(jd_total > 0)) throw Error(ErrorCode::no_diff, "Base and Exp have identical extents");

  std::vector<WeightedElement> elements;
  for (ItemIndex i = 0; i < ds.size(); ++i) {
    double jd = diff.impact(i).jaccard_distance;
    if (jd > 0) elements.push_back({ds.id(i), ds.weight(i) * jd});
  }

  ItemSample out;
  out.seed = seed;
  out.n_unique_requested = n_unique;
  out.overall = diff.overall();
  out.population_exhausted = n_unique >= elements.size();
  auto selected = sharded_smallest_clocks(elements, seed, n_unique, shards);
  if (selected.empty()) return out;
  out.horizon = selected.back().dt0;
  auto draws = poisson_tail_draws(selected, out.horizon, seed);

  std::vector<double> counts;
  for (const auto& d : draws) counts.push_back(static_cast<double>(d.draw_count));
  const double total_draws = pairwise_sum(counts);

  out.items.reserve(selected.size());
  for (std::size_t k = 0; k < selected.size(); ++k) {
    ItemIndex i = ds.index_of(selected[k].key);
    SampledItem s;
    s.item_id = selected[k].key;
    s.weight = ds.weight(i);
    s.draw_count = draws[k].draw_count;
    s.impact = diff.impact(i);
    s.importance_weight = (static_cast<double>(s.draw_count) / total_draws) *
                          (jd_total / s.impact.jaccard_distance);
    s.attributes = ds.attributes(i);
    out.items.push_back(std::move(s));
  }
  return out;
}

namespace {

// Per-draw observation whose dc-weighted mean equals Σ_{slice} w(i)·f(i).
SampleEstimate estimate_with(std::span<const SampledItem> sample,
                             const SampledItemPredicate& in_slice,
                             const std::function<double(const SampledItem&)>& f) {
  if (sample.empty()) throw Error(ErrorCode::empty_sample, "item sample is empty");
  std::vector<double> counts;
  counts.reserve(sample.size());
  for (const auto& s : sample) counts.push_back(static_cast<double>(s.draw_count));
  const double total_draws = pairwise_sum(counts);

  SampleEstimate est;
  std::vector<double> x, terms;
  x.reserve(sample.size());
  for (const auto& s : sample) {
    bool hit = !in_slice || in_slice(s);
    double contribution = hit ? s.importance_weight * f(s) : 0.0;
    if (hit) {
      ++est.count;
      terms.push_back(contribution);
    }
    x.push_back(contribution * total_draws / static_cast<double>(s.draw_count));
  }
  est.empty_slice = est.count == 0;
  if (est.empty_slice) return est;
  est.value = pairwise_sum(terms);
  est.std_err = weighted_mean(x, counts).std_err;
  return est;
}

}  // namespace

SampleEstimate estimate_impact_from_sample(std::span<const SampledItem> sample, Metric metric,
                                           const SampledItemPredicate& in_slice) {
  return estimate_with(sample, in_slice,
                       [metric](const SampledItem& s) { return s.impact.get(metric); });
}

SliceSummary summarize_slice(std::span<const SampledItem> sample,
                             const SampledItemPredicate& in_slice) {
  SliceSummary out;
  out.weight = estimate_with(sample, in_slice, [](const SampledItem&) { return 1.0; });
  out.split_rate = estimate_impact_from_sample(sample, Metric::split, in_slice);
  out.merge_rate = estimate_impact_from_sample(sample, Metric::merge, in_slice);
  out.jaccard_distance = estimate_impact_from_sample(sample, Metric::jd, in_slice);
  return out;
}

std::vector<GroupSummary> group_slice(std::span<const SampledItem> sample,
                                      const std::string& attribute, Metric order_by,
                                      std::size_t top, const SampledItemPredicate& in_slice) {
  auto group_of = [&](const SampledItem& s) {
    auto it = s.attributes.find(attribute);
    return it == s.attributes.end() ? std::string("(missing)") : attribute_text(it->second);
  };
  std::map<std::string, int> keys;
  for (const auto& s : sample)
    if (!in_slice || in_slice(s)) keys.emplace(group_of(s), 0);

  std::vector<GroupSummary> groups;
  for (const auto& [value, unused] : keys) {
    auto pred = [&, v = value](const SampledItem& s) {
      return (!in_slice || in_slice(s)) && group_of(s) == v;
    };
    groups.push_back({value, summarize_slice(sample, pred)});
  }
  auto metric_of = [order_by](const GroupSummary& g) {
    switch (order_by) {
      case Metric::split: return g.summary.split_rate.value;
      case Metric::merge: return g.summary.merge_rate.value;
      case Metric::jd: return g.summary.jaccard_distance.value;
    }
    return 0.0;
  };
  std::stable_sort(groups.begin(), groups.end(), [&](const GroupSummary& a, const GroupSummary& b) {
    return metric_of(a) > metric_of(b);
  });
  if (groups.size() > top) groups.resize(top);
  return groups;
}

std::vector<std::size_t> example_items(std::span<const SampledItem> sample, std::size_t n,
                                       std::uint64_t seed, const SampledItemPredicate& in_slice) {
  std::vector<ClockedElement> clocked;
  std::map<std::string, std::size_t> position;
  for (std::size_t k = 0; k < sample.size(); ++k) {
    const auto& s = sample[k];
    if ((in_slice && !in_slice(s)) || !(s.importance_weight > 0)) continue;
    KeyedStream stream(seed, s.item_id, StreamDomain::examples);
    clocked.push_back({s.item_id, s.importance_weight, stream.exponential(s.importance_weight)});
    position[s.item_id] = k;
  }
  std::vector<std::size_t> out;
  for (const auto& key : sample_without_replacement(clocked, n)) out.push_back(position[key]);
  return out;
}

}  // namespace abcde
