#include "abcde/pairs.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <unordered_map>
#include <unordered_set>

#include "abcde/error.hpp"
#include "abcde/random.hpp"
#include "abcde/summation.hpp"

namespace abcde {

std::string_view to_string(PairCategory category) {
  switch (category) {
    case PairCategory::split: return "split";
    case PairCategory::merge: return "merge";
    case PairCategory::stable: return "stable";
  }
  return "?";
}

std::optional<PairCategory> pair_category_from_string(std::string_view name) {
  if (name == "split") return PairCategory::split;
  if (name == "merge") return PairCategory::merge;
  if (name == "stable") return PairCategory::stable;
  return std::nullopt;
}

namespace {

constexpr char kKeySep = '\x1f';

struct Sides {
  double wb, we, wi, w_overlap;
};

Sides sides_of(const ClusterDiff& diff, ItemIndex i) {
  const auto& ds = diff.dataset();
  return {ds.cluster_weight_of(Side::base, i), ds.cluster_weight_of(Side::exp, i), ds.weight(i),
          diff.overlap_weight(i)};
}

int stable_label(double wb, double we) { return wb >= we ? 1 : -1; }

// Raw (not divided by weight(T)) row masses.
RowMass raw_row_mass(const ClusterDiff& diff, ItemIndex i) {
  auto s = sides_of(diff, i);
  const auto& m = diff.impact(i);
  RowMass r;
  r.split = s.wi * m.split_rate;
  r.merge = s.wi * m.merge_rate;
  r.stable = s.wi * std::abs(s.wb - s.we) * s.w_overlap / (s.wb * s.we);
  return r;
}

WeightedPair make_pair(const ClusterDiff& diff, ItemIndex i, ItemIndex j, PairCategory category) {
  const auto& ds = diff.dataset();
  auto s = sides_of(diff, i);
  WeightedPair p;
  p.key = PairKey{ds.id(i), ds.id(j), category, i == j};
  double wj = ds.weight(j);
  switch (category) {
    case PairCategory::split:
      p.weight = s.wi * wj / s.wb;
      p.label = -1;
      break;
    case PairCategory::merge:
      p.weight = s.wi * wj / s.we;
      p.label = 1;
      break;
    case PairCategory::stable:
      p.weight = s.wi * wj * std::abs(s.wb - s.we) / (s.wb * s.we);
      p.label = stable_label(s.wb, s.we);
      break;
  }
  return p;
}

}  // namespace

WeightedPair pair_weight(const ClusterDiff& diff, ItemIndex i, ItemIndex j) {
  const auto& ds = diff.dataset();
  bool in_base = ds.cluster_of(Side::base, i) == ds.cluster_of(Side::base, j);
  bool in_exp = ds.cluster_of(Side::exp, i) == ds.cluster_of(Side::exp, j);
  if (in_base && in_exp) return make_pair(diff, i, j, PairCategory::stable);
  if (in_base) return make_pair(diff, i, j, PairCategory::split);
  if (in_exp) return make_pair(diff, i, j, PairCategory::merge);
  throw Error(ErrorCode::not_in_population,
              "pair (" + ds.id(i) + ", " + ds.id(j) + ") shares neither a Base nor an Exp cluster");
}

WeightedPair pair_weight(const Dataset& dataset, std::string_view i, std::string_view j) {
  ClusterDiff diff(dataset);
  return pair_weight(diff, dataset.index_of(i), dataset.index_of(j));
}

WeightedPair resolve_pair(const ClusterDiff& diff, std::string_view vantage, std::string_view other) {
  const auto& ds = diff.dataset();
  auto i = ds.find(vantage);
  auto j = ds.find(other);
  if (!i || !j)
    throw Error(ErrorCode::not_in_population, "pair (" + std::string(vantage) + ", " +
                                                  std::string(other) + ") is not in the dataset");
  return pair_weight(diff, *i, *j);
}

RowMass row_mass(const ClusterDiff& diff, ItemIndex i) {
  RowMass r = raw_row_mass(diff, i);
  double total = diff.dataset().total_weight();
  r.split /= total;
  r.merge /= total;
  r.stable /= total;
  return r;
}

CategoryTotals category_totals(const ClusterDiff& diff) {
  const auto& ds = diff.dataset();
  std::vector<double> split, merge, stable;
  split.reserve(ds.size());
  merge.reserve(ds.size());
  stable.reserve(ds.size());
  for (ItemIndex i = 0; i < ds.size(); ++i) {
    RowMass r = raw_row_mass(diff, i);
    split.push_back(r.split);
    merge.push_back(r.merge);
    stable.push_back(r.stable);
  }
  const double total = ds.total_weight();
  CategoryTotals t;
  t.split_total = pairwise_sum(split) / total;
  t.merge_total = pairwise_sum(merge) / total;
  t.stable_total = pairwise_sum(stable) / total;
  t.all_total = t.split_total + t.merge_total + t.stable_total;
  return t;
}

std::uint64_t positive_pair_count(const ClusterDiff& diff) {
  const auto& ds = diff.dataset();
  std::uint64_t count = 0;
  for (ItemIndex i = 0; i < ds.size(); ++i) {
    std::uint64_t overlap = diff.overlap_members(i).size();
    count += ds.cluster_members_of(Side::base, i).size() - overlap;
    count += ds.cluster_members_of(Side::exp, i).size() - overlap;
    if (ds.cluster_weight_of(Side::base, i) != ds.cluster_weight_of(Side::exp, i)) count += overlap;
  }
  return count;
}

std::vector<WeightedPair> enumerate_pairs(const ClusterDiff& diff) {
  const auto& ds = diff.dataset();
  std::vector<WeightedPair> out;
  std::vector<std::pair<ItemIndex, PairCategory>> row;
  for (ItemIndex i = 0; i < ds.size(); ++i) {
    row.clear();
    const auto eb = ds.cluster_of(Side::exp, i);
    const auto bb = ds.cluster_of(Side::base, i);
    const bool stable_positive =
        ds.cluster_weight_of(Side::base, i) != ds.cluster_weight_of(Side::exp, i);
    for (ItemIndex j : ds.cluster_members_of(Side::base, i)) {
      if (ds.cluster_of(Side::exp, j) != eb) row.push_back({j, PairCategory::split});
      else if (stable_positive) row.push_back({j, PairCategory::stable});
    }
    for (ItemIndex j : ds.cluster_members_of(Side::exp, i))
      if (ds.cluster_of(Side::base, j) != bb) row.push_back({j, PairCategory::merge});
    std::sort(row.begin(), row.end());
    for (auto [j, category] : row) {
      auto p = make_pair(diff, i, j, category);
      if (p.weight > 0) out.push_back(std::move(p));
    }
  }
  return out;
}

std::string pair_element_key(std::string_view vantage, std::string_view other) {
  std::string key;
  key.reserve(vantage.size() + other.size() + 1);
  key.append(vantage).push_back(kKeySep);
  key.append(other);
  return key;
}

std::pair<std::string, std::string> split_pair_element_key(std::string_view key) {
  auto sep = key.find(kKeySep);
  if (sep == std::string_view::npos)
    throw Error(ErrorCode::parse, "malformed pair key '" + std::string(key) + "'");
  return {std::string(key.substr(0, sep)), std::string(key.substr(sep + 1))};
}

std::vector<ClockedElement> PairSample::clocked() const {
  std::vector<ClockedElement> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs)
    out.push_back({pair_element_key(p.key.vantage, p.key.other), p.weight, p.first_draw_time});
  return out;
}

namespace {

// Cumulative weights of the category member set seen from one overlap cell.
struct Neighbours {
  std::vector<ItemIndex> members;
  std::vector<double> cumulative;
};

class NeighbourCache {
 public:
  explicit NeighbourCache(const ClusterDiff& diff) : diff_(diff) {}

  const Neighbours& get(ItemIndex i, PairCategory category) {
    const auto& ds = diff_.dataset();
    auto b = ds.cluster_of(Side::base, i);
    auto e = ds.cluster_of(Side::exp, i);
    auto key = std::make_tuple(b, e, category);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    Neighbours n;
    switch (category) {
      case PairCategory::split:
        for (ItemIndex j : ds.cluster_members_of(Side::base, i))
          if (ds.cluster_of(Side::exp, j) != e) n.members.push_back(j);
        break;
      case PairCategory::merge:
        for (ItemIndex j : ds.cluster_members_of(Side::exp, i))
          if (ds.cluster_of(Side::base, j) != b) n.members.push_back(j);
        break;
      case PairCategory::stable: {
        auto overlap = diff_.overlap_members(i);
        n.members.assign(overlap.begin(), overlap.end());
        break;
      }
    }
    double running = 0;
    for (ItemIndex j : n.members) {
      running += ds.weight(j);
      n.cumulative.push_back(running);
    }
    return cache_.emplace(key, std::move(n)).first->second;
  }

 private:
  const ClusterDiff& diff_;
  std::map<std::tuple<ClusterIndex, ClusterIndex, PairCategory>, Neighbours> cache_;
};

ItemIndex pick(const Neighbours& n, double u) {
  double target = u * n.cumulative.back();
  auto it = std::lower_bound(n.cumulative.begin(), n.cumulative.end(), target);
  if (it == n.cumulative.end()) --it;
  return n.members[static_cast<std::size_t>(it - n.cumulative.begin())];
}

PairSample sample_by_enumeration(const ClusterDiff& diff, std::size_t n_unique, std::uint64_t seed) {
  auto population = enumerate_pairs(diff);
  std::vector<WeightedElement> elements;
  elements.reserve(population.size());
  std::unordered_map<std::string, std::size_t> slot;
  for (std::size_t k = 0; k < population.size(); ++k) {
    auto key = pair_element_key(population[k].key.vantage, population[k].key.other);
    slot.emplace(key, k);
    elements.push_back({std::move(key), population[k].weight});
  }
  auto clocked = assign_clocks(elements, seed);
  auto drawn = sample_with_replacement(clocked, n_unique, seed);

  PairSample out;
  out.seed = seed;
  out.n_unique_requested = n_unique;
  out.horizon = drawn.horizon;
  out.population_exhausted = drawn.population_exhausted;
  for (std::size_t k = 0; k < drawn.selected.size(); ++k) {
    WeightedPair p = population[slot.at(drawn.selected[k].key)];
    p.first_draw_time = drawn.selected[k].dt0;
    p.draw_count = drawn.draws[k].draw_count;
    out.pairs.push_back(std::move(p));
  }
  return out;
}

}  // namespace

PairSample sample_pairs(const ClusterDiff& diff, std::size_t n_unique, std::uint64_t seed) {
  const auto& ds = diff.dataset();
  if (!(category_totals(diff).all_total > 0))
    throw Error(ErrorCode::no_diff, "all pair weights are zero");
  if (n_unique == 0) {
    PairSample empty;
    empty.seed = seed;
    return empty;
  }
  const std::uint64_t positive = positive_pair_count(diff);
  if (positive <= n_unique) return sample_by_enumeration(diff, n_unique, seed);

  // Superposition of one Poisson process per vantage item, rate = row mass.
  struct Vantage {
    ItemIndex item;
    RowMass mass;
    KeyedStream stream;
  };
  std::vector<Vantage> vantages;
  for (ItemIndex i = 0; i < ds.size(); ++i) {
    RowMass r = raw_row_mass(diff, i);
    if (r.total() > 0) vantages.push_back({i, r, KeyedStream(seed, ds.id(i), StreamDomain::vantage)});
  }
  using Event = std::pair<double, std::size_t>;  // time, vantage slot (slots follow id order)
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
  for (std::size_t v = 0; v < vantages.size(); ++v)
    events.push({vantages[v].stream.exponential(vantages[v].mass.total()), v});

  NeighbourCache neighbours(diff);
  PairSample out;
  out.seed = seed;
  out.n_unique_requested = n_unique;
  std::unordered_map<std::string, std::size_t> seen;
  const std::uint64_t event_cap = 1000 * static_cast<std::uint64_t>(n_unique) + 1000000;
  std::uint64_t processed = 0;

  while (out.pairs.size() < n_unique) {
    if (++processed > event_cap) return sample_by_enumeration(diff, n_unique, seed);
    auto [time, v] = events.top();
    events.pop();
    auto& vantage = vantages[v];
    const double total = vantage.mass.total();
    double u = vantage.stream.uniform() * total;
    PairCategory category = u <= vantage.mass.split                         ? PairCategory::split
                            : u <= vantage.mass.split + vantage.mass.merge ? PairCategory::merge
                                                                           : PairCategory::stable;
    // Guard against rounding landing on an empty category.
    if (category == PairCategory::stable && !(vantage.mass.stable > 0))
      category = vantage.mass.merge > 0 ? PairCategory::merge : PairCategory::split;
    if (category == PairCategory::merge && !(vantage.mass.merge > 0)) category = PairCategory::split;
    if (category == PairCategory::split && !(vantage.mass.split > 0))
      category = vantage.mass.merge > 0 ? PairCategory::merge : PairCategory::stable;

    ItemIndex j = pick(neighbours.get(vantage.item, category), vantage.stream.uniform());
    events.push({time + vantage.stream.exponential(total), v});

    auto key = pair_element_key(ds.id(vantage.item), ds.id(j));
    auto [it, fresh] = seen.try_emplace(std::move(key), out.pairs.size());
    if (fresh) {
      WeightedPair p = make_pair(diff, vantage.item, j, category);
      p.first_draw_time = time;
      out.pairs.push_back(std::move(p));
    }
    ++out.pairs[it->second].draw_count;
    out.horizon = time;
  }
  return out;
}

std::string task_id_for(std::string_view i, std::string_view j) {
  if (j < i) std::swap(i, j);
  return hex64(hash64(pair_element_key(i, j)));
}

JudgementTask task_for(const PairKey& key) {
  JudgementTask t;
  t.item_a = std::min(key.vantage, key.other);
  t.item_b = std::max(key.vantage, key.other);
  t.task_id = task_id_for(t.item_a, t.item_b);
  return t;
}

TaskExport export_judgement_tasks(const PairSample& sample, std::size_t budget) {
  TaskExport out;
  auto clocked = sample.clocked();
  std::unordered_map<std::string, std::size_t> pair_slot;
  for (std::size_t k = 0; k < clocked.size(); ++k) pair_slot.emplace(clocked[k].key, k);

  std::unordered_set<std::string> task_ids;
  bool stopped = false;
  auto stop = [&](const ClockedElement& next, std::span<const DrawResult>) {
    const auto& p = sample.pairs[pair_slot.at(next.key)];
    if (p.key.is_self) return false;
    auto task = task_for(p.key);
    if (task_ids.count(task.task_id)) return false;
    if (task_ids.size() >= budget) {
      stopped = true;
      return true;
    }
    task_ids.insert(task.task_id);
    out.tasks.push_back(std::move(task));
    return false;
  };
  auto draws = incremental_draws(clocked, sample.horizon, sample.seed, stop);
  out.horizon_exhausted = !stopped;
  for (const auto& d : draws) {
    WeightedPair p = sample.pairs[pair_slot.at(d.key)];
    p.draw_count = d.draw_count;
    out.final_pairs.push_back(std::move(p));
  }
  return out;
}

}  // namespace abcde
