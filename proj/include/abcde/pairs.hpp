#pragma once

// Weighted pair population for quality estimation.
//
// For a vantage item i with B = Base(i), E = Exp(i) and weights wB, wE:
//   split  (j in B \ E):  u = w_i·w_j / wB,                l = -1
//   merge  (j in E \ B):  u = w_i·w_j / wE,                l = +1
//   stable (j in B ∩ E):  u = w_i·w_j·|wB - wE|/(wB·wE),   l = sgn(wB - wE), +1 on ties
// Weights here are stored without the 1/weight(T) factor; u(total) applies it.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "abcde/impact.hpp"
#include "abcde/sampler.hpp"

namespace abcde {

enum class PairCategory { split, merge, stable };

std::string_view to_string(PairCategory category);
std::optional<PairCategory> pair_category_from_string(std::string_view name);

struct PairKey {
  std::string vantage;
  std::string other;
  PairCategory category = PairCategory::stable;
  bool is_self = false;
};

struct WeightedPair {
  PairKey key;
  double weight = 0;  // u_ij · weight(T)
  int label = 1;
  std::int64_t draw_count = 0;
  double first_draw_time = 0;

  double u(double total_weight) const { return weight / total_weight; }
};

// Throws NotFound for unknown ids and NotInPopulation when j is in neither
// Base(i) nor Exp(i).
WeightedPair pair_weight(const Dataset& dataset, std::string_view i, std::string_view j);
WeightedPair pair_weight(const ClusterDiff& diff, ItemIndex i, ItemIndex j);

// Per-vantage row sums Σ_j u_ij of each category (normalized by weight(T)).
struct RowMass {
  double split = 0;
  double merge = 0;
  double stable = 0;
  double total() const { return split + merge + stable; }
};

RowMass row_mass(const ClusterDiff& diff, ItemIndex i);

struct CategoryTotals {
  double split_total = 0;
  double merge_total = 0;
  double stable_total = 0;
  double all_total = 0;
};

// One pass over vantage items; pairs are never enumerated.
CategoryTotals category_totals(const ClusterDiff& diff);

// Number of pairs with u > 0.
std::uint64_t positive_pair_count(const ClusterDiff& diff);

// Every pair with u > 0 (self-pairs included when their u is positive), in
// vantage then other order. Quadratic in cluster sizes; for tests and small
// populations.
std::vector<WeightedPair> enumerate_pairs(const ClusterDiff& diff);

// "vantage\x1fother", the sampler key of an ordered pair.
std::string pair_element_key(std::string_view vantage, std::string_view other);
std::pair<std::string, std::string> split_pair_element_key(std::string_view key);

struct PairSample {
  std::vector<WeightedPair> pairs;  // ascending first_draw_time
  double horizon = 0;
  std::uint64_t seed = 0;
  std::size_t n_unique_requested = 0;
  bool population_exhausted = false;

  std::vector<ClockedElement> clocked() const;
};

// With-replacement sample of n_unique distinct ordered pairs, pair (i, j)
// drawn with probability u_ij / all_total. Throws NoDiff when all_total = 0.
PairSample sample_pairs(const ClusterDiff& diff, std::size_t n_unique, std::uint64_t seed);

// Rebuilds u, l and category of a sampled pair from the dataset, e.g. after
// reading a persisted sample. Throws NotInPopulation if the pair no longer
// belongs to the population.
WeightedPair resolve_pair(const ClusterDiff& diff, std::string_view vantage, std::string_view other);

struct JudgementTask {
  std::string task_id;
  std::string item_a;  // item_a < item_b
  std::string item_b;
};

// Content hash of the unordered pair.
std::string task_id_for(std::string_view i, std::string_view j);
JudgementTask task_for(const PairKey& key);

struct TaskExport {
  std::vector<JudgementTask> tasks;      // in order of first draw
  std::vector<WeightedPair> final_pairs;  // draws accepted before the stop, incl. self-pairs
  bool horizon_exhausted = false;         // stopped because no draw <= M remained
};

// Replays the sample's draws one at a time (incremental draws with the
// sample's seed and horizon) until exactly `budget` distinct tasks exist or
// the horizon is exhausted. Self-pairs and repeats of existing tasks never
// count towards the budget.
TaskExport export_judgement_tasks(const PairSample& sample, std::size_t budget);

}  // namespace abcde
