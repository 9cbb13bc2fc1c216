#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "abcde/pairs.hpp"

namespace abcde {

enum class Verdict { equivalent, not_equivalent, unavailable };

std::string_view to_string(Verdict verdict);
std::optional<Verdict> verdict_from_string(std::string_view name);

struct Judgement {
  std::string task_id;
  Verdict verdict = Verdict::unavailable;
};

enum class AnalysisClass { self, split, merge, intersection };

std::string_view to_string(AnalysisClass c);
AnalysisClass analysis_class_of(const PairKey& key);

struct JudgedPair {
  WeightedPair pair;
  Verdict verdict = Verdict::unavailable;
  AnalysisClass analysis_class = AnalysisClass::self;
  // Weight of one occurrence before rebalancing: the draw count for sampled
  // pairs, u itself when the whole population is fed in.
  double base_weight = 0;
  double rebalance_weight = 1;

  double weight() const { return base_weight * rebalance_weight; }
  bool equivalent() const { return verdict == Verdict::equivalent; }
};

struct ClassTally {
  std::size_t pairs = 0;         // unique pairs sampled
  std::size_t judged_pairs = 0;  // unique pairs kept
  double sampled_mass = 0;       // Σ base_weight over sampled pairs
  double judged_mass = 0;        // Σ base_weight over kept pairs
};

struct JudgementApplication {
  std::vector<JudgedPair> judged;  // kept pairs, rebalanced
  ClassTally self, split, merge, intersection;
  std::size_t unavailable = 0;    // pairs whose verdict was "unavailable"
  std::size_t missing = 0;        // pairs without any verdict
  std::size_t unknown_tasks = 0;  // distinct judged task ids that match no pair

  const ClassTally& tally(AnalysisClass c) const;
};

// Drops pairs whose verdict is unavailable and reweights the rest so that
// each analysis class keeps its original mass:
//   rebalance_weight = Σ_class base_weight (all) / Σ_class base_weight (kept).
// Self-pairs must already carry Verdict::equivalent.
JudgementApplication rebalance(std::vector<JudgedPair> candidates);

// Maps each sampled non-self pair to its unordered task; later judgements of
// the same task win. Self-pairs are judged equivalent automatically.
JudgementApplication apply_judgements(std::span<const WeightedPair> sampled,
                                      std::span<const Judgement> judgements);

struct Estimate {
  double estimate = 0;
  double std_err = 0;
  double n_effective = 0;
  std::size_t count = 0;

  static constexpr double kZ95 = 1.96;
  double ci_low() const { return estimate - kZ95 * std_err; }
  double ci_high() const { return estimate + kZ95 * std_err; }
};

// all_total · weighted mean of l·1(i ≡ j). Exact 0 when all_total = 0;
// otherwise throws NoJudgements on an empty input.
Estimate estimate_delta_precision(std::span<const JudgedPair> judged, const CategoryTotals& totals);

struct RateEstimates {
  // nullopt: the class has positive mass but no judged pair.
  std::optional<Estimate> good_split, bad_split, good_merge, bad_merge;
};

RateEstimates estimate_rates(std::span<const JudgedPair> judged, const CategoryTotals& totals);

using ItemPredicate = std::function<bool(ItemIndex)>;

// Σ_{i in I} Σ_j u_ij, from row masses.
double pairweight_of_slice(const ClusterDiff& diff, const ItemPredicate& in_slice);

struct SliceQuality {
  std::string descriptor;
  Estimate delta_precision;
  double contribution = 0;  // weight(I)/weight(T) · ΔPrecision(I)
  double pairweight = 0;
  double weight = 0;
  bool insufficient_sample = false;
};

// Restricts the judged pairs to vantage items in I and scales their mean by
// (weight(T)/weight(I))·pairweight(I).
SliceQuality estimate_slice_delta_precision(std::span<const JudgedPair> judged,
                                            const Dataset& dataset, const ItemPredicate& in_slice,
                                            double weight_of_slice, double pairweight);

// Same, with weight(I) and pairweight(I) computed from the dataset.
SliceQuality slice_quality(std::span<const JudgedPair> judged, const ClusterDiff& diff,
                           const ItemPredicate& in_slice, std::string descriptor = {});

struct QualityReport {
  CategoryTotals totals;
  Estimate delta_precision;
  RateEstimates rates;
  ClassTally self, split, merge, intersection;
  std::size_t judged_pairs = 0;
  std::size_t unavailable = 0;
  std::size_t missing = 0;
  std::size_t unknown_tasks = 0;
};

// An empty judged set with positive all_total yields a NaN ΔPrecision
// instead of throwing, so partially judged runs can still be reported.
QualityReport quality_report(const JudgementApplication& applied, const CategoryTotals& totals);

}  // namespace abcde
