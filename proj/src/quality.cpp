#include "abcde/quality.hpp"

#include <cmath>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "abcde/error.hpp"
#include "abcde/summation.hpp"
#include "abcde/weighted_mean.hpp"

namespace abcde {

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::equivalent: return "equivalent";
    case Verdict::not_equivalent: return "not_equivalent";
    case Verdict::unavailable: return "unavailable";
  }
  return "?";
}

std::optional<Verdict> verdict_from_string(std::string_view name) {
  if (name == "equivalent") return Verdict::equivalent;
  if (name == "not_equivalent") return Verdict::not_equivalent;
  if (name == "unavailable") return Verdict::unavailable;
  return std::nullopt;
}

std::string_view to_string(AnalysisClass c) {
  switch (c) {
    case AnalysisClass::self: return "self";
    case AnalysisClass::split: return "split";
    case AnalysisClass::merge: return "merge";
    case AnalysisClass::intersection: return "intersection";
  }
  return "?";
}

AnalysisClass analysis_class_of(const PairKey& key) {
  if (key.is_self) return AnalysisClass::self;
  switch (key.category) {
    case PairCategory::split: return AnalysisClass::split;
    case PairCategory::merge: return AnalysisClass::merge;
    case PairCategory::stable: return AnalysisClass::intersection;
  }
  return AnalysisClass::intersection;
}

const ClassTally& JudgementApplication::tally(AnalysisClass c) const {
  switch (c) {
    case AnalysisClass::self: return self;
    case AnalysisClass::split: return split;
    case AnalysisClass::merge: return merge;
    case AnalysisClass::intersection: return intersection;
  }
  return self;
}

JudgementApplication rebalance(std::vector<JudgedPair> candidates) {
  JudgementApplication out;
  ClassTally* tallies[4] = {&out.self, &out.split, &out.merge, &out.intersection};
  auto tally_of = [&](AnalysisClass c) -> ClassTally& { return *tallies[static_cast<int>(c)]; };
  std::vector<double> all[4], kept[4];
  for (const auto& p : candidates) {
    auto c = static_cast<int>(p.analysis_class);
    all[c].push_back(p.base_weight);
    ++tally_of(p.analysis_class).pairs;
    if (p.verdict != Verdict::unavailable) {
      kept[c].push_back(p.base_weight);
      ++tally_of(p.analysis_class).judged_pairs;
    }
  }
  double factor[4];
  for (int c = 0; c < 4; ++c) {
    auto& t = tally_of(static_cast<AnalysisClass>(c));
    t.sampled_mass = pairwise_sum(all[c]);
    t.judged_mass = pairwise_sum(kept[c]);
    factor[c] = t.judged_mass > 0 ? t.sampled_mass / t.judged_mass : 0.0;
  }
  for (auto& p : candidates) {
    if (p.verdict == Verdict::unavailable) continue;
    p.rebalance_weight = factor[static_cast<int>(p.analysis_class)];
    out.judged.push_back(std::move(p));
  }
  return out;
}

JudgementApplication apply_judgements(std::span<const WeightedPair> sampled,
                                      std::span<const Judgement> judgements) {
  std::unordered_map<std::string, Verdict> verdict_of;
  for (const auto& j : judgements) verdict_of[j.task_id] = j.verdict;

  std::vector<JudgedPair> candidates;
  candidates.reserve(sampled.size());
  std::unordered_set<std::string> known;
  std::size_t unavailable = 0, missing = 0;
  for (const auto& p : sampled) {
    JudgedPair jp;
    jp.pair = p;
    jp.analysis_class = analysis_class_of(p.key);
    jp.base_weight = static_cast<double>(p.draw_count);
    if (p.key.is_self) {
      jp.verdict = Verdict::equivalent;
    } else {
      auto id = task_id_for(p.key.vantage, p.key.other);
      known.insert(id);
      auto it = verdict_of.find(id);
      if (it == verdict_of.end()) {
        ++missing;
      } else {
        jp.verdict = it->second;
        if (jp.verdict == Verdict::unavailable) ++unavailable;
      }
    }
    candidates.push_back(std::move(jp));
  }
  auto out = rebalance(std::move(candidates));
  out.unavailable = unavailable;
  out.missing = missing;
  for (const auto& [id, v] : verdict_of)
    if (!known.count(id)) ++out.unknown_tasks;
  return out;
}

namespace {

Estimate scaled_mean(std::span<const double> x, std::span<const double> w, double multiplier,
                     std::size_t count) {
  auto m = weighted_mean(x, w);
  Estimate e;
  e.estimate = multiplier * m.mean;
  e.std_err = multiplier * m.std_err;
  e.n_effective = m.n_effective;
  e.count = count;
  return e;
}

Estimate exact_zero() { return Estimate{}; }

}  // namespace

Estimate estimate_delta_precision(std::span<const JudgedPair> judged, const CategoryTotals& totals) {
  if (totals.all_total == 0) {
    Estimate e = exact_zero();
    e.count = judged.size();
    return e;
  }
  if (judged.empty()) throw Error(ErrorCode::no_judgements, "no judged pairs");
  std::vector<double> x, w;
  x.reserve(judged.size());
  w.reserve(judged.size());
  for (const auto& p : judged) {
    x.push_back(p.equivalent() ? p.pair.label : 0.0);
    w.push_back(p.weight());
  }
  return scaled_mean(x, w, totals.all_total, judged.size());
}

namespace {

// good = total · mean(1(severed/joined pair is right)); bad = total - good.
void rate_pair(std::span<const JudgedPair> judged, AnalysisClass cls, double total,
               bool good_when_equivalent, std::optional<Estimate>& good,
               std::optional<Estimate>& bad) {
  if (total == 0) {
    good = exact_zero();
    bad = exact_zero();
    return;
  }
  std::vector<double> x, w;
  for (const auto& p : judged) {
    if (p.analysis_class != cls) continue;
    x.push_back(p.equivalent() == good_when_equivalent ? 1.0 : 0.0);
    w.push_back(p.weight());
  }
  if (x.empty()) return;
  good = scaled_mean(x, w, total, x.size());
  bad = *good;
  bad->estimate = total - good->estimate;
}

}  // namespace

RateEstimates estimate_rates(std::span<const JudgedPair> judged, const CategoryTotals& totals) {
  RateEstimates r;
  rate_pair(judged, AnalysisClass::split, totals.split_total, false, r.good_split, r.bad_split);
  rate_pair(judged, AnalysisClass::merge, totals.merge_total, true, r.good_merge, r.bad_merge);
  return r;
}

double pairweight_of_slice(const ClusterDiff& diff, const ItemPredicate& in_slice) {
  std::vector<double> rows;
  for (ItemIndex i = 0; i < diff.dataset().size(); ++i)
    if (!in_slice || in_slice(i)) rows.push_back(row_mass(diff, i).total());
  return pairwise_sum(rows);
}

SliceQuality estimate_slice_delta_precision(std::span<const JudgedPair> judged,
                                            const Dataset& dataset, const ItemPredicate& in_slice,
                                            double weight_of_slice, double pairweight) {
  SliceQuality q;
  q.weight = weight_of_slice;
  q.pairweight = pairweight;
  std::vector<double> x, w;
  for (const auto& p : judged) {
    auto i = dataset.find(p.pair.key.vantage);
    if (!i || (in_slice && !in_slice(*i))) continue;
    x.push_back(p.equivalent() ? p.pair.label : 0.0);
    w.push_back(p.weight());
  }
  if (pairweight == 0) {
    // No pair has positive weight from this slice: exactly zero change.
    q.delta_precision.count = x.size();
    return q;
  }
  if (x.empty() || !(weight_of_slice > 0)) {
    q.insufficient_sample = true;
    q.delta_precision.estimate = std::numeric_limits<double>::quiet_NaN();
    q.delta_precision.std_err = std::numeric_limits<double>::quiet_NaN();
    q.contribution = std::numeric_limits<double>::quiet_NaN();
    return q;
  }
  const double total = dataset.total_weight();
  q.delta_precision = scaled_mean(x, w, total / weight_of_slice * pairweight, x.size());
  q.contribution = weight_of_slice / total * q.delta_precision.estimate;
  return q;
}

SliceQuality slice_quality(std::span<const JudgedPair> judged, const ClusterDiff& diff,
                           const ItemPredicate& in_slice, std::string descriptor) {
  const auto& ds = diff.dataset();
  std::vector<ItemIndex> members;
  for (ItemIndex i = 0; i < ds.size(); ++i)
    if (!in_slice || in_slice(i)) members.push_back(i);
  auto q = estimate_slice_delta_precision(judged, ds, in_slice, ds.weight_of(members),
                                          pairweight_of_slice(diff, in_slice));
  q.descriptor = std::move(descriptor);
  return q;
}

QualityReport quality_report(const JudgementApplication& applied, const CategoryTotals& totals) {
  QualityReport r;
  r.totals = totals;
  if (applied.judged.empty() && totals.all_total != 0) {
    r.delta_precision.estimate = std::numeric_limits<double>::quiet_NaN();
    r.delta_precision.std_err = std::numeric_limits<double>::quiet_NaN();
  } else {
    r.delta_precision = estimate_delta_precision(applied.judged, totals);
  }
  r.rates = estimate_rates(applied.judged, totals);
  r.self = applied.self;
  r.split = applied.split;
  r.merge = applied.merge;
  r.intersection = applied.intersection;
  r.judged_pairs = applied.judged.size();
  r.unavailable = applied.unavailable;
  r.missing = applied.missing;
  r.unknown_tasks = applied.unknown_tasks;
  return r;
}

}  // namespace abcde
