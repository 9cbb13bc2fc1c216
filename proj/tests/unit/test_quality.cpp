#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "abcde/error.hpp"
#include "abcde/quality.hpp"
#include "support/fixtures.hpp"

using namespace abcde;

namespace {

// Every positive-u pair once, weighted by u, judged by `eq`.
std::vector<JudgedPair> exhaustive(const ClusterDiff& diff, const oracle::Equivalence& eq) {
  std::vector<JudgedPair> out;
  for (auto& p : enumerate_pairs(diff)) {
    JudgedPair jp;
    jp.analysis_class = analysis_class_of(p.key);
    jp.verdict = p.key.is_self || eq(p.key.vantage, p.key.other) ? Verdict::equivalent
                                                                 : Verdict::not_equivalent;
    jp.base_weight = p.weight;
    jp.pair = std::move(p);
    out.push_back(std::move(jp));
  }
  return rebalance(std::move(out)).judged;
}

std::vector<Judgement> judge(std::span<const WeightedPair> pairs, const oracle::Equivalence& eq) {
  std::vector<Judgement> out;
  for (const auto& p : pairs)
    if (!p.key.is_self)
      out.push_back({task_id_for(p.key.vantage, p.key.other),
                     eq(p.key.vantage, p.key.other) ? Verdict::equivalent : Verdict::not_equivalent});
  return out;
}

WeightedPair make(const std::string& i, const std::string& j, PairCategory c, std::int64_t dc) {
  WeightedPair p;
  p.key = {i, j, c, i == j};
  p.weight = 1;
  p.label = c == PairCategory::split ? -1 : 1;
  p.draw_count = dc;
  return p;
}

}  // namespace

TEST_CASE("rebalancing: 1000 split draws, 800 judged") {
  std::vector<WeightedPair> pairs;
  std::vector<Judgement> judgements;
  for (int k = 0; k < 1000; ++k) {
    auto p = make("v" + std::to_string(k), "o" + std::to_string(k), PairCategory::split, 1);
    if (k < 800) judgements.push_back({task_id_for(p.key.vantage, p.key.other), Verdict::not_equivalent});
    pairs.push_back(p);
  }
  auto applied = apply_judgements(pairs, judgements);
  CHECK(applied.judged.size() == 800);
  CHECK(applied.missing == 200);
  for (const auto& jp : applied.judged) CHECK(jp.rebalance_weight == doctest::Approx(1.25));
  CHECK(applied.split.sampled_mass == 1000);
  CHECK(applied.split.judged_mass == 800);
}

TEST_CASE("rebalancing: dc-weighted masses, unavailable, last verdict wins, unknown tasks") {
  std::vector<WeightedPair> pairs = {make("a", "b", PairCategory::split, 3),
                                     make("a", "c", PairCategory::split, 1),
                                     make("a", "a", PairCategory::stable, 2),
                                     make("b", "c", PairCategory::merge, 1)};
  std::vector<Judgement> js = {{task_id_for("a", "b"), Verdict::equivalent},
                               {task_id_for("c", "a"), Verdict::equivalent},
                               {task_id_for("a", "c"), Verdict::unavailable},
                               {task_id_for("b", "c"), Verdict::not_equivalent},
                               {"deadbeef", Verdict::equivalent}};
  auto applied = apply_judgements(pairs, js);
  CHECK(applied.unknown_tasks == 1);
  CHECK(applied.unavailable == 1);
  CHECK(applied.judged.size() == 3);
  for (const auto& jp : applied.judged) {
    if (jp.analysis_class == AnalysisClass::split) CHECK(jp.rebalance_weight == doctest::Approx(4.0 / 3));
    else CHECK(jp.rebalance_weight == 1);
    if (jp.analysis_class == AnalysisClass::self) CHECK(jp.verdict == Verdict::equivalent);
  }
}

TEST_CASE("rebalancing: all judged and self only") {
  std::vector<WeightedPair> pairs = {make("a", "b", PairCategory::merge, 2), make("c", "c", PairCategory::stable, 1)};
  auto applied = apply_judgements(pairs, {{{task_id_for("a", "b"), Verdict::equivalent}}});
  for (const auto& jp : applied.judged) CHECK(jp.rebalance_weight == 1);

  std::vector<WeightedPair> selfs = {make("a", "a", PairCategory::stable, 1), make("b", "b", PairCategory::stable, 4)};
  auto only = apply_judgements(selfs, {});
  CHECK(only.judged.size() == 2);
  for (const auto& jp : only.judged) {
    CHECK(jp.verdict == Verdict::equivalent);
    CHECK(jp.rebalance_weight == 1);
  }
}

TEST_CASE("fixture F exhaustive estimates") {
  auto pop = fixtures::fixture_f();
  auto ds = fixtures::to_dataset(pop);
  ClusterDiff diff(ds);
  auto totals = category_totals(diff);
  auto judged = exhaustive(diff, fixtures::fixture_f_oracle());
  auto dp = estimate_delta_precision(judged, totals);
  CHECK(dp.estimate == doctest::Approx(-14.0 / 45).epsilon(1e-12));
  CHECK(dp.ci_low() <= dp.estimate);
  CHECK(dp.ci_high() >= dp.estimate);
  auto r = estimate_rates(judged, totals);
  REQUIRE(r.good_split);
  REQUIRE(r.good_merge);
  CHECK(std::abs(r.good_split->estimate) <= 1e-15);
  CHECK(r.bad_split->estimate == doctest::Approx(2.0 / 15).epsilon(1e-12));
  CHECK(std::abs(r.good_merge->estimate) <= 1e-15);
  CHECK(r.bad_merge->estimate == doctest::Approx(14.0 / 45).epsilon(1e-12));

  // Per-item oracle values behind the total.
  auto eq = fixtures::fixture_f_oracle();
  CHECK(oracle::delta_precision_of_item(pop, "b", eq) == doctest::Approx(-7.0 / 9));
  CHECK(oracle::delta_precision_of_item(pop, "c", eq) == doctest::Approx(-2.0 / 9));
  CHECK(oracle::delta_precision_of_item(pop, "a", eq) == doctest::Approx(0));
}

TEST_CASE("trivial oracles") {
  auto ds = fixtures::to_dataset(fixtures::fixture_f());
  ClusterDiff diff(ds);
  auto totals = category_totals(diff);
  auto all = estimate_rates(exhaustive(diff, [](auto&, auto&) { return true; }), totals);
  CHECK(all.bad_split->estimate == doctest::Approx(totals.split_total));
  CHECK(std::abs(all.bad_merge->estimate) <= 1e-15);
  auto none = estimate_rates(exhaustive(diff, [](auto&, auto&) { return false; }), totals);
  CHECK(none.good_split->estimate == doctest::Approx(totals.split_total));
  CHECK(std::abs(none.good_merge->estimate) <= 1e-15);
}

TEST_CASE("Base = Exp gives exact zeros") {
  oracle::Population same = {{"a", 1, "B", "X"}, {"b", 2, "B", "X"}};
  auto ds = fixtures::to_dataset(same);
  ClusterDiff diff(ds);
  auto totals = category_totals(diff);
  auto dp = estimate_delta_precision({}, totals);
  CHECK(dp.estimate == 0);
  CHECK(dp.std_err == 0);
  auto r = estimate_rates({}, totals);
  REQUIRE(r.good_split);
  CHECK(r.good_split->estimate == 0);
  CHECK(r.bad_merge->estimate == 0);
}

TEST_CASE("no judgements") {
  auto ds = fixtures::to_dataset(fixtures::fixture_f());
  ClusterDiff diff(ds);
  try {
    estimate_delta_precision({}, category_totals(diff));
    FAIL("expected NoJudgements");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::no_judgements);
  }
  auto r = estimate_rates({}, category_totals(diff));
  CHECK_FALSE(r.good_split);
  CHECK_FALSE(r.bad_merge);
}

TEST_CASE("property: exhaustive judgements reproduce the oracle") {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 60; ++trial) {
    auto pop = fixtures::random_population(rng, {40, 6, 0.1, 10});
    // Random hidden truth over 4 labels.
    std::map<std::string, int> label;
    for (const auto& it : pop) label[it.id] = static_cast<int>(rng() % 4);
    oracle::Equivalence eq = [&](const std::string& x, const std::string& y) {
      return x == y || label.at(x) == label.at(y);
    };
    auto ds = fixtures::to_dataset(pop);
    ClusterDiff diff(ds);
    auto totals = category_totals(diff);
    if (totals.all_total == 0) continue;
    auto judged = exhaustive(diff, eq);
    auto dp = estimate_delta_precision(judged, totals);
    CHECK(dp.estimate == doctest::Approx(oracle::delta_precision(pop, eq)).epsilon(1e-9));
    auto want = oracle::rates(pop, eq);
    auto r = estimate_rates(judged, totals);
    if (totals.split_total > 0) {
      CHECK(r.good_split->estimate == doctest::Approx(want.good_split).epsilon(1e-9));
      CHECK(r.bad_split->estimate == doctest::Approx(want.bad_split).epsilon(1e-9));
      CHECK(r.good_split->estimate + r.bad_split->estimate ==
            doctest::Approx(totals.split_total).epsilon(1e-14));
    }
    if (totals.merge_total > 0) {
      CHECK(r.good_merge->estimate == doctest::Approx(want.good_merge).epsilon(1e-9));
      CHECK(r.bad_merge->estimate == doctest::Approx(want.bad_merge).epsilon(1e-9));
    }
  }
}

TEST_CASE("sign: Exp merging only true equivalents cannot lower precision") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    oracle::Population pop;
    int n = 5 + static_cast<int>(rng() % 20);
    for (int k = 0; k < n; ++k) {
      // Exp clusters are unions of Base clusters; truth = Exp clustering.
      int b = static_cast<int>(rng() % 8);
      pop.push_back({"i" + std::to_string(k), 1.0, "b" + std::to_string(b), "e" + std::to_string(b / 3)});
    }
    std::map<std::string, std::string> exp_of;
    for (const auto& it : pop) exp_of[it.id] = it.exp;
    oracle::Equivalence eq = [&](const std::string& x, const std::string& y) {
      return exp_of.at(x) == exp_of.at(y);
    };
    auto ds = fixtures::to_dataset(pop);
    ClusterDiff diff(ds);
    auto totals = category_totals(diff);
    if (totals.all_total == 0) continue;
    CHECK(estimate_delta_precision(exhaustive(diff, eq), totals).estimate >= -1e-12);
  }
}

TEST_CASE("std err scaling") {
  std::mt19937_64 rng(17);
  auto syn = fixtures::synthetic(rng, 100, 5);
  auto ds = fixtures::to_dataset(syn.population);
  ClusterDiff diff(ds);
  auto totals = category_totals(diff);
  auto sample = sample_pairs(diff, 300, 4);
  auto applied = apply_judgements(sample.pairs, judge(sample.pairs, syn.equivalence()));
  auto base = estimate_delta_precision(applied.judged, totals);

  auto doubled = applied.judged;
  for (auto& jp : doubled) jp.base_weight *= 2;
  auto d = estimate_delta_precision(doubled, totals);
  CHECK(d.estimate == doctest::Approx(base.estimate).epsilon(1e-12));
  CHECK(d.std_err == doctest::Approx(base.std_err).epsilon(1e-12));

  auto scaled_totals = totals;
  scaled_totals.all_total *= 3;
  auto s = estimate_delta_precision(applied.judged, scaled_totals);
  CHECK(s.std_err == doctest::Approx(3 * base.std_err).epsilon(1e-12));
  CHECK(s.estimate == doctest::Approx(3 * base.estimate).epsilon(1e-12));
}

TEST_CASE("pairweight of slices") {
  auto ds = fixtures::to_dataset(fixtures::fixture_f());
  ClusterDiff diff(ds);
  auto totals = category_totals(diff);
  CHECK(pairweight_of_slice(diff, {}) == doctest::Approx(totals.all_total));
  CHECK(pairweight_of_slice(diff, [](ItemIndex) { return false; }) == 0);
  ItemIndex b = ds.index_of("b");
  double expect = 0.2 * (1.0 / 3 + 7.0 / 9 + std::abs(3.0 - 9.0) / (3 * 9) * 2);
  CHECK(pairweight_of_slice(diff, [b](ItemIndex i) { return i == b; }) == doctest::Approx(expect));
}

TEST_CASE("slice estimates: whole population and partitions") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    auto syn = fixtures::synthetic(rng, 40, 4);
    auto ds = fixtures::to_dataset(syn.population);
    ClusterDiff diff(ds);
    auto totals = category_totals(diff);
    auto judged = exhaustive(diff, syn.equivalence());
    auto overall = estimate_delta_precision(judged, totals);
    auto whole = slice_quality(judged, diff, {});
    CHECK(whole.delta_precision.estimate == doctest::Approx(overall.estimate).epsilon(1e-12));
    CHECK(whole.contribution == doctest::Approx(overall.estimate).epsilon(1e-12));

    std::vector<int> slice_of(ds.size());
    for (auto& s : slice_of) s = static_cast<int>(rng() % 5);
    double sum = 0;
    for (int s = 0; s < 5; ++s) {
      auto q = slice_quality(judged, diff, [&](ItemIndex i) { return slice_of[i] == s; });
      if (q.weight == 0) continue;
      if (!q.insufficient_sample) sum += q.contribution;
      CHECK(q.contribution == doctest::Approx(q.weight / ds.total_weight() * q.delta_precision.estimate));
      std::set<std::string> ids;
      for (ItemIndex i = 0; i < ds.size(); ++i)
        if (slice_of[i] == s) ids.insert(ds.id(i));
      CHECK(q.delta_precision.estimate ==
            doctest::Approx(oracle::delta_precision_of_set(syn.population, ids, syn.equivalence())).epsilon(1e-9));
    }
    CHECK(std::abs(sum - overall.estimate) <= 1e-9);
  }
}

TEST_CASE("slice of unaffected equal-weight clusters is zero") {
  oracle::Population pop = {{"a", 1, "B1", "E1"}, {"b", 2, "B1", "E2"}, {"u", 1, "B9", "E9"}, {"v", 1, "B9", "E9"}};
  auto ds = fixtures::to_dataset(pop);
  ClusterDiff diff(ds);
  auto judged = exhaustive(diff, [](auto&, auto&) { return true; });
  ItemIndex u = ds.index_of("u"), v = ds.index_of("v");
  auto q = slice_quality(judged, diff, [&](ItemIndex i) { return i == u || i == v; });
  CHECK(q.delta_precision.estimate == 0);
  CHECK(q.contribution == 0);
  CHECK_FALSE(q.insufficient_sample);
  auto empty = estimate_slice_delta_precision({}, ds, [&](ItemIndex i) { return i == 0; }, 1.0, 0.5);
  CHECK(empty.insufficient_sample);
}

TEST_CASE("sampled estimates are unbiased over seeds") {
  std::mt19937_64 rng(61);
  auto syn = fixtures::synthetic(rng, 100, 4);
  auto ds = fixtures::to_dataset(syn.population);
  ClusterDiff diff(ds);
  auto totals = category_totals(diff);
  auto eq = syn.equivalence();
  double truth[5] = {oracle::delta_precision(syn.population, eq)};
  auto want = oracle::rates(syn.population, eq);
  truth[1] = want.good_split;
  truth[2] = want.bad_split;
  truth[3] = want.good_merge;
  truth[4] = want.bad_merge;
  std::vector<double> est[5];
  for (int seed = 0; seed < 200; ++seed) {
    auto s = sample_pairs(diff, 500, 1000 + seed);
    auto applied = apply_judgements(s.pairs, judge(s.pairs, eq));
    est[0].push_back(estimate_delta_precision(applied.judged, totals).estimate);
    auto r = estimate_rates(applied.judged, totals);
    est[1].push_back(r.good_split->estimate);
    est[2].push_back(r.bad_split->estimate);
    est[3].push_back(r.good_merge->estimate);
    est[4].push_back(r.bad_merge->estimate);
  }
  for (int m = 0; m < 5; ++m) {
    double mean = 0, sq = 0;
    for (double x : est[m]) mean += x;
    mean /= est[m].size();
    for (double x : est[m]) sq += (x - mean) * (x - mean);
    double sigma = std::sqrt(sq / (est[m].size() - 1));
    CAPTURE(m);
    CHECK(std::abs(mean - truth[m]) < 3 * sigma / std::sqrt(200.0) + 1e-12);
  }
}

TEST_CASE("self-pairs: dropping biases, rebalancing keeps class mass") {
  std::mt19937_64 rng(71);
  auto syn = fixtures::synthetic(rng, 200, 5);
  auto ds = fixtures::to_dataset(syn.population);
  ClusterDiff diff(ds);
  auto totals = category_totals(diff);
  auto eq = syn.equivalence();
  auto judged = exhaustive(diff, eq);
  double truth = estimate_delta_precision(judged, totals).estimate;

  std::vector<JudgedPair> without_self;
  for (const auto& jp : judged)
    if (jp.analysis_class != AnalysisClass::self) without_self.push_back(jp);
  double biased = estimate_delta_precision(without_self, totals).estimate;
  CHECK(std::abs(biased - truth) > 1e-3);

  // Knocking out half of every class uniformly and rebalancing stays close.
  std::vector<JudgedPair> candidates;
  for (auto jp : judged) {
    jp.rebalance_weight = 1;
    if (rng() % 2) jp.verdict = Verdict::unavailable;
    candidates.push_back(jp);
  }
  auto applied = rebalance(candidates);
  for (auto c : {AnalysisClass::self, AnalysisClass::split, AnalysisClass::merge, AnalysisClass::intersection}) {
    double mass = 0;
    for (const auto& jp : applied.judged)
      if (jp.analysis_class == c) mass += jp.weight();
    CHECK(mass == doctest::Approx(applied.tally(c).sampled_mass).epsilon(1e-9));
  }
  double rebalanced = estimate_delta_precision(applied.judged, totals).estimate;
  CHECK(std::abs(rebalanced - truth) < std::abs(biased - truth));
}

TEST_CASE("quality report") {
  auto ds = fixtures::to_dataset(fixtures::fixture_f());
  ClusterDiff diff(ds);
  auto totals = category_totals(diff);
  auto s = sample_pairs(diff, 1000, 3);
  auto applied = apply_judgements(s.pairs, judge(s.pairs, fixtures::fixture_f_oracle()));
  auto report = quality_report(applied, totals);
  CHECK(report.judged_pairs == s.pairs.size());
  CHECK(report.rates.good_split->estimate + report.rates.bad_split->estimate ==
        doctest::Approx(totals.split_total).epsilon(1e-14));
  // Only self-pairs judged: rates unavailable, ΔPrecision still reported.
  std::vector<WeightedPair> selfs;
  for (const auto& p : s.pairs)
    if (p.key.is_self) selfs.push_back(p);
  auto self_report = quality_report(apply_judgements(selfs, {}), totals);
  CHECK_FALSE(self_report.rates.good_split);
  CHECK_FALSE(self_report.rates.bad_merge);
}
