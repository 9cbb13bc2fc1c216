#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "abcde/error.hpp"
#include "abcde/exploration.hpp"
#include "abcde/impact.hpp"
#include "abcde/slice.hpp"
#include "support/fixtures.hpp"

using namespace abcde;

namespace {

std::set<std::string, std::less<>> ids_of(const Dataset& ds) {
  std::set<std::string, std::less<>> out;
  for (ItemIndex i = 0; i < ds.size(); ++i) out.insert(ds.id(i));
  return out;
}

oracle::Population swapped(oracle::Population pop) {
  for (auto& it : pop) std::swap(it.base, it.exp);
  return pop;
}

}  // namespace

TEST_CASE("fixture F item impacts") {
  auto ds = fixtures::to_dataset(fixtures::fixture_f());
  auto a = impact_of_item(ds, "a");
  CHECK(a.split_rate == doctest::Approx(2.0 / 3));
  CHECK(a.merge_rate == 0);
  CHECK(a.jaccard_distance == doctest::Approx(2.0 / 3));
  auto b = impact_of_item(ds, "b");
  CHECK(b.split_rate == doctest::Approx(1.0 / 3));
  CHECK(b.merge_rate == doctest::Approx(7.0 / 9));
  CHECK(b.jaccard_distance == doctest::Approx(0.8));
  auto c = impact_of_item(ds, "c");
  CHECK(c.split_rate == 0);
  CHECK(c.merge_rate == doctest::Approx(2.0 / 9));
  CHECK(c.jaccard_distance == doctest::Approx(2.0 / 9));
  CHECK_THROWS_AS(impact_of_item(ds, "zz"), Error);
}

TEST_CASE("fixture F overall and singleton") {
  auto ds = fixtures::to_dataset(fixtures::fixture_f());
  auto all = impact_of_set(ds, ids_of(ds));
  CHECK(all.split_rate == doctest::Approx(2.0 / 15).epsilon(1e-14));
  CHECK(all.merge_rate == doctest::Approx(14.0 / 45).epsilon(1e-14));
  CHECK(all.jaccard_distance == doctest::Approx(86.0 / 225).epsilon(1e-14));
  auto single = impact_of_set(ds, {"a"});
  CHECK(single.split_rate == impact_of_item(ds, "a").split_rate);
  CHECK_THROWS_AS(impact_of_set(ds, {}), Error);
  try {
    impact_of_set(ds, {});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::empty_slice);
  }
}

TEST_CASE("unchanged items are exactly zero and unaffected") {
  oracle::Population pop = {{"a", 1, "B1", "X"}, {"b", 2, "B1", "X"}, {"c", 3, "B2", "Y"}};
  auto ds = fixtures::to_dataset(pop);
  ClusterDiff diff(ds);
  for (ItemIndex i = 0; i < ds.size(); ++i) {
    CHECK(diff.impact(i).split_rate == 0);
    CHECK(diff.impact(i).merge_rate == 0);
    CHECK(diff.impact(i).jaccard_distance == 0);
    CHECK_FALSE(diff.affected(i));
  }
  CHECK(partition_affected(diff).affected.empty());
  for (const auto& c : most_affected_clusters(diff, SideSelection::interleaved, Metric::jd, 10))
    CHECK(c.contribution == 0);
}

TEST_CASE("partition: fixture F and a single move") {
  auto ds = fixtures::to_dataset(fixtures::fixture_f());
  ClusterDiff diff(ds);
  CHECK(partition_affected(diff).affected.size() == 4);

  oracle::Population pop = {{"a", 1, "B1", "E1"}, {"b", 1, "B1", "E1"}, {"c", 1, "B1", "E2"},
                            {"d", 1, "B2", "E2"}, {"e", 1, "B2", "E2"}, {"f", 1, "B3", "E3"}};
  auto moved = fixtures::to_dataset(pop);
  ClusterDiff mdiff(moved);
  auto part = partition_affected(mdiff);
  std::set<std::string> affected;
  for (auto i : part.affected) affected.insert(moved.id(i));
  CHECK(affected == std::set<std::string>{"a", "b", "c", "d", "e"});
  // Brute force: affected iff the member sets differ.
  for (ItemIndex i = 0; i < moved.size(); ++i)
    CHECK(mdiff.affected(i) == (oracle::base_cluster_of(pop, moved.id(i)) !=
                                oracle::exp_cluster_of(pop, moved.id(i))));
}

TEST_CASE("most affected clusters: fixture F") {
  auto ds = fixtures::to_dataset(fixtures::fixture_f());
  ClusterDiff diff(ds);
  auto top = most_affected_clusters(diff, SideSelection::base, Metric::jd, 2);
  REQUIRE(top.size() == 2);
  auto pop = fixtures::fixture_f();
  double ab = 3 * oracle::set_impact(pop, {"a", "b"}).jd / 10;
  double cd = 7 * oracle::set_impact(pop, {"c", "d"}).jd / 10;
  CHECK(top[0].cluster_id == "B1");
  CHECK(top[0].contribution == doctest::Approx(ab));
  CHECK(top[1].cluster_id == "B2");
  CHECK(top[1].contribution == doctest::Approx(cd));
  for (const auto& c : top)
    CHECK(c.contribution == doctest::Approx(c.cluster_weight * c.metric_value / 10));
  CHECK(most_affected_clusters(diff, SideSelection::base, Metric::jd, 50).size() == 2);
  auto inter = most_affected_clusters(diff, SideSelection::interleaved, Metric::split, 10);
  CHECK(inter.size() == 4);
  for (std::size_t k = 1; k < inter.size(); ++k) CHECK(inter[k - 1].contribution >= inter[k].contribution);
}

TEST_CASE("most affected: ties by side then id") {
  // Two disjoint, mirrored changes give equal contributions.
  oracle::Population pop = {{"a", 1, "B1", "E1"}, {"b", 1, "B1", "E2"},
                            {"c", 1, "B2", "E3"}, {"d", 1, "B2", "E4"}};
  auto ds = fixtures::to_dataset(pop);
  ClusterDiff diff(ds);
  auto top = most_affected_clusters(diff, SideSelection::interleaved, Metric::jd, 10);
  REQUIRE(top.size() == 6);
  CHECK(top[0].side == Side::base);
  CHECK(top[0].cluster_id == "B1");
  CHECK(top[1].cluster_id == "B2");
}

TEST_CASE("property: engine matches oracle on random datasets") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    auto pop = fixtures::random_population(rng);
    auto ds = fixtures::to_dataset(pop);
    ClusterDiff diff(ds);
    for (const auto& it : pop) {
      auto want = oracle::item_impact(pop, it.id);
      auto got = diff.impact(ds.index_of(it.id));
      auto direct = impact_of_item(ds, it.id);
      CHECK(std::abs(got.split_rate - want.split) <= 1e-12);
      CHECK(std::abs(got.merge_rate - want.merge) <= 1e-12);
      CHECK(std::abs(got.jaccard_distance - want.jd) <= 1e-12);
      CHECK(std::abs(direct.jaccard_distance - want.jd) <= 1e-12);
    }
  }
}

TEST_CASE("property: symmetry, composition, scale invariance, affected identity") {
  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 100; ++trial) {
    auto pop = fixtures::random_population(rng);
    auto ds = fixtures::to_dataset(pop);
    auto rev = fixtures::to_dataset(swapped(pop));
    ClusterDiff diff(ds), rdiff(rev);
    for (ItemIndex i = 0; i < ds.size(); ++i) {
      CHECK(diff.impact(i).split_rate == doctest::Approx(rdiff.impact(i).merge_rate).epsilon(1e-12));
      CHECK(diff.impact(i).jaccard_distance ==
            doctest::Approx(rdiff.impact(i).jaccard_distance).epsilon(1e-12));
    }

    // Random partition into 3 slices.
    std::vector<ItemIndex> slices[3];
    for (ItemIndex i = 0; i < ds.size(); ++i) slices[rng() % 3].push_back(i);
    double acc[3] = {0, 0, 0};
    for (auto& s : slices) {
      if (s.empty()) continue;
      auto t = diff.of_set(s);
      double w = ds.weight_of(s) / ds.total_weight();
      acc[0] += w * t.split_rate;
      acc[1] += w * t.merge_rate;
      acc[2] += w * t.jaccard_distance;
    }
    auto o = diff.overall();
    CHECK(std::abs(acc[0] - o.split_rate) <= 1e-9 * std::max(1.0, o.split_rate));
    CHECK(std::abs(acc[1] - o.merge_rate) <= 1e-9 * std::max(1.0, o.merge_rate));
    CHECK(std::abs(acc[2] - o.jaccard_distance) <= 1e-9 * std::max(1.0, o.jaccard_distance));

    auto scaled_pop = pop;
    for (auto& it : scaled_pop) it.weight *= 7.3;
    auto scaled = fixtures::to_dataset(scaled_pop);
    ClusterDiff sdiff(scaled);
    for (ItemIndex i = 0; i < ds.size(); ++i) {
      CHECK(std::abs(sdiff.impact(i).jaccard_distance - diff.impact(i).jaccard_distance) <= 1e-12);
      CHECK(std::abs(sdiff.impact(i).split_rate - diff.impact(i).split_rate) <= 1e-12);
    }

    auto part = partition_affected(diff);
    if (!part.affected.empty()) {
      auto a = diff.of_set(part.affected);
      double frac = diff.affected_weight() / ds.total_weight();
      CHECK(a.jaccard_distance * frac == doctest::Approx(o.jaccard_distance).epsilon(1e-12));
      CHECK(a.split_rate * frac == doctest::Approx(o.split_rate).epsilon(1e-12));
    }
  }
}

TEST_CASE("property: lifted Jaccard distance is a metric") {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> weight(0.1, 10);
  auto lifted = [](const std::vector<double>& w, const std::vector<int>& l, const std::vector<int>& r) {
    oracle::Population pop;
    for (std::size_t k = 0; k < w.size(); ++k)
      pop.push_back({"i" + std::to_string(k), w[k], std::to_string(l[k]), std::to_string(r[k])});
    auto ds = fixtures::to_dataset(pop);
    return ClusterDiff(ds).overall().jaccard_distance;
  };
  int violations = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> w(20);
    for (auto& x : w) x = weight(rng);
    std::vector<int> x(20), y(20), z(20);
    int kx = 1 + rng() % 6, ky = 1 + rng() % 6, kz = 1 + rng() % 6;
    for (int k = 0; k < 20; ++k) {
      x[k] = rng() % kx;
      y[k] = rng() % ky;
      z[k] = rng() % kz;
    }
    double xy = lifted(w, x, y), yx = lifted(w, y, x), xz = lifted(w, x, z), yz = lifted(w, y, z);
    if (xy < 0 || std::abs(xy - yx) > 1e-12 || xz > xy + yz + 1e-12) ++violations;
    if (lifted(w, x, x) != 0) ++violations;
    CHECK(std::abs(xy - oracle::clustering_distance(w, x, y)) <= 1e-12);
  }
  CHECK(violations == 0);
}

TEST_CASE("importance sampling: identity and estimates") {
  auto ds = fixtures::to_dataset(fixtures::fixture_f());
  ClusterDiff diff(ds);
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto sample = importance_sample_items(diff, 2, seed);
    REQUIRE(sample.items.size() == 2);
    double sum = 0;
    for (const auto& s : sample.items) {
      sum += s.importance_weight * s.impact.jaccard_distance;
      CHECK(s.draw_count >= 1);
      CHECK(s.importance_weight > 0);
    }
    CHECK(std::abs(sum - 86.0 / 225) <= 1e-12);
    auto est = estimate_impact_from_sample(sample.items, Metric::jd);
    CHECK(std::abs(est.value - 86.0 / 225) <= 1e-12);
  }
  CHECK_THROWS_AS(estimate_impact_from_sample(std::span<const SampledItem>{}, Metric::jd), Error);
}

TEST_CASE("importance sampling: unaffected items never sampled; no diff") {
  oracle::Population pop = {{"a", 1, "B1", "E1"}, {"b", 2, "B1", "E2"},
                            {"u", 5, "B9", "E9"}, {"v", 5, "B9", "E9"}};
  auto ds = fixtures::to_dataset(pop);
  ClusterDiff diff(ds);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto sample = importance_sample_items(diff, 10, seed);
    CHECK(sample.population_exhausted);
    for (const auto& s : sample.items) CHECK((s.item_id == "a" || s.item_id == "b"));
  }
  oracle::Population same = {{"a", 1, "B1", "X"}, {"b", 2, "B1", "X"}};
  auto sds = fixtures::to_dataset(same);
  ClusterDiff sdiff(sds);
  try {
    importance_sample_items(sdiff, 3, 1);
    FAIL("expected NoDiff");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::no_diff);
  }
}

TEST_CASE("importance sampling: p/q simplification") {
  std::mt19937_64 rng(77);
  auto pop = fixtures::random_population(rng, {50, 6, 0.1, 10});
  auto ds = fixtures::to_dataset(pop);
  ClusterDiff diff(ds);
  if (!(diff.overall().jaccard_distance > 0)) return;
  auto part = partition_affected(diff);
  double wA = diff.affected_weight(), wT = ds.total_weight();
  double qnorm = 0;
  for (auto i : part.affected) qnorm += ds.weight(i) * diff.impact(i).jaccard_distance;
  auto sample = importance_sample_items(diff, 10, 9);
  for (const auto& s : sample.items) {
    double p = s.weight / wA;
    double q = s.weight * s.impact.jaccard_distance / qnorm;
    for (Metric m : {Metric::split, Metric::merge, Metric::jd}) {
      double lhs = s.impact.get(m) * (p / q) * wA / wT;
      double rhs = s.impact.get(m) * diff.overall().jaccard_distance / s.impact.jaccard_distance;
      CHECK(std::abs(lhs - rhs) <= 1e-12);
    }
  }
}

TEST_CASE("importance sampling: deterministic across shards") {
  std::mt19937_64 rng(4);
  auto pop = fixtures::random_population(rng, {50, 5, 0.1, 10});
  auto ds = fixtures::to_dataset(pop);
  ClusterDiff diff(ds);
  if (!(diff.overall().jaccard_distance > 0)) return;
  auto one = importance_sample_items(diff, 7, 42, 1);
  for (std::size_t shards : {2u, 4u, 16u}) {
    auto many = importance_sample_items(diff, 7, 42, shards);
    REQUIRE(many.items.size() == one.items.size());
    for (std::size_t k = 0; k < one.items.size(); ++k) {
      CHECK(many.items[k].item_id == one.items[k].item_id);
      CHECK(many.items[k].draw_count == one.items[k].draw_count);
      CHECK(many.items[k].importance_weight == one.items[k].importance_weight);
    }
  }
}

TEST_CASE("importance sampling: fixture F convergence") {
  auto ds = fixtures::to_dataset(fixtures::fixture_f());
  ClusterDiff diff(ds);
  // Fixture F has 4 affected items, so a large sample is the whole population
  // with large draw counts; the estimate must sit within 3 standard errors.
  int inside = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto sample = importance_sample_items(diff, 3, seed);
    auto est = estimate_impact_from_sample(sample.items, Metric::split);
    if (std::abs(est.value - 2.0 / 15) <= 3 * est.std_err + 1e-12) ++inside;
  }
  CHECK(inside >= 90);
}

TEST_CASE("slices, groups and examples") {
  std::mt19937_64 rng(8);
  auto syn = fixtures::synthetic(rng, 120, 6);
  auto ds = fixtures::to_dataset(syn.population);
  ClusterDiff diff(ds);
  auto sample = importance_sample_items(diff, 40, 5);
  auto red = SliceFilter::parse("group=red");
  auto pred = [&](const SampledItem& s) { return red.matches(s.attributes); };
  auto in_red = estimate_impact_from_sample(sample.items, Metric::jd, pred);
  auto not_red = estimate_impact_from_sample(sample.items, Metric::jd,
                                             [&](const SampledItem& s) { return !pred(s); });
  CHECK(in_red.value + not_red.value == doctest::Approx(diff.overall().jaccard_distance));

  auto none = estimate_impact_from_sample(sample.items, Metric::jd,
                                          [](const SampledItem&) { return false; });
  CHECK(none.empty_slice);
  CHECK(none.value == 0);

  auto groups = group_slice(sample.items, "group", Metric::jd, 10);
  double total = 0;
  for (const auto& g : groups) total += g.summary.jaccard_distance.value;
  CHECK(total == doctest::Approx(diff.overall().jaccard_distance));
  for (std::size_t k = 1; k < groups.size(); ++k)
    CHECK(groups[k - 1].summary.jaccard_distance.value >= groups[k].summary.jaccard_distance.value);

  auto constant = group_slice(sample.items, "missing_attr", Metric::jd, 10);
  REQUIRE(constant.size() == 1);
  CHECK(constant[0].summary.jaccard_distance.value ==
        doctest::Approx(diff.overall().jaccard_distance));

  auto ex = example_items(sample.items, 5, 1, pred);
  CHECK(ex.size() <= 5);
  for (auto k : ex) CHECK(pred(sample.items[k]));
  CHECK(example_items(sample.items, 5, 1, pred) == ex);
}

TEST_CASE("slice filter parsing") {
  Attributes attrs = {{"size", 5.0}, {"group", std::string("red")}, {"color:yellow", true},
                      {"off", false}};
  CHECK(SliceFilter::parse("").matches(attrs));
  CHECK(SliceFilter::parse("size=5").matches(attrs));
  CHECK(SliceFilter::parse("size>=5, size<6").matches(attrs));
  CHECK_FALSE(SliceFilter::parse("size>5").matches(attrs));
  CHECK(SliceFilter::parse("group!=blue").matches(attrs));
  CHECK(SliceFilter::parse("color:yellow").matches(attrs));
  CHECK_FALSE(SliceFilter::parse("off").matches(attrs));
  CHECK_FALSE(SliceFilter::parse("absent").matches(attrs));
  CHECK_THROWS_AS(SliceFilter::parse("size<abc"), Error);
  auto f = SliceFilter::parse(" size <= 5 ,group=red");
  CHECK(SliceFilter::parse(f.to_string()).to_string() == f.to_string());
}
