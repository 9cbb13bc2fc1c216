#include "abcde/serialization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "abcde/error.hpp"
#include "abcde/slice.hpp"

namespace abcde {

json number_or_null(double value) {
  if (!std::isfinite(value)) return nullptr;
  return value;
}

double number_from_json(const json& value) {
  if (value.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!value.is_number()) throw Error(ErrorCode::parse, "expected a number, got " + value.dump());
  return value.get<double>();
}

Attributes attributes_from_json(const json& object) {
  if (!object.is_object()) throw Error(ErrorCode::parse, "attributes must be an object");
  Attributes out;
  for (const auto& [name, value] : object.items()) {
    if (value.is_boolean()) {
      out[name] = value.get<bool>();
    } else if (value.is_number()) {
      out[name] = value.get<double>();
    } else if (value.is_string()) {
      out[name] = value.get<std::string>();
    } else if (value.is_array()) {
      for (const auto& element : value) {
        if (element.is_string()) out[name + ":" + element.get<std::string>()] = true;
        else if (element.is_number() || element.is_boolean())
          out[name + ":" + attribute_text(element.is_boolean() ? AttributeValue(element.get<bool>())
                                                               : AttributeValue(element.get<double>()))] = true;
        else throw Error(ErrorCode::parse, "attribute '" + name + "' has a non-scalar element");
      }
    } else if (!value.is_null()) {
      throw Error(ErrorCode::parse, "attribute '" + name + "' must be a scalar or a list");
    }
  }
  return out;
}

json to_json(const Attributes& attributes) {
  json out = json::object();
  for (const auto& [name, value] : attributes)
    std::visit([&, n = name](const auto& v) { out[n] = v; }, value);
  return out;
}

json to_json(const ImpactTriple& t) {
  return {{"split_rate", t.split_rate},
          {"merge_rate", t.merge_rate},
          {"jaccard_distance", t.jaccard_distance}};
}

json to_json(const ClusterContribution& c) {
  return {{"cluster_id", c.cluster_id},
          {"side", std::string(to_string(c.side))},
          {"cluster_weight", c.cluster_weight},
          {"metric_value", c.metric_value},
          {"contribution", c.contribution}};
}

json impact_report_json(const ClusterDiff& diff, std::size_t top_n) {
  auto base = most_affected_clusters(diff, SideSelection::base, Metric::jd, top_n);
  auto exp = most_affected_clusters(diff, SideSelection::exp, Metric::jd, top_n);
  std::vector<ClusterContribution> merged;
  merged.reserve(base.size() + exp.size());
  std::merge(base.begin(), base.end(), exp.begin(), exp.end(), std::back_inserter(merged),
             [](const ClusterContribution& a, const ClusterContribution& b) {
               if (a.contribution != b.contribution) return a.contribution > b.contribution;
               if (a.side != b.side) return a.side == Side::base;
               return a.cluster_id < b.cluster_id;
             });
  json most = json::array();
  for (const auto& c : merged) most.push_back(to_json(c));
  const auto& ds = diff.dataset();
  return {{"overall", to_json(diff.overall())},
          {"metric", "jaccard_distance"},
          {"most_affected", std::move(most)},
          {"affected_weight_fraction", diff.affected_weight() / ds.total_weight()},
          {"item_count", ds.size()},
          {"total_weight", ds.total_weight()}};
}

namespace {

template <class T>
T field(const json& row, const char* name) {
  auto it = row.find(name);
  if (it == row.end()) throw Error(ErrorCode::parse, std::string("missing field '") + name + "'");
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, std::string("field '") + name + "': " + e.what());
  }
}

ImpactTriple triple_from_json(const json& j) {
  return {field<double>(j, "split_rate"), field<double>(j, "merge_rate"),
          field<double>(j, "jaccard_distance")};
}

}  // namespace

json to_json(const SampledItem& item) {
  return {{"item_id", item.item_id},
          {"weight", item.weight},
          {"draw_count", item.draw_count},
          {"importance_weight", item.importance_weight},
          {"impact", to_json(item.impact)},
          {"attributes", to_json(item.attributes)}};
}

SampledItem sampled_item_from_json(const json& row) {
  SampledItem s;
  s.item_id = field<std::string>(row, "item_id");
  s.weight = field<double>(row, "weight");
  s.draw_count = field<std::int64_t>(row, "draw_count");
  s.importance_weight = field<double>(row, "importance_weight");
  s.impact = triple_from_json(field<json>(row, "impact"));
  if (auto a = row.find("attributes"); a != row.end()) s.attributes = attributes_from_json(*a);
  return s;
}

json to_json(const WeightedPair& pair) {
  return {{"vantage", pair.key.vantage},
          {"other", pair.key.other},
          {"category", std::string(to_string(pair.key.category))},
          {"is_self", pair.key.is_self},
          {"weight", pair.weight},
          {"label", pair.label},
          {"draw_count", pair.draw_count},
          {"first_draw_time", pair.first_draw_time}};
}

WeightedPair weighted_pair_from_json(const json& row) {
  WeightedPair p;
  p.key.vantage = field<std::string>(row, "vantage");
  p.key.other = field<std::string>(row, "other");
  auto category = pair_category_from_string(field<std::string>(row, "category"));
  if (!category) throw Error(ErrorCode::parse, "unknown pair category in " + row.dump());
  p.key.category = *category;
  p.key.is_self = field<bool>(row, "is_self");
  p.weight = field<double>(row, "weight");
  p.label = field<int>(row, "label");
  p.draw_count = field<std::int64_t>(row, "draw_count");
  p.first_draw_time = field<double>(row, "first_draw_time");
  return p;
}

json to_json(const ClockedElement& element) {
  return {{"key", element.key}, {"weight", element.weight}, {"dt0", element.dt0}};
}

ClockedElement clocked_element_from_json(const json& row) {
  return {field<std::string>(row, "key"), field<double>(row, "weight"), field<double>(row, "dt0")};
}

json to_json(const JudgementTask& task) {
  return {{"task_id", task.task_id}, {"item_a", task.item_a}, {"item_b", task.item_b}};
}

JudgementTask judgement_task_from_json(const json& row) {
  return {field<std::string>(row, "task_id"), field<std::string>(row, "item_a"),
          field<std::string>(row, "item_b")};
}

json to_json(const Judgement& judgement) {
  return {{"task_id", judgement.task_id}, {"verdict", std::string(to_string(judgement.verdict))}};
}

Judgement judgement_from_json(const json& row) {
  Judgement j;
  j.task_id = field<std::string>(row, "task_id");
  auto name = field<std::string>(row, "verdict");
  auto verdict = verdict_from_string(name);
  if (!verdict) throw Error(ErrorCode::parse, "unknown verdict '" + name + "'");
  j.verdict = *verdict;
  return j;
}

json to_json(const Estimate& e) {
  return {{"estimate", number_or_null(e.estimate)},
          {"std_err", number_or_null(e.std_err)},
          {"n_effective", number_or_null(e.n_effective)},
          {"count", e.count}};
}

json to_json(const CategoryTotals& t) {
  return {{"split_total", t.split_total},
          {"merge_total", t.merge_total},
          {"stable_total", t.stable_total},
          {"all_total", t.all_total}};
}

json to_json(const ClassTally& t) {
  return {{"pairs", t.pairs},
          {"judged_pairs", t.judged_pairs},
          {"sampled_mass", t.sampled_mass},
          {"judged_mass", t.judged_mass}};
}

namespace {

json rate_json(const std::optional<Estimate>& e) {
  if (!e) return {{"estimate", nullptr}, {"std_err", nullptr}, {"n_effective", nullptr},
                  {"count", 0}, {"unavailable", true}};
  json j = to_json(*e);
  j["unavailable"] = false;
  return j;
}

}  // namespace

json to_json(const QualityReport& report) {
  json dp = to_json(report.delta_precision);
  dp["ci95"] = {number_or_null(report.delta_precision.ci_low()),
                number_or_null(report.delta_precision.ci_high())};
  return {{"delta_precision", std::move(dp)},
          {"good_split", rate_json(report.rates.good_split)},
          {"bad_split", rate_json(report.rates.bad_split)},
          {"good_merge", rate_json(report.rates.good_merge)},
          {"bad_merge", rate_json(report.rates.bad_merge)},
          {"totals", to_json(report.totals)},
          {"classes",
           {{"self", to_json(report.self)},
            {"split", to_json(report.split)},
            {"merge", to_json(report.merge)},
            {"intersection", to_json(report.intersection)}}},
          {"judged_pairs", report.judged_pairs},
          {"unavailable", report.unavailable},
          {"missing", report.missing},
          {"unknown_tasks", report.unknown_tasks}};
}

json to_json(const SampleEstimate& e) {
  return {{"value", number_or_null(e.value)},
          {"std_err", number_or_null(e.std_err)},
          {"count", e.count},
          {"empty_slice", e.empty_slice}};
}

json to_json(const SliceSummary& s) {
  return {{"weight", to_json(s.weight)},
          {"split_rate", to_json(s.split_rate)},
          {"merge_rate", to_json(s.merge_rate)},
          {"jaccard_distance", to_json(s.jaccard_distance)}};
}

json to_json(const SliceQuality& q) {
  return {{"descriptor", q.descriptor},
          {"delta_precision", to_json(q.delta_precision)},
          {"contribution", number_or_null(q.contribution)},
          {"pairweight", q.pairweight},
          {"weight", q.weight},
          {"insufficient_sample", q.insufficient_sample}};
}

}  // namespace abcde
