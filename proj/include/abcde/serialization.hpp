#pragma once

// JSON forms of the engine's values. Non-finite numbers are written as null.

#include <json.hpp>

#include "abcde/exploration.hpp"
#include "abcde/impact.hpp"
#include "abcde/pairs.hpp"
#include "abcde/quality.hpp"

namespace abcde {

using nlohmann::json;

json number_or_null(double value);
// Inverse of number_or_null; also accepts integers.
double number_from_json(const json& value);

// Lists expand to "name:element" = true; nested objects are rejected.
Attributes attributes_from_json(const json& object);
json to_json(const Attributes& attributes);

json to_json(const ImpactTriple& t);
json to_json(const ClusterContribution& c);

// {"overall", "most_affected" (top_n per side, interleaved), "affected_weight_fraction"}
json impact_report_json(const ClusterDiff& diff, std::size_t top_n = 100);

json to_json(const SampledItem& item);
SampledItem sampled_item_from_json(const json& row);

json to_json(const WeightedPair& pair);
WeightedPair weighted_pair_from_json(const json& row);

json to_json(const ClockedElement& element);
ClockedElement clocked_element_from_json(const json& row);

json to_json(const JudgementTask& task);
JudgementTask judgement_task_from_json(const json& row);

json to_json(const Judgement& judgement);
// Throws Error(ParseError) on an unknown verdict.
Judgement judgement_from_json(const json& row);

json to_json(const Estimate& e);
json to_json(const CategoryTotals& t);
json to_json(const ClassTally& t);
json to_json(const QualityReport& report);

json to_json(const SampleEstimate& e);
json to_json(const SliceSummary& s);
json to_json(const SliceQuality& q);

}  // namespace abcde
