#pragma once

// Stages behind the command-line tool. Each stage reads its inputs through the
// run manifest (so stale inputs are rejected) and records what it writes.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "abcde/exploration.hpp"
#include "abcde/pairs.hpp"
#include "abcde/quality.hpp"
#include "abcde/run.hpp"
#include "abcde/serialization.hpp"

namespace abcde {

namespace artifact {
inline constexpr const char* impact_report = "impact_report";
inline constexpr const char* item_sample = "item_sample";
inline constexpr const char* pair_sample = "pair_sample";
inline constexpr const char* pair_clocks = "pair_clocks";
inline constexpr const char* tasks = "tasks";
inline constexpr const char* final_pairs = "final_pairs";
inline constexpr const char* judgements = "judgements";
inline constexpr const char* quality_report = "quality_report";
}  // namespace artifact

// Artifact text forms. Sample files start with a {"meta": {...}} line.
std::string item_sample_jsonl(const ItemSample& sample);
ItemSample parse_item_sample(const std::string& text);
std::string pair_sample_jsonl(const PairSample& sample);
PairSample parse_pair_sample(const std::string& text);
std::string pair_clocks_jsonl(const PairSample& sample);
std::string tasks_jsonl(const std::vector<JudgementTask>& tasks);
std::vector<JudgementTask> parse_tasks(const std::string& text);

// Judgement log entries: {"task_id", "verdict", "source"[, "previous"]}.
// Replay keeps the last verdict per task.
struct JudgementLogEntry {
  Judgement judgement;
  std::string source;
  std::optional<Verdict> previous;
};
std::string judgement_log_line(const JudgementLogEntry& entry);
std::vector<Judgement> replay_judgement_log(const std::string& text);
// Reads an import file of {"task_id", "verdict"} lines.
std::vector<Judgement> parse_judgements(const std::string& text);

Dataset load_run_dataset(const RunManifest& manifest);

nlohmann::json stage_impact(const std::filesystem::path& dataset, const std::filesystem::path& run_dir);

ItemSample stage_sample_items(const std::filesystem::path& dataset,
                              const std::filesystem::path& run_dir, std::size_t n,
                              std::uint64_t seed, std::size_t shards = 1);

PairSample stage_sample_pairs(const std::filesystem::path& dataset,
                              const std::filesystem::path& run_dir, std::size_t n,
                              std::uint64_t seed);

TaskExport stage_export_tasks(const std::filesystem::path& run_dir, std::size_t budget);

struct ImportSummary {
  std::size_t imported = 0;
  std::size_t overwritten = 0;
  std::size_t unknown_tasks = 0;  // skipped with a warning
};

// Appends known-task verdicts to the run's judgement log.
ImportSummary stage_import_judgements(const std::filesystem::path& run_dir,
                                      const std::filesystem::path& file);

// Builds the quality report from final_pairs.jsonl and the judgement log.
QualityReport compute_run_quality(const RunManifest& manifest);
nlohmann::json stage_quality(const std::filesystem::path& run_dir);

}  // namespace abcde
