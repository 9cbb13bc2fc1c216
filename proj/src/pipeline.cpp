#include "abcde/pipeline.hpp"

#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "abcde/dataset_io.hpp"
#include "abcde/error.hpp"

namespace abcde {

namespace fs = std::filesystem;

namespace {

template <class F>
void for_each_json_line(const std::string& text, F&& f) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json row;
    try {
      row = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::parse, "line " + std::to_string(line_no) + ": " + e.what());
    }
    f(row);
  }
}

std::string line_of(const json& j) { return j.dump() + "\n"; }

}  // namespace

std::string item_sample_jsonl(const ItemSample& sample) {
  std::string out = line_of({{"meta",
                              {{"seed", sample.seed},
                               {"n_unique", sample.n_unique_requested},
                               {"horizon", sample.horizon},
                               {"population_exhausted", sample.population_exhausted},
                               {"overall", to_json(sample.overall)}}}});
  for (const auto& item : sample.items) out += line_of(to_json(item));
  return out;
}

ItemSample parse_item_sample(const std::string& text) {
  ItemSample s;
  for_each_json_line(text, [&](const json& row) {
    if (auto meta = row.find("meta"); meta != row.end()) {
      s.seed = meta->at("seed").get<std::uint64_t>();
      s.n_unique_requested = meta->at("n_unique").get<std::size_t>();
      s.horizon = meta->at("horizon").get<double>();
      s.population_exhausted = meta->at("population_exhausted").get<bool>();
      const auto& o = meta->at("overall");
      s.overall = {o.at("split_rate").get<double>(), o.at("merge_rate").get<double>(),
                   o.at("jaccard_distance").get<double>()};
      return;
    }
    s.items.push_back(sampled_item_from_json(row));
  });
  return s;
}

std::string pair_sample_jsonl(const PairSample& sample) {
  std::string out = line_of({{"meta",
                              {{"seed", sample.seed},
                               {"n_unique", sample.n_unique_requested},
                               {"horizon", sample.horizon},
                               {"population_exhausted", sample.population_exhausted}}}});
  for (const auto& p : sample.pairs) out += line_of(to_json(p));
  return out;
}

PairSample parse_pair_sample(const std::string& text) {
  PairSample s;
  for_each_json_line(text, [&](const json& row) {
    if (auto meta = row.find("meta"); meta != row.end()) {
      s.seed = meta->at("seed").get<std::uint64_t>();
      s.n_unique_requested = meta->value("n_unique", std::size_t{0});
      s.horizon = meta->at("horizon").get<double>();
      s.population_exhausted = meta->value("population_exhausted", false);
      return;
    }
    s.pairs.push_back(weighted_pair_from_json(row));
  });
  return s;
}

std::string pair_clocks_jsonl(const PairSample& sample) {
  std::string out = line_of(
      {{"meta", {{"seed", sample.seed}, {"n_unique", sample.n_unique_requested}, {"M", sample.horizon}}}});
  for (const auto& c : sample.clocked()) out += line_of(to_json(c));
  return out;
}

std::string tasks_jsonl(const std::vector<JudgementTask>& tasks) {
  std::string out;
  for (const auto& t : tasks) out += line_of(to_json(t));
  return out;
}

std::vector<JudgementTask> parse_tasks(const std::string& text) {
  std::vector<JudgementTask> out;
  for_each_json_line(text, [&](const json& row) { out.push_back(judgement_task_from_json(row)); });
  return out;
}

std::string judgement_log_line(const JudgementLogEntry& entry) {
  json j = to_json(entry.judgement);
  j["source"] = entry.source;
  if (entry.previous) j["previous"] = std::string(to_string(*entry.previous));
  return line_of(j);
}

std::vector<Judgement> replay_judgement_log(const std::string& text) {
  std::map<std::string, Verdict> last;
  std::vector<std::string> order;
  for_each_json_line(text, [&](const json& row) {
    auto j = judgement_from_json(row);
    if (!last.count(j.task_id)) order.push_back(j.task_id);
    last[j.task_id] = j.verdict;
  });
  std::vector<Judgement> out;
  for (const auto& id : order) out.push_back({id, last[id]});
  return out;
}

std::vector<Judgement> parse_judgements(const std::string& text) {
  std::vector<Judgement> out;
  for_each_json_line(text, [&](const json& row) { out.push_back(judgement_from_json(row)); });
  return out;
}

Dataset load_run_dataset(const RunManifest& manifest) {
  manifest.check(RunManifest::kDataset);
  return load_dataset(manifest.path_of(RunManifest::kDataset));
}

namespace {

std::string format_name(const fs::path& dataset) {
  return format_from_path(dataset) == DatasetFormat::tsv ? "tsv" : "jsonl";
}

// Loads the dataset first so a bad file never reaches the manifest.
std::pair<Dataset, RunManifest> open_with_dataset(const fs::path& dataset, const fs::path& run_dir) {
  Dataset ds = load_dataset(dataset);
  auto manifest = RunManifest::open(run_dir);
  manifest.set_dataset(dataset, format_name(dataset));
  return {std::move(ds), std::move(manifest)};
}

}  // namespace

json stage_impact(const fs::path& dataset, const fs::path& run_dir) {
  auto [ds, manifest] = open_with_dataset(dataset, run_dir);
  ClusterDiff diff(ds);
  json report = impact_report_json(diff);
  manifest.write_artifact(artifact::impact_report, "impact_report.json", report.dump(2) + "\n",
                          {RunManifest::kDataset});
  manifest.save();
  return report;
}

ItemSample stage_sample_items(const fs::path& dataset, const fs::path& run_dir, std::size_t n,
                              std::uint64_t seed, std::size_t shards) {
  auto [ds, manifest] = open_with_dataset(dataset, run_dir);
  manifest.set_seed(seed);
  ClusterDiff diff(ds);
  auto sample = importance_sample_items(diff, n, seed, shards);
  manifest.write_artifact(artifact::item_sample, "item_sample.jsonl", item_sample_jsonl(sample),
                          {RunManifest::kDataset});
  manifest.save();
  return sample;
}

PairSample stage_sample_pairs(const fs::path& dataset, const fs::path& run_dir, std::size_t n,
                              std::uint64_t seed) {
  auto [ds, manifest] = open_with_dataset(dataset, run_dir);
  manifest.set_seed(seed);
  ClusterDiff diff(ds);
  auto sample = sample_pairs(diff, n, seed);
  manifest.write_artifact(artifact::pair_sample, "pair_sample.jsonl", pair_sample_jsonl(sample),
                          {RunManifest::kDataset});
  manifest.write_artifact(artifact::pair_clocks, "pair_clocks.jsonl", pair_clocks_jsonl(sample),
                          {artifact::pair_sample});
  manifest.save();
  return sample;
}

TaskExport stage_export_tasks(const fs::path& run_dir, std::size_t budget) {
  auto manifest = RunManifest::open(run_dir);
  auto sample = parse_pair_sample(manifest.read_artifact(artifact::pair_sample));
  auto exported = export_judgement_tasks(sample, budget);

  std::string final_text = line_of({{"meta",
                                     {{"seed", sample.seed},
                                      {"budget", budget},
                                      {"horizon", sample.horizon},
                                      {"horizon_exhausted", exported.horizon_exhausted}}}});
  for (const auto& p : exported.final_pairs) final_text += line_of(to_json(p));

  manifest.write_artifact(artifact::tasks, "tasks.jsonl", tasks_jsonl(exported.tasks),
                          {artifact::pair_sample});
  manifest.write_artifact(artifact::final_pairs, "final_pairs.jsonl", final_text,
                          {artifact::pair_sample});
  manifest.save();
  return exported;
}

ImportSummary stage_import_judgements(const fs::path& run_dir, const fs::path& file) {
  auto manifest = RunManifest::open(run_dir);
  auto tasks = parse_tasks(manifest.read_artifact(artifact::tasks));
  std::unordered_set<std::string> known;
  for (const auto& t : tasks) known.insert(t.task_id);

  auto incoming = parse_judgements(read_file(file));
  fs::path log = run_dir / "judgements.jsonl";
  std::map<std::string, Verdict> current;
  if (fs::exists(log))
    for (const auto& j : replay_judgement_log(read_file(log))) current[j.task_id] = j.verdict;

  ImportSummary summary;
  std::string lines;
  for (const auto& j : incoming) {
    if (!known.count(j.task_id)) {
      ++summary.unknown_tasks;
      continue;
    }
    JudgementLogEntry entry{j, "import", std::nullopt};
    if (auto it = current.find(j.task_id); it != current.end()) {
      entry.previous = it->second;
      ++summary.overwritten;
    }
    current[j.task_id] = j.verdict;
    lines += judgement_log_line(entry);
    ++summary.imported;
  }
  append_file_atomic(log, lines);
  manifest.refresh_artifact(artifact::judgements, "judgements.jsonl", {artifact::tasks});
  manifest.save();
  return summary;
}

QualityReport compute_run_quality(const RunManifest& manifest) {
  Dataset ds = load_run_dataset(manifest);
  ClusterDiff diff(ds);
  auto final_pairs = parse_pair_sample(manifest.read_artifact(artifact::final_pairs));
  std::vector<Judgement> judgements;
  fs::path log = manifest.dir() / "judgements.jsonl";
  if (fs::exists(log)) judgements = replay_judgement_log(read_file(log));
  auto applied = apply_judgements(final_pairs.pairs, judgements);
  return quality_report(applied, category_totals(diff));
}

json stage_quality(const fs::path& run_dir) {
  auto manifest = RunManifest::open(run_dir);
  json report = to_json(compute_run_quality(manifest));
  std::vector<std::string> upstream = {RunManifest::kDataset, artifact::final_pairs};
  if (fs::exists(run_dir / "judgements.jsonl")) {
    manifest.refresh_artifact(artifact::judgements, "judgements.jsonl", {});
    upstream.push_back(artifact::judgements);
  }
  manifest.write_artifact(artifact::quality_report, "quality_report.json", report.dump(2) + "\n",
                          upstream);
  manifest.save();
  return report;
}

}  // namespace abcde
