#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <iostream>

#include "abcde/error.hpp"
#include "abcde/pipeline.hpp"
#include "abcde/service.hpp"

namespace fs = std::filesystem;
using namespace abcde;

namespace {

Service* g_service = nullptr;

void on_signal(int) {
  if (g_service) g_service->stop();
}

void copy_out(const fs::path& from, const std::string& out) {
  if (out.empty()) return;
  write_file_atomic(out, read_file(from));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compare two clusterings of a weighted item population"};
  app.require_subcommand(1);

  std::string dataset, run, out, judgements_file, host = "127.0.0.1";
  std::uint64_t seed = 1;
  std::size_t n = 1000, budget = 100, shards = 1;
  int port = 8080;

  auto* impact = app.add_subcommand("impact", "exact impact metrics and most-affected clusters");
  impact->add_option("--dataset", dataset, "clustering file (.jsonl or .tsv)")->required();
  impact->add_option("--run", run, "run directory")->required();
  impact->add_option("--out", out, "also write the report here");

  auto* items = app.add_subcommand("sample-items", "importance-sample affected items");
  items->add_option("--dataset", dataset)->required();
  items->add_option("--run", run)->required();
  items->add_option("--n", n, "unique items")->capture_default_str();
  items->add_option("--seed", seed)->capture_default_str();
  items->add_option("--shards", shards, "clock-assignment threads")->capture_default_str();
  items->add_option("--out", out);

  auto* pairs = app.add_subcommand("sample-pairs", "sample weighted pairs for judgement");
  pairs->add_option("--dataset", dataset)->required();
  pairs->add_option("--run", run)->required();
  pairs->add_option("--n", n, "unique pairs")->capture_default_str();
  pairs->add_option("--seed", seed)->capture_default_str();
  pairs->add_option("--out", out);

  auto* tasks = app.add_subcommand("export-tasks", "fill a judgement budget from the pair sample");
  tasks->add_option("--run", run)->required();
  tasks->add_option("--budget", budget)->capture_default_str();
  tasks->add_option("--out", out);

  auto* import = app.add_subcommand("import-judgements", "append verdicts to the run's log");
  import->add_option("file", judgements_file, "JSONL of {task_id, verdict}")->required();
  import->add_option("--run", run)->required();

  auto* quality = app.add_subcommand("quality", "estimate quality deltas from judgements");
  quality->add_option("--run", run)->required();
  quality->add_option("--out", out);

  auto* serve = app.add_subcommand("serve", "HTTP API for exploration and judging");
  serve->add_option("--run", run)->required();
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--host", host)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (impact->parsed()) {
      auto report = stage_impact(dataset, run);
      copy_out(fs::path(run) / "impact_report.json", out);
      std::cout << report["overall"].dump() << "\n";
    } else if (items->parsed()) {
      auto s = stage_sample_items(dataset, run, n, seed, shards);
      copy_out(fs::path(run) / "item_sample.jsonl", out);
      std::cout << "sampled " << s.items.size() << " unique items"
                << (s.population_exhausted ? " (whole affected population)" : "") << "\n";
    } else if (pairs->parsed()) {
      auto s = stage_sample_pairs(dataset, run, n, seed);
      copy_out(fs::path(run) / "pair_sample.jsonl", out);
      std::cout << "sampled " << s.pairs.size() << " unique pairs"
                << (s.population_exhausted ? " (whole pair population)" : "") << "\n";
    } else if (tasks->parsed()) {
      auto e = stage_export_tasks(run, budget);
      copy_out(fs::path(run) / "tasks.jsonl", out);
      std::cout << "exported " << e.tasks.size() << " tasks from " << e.final_pairs.size()
                << " pairs" << (e.horizon_exhausted ? " (sample exhausted before budget)" : "")
                << "\n";
    } else if (import->parsed()) {
      auto s = stage_import_judgements(run, judgements_file);
      std::cout << "imported " << s.imported << " judgements (" << s.overwritten
                << " overwritten)\n";
      if (s.unknown_tasks)
        std::cerr << "warning: skipped " << s.unknown_tasks << " judgements for unknown tasks\n";
      std::cout << "unknown_tasks " << s.unknown_tasks << "\n";
    } else if (quality->parsed()) {
      auto report = stage_quality(run);
      copy_out(fs::path(run) / "quality_report.json", out);
      std::cout << report.dump(2) << "\n";
    } else if (serve->parsed()) {
      Service service(run);
      g_service = &service;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "serving " << run << " on http://" << host << ":" << port << "\n";
      if (!service.listen(host, port)) {
        std::cerr << "error: cannot listen on " << host << ":" << port << "\n";
        return 1;
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
