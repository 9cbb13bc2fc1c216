#include "abcde/service.hpp"

#include <httplib.h>

#include <mutex>

#include "abcde/error.hpp"
#include "abcde/slice.hpp"

namespace abcde {

namespace fs = std::filesystem;

namespace {

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::parse:
    case ErrorCode::empty_slice: return 400;
    case ErrorCode::not_found:
    case ErrorCode::unknown_task: return 404;
    case ErrorCode::stale_artifact:
    case ErrorCode::empty_sample:
    case ErrorCode::no_judgements: return 409;
    default: return 500;
  }
}

Service::Response error_response(const Error& e) {
  return {status_for(e.code()), {{"error", std::string(to_string(e.code()))}, {"message", e.what()}}};
}

json item_json(const SampledItem& s) { return to_json(s); }

json summary_values(const SliceSummary& s) {
  auto value = [](const SampleEstimate& e) { return number_or_null(e.value); };
  return {{"weight", value(s.weight)},
          {"split_rate", value(s.split_rate)},
          {"merge_rate", value(s.merge_rate)},
          {"jaccard_distance", value(s.jaccard_distance)},
          {"std_err",
           {{"weight", number_or_null(s.weight.std_err)},
            {"split_rate", number_or_null(s.split_rate.std_err)},
            {"merge_rate", number_or_null(s.merge_rate.std_err)},
            {"jaccard_distance", number_or_null(s.jaccard_distance.std_err)}}},
          {"count", s.weight.count},
          {"empty_slice", s.weight.empty_slice}};
}

}  // namespace

Service::Service(const fs::path& run_dir) : run_dir_(run_dir) {
  auto manifest = RunManifest::open(run_dir);
  dataset_ = std::make_unique<Dataset>(load_run_dataset(manifest));
  diff_ = std::make_unique<ClusterDiff>(*dataset_);
  items_ = parse_item_sample(manifest.read_artifact(artifact::item_sample));
  if (manifest.has(artifact::tasks)) tasks_ = parse_tasks(manifest.read_artifact(artifact::tasks));
  if (manifest.has(artifact::final_pairs))
    final_pairs_ = parse_pair_sample(manifest.read_artifact(artifact::final_pairs));
  for (std::size_t k = 0; k < tasks_.size(); ++k) task_index_[tasks_[k].task_id] = k;
  fs::path log = run_dir / "judgements.jsonl";
  if (fs::exists(log))
    for (const auto& j : replay_judgement_log(read_file(log))) verdicts_[j.task_id] = j.verdict;
}

Service::~Service() = default;

Service::Response Service::slice(const std::string& filter, const std::string& group_by,
                                 const std::string& metric, std::size_t top_groups,
                                 std::size_t examples) const {
  try {
    std::shared_lock lock(mutex_);
    auto parsed = SliceFilter::parse(filter);
    auto m = metric.empty() ? std::optional<Metric>(Metric::jd) : metric_from_string(metric);
    if (!m) throw Error(ErrorCode::parse, "unknown metric '" + metric + "'");
    SampledItemPredicate pred;
    if (!parsed.empty()) pred = [&](const SampledItem& s) { return parsed.matches(s.attributes); };

    json body = summary_values(summarize_slice(items_.items, pred));
    body["filter"] = parsed.to_string();
    body["metric"] = std::string(to_string(*m));
    json groups = json::array();
    if (!group_by.empty()) {
      for (const auto& g : group_slice(items_.items, group_by, *m, top_groups, pred)) {
        json row = summary_values(g.summary);
        row["value"] = g.value;
        groups.push_back(std::move(row));
      }
    }
    body["groups"] = std::move(groups);
    json ex = json::array();
    for (auto k : example_items(items_.items, examples, items_.seed, pred))
      ex.push_back(item_json(items_.items[k]));
    body["examples"] = std::move(ex);
    return {200, std::move(body)};
  } catch (const Error& e) {
    return error_response(e);
  }
}

Service::Response Service::next_task() const {
  std::shared_lock lock(mutex_);
  std::size_t remaining = 0;
  const JudgementTask* next = nullptr;
  for (const auto& t : tasks_) {
    if (verdicts_.count(t.task_id)) continue;
    ++remaining;
    if (!next) next = &t;
  }
  if (!next) return {204, nullptr};
  json body = to_json(*next);
  body["item_a_attributes"] = to_json(dataset_->attributes(dataset_->index_of(next->item_a)));
  body["item_b_attributes"] = to_json(dataset_->attributes(dataset_->index_of(next->item_b)));
  body["remaining"] = remaining;
  body["total"] = tasks_.size();
  return {200, std::move(body)};
}

Service::Response Service::post_judgement(const std::string& body) {
  try {
    json row;
    try {
      row = json::parse(body);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::parse, e.what());
    }
    auto judgement = judgement_from_json(row);
    std::unique_lock lock(mutex_);
    if (!task_index_.count(judgement.task_id))
      throw Error(ErrorCode::unknown_task, "no exported task " + judgement.task_id);
    JudgementLogEntry entry{judgement, "api", std::nullopt};
    if (auto it = verdicts_.find(judgement.task_id); it != verdicts_.end()) entry.previous = it->second;
    append_file_atomic(run_dir_ / "judgements.jsonl", judgement_log_line(entry));
    verdicts_[judgement.task_id] = judgement.verdict;
    auto manifest = RunManifest::open(run_dir_);
    manifest.refresh_artifact(artifact::judgements, "judgements.jsonl", {});
    manifest.save();
    return {200,
            {{"task_id", judgement.task_id},
             {"verdict", std::string(to_string(judgement.verdict))},
             {"overwritten", entry.previous.has_value()}}};
  } catch (const Error& e) {
    return error_response(e);
  }
}

Service::Response Service::quality() const {
  try {
    std::shared_lock lock(mutex_);
    if (!final_pairs_) throw Error(ErrorCode::not_found, "no tasks have been exported for this run");
    std::vector<Judgement> judgements;
    for (const auto& [id, v] : verdicts_) judgements.push_back({id, v});
    auto applied = apply_judgements(final_pairs_->pairs, judgements);
    return {200, to_json(quality_report(applied, category_totals(*diff_)))};
  } catch (const Error& e) {
    return error_response(e);
  }
}

Service::Response Service::impact() const {
  std::shared_lock lock(mutex_);
  return {200, impact_report_json(*diff_)};
}

void Service::routes() {
  auto reply = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    if (r.status != 204) res.set_content(r.body.dump(), "application/json");
  };
  server_->Get("/api/slice", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, slice(req.get_param_value("filter"), req.get_param_value("group_by"),
                     req.get_param_value("metric")));
  });
  server_->Get("/api/tasks/next", [this, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, next_task());
  });
  server_->Post("/api/judgements", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, post_judgement(req.body));
  });
  server_->Get("/api/quality", [this, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, quality());
  });
  server_->Get("/api/impact", [this, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, impact());
  });
}

bool Service::listen(const std::string& host, int port) {
  server_ = std::make_unique<httplib::Server>();
  routes();
  return server_->listen(host, port);
}

int Service::bind_any_port(const std::string& host) {
  server_ = std::make_unique<httplib::Server>();
  routes();
  return server_->bind_to_any_port(host);
}

bool Service::listen_after_bind() { return server_->listen_after_bind(); }

void Service::stop() {
  if (server_) server_->stop();
}

}  // namespace abcde
