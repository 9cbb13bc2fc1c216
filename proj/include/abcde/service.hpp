#pragma once

// Local HTTP service over one run directory:
//   GET  /api/slice?filter=<expr>&group_by=<attr>&metric=<m>
//   GET  /api/tasks/next
//   POST /api/judgements   {"task_id", "verdict"}
//   GET  /api/quality
//   GET  /api/impact
// Handlers are plain member functions so they can be exercised without a
// socket; serve() wires them to cpp-httplib.

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "abcde/pipeline.hpp"

namespace httplib {
class Server;
}

namespace abcde {

class Service {
 public:
  struct Response {
    int status = 200;
    json body;  // null for 204
  };

  // Requires at least an item sample in the run. Tasks, final pairs and the
  // judgement log are optional.
  explicit Service(const std::filesystem::path& run_dir);
  ~Service();

  Response slice(const std::string& filter, const std::string& group_by,
                 const std::string& metric, std::size_t top_groups = 20,
                 std::size_t examples = 10) const;
  Response next_task() const;
  Response post_judgement(const std::string& body);
  Response quality() const;
  Response impact() const;

  // Blocks until stop(). Returns false if the port could not be bound.
  bool listen(const std::string& host, int port);
  // Binds an ephemeral port for tests; call listen_after_bind() on a thread.
  int bind_any_port(const std::string& host);
  bool listen_after_bind();
  void stop();

 private:
  void routes();

  std::filesystem::path run_dir_;
  std::unique_ptr<Dataset> dataset_;
  std::unique_ptr<ClusterDiff> diff_;
  ItemSample items_;
  std::vector<JudgementTask> tasks_;
  std::optional<PairSample> final_pairs_;
  std::map<std::string, Verdict> verdicts_;
  std::map<std::string, std::size_t> task_index_;
  mutable std::shared_mutex mutex_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace abcde
