#pragma once

// A run directory holds one pipeline's artifacts plus manifest.json, which
// records the content hash of every artifact and of the inputs it was built
// from. Reading an artifact whose own hash or whose inputs' hashes changed
// since it was written is a StaleArtifact error.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace abcde {

std::string content_hash(std::string_view bytes);
// Throws Error(Io) if the file cannot be read.
std::string read_file(const std::filesystem::path& path);
std::string file_hash(const std::filesystem::path& path);
// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
// Appends by rewriting through write_file_atomic, so readers never observe a
// partial line.
void append_file_atomic(const std::filesystem::path& path, std::string_view lines);

struct ArtifactRecord {
  std::string path;  // relative to the run directory (absolute for the dataset)
  std::string hash;
  std::map<std::string, std::string> upstream;  // artifact name -> hash when built
  std::string written_at;
};

class RunManifest {
 public:
  static constexpr const char* kFileName = "manifest.json";
  static constexpr const char* kDataset = "dataset";

  // Loads run_dir/manifest.json or starts an empty manifest.
  static RunManifest open(const std::filesystem::path& run_dir);
  void save() const;

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path path_of(const std::string& name) const;
  bool has(const std::string& name) const { return artifacts_.count(name) > 0; }
  const ArtifactRecord& record(const std::string& name) const;

  // Records the dataset file (absolute path + hash) and derives run_id.
  void set_dataset(const std::filesystem::path& dataset, const std::string& format);
  void set_seed(std::uint64_t seed);

  // Writes `content` as artifact `name` (file `file_name` in the run dir)
  // and records the current hashes of `upstream`.
  void write_artifact(const std::string& name, const std::string& file_name,
                      std::string_view content, const std::vector<std::string>& upstream);
  // Records a file that is maintained elsewhere (e.g. the judgement log).
  void refresh_artifact(const std::string& name, const std::string& file_name,
                        const std::vector<std::string>& upstream);

  // Throws NotFound if `name` was never written, StaleArtifact if its file or
  // any upstream no longer matches the recorded hash.
  void check(const std::string& name) const;
  // check() then read.
  std::string read_artifact(const std::string& name) const;

  const std::string& run_id() const { return run_id_; }
  std::uint64_t seed() const { return seed_; }
  const std::map<std::string, ArtifactRecord>& artifacts() const { return artifacts_; }

 private:
  std::string current_hash(const std::string& name) const;

  std::filesystem::path dir_;
  std::string run_id_;
  std::uint64_t seed_ = 0;
  std::string dataset_format_;
  std::string created_at_;
  std::map<std::string, ArtifactRecord> artifacts_;
};

}  // namespace abcde
