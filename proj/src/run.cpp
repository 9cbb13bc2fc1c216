#include "abcde/run.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include "abcde/error.hpp"
#include "abcde/random.hpp"
#include "abcde/serialization.hpp"

namespace abcde {

namespace fs = std::filesystem;

std::string content_hash(std::string_view bytes) {
  // Two independently salted 64-bit hashes.
  return hex64(hash64(bytes, 0x9e3779b97f4a7c15ULL)) + hex64(hash64(bytes, 0xc2b2ae3d27d4eb4fULL));
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string file_hash(const fs::path& path) { return content_hash(read_file(path)); }

void write_file_atomic(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::io, "cannot rename " + tmp.string() + ": " + ec.message());
}

void append_file_atomic(const fs::path& path, std::string_view lines) {
  std::string content = fs::exists(path) ? read_file(path) : std::string();
  if (!content.empty() && content.back() != '\n') content.push_back('\n');
  content.append(lines);
  write_file_atomic(path, content);
}

namespace {

std::string now_utc() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

RunManifest RunManifest::open(const fs::path& run_dir) {
  RunManifest m;
  m.dir_ = run_dir;
  fs::path file = run_dir / kFileName;
  if (!fs::exists(file)) {
    m.created_at_ = now_utc();
    return m;
  }
  json j;
  try {
    j = json::parse(read_file(file));
    m.run_id_ = j.value("run_id", "");
    m.seed_ = j.value("seed", std::uint64_t{0});
    m.created_at_ = j.value("created_at", "");
    if (j.contains("dataset")) m.dataset_format_ = j["dataset"].value("format", "");
    for (const auto& [name, a] : j.at("artifacts").items()) {
      ArtifactRecord r;
      r.path = a.at("path").get<std::string>();
      r.hash = a.at("hash").get<std::string>();
      r.written_at = a.value("written_at", "");
      for (const auto& [up, h] : a.at("upstream").items()) r.upstream[up] = h.get<std::string>();
      m.artifacts_[name] = std::move(r);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, "corrupt manifest " + file.string() + ": " + e.what());
  }
  return m;
}

void RunManifest::save() const {
  json artifacts = json::object();
  for (const auto& [name, r] : artifacts_) {
    artifacts[name] = {{"path", r.path}, {"hash", r.hash}, {"upstream", r.upstream},
                       {"written_at", r.written_at}};
  }
  json j = {{"run_id", run_id_}, {"seed", seed_}, {"created_at", created_at_},
            {"updated_at", now_utc()}, {"artifacts", std::move(artifacts)}};
  if (has(kDataset)) {
    const auto& d = artifacts_.at(kDataset);
    j["dataset"] = {{"path", d.path}, {"hash", d.hash}, {"format", dataset_format_}};
  }
  write_file_atomic(dir_ / kFileName, j.dump(2) + "\n");
}

fs::path RunManifest::path_of(const std::string& name) const {
  fs::path p = record(name).path;
  return p.is_absolute() ? p : dir_ / p;
}

const ArtifactRecord& RunManifest::record(const std::string& name) const {
  auto it = artifacts_.find(name);
  if (it == artifacts_.end())
    throw Error(ErrorCode::not_found, "run " + dir_.string() + " has no " + name + " artifact");
  return it->second;
}

void RunManifest::set_dataset(const fs::path& dataset, const std::string& format) {
  ArtifactRecord r;
  r.path = fs::absolute(dataset).lexically_normal().string();
  r.hash = file_hash(dataset);
  r.written_at = now_utc();
  artifacts_[kDataset] = std::move(r);
  dataset_format_ = format;
  run_id_ = hex64(hash64(artifacts_[kDataset].hash + "/" + std::to_string(seed_)));
}

void RunManifest::set_seed(std::uint64_t seed) {
  seed_ = seed;
  if (has(kDataset)) run_id_ = hex64(hash64(artifacts_[kDataset].hash + "/" + std::to_string(seed_)));
}

std::string RunManifest::current_hash(const std::string& name) const {
  return file_hash(path_of(name));
}

void RunManifest::write_artifact(const std::string& name, const std::string& file_name,
                                 std::string_view content, const std::vector<std::string>& upstream) {
  write_file_atomic(dir_ / file_name, content);
  refresh_artifact(name, file_name, upstream);
}

void RunManifest::refresh_artifact(const std::string& name, const std::string& file_name,
                                   const std::vector<std::string>& upstream) {
  ArtifactRecord r;
  r.path = file_name;
  r.hash = file_hash(dir_ / file_name);
  r.written_at = now_utc();
  for (const auto& up : upstream) r.upstream[up] = record(up).hash;
  artifacts_[name] = std::move(r);
}

void RunManifest::check(const std::string& name) const {
  const auto& r = record(name);
  if (!fs::exists(path_of(name)))
    throw Error(ErrorCode::stale_artifact, name + " is recorded but " + path_of(name).string() +
                                               " is missing");
  if (current_hash(name) != r.hash)
    throw Error(ErrorCode::stale_artifact, name + " changed since it was recorded");
  for (const auto& [up, hash] : r.upstream) {
    if (!has(up) || record(up).hash != hash || current_hash(up) != hash)
      throw Error(ErrorCode::stale_artifact,
                  name + " was built from a different " + up + "; rerun the stage that writes it");
  }
}

std::string RunManifest::read_artifact(const std::string& name) const {
  check(name);
  return read_file(path_of(name));
}

}  // namespace abcde
