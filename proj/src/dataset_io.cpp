#include "abcde/dataset_io.hpp"

#include <fstream>
#include <sstream>

#include "abcde/error.hpp"
#include "abcde/serialization.hpp"

namespace abcde {

DatasetFormat format_from_path(const std::filesystem::path& path) {
  return path.extension() == ".tsv" ? DatasetFormat::tsv : DatasetFormat::jsonl;
}

namespace {

std::string where(std::size_t line_no) { return "line " + std::to_string(line_no) + ": "; }

ItemRecord parse_jsonl_row(const std::string& line, std::size_t line_no) {
  nlohmann::json row;
  try {
    row = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::parse, where(line_no) + e.what());
  }
  if (!row.is_object()) throw Error(ErrorCode::parse, where(line_no) + "expected a JSON object");

  ItemRecord r;
  auto id = row.find("item_id");
  if (id == row.end() || !id->is_string())
    throw Error(ErrorCode::parse, where(line_no) + "missing string item_id");
  r.item_id = id->get<std::string>();

  auto w = row.find("weight");
  if (w == row.end() || !w->is_number())
    throw Error(ErrorCode::invalid_weight, where(line_no) + "item '" + r.item_id +
                                               "' has no numeric weight");
  r.weight = w->get<double>();

  auto cluster = [&](const char* key) {
    auto c = row.find(key);
    if (c == row.end() || c->is_null())
      throw Error(ErrorCode::missing_assignment,
                  where(line_no) + "item '" + r.item_id + "' has no " + key);
    if (c->is_string()) return c->get<std::string>();
    if (c->is_number_integer()) return std::to_string(c->get<long long>());
    throw Error(ErrorCode::parse, where(line_no) + key + " must be a string");
  };
  r.base_cluster = cluster("base_cluster");
  r.exp_cluster = cluster("exp_cluster");

  if (auto a = row.find("attributes"); a != row.end() && !a->is_null()) {
    try {
      r.attributes = attributes_from_json(*a);
    } catch (const Error& e) {
      throw Error(e.code(), where(line_no) + e.what());
    }
  }
  return r;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

ItemRecord parse_tsv_row(const std::string& line, std::size_t line_no) {
  auto cols = split_tabs(line);
  if (cols.size() < 4)
    throw Error(ErrorCode::missing_assignment,
                where(line_no) + "expected 4 tab-separated columns, got " +
                    std::to_string(cols.size()));
  ItemRecord r;
  r.item_id = cols[0];
  try {
    std::size_t used = 0;
    r.weight = std::stod(cols[1], &used);
    if (used != cols[1].size()) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw Error(ErrorCode::invalid_weight, where(line_no) + "bad weight '" + cols[1] + "'");
  }
  r.base_cluster = cols[2];
  r.exp_cluster = cols[3];
  return r;
}

}  // namespace

Dataset read_dataset(std::istream& in, DatasetFormat format) {
  std::vector<ItemRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (format == DatasetFormat::tsv) {
      if (line_no == 1 && line.rfind("item_id\t", 0) == 0) continue;
      records.push_back(parse_tsv_row(line, line_no));
    } else {
      records.push_back(parse_jsonl_row(line, line_no));
    }
  }
  return Dataset::build(std::move(records));
}

Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open dataset " + path.string());
  return read_dataset(in, format);
}

Dataset load_dataset(const std::filesystem::path& path) {
  return load_dataset(path, format_from_path(path));
}

void write_dataset_jsonl(std::ostream& out, const Dataset& dataset) {
  for (ItemIndex i = 0; i < dataset.size(); ++i) {
    nlohmann::json row = {
        {"item_id", dataset.id(i)},
        {"weight", dataset.weight(i)},
        {"base_cluster", dataset.clustering(Side::base).id(dataset.cluster_of(Side::base, i))},
        {"exp_cluster", dataset.clustering(Side::exp).id(dataset.cluster_of(Side::exp, i))},
    };
    if (!dataset.attributes(i).empty()) row["attributes"] = to_json(dataset.attributes(i));
    out << row.dump() << '\n';
  }
}

}  // namespace abcde
