#pragma once

#include <filesystem>
#include <iosfwd>

#include "abcde/dataset.hpp"

namespace abcde {

enum class DatasetFormat { jsonl, tsv };

// ".tsv" selects TSV, anything else JSONL.
DatasetFormat format_from_path(const std::filesystem::path& path);

// JSONL rows: {"item_id", "weight", "base_cluster", "exp_cluster", "attributes"}.
// List-valued attributes become one boolean attribute per element
// ("color": ["red"] -> "color:red" = true). TSV rows are
// item_id, weight, base_cluster, exp_cluster with an optional header line and
// no attributes. The whole load fails on the first invalid row.
Dataset read_dataset(std::istream& in, DatasetFormat format);
Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format);
Dataset load_dataset(const std::filesystem::path& path);

void write_dataset_jsonl(std::ostream& out, const Dataset& dataset);

}  // namespace abcde
