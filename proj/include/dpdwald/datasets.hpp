#pragma once

// Embedded real-data examples and plain-text data ingestion.

#include "dpdwald/sample.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dpd {

struct NamedDataset {
  std::string name;
  std::vector<double> values;
  std::string source;
  std::string unit_note;

  Sample sample() const { return Sample(values); }
};

std::vector<std::string> builtin_dataset_names();

/// A built-in name ("leukemia", "telephone", "darwin") or a path to a text
/// file with one value per line or comma-separated values; '#' starts a comment.
NamedDataset load_dataset(const std::string& name_or_path);

NamedDataset parse_dataset_text(const std::string& text, const std::string& name);

/// FNV-1a over the IEEE-754 bit patterns of the values.
std::uint64_t dataset_checksum(const std::vector<double>& values);

/// Checksum the embedded tables were frozen with.
std::uint64_t expected_checksum(const std::string& builtin_name);

/// Throws Error if any embedded table differs from its frozen checksum.
void verify_builtin_datasets();

}  // namespace dpd
