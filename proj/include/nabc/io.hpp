#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "nabc/config.hpp"
#include "nabc/policy.hpp"

namespace nabc {

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

/// Flat `key=value` text; `#` starts a comment, lists are comma separated.
/// The sampling measure is a list of (weight, mean, variance) triples and the
/// seeds a list of four integers (design, inner, evaluation, history).
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string emit_config(const ExperimentConfig& config);

std::string policy_to_json(const Policy& policy);
Policy policy_from_json(std::string_view text);
Policy load_policy(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

/// 64-bit FNV-1a.
std::uint64_t content_hash(std::string_view content);

/// Minimal CSV builder; cells are written verbatim.
class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header);
  CsvWriter& cell(std::string_view text);
  CsvWriter& cell(double value);
  CsvWriter& cell(long long value);
  CsvWriter& end_row();
  const std::string& str() const { return text_; }

 private:
  std::string text_;
  bool row_started_ = false;
};

}  // namespace nabc
