#pragma once

#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace paultrap::cli {

struct ReportBundle {
  std::map<std::string, std::string> files;  // CSV name -> content
  std::vector<std::string> inputs;           // "key: value" lines echoed in the summary
  std::vector<std::string> results;          // human-readable result lines
  std::string provenance_text;               // hashed into the provenance block

  std::string summary() const;
};

/// Acceptance band lo <= value <= hi.
struct Band {
  std::string name;
  double value = 0.0;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool pass() const { return value >= lo && value <= hi; }
  std::string describe() const;
};

std::string sha256_hex(std::string_view data);
std::string tool_version();

/// Creates `dir` and writes every CSV plus summary.txt. Files are written in
/// name order and nothing else in `dir` is touched.
void write_bundle(const ReportBundle& bundle, const std::filesystem::path& dir);

}  // namespace paultrap::cli
