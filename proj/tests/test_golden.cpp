#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "paultrap/cli/figures.hpp"

using namespace paultrap::cli;
namespace fs = std::filesystem;

namespace {

using Table = std::vector<std::vector<std::string>>;

Table parse(const std::string& text) {
  Table t;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> row;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) row.push_back(cell);
    if (!line.empty() && line.back() == ',') row.emplace_back();
    t.push_back(row);
  }
  return t;
}

bool numeric(const std::string& s, double& v) {
  char* end = nullptr;
  v = std::strtod(s.c_str(), &end);
  return !s.empty() && end == s.c_str() + s.size();
}

// Header exact; numbers to 1e-6 of the column's largest magnitude, so the
// comparison survives a different SIMD path or compiler.
void compare(const std::string& name, const std::string& got, const std::string& want) {
  const auto a = parse(got), b = parse(want);
  INFO(name);
  REQUIRE(a.size() == b.size());
  REQUIRE(!a.empty());
  CHECK(a[0] == b[0]);
  std::vector<double> scale(b[0].size(), 0.0);
  for (std::size_t r = 1; r < b.size(); ++r)
    for (std::size_t c = 0; c < b[r].size() && c < scale.size(); ++c) {
      double v;
      if (numeric(b[r][c], v)) scale[c] = std::max(scale[c], std::abs(v));
    }
  int mismatches = 0;
  for (std::size_t r = 1; r < b.size(); ++r) {
    REQUIRE(a[r].size() == b[r].size());
    for (std::size_t c = 0; c < b[r].size(); ++c) {
      double x, y;
      const bool nx = numeric(a[r][c], x), ny = numeric(b[r][c], y);
      if (nx != ny || (!nx && a[r][c] != b[r][c]) || (nx && std::abs(x - y) > 1e-6 * scale[c] + 1e-300)) {
        if (++mismatches <= 5) FAIL_CHECK(name << " row " << r << " column " << b[0][c] << ": " << a[r][c] << " vs " << b[r][c]);
      }
    }
  }
  CHECK(mismatches == 0);
}

void check_target(const std::string& target) {
  const auto report = reproduce(target);
  const fs::path dir = fs::path(PAULTRAP_SOURCE_DIR) / "tests" / "golden" / target;
  std::vector<std::string> stored;
  for (const auto& e : fs::directory_iterator(dir)) stored.push_back(e.path().filename().string());
  std::sort(stored.begin(), stored.end());
  std::vector<std::string> produced;
  for (const auto& [name, content] : report.bundle.files) produced.push_back(name);
  CHECK(produced == stored);
  for (const auto& [name, content] : report.bundle.files) {
    std::ifstream in(dir / name, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    compare(name, content, ss.str());
  }
}

}  // namespace

TEST_CASE("golden fig2a") { check_target("fig2a"); }
TEST_CASE("golden fig2b") { check_target("fig2b"); }
TEST_CASE("golden fig4") { check_target("fig4"); }
TEST_CASE("golden fig5a") { check_target("fig5a"); }
