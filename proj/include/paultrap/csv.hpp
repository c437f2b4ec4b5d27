#pragma once

// Minimal deterministic CSV writer: fixed number formatting, '\n' line ends,
// empty cells for missing values.

#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>

namespace paultrap {

/// %.10g, with -0 printed as 0 and NaN as an empty cell.
inline std::string format_number(double v) {
  if (std::isnan(v)) return {};
  if (v == 0.0) v = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

class CsvWriter {
 public:
  using Cell = std::variant<double, long long, std::string>;

  CsvWriter(std::ostream& out, std::initializer_list<std::string_view> header) : out_(out) {
    bool first = true;
    for (auto h : header) {
      if (!first) out_ << ',';
      out_ << h;
      first = false;
    }
    out_ << '\n';
  }

  void row(std::initializer_list<Cell> cells) {
    bool first = true;
    for (const auto& c : cells) {
      if (!first) out_ << ',';
      first = false;
      if (const double* d = std::get_if<double>(&c)) out_ << format_number(*d);
      else if (const long long* i = std::get_if<long long>(&c)) out_ << *i;
      else out_ << std::get<std::string>(c);
    }
    out_ << '\n';
  }

 private:
  std::ostream& out_;
};

}  // namespace paultrap
