#include "paultrap/cli/report.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "paultrap/csv.hpp"

#ifndef PAULTRAP_VERSION
#define PAULTRAP_VERSION "0.0.0"
#endif

namespace paultrap::cli {

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string tool_version() { return PAULTRAP_VERSION; }

std::string Band::describe() const {
  std::ostringstream s;
  s << name << " = " << format_number(value) << " (band ";
  s << (std::isfinite(lo) ? "[" + format_number(lo) : "(-inf") << ", ";
  s << (std::isfinite(hi) ? format_number(hi) + "]" : "inf)") << ")";
  return s.str();
}

std::string ReportBundle::summary() const {
  std::ostringstream s;
  s << "paultrap report\n\ninputs\n";
  for (const auto& l : inputs) s << "  " << l << "\n";
  s << "\nresults\n";
  for (const auto& l : results) s << "  " << l << "\n";
  s << "\nfiles\n";
  for (const auto& [name, content] : files) s << "  " << name << "  sha256 " << sha256_hex(content) << "\n";
  s << "\nprovenance\n";
  s << "  tool: paultrap " << tool_version() << "\n";
  s << "  config sha256: " << sha256_hex(provenance_text) << "\n";
  return s.str();
}

void write_bundle(const ReportBundle& b, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto put = [&](const std::string& name, const std::string& content) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << content;
  };
  for (const auto& [name, content] : b.files) put(name, content);
  put("summary.txt", b.summary());
}

}  // namespace paultrap::cli
