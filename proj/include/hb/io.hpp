#pragma once

// Bit-stable text output: shortest round-trip decimals, comma-separated
// values with a header row and LF line endings.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace hb {

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
// 17 significant digits (%.17g).
std::string format_g17(double v);

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header, bool g17 = false);
  void row(const std::vector<double>& values);
  // Mixed row: numbers are formatted, strings written verbatim.
  void row(const std::vector<std::string>& cells);
  std::string cell(double v) const { return g17_ ? format_g17(v) : format_double(v); }

 private:
  std::ostream& out_;
  std::size_t columns_;
  bool g17_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column; throws ConfigError if absent.
  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

// Parses a full double; throws ConfigError naming `what` on failure.
double parse_double(const std::string& text, const std::string& what);

}  // namespace hb
