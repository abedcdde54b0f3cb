#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace gmf {

/// Shortest text form that round-trips a double exactly (17 significant
/// digits).
std::string format_double(double v);

std::uint64_t fnv1a64(const void* data, std::size_t n_bytes,
                      std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a64_file(const std::string& path);

/// Minimal CSV writer: header row, then rows of %.17g-formatted values.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  void raw_row(const std::string& line);

 private:
  std::ofstream out_;
};

/// Reads a numeric CSV with a header row; blank cells parse as NaN.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;  // -1 if absent
};

CsvTable read_csv(const std::string& path);

}  // namespace gmf
