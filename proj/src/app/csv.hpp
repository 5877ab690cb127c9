#pragma once

// CSV report files. The first line is a '#' comment carrying the
// generation time and the config hash; everything after it depends only
// on the inputs.

#include <fstream>
#include <string>
#include <vector>

namespace lifespan::app {

/// Shortest decimal string that reads back to the same double.
std::string format_number(double v);

/// Quotes a field when it contains a comma, quote or line break.
std::string csv_field(const std::string& s);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& config_hash, const std::vector<std::string>& columns);

  /// Appends the config hash column.
  void row(const std::vector<std::string>& fields);

 private:
  std::ofstream out_;
  std::string hash_;
  std::size_t width_;
};

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  /// Index of a column; throws std::invalid_argument when absent.
  std::size_t column(const std::string& name) const;
};

/// Reads a file written by CsvWriter (comment lines skipped).
CsvTable read_csv(const std::string& path);

}  // namespace lifespan::app
