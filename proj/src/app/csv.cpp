#include "csv.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <ctime>
#include <stdexcept>

namespace lifespan::app {

std::string format_number(double v) {
  std::array<char, 32> buf;
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw std::runtime_error("format_number: conversion failed");
  return std::string(buf.data(), end);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

CsvWriter::CsvWriter(const std::string& path, const std::string& config_hash, const std::vector<std::string>& columns)
    : out_(path), hash_(config_hash), width_(columns.size() + 1) {
  if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
  const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
  out_ << "# generated " << stamp << " config_hash=" << hash_ << '\n';
  for (const std::string& c : columns) out_ << csv_field(c) << ',';
  out_ << "config_hash\n";
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() + 1 != width_) throw std::logic_error("csv row has the wrong number of fields");
  for (const std::string& f : fields) out_ << csv_field(f) << ',';
  out_ << hash_ << '\n';
  out_.flush();
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw std::invalid_argument("csv: missing column '" + name + "'");
}

namespace {

std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw std::invalid_argument("csv: unterminated quote");
  fields.push_back(std::move(cur));
  return fields;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  CsvTable table;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_record(line);
    if (header) {
      table.columns = std::move(fields);
      header = false;
      continue;
    }
    if (fields.size() != table.columns.size())
      throw std::invalid_argument("csv: row width differs from header in " + path);
    table.rows.push_back(std::move(fields));
  }
  if (header) throw std::invalid_argument("csv: no header in " + path);
  return table;
}

}  // namespace lifespan::app
