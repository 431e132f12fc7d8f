#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

namespace fairrank {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Header index of a column; throws naming the column and the file.
  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    std::string have;
    for (const auto& h : header) have += (have.empty() ? "" : ", ") + h;
    throw std::runtime_error("missing column '" + name + "' (file has: " + have + ")");
  }

  bool has_column(const std::string& name) const {
    for (const auto& h : header)
      if (h == name) return true;
    return false;
  }
};

// Comma-separated, UTF-8, first row is the header. Quoted fields may contain
// commas, doubled quotes and newlines. CRLF input is accepted.
inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open CSV file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  CsvTable table;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any_field = false;

  auto end_field = [&]() {
    record.push_back(field);
    field.clear();
    any_field = true;
  };
  auto end_record = [&]() {
    if (!any_field && record.empty()) return;  // skip blank line
    end_field();
    if (table.header.empty())
      table.header = record;
    else
      table.rows.push_back(record);
    record.clear();
    any_field = false;
    field.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      end_field();
    } else if (ch == '\n') {
      end_record();
    } else if (ch != '\r') {
      field += ch;
    }
  }
  if (quoted) throw std::runtime_error("unterminated quote in CSV file: " + path.string());
  if (any_field || !field.empty()) end_record();

  if (table.header.empty())
    throw std::runtime_error("CSV file has no header row: " + path.string());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].size() != table.header.size())
      throw std::runtime_error("CSV line " + std::to_string(r + 2) + " has " +
                               std::to_string(table.rows[r].size()) +
                               " fields, header has " +
                               std::to_string(table.header.size()) + ": " +
                               path.string());
  }
  return table;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    out += c;
  }
  out += '"';
  return out;
}

inline void write_csv(const std::filesystem::path& path,
                      const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write CSV file: " + path.string());
  auto write_record = [&](const std::vector<std::string>& rec) {
    for (std::size_t i = 0; i < rec.size(); ++i) {
      if (i) out << ',';
      out << csv_escape(rec[i]);
    }
    out << '\n';
  };
  write_record(header);
  for (const auto& r : rows) write_record(r);
}

// Shortest round-trip representation; keeps result files byte-stable.
inline std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc())
    throw std::runtime_error("format_double failed");
  return std::string(buf, p);
}

inline double parse_double(const std::string& s, const std::string& context) {
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end != begin && (*(end - 1) == ' ' || *(end - 1) == '\t')) --end;
  double v = 0.0;
  auto [p, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || p != end)
    throw std::runtime_error("cannot parse '" + s + "' as a number (" + context + ")");
  return v;
}

inline std::int64_t parse_int64(const std::string& s, const std::string& context) {
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end != begin && (*(end - 1) == ' ' || *(end - 1) == '\t')) --end;
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || p != end)
    throw std::runtime_error("cannot parse '" + s + "' as an integer (" + context + ")");
  return v;
}

}  // namespace fairrank
