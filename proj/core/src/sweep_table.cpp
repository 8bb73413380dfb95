#include "optomech/sweep_table.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "optomech/errors.hpp"

namespace optomech {

void SweepTable::require_rectangular() const {
  for (const Row& r : rows)
    if (r.values.size() != header.size())
      throw std::invalid_argument("SweepTable: row width does not match header");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

bool needs_quoting(const std::string& s) {
  if (s.empty()) return false;
  if (s.front() == ' ' || s.back() == ' ') return true;
  return s.find_first_of(",\"\n\r") != std::string::npos;
}

std::string csv_field(const std::string& s) {
  if (!needs_quoting(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

}  // namespace

std::string to_csv(const SweepTable& table) {
  table.require_rectangular();
  std::string out;
  for (size_t i = 0; i < table.header.size(); ++i) {
    out += csv_field(table.header[i]);
    out += ',';
  }
  out += "error\n";
  for (const SweepTable::Row& r : table.rows) {
    for (double v : r.values) {
      if (!std::isnan(v)) out += format_double(v);
      out += ',';
    }
    out += csv_field(r.error);
    out += '\n';
  }
  return out;
}

std::string to_json(const SweepTable& table) {
  table.require_rectangular();
  std::string out = "[\n";
  for (size_t i = 0; i < table.rows.size(); ++i) {
    const SweepTable::Row& r = table.rows[i];
    out += "  {";
    for (size_t c = 0; c < table.header.size(); ++c) {
      out += json_string(table.header[c]);
      out += ": ";
      out += std::isnan(r.values[c]) ? "null" : format_double(r.values[c]);
      out += ", ";
    }
    out += "\"error\": ";
    out += json_string(r.error);
    out += i + 1 < table.rows.size() ? "},\n" : "}\n";
  }
  out += "]\n";
  return out;
}

void emit(const SweepTable& table, TableFormat format, const std::string& path) {
  const std::string body = format == TableFormat::Csv ? to_csv(table) : to_json(table);
  if (path.empty() || path == "-") {
    std::cout << body;
    if (!std::cout) throw IoError("emit: failed writing to stdout");
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("emit: cannot open " + tmp.string());
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!f) throw IoError("emit: failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw IoError("emit: cannot rename " + tmp.string() + " to " + path + ": " + ec.message());
}

SweepTable parse_csv(const std::string& text) {
  SweepTable t;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    // No quoted commas appear in numeric cells; only the trailing error field
    // may be quoted, so split naively and re-join the remainder.
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
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
        cells.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    cells.push_back(cur);
    if (first) {
      first = false;
      t.header.assign(cells.begin(), cells.end() - 1);
      continue;
    }
    SweepTable::Row row;
    for (size_t i = 0; i + 1 < cells.size(); ++i)
      row.values.push_back(cells[i].empty() ? std::nan("") : std::stod(cells[i]));
    row.error = cells.back();
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace optomech
