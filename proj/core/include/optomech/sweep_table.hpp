#pragma once

#include <string>
#include <vector>

namespace optomech {

enum class TableFormat { Csv, Json };

/// Rectangular numeric table with one trailing error column. Row order is
/// fixed by the producer and must not depend on evaluation parallelism.
struct SweepTable {
  std::vector<std::string> header;  // value columns; the error column is implicit
  struct Row {
    std::vector<double> values;  // NaN marks a missing value on failed rows
    std::string error;           // empty when the point evaluated cleanly
  };
  std::vector<Row> rows;

  void require_rectangular() const;
};

// 17-significant-digit decimal rendering; round-trips doubles exactly.
std::string format_double(double v);

std::string to_csv(const SweepTable& table);
std::string to_json(const SweepTable& table);

/// Serializes to `path` atomically (temp file + rename). "-" writes to stdout.
void emit(const SweepTable& table, TableFormat format, const std::string& path);

SweepTable parse_csv(const std::string& text);

}  // namespace optomech
