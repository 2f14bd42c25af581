#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cogman/classroom.hpp"

namespace cogman {

/// Comma-separated table. Comment lines are written first, prefixed "# ".
struct Table {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const;
};

/// Fixed-precision number formatting used in every table ("%.6g").
std::string fmt_num(double v);

/// Header of the learning-curve CSV.
const std::vector<std::string>& learning_curve_header();
Table learning_curve_table(const std::vector<CurveRow>& curve, std::uint64_t config_hash);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_table(const std::filesystem::path& path, const Table& table);
void write_jsonl(const std::filesystem::path& path, const std::vector<std::string>& lines);

}  // namespace cogman
