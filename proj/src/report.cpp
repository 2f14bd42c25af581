#include "cogman/report.hpp"

#include <cstdio>
#include <fstream>

#include "cogman/config.hpp"
#include "cogman/errors.hpp"

namespace cogman {

std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string Table::to_csv() const {
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\n";
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

const std::vector<std::string>& learning_curve_header() {
  static const std::vector<std::string> h{"episode",        "reward",      "success",
                                          "steps",          "E_r_m",       "window_success",
                                          "critic_loss",    "actor_loss",  "alpha"};
  return h;
}

Table learning_curve_table(const std::vector<CurveRow>& curve, std::uint64_t config_hash) {
  Table t;
  t.comments.push_back("config_hash=" + hex64(config_hash));
  t.header = learning_curve_header();
  for (const CurveRow& r : curve) {
    t.rows.push_back({std::to_string(r.episode), fmt_num(r.reward), r.success ? "1" : "0",
                      std::to_string(r.steps), fmt_num(r.E_r),
                      r.window_success < 0.0 ? "" : fmt_num(r.window_success),
                      fmt_num(r.critic_loss), fmt_num(r.actor_loss), fmt_num(r.alpha)});
  }
  return t;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

void write_table(const std::filesystem::path& path, const Table& table) {
  write_text(path, table.to_csv());
}

void write_jsonl(const std::filesystem::path& path, const std::vector<std::string>& lines) {
  std::string text;
  for (const auto& l : lines) text += l + "\n";
  write_text(path, text);
}

}  // namespace cogman
