#include "hypowave/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hypowave {

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, target);
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size()) throw std::invalid_argument("CSV row width mismatch");
  rows.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
  os << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << '\n';
  }
  return os.str();
}

std::string dat_text(const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows) {
  std::ostringstream os;
  os << '#';
  for (const auto& c : columns) os << ' ' << c;
  os << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? " " : "") << format_double(r[i]);
    os << '\n';
  }
  return os.str();
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
    case Verdict::Info: return "INFO";
  }
  return "?";
}

Summary summarize(const std::vector<CheckRow>& rows) {
  Summary s;
  std::ostringstream os;
  char line[512];
  std::snprintf(line, sizeof line, "%-40s %-24s %14s %14s %-12s\n", "check", "anchor", "measured",
                "bound", "verdict");
  os << line;
  s.json = nlohmann::json::array();
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-40s %-24s %14.6g %14.6g %-12s", r.name.c_str(),
                  r.anchor.c_str(), r.measured, r.bound, to_string(r.verdict).c_str());
    os << line;
    if (!r.note.empty()) os << ' ' << r.note;
    os << '\n';
    if (r.verdict == Verdict::Fail) s.all_pass = false;
    nlohmann::json j = {{"name", r.name},       {"anchor", r.anchor},
                        {"measured", r.measured}, {"bound", r.bound},
                        {"verdict", to_string(r.verdict)}};
    if (!r.note.empty()) j["note"] = r.note;
    s.json.push_back(std::move(j));
  }
  s.table = os.str();
  return s;
}

}  // namespace hypowave
