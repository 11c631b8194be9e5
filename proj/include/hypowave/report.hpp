#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace hypowave {

// Writes to path.tmp then renames, so readers never see a partial file.
void write_file_atomic(const std::string& path, const std::string& content);

// Shortest round-trip decimal form of a double.
std::string format_double(double x);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  std::string str() const;
};

// Whitespace-separated columns under a "# name name ..." header.
std::string dat_text(const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows);

enum class Verdict { Pass, Fail, Inconclusive, Info };
std::string to_string(Verdict v);

struct CheckRow {
  std::string name;
  std::string anchor;  // formula the check is tied to
  double measured = 0.0;
  double bound = 0.0;
  Verdict verdict = Verdict::Info;
  std::string note;
};

struct Summary {
  std::string table;
  nlohmann::json json;
  bool all_pass = true;  // no Fail rows
};

Summary summarize(const std::vector<CheckRow>& rows);

}  // namespace hypowave
