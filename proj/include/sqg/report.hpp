#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace sqg {

using Cell = std::variant<double, long, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;  // cells already formatted

  void add_row(const std::vector<Cell>& cells);
  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& col) const;
};

struct Plot {
  std::string name;
  std::string table;
  std::string x;
  std::vector<std::string> ys;
  std::string group;  // optional column splitting the rows into series
  bool log_x = false;
  bool log_y = false;
  std::string title;
};

struct ExperimentReport {
  std::string experiment;
  std::string config_hash;
  std::string version;
  double wall_time = 0.0;
  std::vector<std::pair<std::string, std::string>> metadata;  // resolved parameters
  std::vector<Table> tables;
  std::vector<Plot> plots;
  std::vector<std::pair<std::string, double>> summary;

  const Table& table(const std::string& name) const;
  double summary_value(const std::string& key) const;
};

std::string library_version();

// Writes <experiment>_<table>.csv for every table, <experiment>_summary.csv and,
// when svg is set, <experiment>_<plot>.svg. Returns the written paths.
std::vector<std::string> emit_report(const ExperimentReport& report, const std::string& dir, bool csv = true,
                                     bool svg = true);

struct ParsedCsv {
  std::map<std::string, std::string> metadata;  // from "# key=value" comment lines
  Table table;
};
ParsedCsv read_report_csv(const std::string& path);

std::string render_svg(const ExperimentReport& report, const Plot& plot);

}  // namespace sqg
