#include "sqg/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "sqg/config.hpp"
#include "sqg/error.hpp"

namespace sqg {

namespace {

std::string cell_text(const Cell& c) {
  if (std::holds_alternative<double>(c)) return format_number(std::get<double>(c));
  if (std::holds_alternative<long>(c)) return std::to_string(std::get<long>(c));
  return std::get<std::string>(c);
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void write_header(std::ostream& out, const ExperimentReport& r) {
  out << "# experiment=" << r.experiment << "\n";
  out << "# config_hash=" << r.config_hash << "\n";
  out << "# version=" << r.version << "\n";
  out << fmt::format("# wall_time={:.3f}\n", r.wall_time);
  for (const auto& [k, v] : r.metadata) out << "# param." << k << "=" << v << "\n";
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

}  // namespace

void Table::add_row(const std::vector<Cell>& cells) {
  if (cells.size() != columns.size())
    throw Error(ErrorKind::IOFailure, fmt::format("table '{}' row has {} cells, expected {}", name, cells.size(), columns.size()));
  std::vector<std::string> row;
  row.reserve(cells.size());
  for (const auto& c : cells) {
    std::string t = cell_text(c);
    if (t.find(',') != std::string::npos || t.find('\n') != std::string::npos)
      throw Error(ErrorKind::IOFailure, "table cells may not contain commas or newlines");
    row.push_back(std::move(t));
  }
  rows.push_back(std::move(row));
}

std::size_t Table::column(const std::string& col) const {
  const auto it = std::find(columns.begin(), columns.end(), col);
  if (it == columns.end()) throw Error(ErrorKind::IOFailure, fmt::format("table '{}' has no column '{}'", name, col));
  return std::size_t(it - columns.begin());
}

double Table::number(std::size_t row, const std::string& col) const { return std::stod(rows.at(row).at(column(col))); }

const Table& ExperimentReport::table(const std::string& name) const {
  for (const auto& t : tables)
    if (t.name == name) return t;
  throw Error(ErrorKind::IOFailure, "report has no table '" + name + "'");
}

double ExperimentReport::summary_value(const std::string& key) const {
  for (const auto& [k, v] : summary)
    if (k == key) return v;
  throw Error(ErrorKind::IOFailure, "report has no summary value '" + key + "'");
}

std::string library_version() { return "0.3.0"; }

std::vector<std::string> emit_report(const ExperimentReport& report, const std::string& dir, bool csv, bool svg) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IOFailure, "cannot create output directory " + dir);
  std::vector<std::string> written;
  auto open = [&](const std::string& file) {
    const std::string path = (std::filesystem::path(dir) / file).string();
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::IOFailure, "cannot write " + path);
    written.push_back(path);
    return out;
  };
  if (csv) {
    for (const auto& t : report.tables) {
      auto out = open(report.experiment + "_" + t.name + ".csv");
      write_header(out, report);
      for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
      out << "\n";
      for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
      }
      if (!out) throw Error(ErrorKind::IOFailure, "write failed for " + written.back());
    }
    auto out = open(report.experiment + "_summary.csv");
    write_header(out, report);
    out << "key,value\n";
    for (const auto& [k, v] : report.summary) out << k << "," << format_number(v) << "\n";
    if (!out) throw Error(ErrorKind::IOFailure, "write failed for " + written.back());
  }
  if (svg) {
    for (const auto& p : report.plots) {
      auto out = open(report.experiment + "_" + p.name + ".svg");
      out << render_svg(report, p);
      if (!out) throw Error(ErrorKind::IOFailure, "write failed for " + written.back());
    }
  }
  return written;
}

ParsedCsv read_report_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IOFailure, "cannot read " + path);
  ParsedCsv out;
  out.table.name = std::filesystem::path(path).stem().string();
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (line.size() > 2 && eq != std::string::npos) out.metadata[line.substr(2, eq - 2)] = line.substr(eq + 1);
      continue;
    }
    if (!header) {
      out.table.columns = split_csv(line);
      header = true;
      continue;
    }
    auto row = split_csv(line);
    if (row.size() != out.table.columns.size()) throw Error(ErrorKind::IOFailure, "ragged row in " + path);
    out.table.rows.push_back(std::move(row));
  }
  if (!header) throw Error(ErrorKind::IOFailure, "no header row in " + path);
  return out;
}

std::string render_svg(const ExperimentReport& report, const Plot& plot) {
  const Table& t = report.table(plot.table);
  struct Series {
    std::string label;
    std::vector<std::pair<double, double>> pts;
  };
  std::vector<Series> series;
  const std::size_t xc = t.column(plot.x);
  std::vector<std::string> groups;
  if (!plot.group.empty()) {
    const std::size_t gc = t.column(plot.group);
    for (const auto& row : t.rows)
      if (std::find(groups.begin(), groups.end(), row[gc]) == groups.end()) groups.push_back(row[gc]);
  } else {
    groups.emplace_back();
  }
  for (const auto& g : groups) {
    for (const auto& y : plot.ys) {
      Series s;
      s.label = g.empty() ? y : fmt::format("{} {}", y, g);
      const std::size_t yc = t.column(y);
      for (const auto& row : t.rows) {
        if (!plot.group.empty() && row[t.column(plot.group)] != g) continue;
        double x = std::stod(row[xc]), v = std::stod(row[yc]);
        if ((plot.log_x && !(x > 0)) || (plot.log_y && !(v > 0)) || !std::isfinite(x) || !std::isfinite(v)) continue;
        s.pts.emplace_back(plot.log_x ? std::log10(x) : x, plot.log_y ? std::log10(v) : v);
      }
      series.push_back(std::move(s));
    }
  }
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series)
    for (const auto& [x, y] : s.pts) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double W = 640, H = 420, ml = 80, mr = 180, mt = 40, mb = 50;
  auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * (W - ml - mr); };
  auto py = [&](double y) { return H - mb - (y - y0) / (y1 - y0) * (H - mt - mb); };
  std::string out;
  out += fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n", W, H, W, H);
  out += fmt::format("<metadata>config_hash={}</metadata>\n", report.config_hash);
  out += fmt::format("<title>{}</title>\n", xml_escape(plot.title.empty() ? plot.name : plot.title));
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", ml, mt,
                     W - ml - mr, H - mt - mb);
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4, yv = y0 + (y1 - y0) * i / 4;
    const std::string xl = plot.log_x ? fmt::format("1e{:.2f}", xv) : fmt::format("{:.3g}", xv);
    const std::string yl = plot.log_y ? fmt::format("1e{:.2f}", yv) : fmt::format("{:.3g}", yv);
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n", px(xv),
                       H - mb + 16, xl);
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"11\" text-anchor=\"end\">{}</text>\n", ml - 6,
                       py(yv) + 4, yl);
  }
  out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
                     ml + (W - ml - mr) / 2, H - 12, xml_escape(plot.x));
  out += fmt::format("<text x=\"{:.1f}\" y=\"24\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
                     ml + (W - ml - mr) / 2, xml_escape(plot.title.empty() ? plot.name : plot.title));
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
    std::string pts;
    for (const auto& [x, y] : s.pts) pts += fmt::format("{:.2f},{:.2f} ", px(x), py(y));
    if (!pts.empty())
      out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", color, pts);
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"11\" fill=\"{}\">{}</text>\n", W - mr + 10,
                       mt + 14 + 14.0 * i, color, xml_escape(s.label));
  }
  out += "</svg>\n";
  return out;
}

}  // namespace sqg
