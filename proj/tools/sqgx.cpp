#include <CLI11.hpp>
#include <fmt/format.h>

#include <iostream>
#include <string>
#include <vector>

#include "sqg/error.hpp"
#include "sqg/experiments.hpp"

namespace {

struct Options {
  std::string config_path;
  std::string out_dir;
  int grid_n = 0;
  std::vector<std::string> overrides;
  bool no_svg = false;
  bool quiet = false;
};

int exit_code(sqg::ErrorKind k) {
  switch (k) {
    case sqg::ErrorKind::ConfigError:
    case sqg::ErrorKind::InvalidRegime: return 2;
    case sqg::ErrorKind::IOFailure:
    case sqg::ErrorKind::CheckpointIOFailure: return 1;
    default: return 3;
  }
}

void print_constants(const sqg::ExperimentReport& r) {
  const auto& t = r.table("values");
  fmt::print("{:<20} {:>6} {:>22} {:>22} {:>10}\n", "name", "alpha", "value", "reference", "abs_diff");
  for (const auto& row : t.rows)
    fmt::print("{:<20} {:>6} {:>22} {:>22} {:>10}\n", row[0], row[1], row[2], row[3], row[4]);
}

int run(sqg::ExperimentKind kind, const Options& o) {
  sqg::Config raw = o.config_path.empty() ? sqg::Config() : sqg::Config::parse_file(o.config_path);
  if (!o.out_dir.empty()) raw.set("out", o.out_dir);
  if (o.grid_n > 0) raw.set("grid.n", std::to_string(o.grid_n));
  for (const auto& ov : o.overrides) raw.apply_override(ov);
  const sqg::ExperimentConfig c = sqg::resolve_config(kind, raw);
  sqg::ProgressFn progress;
  if (!o.quiet) progress = [](const std::string& m) { std::cerr << m << "\n"; };
  const sqg::ExperimentReport r = sqg::run_experiment(c, progress);
  sqg::write_resolved_config(c, c.out_dir);
  const auto files = sqg::emit_report(r, c.out_dir, true, !o.no_svg);
  if (kind == sqg::ExperimentKind::constants) print_constants(r);
  if (!o.quiet) {
    std::cerr << "config_hash " << c.hash << "\n";
    for (const auto& [k, v] : r.summary) std::cerr << k << " = " << sqg::format_number(v) << "\n";
    for (const auto& f : files) std::cerr << "wrote " << f << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiments for the dissipative surface quasi-geostrophic equation"};
  app.require_subcommand(1);
  Options o;
  const std::vector<sqg::ExperimentKind> kinds = {
      sqg::ExperimentKind::approx_rates,       sqg::ExperimentKind::norm_inflation,
      sqg::ExperimentKind::pseudo_error,       sqg::ExperimentKind::radial_decay,
      sqg::ExperimentKind::compose_translates, sqg::ExperimentKind::constants};
  std::vector<std::pair<CLI::App*, sqg::ExperimentKind>> subs;
  for (auto k : kinds) {
    CLI::App* s = app.add_subcommand(sqg::to_string(k), "run the " + sqg::to_string(k) + " experiment");
    s->add_option("--config", o.config_path, "config file (key = value lines)")->check(CLI::ExistingFile);
    s->add_option("--out", o.out_dir, "output directory");
    s->add_option("--grid-n", o.grid_n, "grid points per side")->check(CLI::PositiveNumber);
    s->add_option("--override", o.overrides, "key=value, may repeat");
    s->add_flag("--no-svg", o.no_svg, "skip SVG plots");
    s->add_flag("--quiet", o.quiet, "no progress output");
    subs.emplace_back(s, k);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  for (const auto& [s, k] : subs) {
    if (!s->parsed()) continue;
    try {
      return run(k, o);
    } catch (const sqg::Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return exit_code(e.kind());
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }
  return 2;
}
