#pragma once

#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "sqg/spectral.hpp"

namespace sqg {

struct SolverConfig {
  double alpha = 0.5;
  double cfl = 0.5;
  double t_end = 1.0;
  double dt_max = 1e-2;
  int checkpoint_every = 0;  // steps; 0 disables
  bool dealias = true;
  bool nonlinear = true;     // off: pure dissipation, for tests
  bool adaptive = true;      // off: every step uses dt_max
  std::string checkpoint_dir;
  std::string diagnostics_csv;  // appended each step when set
};

void validate(const SolverConfig& c);

struct Diagnostic {
  double t = 0.0;
  long step = 0;
  double dt = 0.0;
  double l2 = 0.0;
  double h_half_alpha = 0.0;  // homogeneous H^{alpha/2} seminorm
};

struct SolverState {
  double t = 0.0;
  SpectralField w;
  long step_count = 0;
  std::deque<Diagnostic> history;  // ring of recent diagnostics

  static constexpr std::size_t history_capacity = 4096;
};

struct Observer {
  double time = 0.0;
  // land: shorten the step to hit the time exactly; otherwise linear dense output
  bool land = false;
  std::function<void(double t, const SpectralField& w)> callback;
};

class Solver {
 public:
  Solver(const Grid& grid, const SolverConfig& config);

  const Grid& grid() const { return grid_; }
  const SolverConfig& config() const { return config_; }

  double cfl_dt(const SpectralField& w) const;
  double max_velocity(const SpectralField& w) const;
  // -v(w)·∇w, dealiased when configured, zero mean
  SpectralField nonlinear_term(const SpectralField& w) const;
  // also reports max |v| of the dealiased velocity
  SpectralField nonlinear_term(const SpectralField& w, double* vmax) const;
  SolverState step(const SolverState& s, double dt) const;
  // one step of size min(bound, t_limit - t); the result lands exactly on t_limit when it is reached
  SolverState step_adaptive(const SolverState& s, double t_limit) const;
  SolverState run(SolverState s, std::vector<Observer> observers = {}) const;

 private:
  SpectralField decay(const SpectralField& w, double dt) const;
  double step_bound(double vmax) const;
  SolverState step_with(const SolverState& s, double dt, const SpectralField& n0) const;
  Diagnostic quick_diagnose(const SpectralField& w, double t, long step, double dt) const;

  Grid grid_;
  SolverConfig config_;
  std::vector<double> kalpha_;
  double stiff_dt_ = 0.0;
  mutable std::vector<std::pair<double, std::vector<double>>> decay_cache_;
};

SolverState make_state(const SpectralField& w0, double t = 0.0);

// free-function forms
double cfl_dt(const SolverState& s, const SolverConfig& c);
SolverState step(const SolverState& s, const SolverConfig& c, double dt);
SolverState run(const SpectralField& w0, const SolverConfig& c, std::vector<Observer> observers = {});

Diagnostic diagnose(const SpectralField& w, double alpha, double t, long step, double dt);
void append_diagnostics_csv(const std::string& path, const Diagnostic& d);

void write_checkpoint(const std::string& path, const SolverState& s, double alpha);
struct Checkpoint {
  SolverState state;
  double alpha = 0.0;
};
Checkpoint read_checkpoint(const std::string& path);

}  // namespace sqg
