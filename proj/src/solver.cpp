#include "sqg/solver.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>

namespace sqg {

namespace {

constexpr char kMagic[8] = {'S', 'Q', 'G', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;
// bound on |k|^alpha dt / 2 so the backward factor in the second stage stays tame
constexpr double kStiffLimit = 20.0;

template <class T>
void put(std::ostream& out, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  out.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  unsigned char b[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(b), sizeof(T))) throw Error(ErrorKind::CheckpointIOFailure, "truncated checkpoint");
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

bool all_finite(const SpectralField& w) {
  for (const cplx& c : w.coeffs())
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

void push_history(SolverState& s, const Diagnostic& d) {
  s.history.push_back(d);
  while (s.history.size() > SolverState::history_capacity) s.history.pop_front();
}

}  // namespace

void validate(const SolverConfig& c) {
  if (!(c.alpha > 0.0 && c.alpha <= 2.0)) throw Error(ErrorKind::InvalidRegime, "solver alpha must lie in (0,2]");
  if (!(c.cfl > 0.0 && c.cfl <= 1.0)) throw Error(ErrorKind::InvalidRegime, "cfl must lie in (0,1]");
  if (!(c.t_end >= 0.0)) throw Error(ErrorKind::InvalidRegime, "t_end must be nonnegative");
  if (!(c.dt_max > 0.0)) throw Error(ErrorKind::InvalidRegime, "dt_max must be positive");
  if (c.checkpoint_every < 0) throw Error(ErrorKind::InvalidRegime, "checkpoint_every must be nonnegative");
}

Solver::Solver(const Grid& grid, const SolverConfig& config) : grid_(grid), config_(config) {
  validate(config_);
  kalpha_.resize(grid_.spectral_size());
  for (int i1 = 0; i1 < grid_.n(); ++i1)
    for (int i2 = 0; i2 < grid_.nh(); ++i2)
      kalpha_[std::size_t(i1) * grid_.nh() + i2] = std::pow(grid_.kmag(i1, i2), config_.alpha);
  double kmax = 0.0;
  for (double v : kalpha_) kmax = std::max(kmax, v);
  stiff_dt_ = kmax > 0.0 ? 2.0 * kStiffLimit / kmax : std::numeric_limits<double>::infinity();
}

double Solver::max_velocity(const SpectralField& w) const {
  SpectralField v1(grid_), v2(grid_);
  for (int i1 = 0; i1 < grid_.n(); ++i1) {
    for (int i2 = 0; i2 < grid_.nh(); ++i2) {
      if (grid_.is_nyquist(i1, i2)) continue;
      const double k = grid_.kmag(i1, i2);
      if (k == 0.0) continue;
      const cplx c = w.at(i1, i2);
      v1.at(i1, i2) = cplx(0.0, -grid_.k2(i2) / k) * c;
      v2.at(i1, i2) = cplx(0.0, grid_.k1(i1) / k) * c;
    }
  }
  const auto a = v1.to_physical(), b = v2.to_physical();
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double s = std::hypot(a[i], b[i]);
    if (!std::isfinite(s)) return s;
    m = std::max(m, s);
  }
  return m;
}

double Solver::cfl_dt(const SpectralField& w) const { return step_bound(max_velocity(w)); }

SpectralField Solver::nonlinear_term(const SpectralField& w) const { return nonlinear_term(w, nullptr); }

SpectralField Solver::nonlinear_term(const SpectralField& w, double* vmax) const {
  const int n = grid_.n();
  const int cut = n / 3;
  SpectralField v1(grid_), v2(grid_), d1(grid_), d2(grid_);
  for (int i1 = 0; i1 < n; ++i1) {
    const int m1 = grid_.mode1(i1);
    for (int i2 = 0; i2 < grid_.nh(); ++i2) {
      if (grid_.is_nyquist(i1, i2)) continue;
      if (config_.dealias && (std::abs(m1) > cut || i2 > cut)) continue;
      const double k = grid_.kmag(i1, i2);
      if (k == 0.0) continue;
      const double k1 = grid_.k1(i1), k2 = grid_.k2(i2);
      const cplx c = w.at(i1, i2);
      v1.at(i1, i2) = cplx(0.0, -k2 / k) * c;
      v2.at(i1, i2) = cplx(0.0, k1 / k) * c;
      d1.at(i1, i2) = cplx(0.0, k1) * c;
      d2.at(i1, i2) = cplx(0.0, k2) * c;
    }
  }
  const auto a = v1.to_physical(), b = v2.to_physical(), p = d1.to_physical(), q = d2.to_physical();
  std::vector<double> prod(a.size());
  double vm = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    prod[i] = -(a[i] * p[i] + b[i] * q[i]);
    vm = std::max(vm, a[i] * a[i] + b[i] * b[i]);
  }
  if (vmax) *vmax = std::sqrt(vm);
  SpectralField out = SpectralField::from_physical(grid_, prod);
  for (int i1 = 0; i1 < n; ++i1) {
    const int m1 = grid_.mode1(i1);
    for (int i2 = 0; i2 < grid_.nh(); ++i2) {
      if (grid_.is_nyquist(i1, i2) || (config_.dealias && (std::abs(m1) > cut || i2 > cut))) out.at(i1, i2) = 0.0;
    }
  }
  out.at(0, 0) = 0.0;
  return out;
}

SpectralField Solver::decay(const SpectralField& w, double dt) const {
  auto it = std::find_if(decay_cache_.begin(), decay_cache_.end(), [dt](const auto& e) { return e.first == dt; });
  if (it == decay_cache_.end()) {
    if (decay_cache_.size() >= 6) decay_cache_.erase(decay_cache_.begin());
    std::vector<double> f(kalpha_.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::exp(-kalpha_[i] * dt);
    decay_cache_.emplace_back(dt, std::move(f));
    it = decay_cache_.end() - 1;
  }
  SpectralField out = w;
  auto c = out.coeffs();
  const auto& f = it->second;
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= f[i];
  return out;
}

double Solver::step_bound(double vmax) const {
  if (!std::isfinite(vmax)) throw Error(ErrorKind::VelocityBlowup, "velocity is not finite");
  double dt = config_.dt_max;
  if (config_.adaptive && config_.nonlinear && vmax > 0.0) dt = std::min(dt, config_.cfl * grid_.dx() / vmax);
  return std::min(dt, stiff_dt_);
}

SolverState Solver::step(const SolverState& s, double dt) const {
  if (!(s.w.grid() == grid_)) throw Error(ErrorKind::InvalidGeometry, "state grid does not match solver grid");
  return step_with(s, dt, config_.nonlinear ? nonlinear_term(s.w) : SpectralField(grid_));
}

SolverState Solver::step_with(const SolverState& s, double dt, const SpectralField& n0) const {
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidRegime, "time step must be positive");
  auto N = [&](const SpectralField& u) { return config_.nonlinear ? nonlinear_term(u) : SpectralField(grid_); };
  const SpectralField& u = s.w;
  SpectralField u1 = decay(u + dt * n0, dt);
  SpectralField u2 = 0.75 * decay(u, 0.5 * dt) + 0.25 * decay(u1 + dt * N(u1), -0.5 * dt);
  SpectralField u3 = (1.0 / 3.0) * decay(u, dt) + (2.0 / 3.0) * decay(u2 + dt * N(u2), 0.5 * dt);
  u3.at(0, 0) = u.at(0, 0);
  if (!all_finite(u3)) throw Error(ErrorKind::NaNDetected, fmt::format("non-finite state at step {}", s.step_count + 1));
  SolverState out;
  out.t = s.t + dt;
  out.w = std::move(u3);
  out.step_count = s.step_count + 1;
  out.history = s.history;
  push_history(out, quick_diagnose(out.w, out.t, out.step_count, dt));
  return out;
}

SolverState Solver::step_adaptive(const SolverState& s, double t_limit) const {
  if (!(t_limit > s.t)) throw Error(ErrorKind::InvalidRegime, "step target must lie ahead of the state time");
  double vmax = 0.0;
  const SpectralField n0 = config_.nonlinear ? nonlinear_term(s.w, &vmax) : SpectralField(grid_);
  const double bound = step_bound(vmax);
  const bool lands = s.t + bound >= t_limit - 1e-13 * std::max(1.0, std::abs(t_limit));
  SolverState out = step_with(s, lands ? t_limit - s.t : bound, n0);
  if (lands) out.t = t_limit;
  return out;
}

SolverState Solver::run(SolverState s, std::vector<Observer> observers) const {
  std::sort(observers.begin(), observers.end(), [](const Observer& a, const Observer& b) { return a.time < b.time; });
  const double t_end = config_.t_end;
  const double eps = 1e-13 * std::max(1.0, t_end);
  std::size_t next = 0;
  auto fire_due = [&](double t_old, const SpectralField& w_old, double t_new, const SpectralField& w_new) {
    while (next < observers.size() && observers[next].time <= t_new + eps) {
      const Observer& o = observers[next];
      if (o.time <= t_old + eps || std::abs(o.time - t_new) <= eps) {
        o.callback(o.time, std::abs(o.time - t_new) <= eps ? w_new : w_old);
      } else {
        const double th = (o.time - t_old) / (t_new - t_old);
        o.callback(o.time, (1.0 - th) * w_old + th * w_new);
      }
      ++next;
    }
  };
  if (s.history.empty()) push_history(s, quick_diagnose(s.w, s.t, s.step_count, 0.0));
  fire_due(s.t, s.w, s.t, s.w);
  if (!config_.diagnostics_csv.empty() && s.step_count == 0) append_diagnostics_csv(config_.diagnostics_csv, s.history.back());
  while (s.t < t_end - eps) {
    double vmax = 0.0;
    const SpectralField n0 = config_.nonlinear ? nonlinear_term(s.w, &vmax) : SpectralField(grid_);
    double dt = std::min(step_bound(vmax), t_end - s.t);
    double target = s.t + dt;
    for (std::size_t i = next; i < observers.size(); ++i) {
      if (observers[i].land && observers[i].time > s.t + eps && observers[i].time < target) {
        target = observers[i].time;
        break;
      }
      if (observers[i].time >= target) break;
    }
    if (target - t_end > -eps) target = t_end;
    dt = target - s.t;
    SolverState nxt = step_with(s, dt, n0);
    nxt.t = target;
    if (!config_.diagnostics_csv.empty()) append_diagnostics_csv(config_.diagnostics_csv, nxt.history.back());
    fire_due(s.t, s.w, nxt.t, nxt.w);
    s = std::move(nxt);
    if (config_.checkpoint_every > 0 && !config_.checkpoint_dir.empty() && s.step_count % config_.checkpoint_every == 0)
      write_checkpoint((std::filesystem::path(config_.checkpoint_dir) / fmt::format("ckpt_{:08d}.bin", s.step_count)).string(),
                       s, config_.alpha);
  }
  fire_due(s.t, s.w, s.t, s.w);
  return s;
}

Diagnostic Solver::quick_diagnose(const SpectralField& w, double t, long step, double dt) const {
  double l2 = 0.0, h = 0.0;
  const auto c = w.coeffs();
  for (int i1 = 0; i1 < grid_.n(); ++i1) {
    for (int i2 = 0; i2 < grid_.nh(); ++i2) {
      const std::size_t idx = std::size_t(i1) * grid_.nh() + i2;
      const double wt = (i2 == 0 || i2 == grid_.n() / 2) ? 1.0 : 2.0;
      const double a = wt * std::norm(c[idx]);
      l2 += a;
      h += a * kalpha_[idx];
    }
  }
  const double area = 4.0 * grid_.L() * grid_.L();
  return Diagnostic{t, step, dt, std::sqrt(area * l2), std::sqrt(area * h)};
}

SolverState make_state(const SpectralField& w0, double t) {
  if (std::abs(w0.mean()) > mean_tolerance() * std::max(1.0, max_abs(w0.to_physical())))
    throw Error(ErrorKind::NonzeroMean, "solver initial data must have zero mean");
  SolverState s;
  s.t = t;
  s.w = remove_mean(w0);
  return s;
}

double cfl_dt(const SolverState& s, const SolverConfig& c) { return Solver(s.w.grid(), c).cfl_dt(s.w); }

SolverState step(const SolverState& s, const SolverConfig& c, double dt) { return Solver(s.w.grid(), c).step(s, dt); }

SolverState run(const SpectralField& w0, const SolverConfig& c, std::vector<Observer> observers) {
  return Solver(w0.grid(), c).run(make_state(w0), std::move(observers));
}

Diagnostic diagnose(const SpectralField& w, double alpha, double t, long step, double dt) {
  Diagnostic d;
  d.t = t;
  d.step = step;
  d.dt = dt;
  d.l2 = l2_norm(w);
  d.h_half_alpha = sobolev_norm(w, 0.5 * alpha, true);
  return d;
}

void append_diagnostics_csv(const std::string& path, const Diagnostic& d) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error(ErrorKind::IOFailure, "cannot append to " + path);
  if (fresh) out << "t,step,dt,l2,h_half_alpha\n";
  out << fmt::format("{:.17g},{},{:.17g},{:.17g},{:.17g}\n", d.t, d.step, d.dt, d.l2, d.h_half_alpha);
}

void write_checkpoint(const std::string& path, const SolverState& s, double alpha) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::CheckpointIOFailure, "cannot open " + path);
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kVersion);
  put<std::int32_t>(out, s.w.grid().n());
  put<double>(out, s.w.grid().L());
  put<double>(out, alpha);
  put<double>(out, s.t);
  put<std::int64_t>(out, s.step_count);
  for (const cplx& c : s.w.coeffs()) {
    put<double>(out, c.real());
    put<double>(out, c.imag());
  }
  if (!out) throw Error(ErrorKind::CheckpointIOFailure, "write failed for " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::CheckpointIOFailure, "cannot open " + path);
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw Error(ErrorKind::CheckpointIOFailure, "bad checkpoint magic in " + path);
  const auto version = get<std::uint32_t>(in);
  if (version != kVersion) throw Error(ErrorKind::CheckpointIOFailure, fmt::format("unsupported checkpoint version {}", version));
  const auto n = get<std::int32_t>(in);
  const double L = get<double>(in);
  Checkpoint c;
  c.alpha = get<double>(in);
  c.state.t = get<double>(in);
  c.state.step_count = get<std::int64_t>(in);
  if (n < 4 || n % 2 != 0 || !(L > 0.0)) throw Error(ErrorKind::CheckpointIOFailure, "corrupt checkpoint header");
  const Grid g(n, L);
  c.state.w = SpectralField(g);
  for (cplx& z : c.state.w.coeffs()) {
    const double re = get<double>(in);
    const double im = get<double>(in);
    z = cplx(re, im);
  }
  if (in.peek() != std::char_traits<char>::eof()) throw Error(ErrorKind::CheckpointIOFailure, "trailing bytes in checkpoint");
  return c;
}

}  // namespace sqg
