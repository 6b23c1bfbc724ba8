#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace sqg {

// Radial function sampled on a uniform grid of [0, R_max] with a cubic
// spline interpolant. Evaluation is even in r and zero beyond R_max.
class RadialProfile {
 public:
  RadialProfile();
  RadialProfile(double r_max, std::vector<double> values);

  static RadialProfile sample(const std::function<double(double)>& f, double r_max = 4.0, int samples = 4096);
  static RadialProfile zero(double r_max = 4.0, int samples = 64);

  double operator()(double r) const;
  double d1(double r) const;
  double d2(double r) const;

  double r_max() const { return r_max_; }
  double step() const { return step_; }
  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  std::vector<double> r_grid() const;

  void write_csv(const std::string& path) const;
  static RadialProfile read_csv(const std::string& path);

 private:
  struct Spline;
  double r_max_ = 0.0;
  double step_ = 0.0;
  std::vector<double> values_;
  std::shared_ptr<const Spline> spline_;
};

}  // namespace sqg
