#include "sqg/radial.hpp"

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "sqg/error.hpp"

namespace sqg {

struct RadialProfile::Spline {
  boost::math::interpolators::cardinal_cubic_b_spline<double> s;
};

RadialProfile::RadialProfile() : RadialProfile(zero()) {}

RadialProfile::RadialProfile(double r_max, std::vector<double> values) : r_max_(r_max), values_(std::move(values)) {
  if (values_.size() < 4) throw Error(ErrorKind::InvalidGeometry, "radial profile needs at least 4 samples");
  if (!(r_max > 0.0)) throw Error(ErrorKind::InvalidGeometry, "radial profile needs R_max > 0");
  step_ = r_max_ / double(values_.size() - 1);
  spline_ = std::make_shared<const Spline>(
      Spline{boost::math::interpolators::cardinal_cubic_b_spline<double>(values_.data(), values_.size(), 0.0, step_,
                                                                          0.0)});
}

RadialProfile RadialProfile::sample(const std::function<double(double)>& f, double r_max, int samples) {
  std::vector<double> v(samples);
  const double h = r_max / (samples - 1);
  for (int i = 0; i < samples; ++i) v[i] = f(i * h);
  return RadialProfile(r_max, std::move(v));
}

RadialProfile RadialProfile::zero(double r_max, int samples) {
  return RadialProfile(r_max, std::vector<double>(samples, 0.0));
}

double RadialProfile::operator()(double r) const {
  r = std::abs(r);
  if (r > r_max_) return 0.0;
  return spline_->s(r);
}

double RadialProfile::d1(double r) const {
  const double sgn = r < 0 ? -1.0 : 1.0;
  r = std::abs(r);
  if (r > r_max_) return 0.0;
  return sgn * spline_->s.prime(r);
}

double RadialProfile::d2(double r) const {
  r = std::abs(r);
  if (r > r_max_) return 0.0;
  return spline_->s.double_prime(r);
}

std::vector<double> RadialProfile::r_grid() const {
  std::vector<double> r(values_.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = i * step_;
  return r;
}

void RadialProfile::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IOFailure, "cannot write " + path);
  out << "r,value\n";
  for (std::size_t i = 0; i < values_.size(); ++i) out << fmt::format("{:.17g},{:.17g}\n", i * step_, values_[i]);
  if (!out) throw Error(ErrorKind::IOFailure, "write failed for " + path);
}

RadialProfile RadialProfile::read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IOFailure, "cannot read " + path);
  std::string line;
  std::getline(in, line);
  std::vector<double> r, v;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string a, b;
    std::getline(ss, a, ',');
    std::getline(ss, b, ',');
    r.push_back(std::stod(a));
    v.push_back(std::stod(b));
  }
  if (r.size() < 4) throw Error(ErrorKind::IOFailure, "too few rows in " + path);
  return RadialProfile(r.back(), std::move(v));
}

}  // namespace sqg
