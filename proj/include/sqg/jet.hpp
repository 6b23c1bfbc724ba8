#pragma once

#include <array>
#include <cmath>

namespace sqg {

// Truncated Taylor series c[0] + c[1] e + ... + c[M] e^M.
template <int M>
struct Jet {
  std::array<double, M + 1> c{};

  Jet() = default;
  Jet(double v) { c[0] = v; }

  static Jet variable(double x0) {
    Jet j(x0);
    if constexpr (M >= 1) j.c[1] = 1.0;
    return j;
  }

  double value() const { return c[0]; }
  double derivative(int k) const {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return c[k] * f;
  }

  Jet& operator+=(const Jet& o) {
    for (int i = 0; i <= M; ++i) c[i] += o.c[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int i = 0; i <= M; ++i) c[i] -= o.c[i];
    return *this;
  }
  Jet& operator*=(double s) {
    for (auto& v : c) v *= s;
    return *this;
  }
};

template <int M> Jet<M> operator+(Jet<M> a, const Jet<M>& b) { return a += b; }
template <int M> Jet<M> operator-(Jet<M> a, const Jet<M>& b) { return a -= b; }
template <int M> Jet<M> operator+(Jet<M> a, double b) { a.c[0] += b; return a; }
template <int M> Jet<M> operator+(double b, Jet<M> a) { a.c[0] += b; return a; }
template <int M> Jet<M> operator-(Jet<M> a, double b) { a.c[0] -= b; return a; }
template <int M> Jet<M> operator-(double b, const Jet<M>& a) {
  Jet<M> r;
  for (int i = 0; i <= M; ++i) r.c[i] = -a.c[i];
  r.c[0] += b;
  return r;
}
template <int M> Jet<M> operator-(const Jet<M>& a) { return 0.0 - a; }
template <int M> Jet<M> operator*(Jet<M> a, double s) { return a *= s; }
template <int M> Jet<M> operator*(double s, Jet<M> a) { return a *= s; }

template <int M>
Jet<M> operator*(const Jet<M>& a, const Jet<M>& b) {
  Jet<M> r;
  for (int i = 0; i <= M; ++i)
    for (int j = 0; i + j <= M; ++j) r.c[i + j] += a.c[i] * b.c[j];
  return r;
}

template <int M>
Jet<M> reciprocal(const Jet<M>& a) {
  Jet<M> r;
  r.c[0] = 1.0 / a.c[0];
  for (int k = 1; k <= M; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += a.c[j] * r.c[k - j];
    r.c[k] = -s / a.c[0];
  }
  return r;
}

template <int M> Jet<M> operator/(const Jet<M>& a, const Jet<M>& b) { return a * reciprocal(b); }
template <int M> Jet<M> operator/(const Jet<M>& a, double b) { return a * (1.0 / b); }
template <int M> Jet<M> operator/(double a, const Jet<M>& b) { return a * reciprocal(b); }

template <int M>
Jet<M> exp(const Jet<M>& a) {
  Jet<M> r;
  r.c[0] = std::exp(a.c[0]);
  for (int k = 1; k <= M; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += j * a.c[j] * r.c[k - j];
    r.c[k] = s / k;
  }
  return r;
}

// a^p for a.c[0] > 0
template <int M>
Jet<M> pow(const Jet<M>& a, double p) {
  Jet<M> r;
  r.c[0] = std::pow(a.c[0], p);
  for (int k = 1; k <= M; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += (p * j - (k - j)) * a.c[j] * r.c[k - j];
    r.c[k] = s / (k * a.c[0]);
  }
  return r;
}

template <int M> Jet<M> sqrt(const Jet<M>& a) { return pow(a, 0.5); }

// f(a) given the derivatives f^{(k)}(a.c[0]), k = 0..M
template <int M>
Jet<M> compose(const std::array<double, M + 1>& derivs, const Jet<M>& a) {
  Jet<M> d = a;
  d.c[0] = 0.0;
  Jet<M> r(derivs[0]);
  Jet<M> power(1.0);
  double fact = 1.0;
  for (int k = 1; k <= M; ++k) {
    power = power * d;
    fact *= k;
    r += power * (derivs[k] / fact);
  }
  return r;
}

template <int M>
Jet<M> cos(const Jet<M>& a) {
  std::array<double, M + 1> d;
  const double s = std::sin(a.c[0]), co = std::cos(a.c[0]);
  for (int k = 0; k <= M; ++k) d[k] = (k % 4 == 0) ? co : (k % 4 == 1) ? -s : (k % 4 == 2) ? -co : s;
  return compose<M>(d, a);
}

template <int M>
Jet<M> sin(const Jet<M>& a) {
  std::array<double, M + 1> d;
  const double s = std::sin(a.c[0]), co = std::cos(a.c[0]);
  for (int k = 0; k <= M; ++k) d[k] = (k % 4 == 0) ? s : (k % 4 == 1) ? co : (k % 4 == 2) ? -s : -co;
  return compose<M>(d, a);
}

}  // namespace sqg
