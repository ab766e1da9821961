#pragma once

#include <array>
#include <cmath>
#include <string>

namespace shadowlab {

/// A point on the flat torus [0,1)^m, m <= 2. Coordinates are kept wrapped.
struct Pt {
  std::array<double, 2> c{0.0, 0.0};
  int m = 2;

  Pt() = default;
  Pt(double x, double y) : c{x, y}, m(2) {}
  explicit Pt(double x) : c{x, 0.0}, m(1) {}

  double& operator[](int i) { return c[static_cast<size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<size_t>(i)]; }
};

/// A free displacement vector in R^m (not wrapped).
struct Vec {
  std::array<double, 2> c{0.0, 0.0};
  int m = 2;

  Vec() = default;
  Vec(double x, double y) : c{x, y}, m(2) {}
  explicit Vec(double x) : c{x, 0.0}, m(1) {}

  double& operator[](int i) { return c[static_cast<size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<size_t>(i)]; }

  double norm() const {
    double s = 0;
    for (int i = 0; i < m; ++i) s += c[static_cast<size_t>(i)] * c[static_cast<size_t>(i)];
    return std::sqrt(s);
  }
  double inf_norm() const {
    double s = 0;
    for (int i = 0; i < m; ++i) s = std::max(s, std::abs(c[static_cast<size_t>(i)]));
    return s;
  }
  double dot(const Vec& o) const {
    double s = 0;
    for (int i = 0; i < m; ++i) s += c[static_cast<size_t>(i)] * o.c[static_cast<size_t>(i)];
    return s;
  }
};

/// Reduce a real coordinate into [0,1).
double wrap01(double x);

/// Minimal representative of x modulo 1, in [-0.5, 0.5).
double wrap_half(double x);

Pt wrap(const Pt& p);

/// Per-coordinate minimal displacement from `from` to `to` (components in [-0.5,0.5)).
Vec lift_delta(const Pt& from, const Pt& to);

/// Torus distance: Euclidean norm of the minimal displacement.
double torus_dist(const Pt& a, const Pt& b);

/// wrap(a + v)
Pt translate(const Pt& a, const Vec& v);

std::string to_string(const Pt& p);

}  // namespace shadowlab
