#include "shadowlab/torus.hpp"

#include <cstdio>

namespace shadowlab {

double wrap01(double x) {
  double y = x - std::floor(x);
  if (y >= 1.0) y -= 1.0;  // guards x = -1e-17 style results
  if (y < 0.0) y += 1.0;
  return y;
}

double wrap_half(double x) {
  double y = x - std::floor(x + 0.5);
  if (y < -0.5) y += 1.0;
  if (y >= 0.5) y -= 1.0;
  return y;
}

Pt wrap(const Pt& p) {
  Pt q = p;
  for (int i = 0; i < p.m; ++i) q[i] = wrap01(p[i]);
  return q;
}

Vec lift_delta(const Pt& from, const Pt& to) {
  Vec v;
  v.m = from.m;
  for (int i = 0; i < from.m; ++i) v[i] = wrap_half(to[i] - from[i]);
  return v;
}

double torus_dist(const Pt& a, const Pt& b) { return lift_delta(a, b).norm(); }

Pt translate(const Pt& a, const Vec& v) {
  Pt q = a;
  for (int i = 0; i < a.m; ++i) q[i] = wrap01(a[i] + v[i]);
  return q;
}

std::string to_string(const Pt& p) {
  char buf[80];
  if (p.m == 1) {
    std::snprintf(buf, sizeof buf, "(%.12g)", p[0]);
  } else {
    std::snprintf(buf, sizeof buf, "(%.12g, %.12g)", p[0], p[1]);
  }
  return buf;
}

}  // namespace shadowlab
