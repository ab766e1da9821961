#include "shadowlab/models.hpp"

#include <cmath>

namespace shadowlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

const double kSqrt5 = std::sqrt(5.0);
const double kCatLambdaU = (3.0 + kSqrt5) / 2.0;
const double kCatLambdaS = (3.0 - kSqrt5) / 2.0;

Vec cat_eu() {
  const double phi = (1.0 + kSqrt5) / 2.0;
  double n = std::sqrt(phi * phi + 1.0);
  return Vec(phi / n, 1.0 / n);
}

Vec cat_es() {
  const double phi = (1.0 + kSqrt5) / 2.0;
  double n = std::sqrt(phi * phi + 1.0);
  return Vec(1.0 / n, -phi / n);
}

}  // namespace

std::string model_id_name(ModelId id) {
  switch (id) {
    case ModelId::cat_map: return "cat";
    case ModelId::north_south_circle: return "north_south_circle";
    case ModelId::gradient_torus: return "gradient_torus";
  }
  return "?";
}

Model Model::cat_map() {
  Model mdl;
  mdl.id_ = ModelId::cat_map;
  mdl.name_ = "cat";
  mdl.m_ = 2;
  BasicSet s;
  s.label = 0;
  s.whole_space = true;
  s.fixed_point = Pt(0.0, 0.0);
  s.stable_dim = 1;
  s.unstable_dim = 1;
  s.w_radius = s.u_radius = 1.0;  // whole torus
  mdl.sets_ = {s};
  return mdl;
}

Model Model::north_south_circle(double a) {
  if (!(a > 0.0 && a < 0.15)) throw ConfigError("north_south_circle amplitude must be in (0, 0.15)");
  Model mdl;
  mdl.id_ = ModelId::north_south_circle;
  mdl.name_ = "north_south_circle";
  mdl.m_ = 1;
  mdl.param_ = a;
  BasicSet source;
  source.label = 0;
  source.fixed_point = Pt(0.5);
  source.stable_dim = 0;
  source.unstable_dim = 1;
  BasicSet sink;
  sink.label = 1;
  sink.fixed_point = Pt(0.0);
  sink.stable_dim = 1;
  sink.unstable_dim = 0;
  mdl.sets_ = {source, sink};
  return mdl;
}

Model Model::gradient_torus(double time) {
  if (!(time > 0.0 && time <= 0.2)) throw ConfigError("gradient_torus time must be in (0, 0.2]");
  Model mdl;
  mdl.id_ = ModelId::gradient_torus;
  mdl.name_ = "gradient_torus";
  mdl.m_ = 2;
  mdl.param_ = time;
  mdl.exp_fwd_ = std::exp(4.0 * kPi * kPi * time);
  mdl.exp_bwd_ = std::exp(-4.0 * kPi * kPi * time);
  auto mk = [](int label, double cx, double cy) {
    BasicSet s;
    s.label = label;
    s.fixed_point = Pt(cx, cy);
    s.stable_dim = (cx == 0.5 ? 1 : 0) + (cy == 0.5 ? 1 : 0);
    s.unstable_dim = 2 - s.stable_dim;
    // the time-t map expands by exp(4 pi^2 t) per step, so W must be roughly
    // that factor smaller than U for one-step containment to hold
    s.w_radius = 0.02;
    s.u_radius = 0.2;
    return s;
  };
  // topological order: source, saddles, sink
  mdl.sets_ = {mk(0, 0.0, 0.0), mk(1, 0.0, 0.5), mk(2, 0.5, 0.0), mk(3, 0.5, 0.5)};
  return mdl;
}

Model Model::by_name(const std::string& name, double param) {
  if (name == "cat" || name == "cat_map") return cat_map();
  if (name == "north_south_circle" || name == "ns")
    return north_south_circle(param > 0 ? param : 0.1);
  if (name == "gradient_torus" || name == "gt")
    return gradient_torus(param > 0 ? param : 0.05);
  throw ConfigError("unknown model '" + name + "'");
}

void Model::set_radii(double w_radius, double u_radius) {
  if (!(0 < w_radius && w_radius < u_radius))
    throw ConfigError("need 0 < w_radius < u_radius");
  for (auto& s : sets_) {
    if (s.whole_space) continue;
    s.w_radius = w_radius;
    s.u_radius = u_radius;
  }
}

double Model::scalar_flow(double x, double e) {
  // Exact time-t solution of x' = 2 pi sin(2 pi x) on [0,1):
  // tan(pi x(t)) = tan(pi x0) * e with e = exp(4 pi^2 t).
  // Evaluated in offset form around the nearest fixed point so that offsets
  // far below 1e-16 survive (the offset from 1/2 evolves with multiplier 1/e
  // in tan coordinates).
  double w = wrap_half(x);
  if (w == 0.0) return 0.0;
  if (std::abs(w) <= 0.25) {
    return wrap01(std::atan(std::tan(kPi * w) * e) / kPi);
  }
  double c = wrap_half(x - 0.5);
  if (c == 0.0) return 0.5;
  return wrap01(0.5 + std::atan(std::tan(kPi * c) / e) / kPi);
}

Pt Model::forward(const Pt& x) const {
  switch (id_) {
    case ModelId::cat_map: {
      return wrap(Pt(2.0 * x[0] + x[1], x[0] + x[1]));
    }
    case ModelId::north_south_circle: {
      Pt y(wrap01(x[0] - param_ * std::sin(2.0 * kPi * x[0])));
      return y;
    }
    case ModelId::gradient_torus: {
      return Pt(scalar_flow(x[0], exp_fwd_), scalar_flow(x[1], exp_fwd_));
    }
  }
  return x;
}

Pt Model::inverse(const Pt& x) const {
  switch (id_) {
    case ModelId::cat_map: {
      return wrap(Pt(x[0] - x[1], -x[0] + 2.0 * x[1]));
    }
    case ModelId::north_south_circle: {
      // Newton on the lift; f' = 1 - 2 pi a cos(2 pi y) > 0 for a < 1/(2 pi)
      double target = x[0];
      double y = wrap01(target + param_ * std::sin(2.0 * kPi * target));
      for (int it = 0; it < 60; ++it) {
        double fy = y - param_ * std::sin(2.0 * kPi * y);
        double err = wrap_half(fy - target);
        if (std::abs(err) < 1e-15) break;
        double deriv = 1.0 - 2.0 * kPi * param_ * std::cos(2.0 * kPi * y);
        y = wrap01(y - err / deriv);
      }
      return Pt(wrap01(y));
    }
    case ModelId::gradient_torus: {
      return Pt(scalar_flow(x[0], exp_bwd_), scalar_flow(x[1], exp_bwd_));
    }
  }
  return x;
}

Pt Model::apply(const Pt& x, long n) const {
  Pt y = x;
  if (y.m != m_) y.m = m_;
  for (long i = 0; i < n; ++i) y = forward(y);
  for (long i = 0; i > n; --i) y = inverse(y);
  return y;
}

int Model::locate(const Pt& x) const {
  for (size_t i = 0; i < sets_.size(); ++i) {
    const auto& s = sets_[i];
    if (s.whole_space) return static_cast<int>(i);
    if (torus_dist(x, s.fixed_point) <= s.u_radius) return static_cast<int>(i);
  }
  return -1;
}

int Model::locate_w(const Pt& x) const {
  for (size_t i = 0; i < sets_.size(); ++i) {
    const auto& s = sets_[i];
    if (s.whole_space) return static_cast<int>(i);
    if (torus_dist(x, s.fixed_point) <= s.w_radius) return static_cast<int>(i);
  }
  return -1;
}

Splitting Model::splitting_at(const Pt& x) const {
  int i = locate(x);
  if (i < 0) throw OutsideExtendedNeighborhood("splitting_at: " + to_string(x));
  Splitting sp;
  switch (id_) {
    case ModelId::cat_map:
      sp.unstable = {cat_eu()};
      sp.stable = {cat_es()};
      break;
    case ModelId::north_south_circle: {
      Vec e(1.0);
      if (sets_[static_cast<size_t>(i)].unstable_dim == 1)
        sp.unstable = {e};
      else
        sp.stable = {e};
      break;
    }
    case ModelId::gradient_torus: {
      const auto& s = sets_[static_cast<size_t>(i)];
      Vec ex(1.0, 0.0), ey(0.0, 1.0);
      if (s.fixed_point[0] == 0.0) sp.unstable.push_back(ex); else sp.stable.push_back(ex);
      if (s.fixed_point[1] == 0.0) sp.unstable.push_back(ey); else sp.stable.push_back(ey);
      break;
    }
  }
  return sp;
}

ExpansionRates Model::expansion_rates() const {
  ExpansionRates r;
  switch (id_) {
    case ModelId::cat_map:
      r.stable_multiplier = {kCatLambdaS};
      r.unstable_multiplier = {kCatLambdaU};
      r.lambda = kCatLambdaS;  // == 1/lambda_u
      break;
    case ModelId::north_south_circle: {
      double mu_sink = 1.0 - 2.0 * kPi * param_;   // f'(0)
      double mu_source = 1.0 + 2.0 * kPi * param_; // f'(1/2)
      r.stable_multiplier = {0.0, mu_sink};
      r.unstable_multiplier = {mu_source, 0.0};
      r.lambda = std::max(mu_sink, 1.0 / mu_source);
      break;
    }
    case ModelId::gradient_torus: {
      double contraction = exp_bwd_;
      for (const auto& s : sets_) {
        r.stable_multiplier.push_back(s.stable_dim > 0 ? contraction : 0.0);
        r.unstable_multiplier.push_back(s.unstable_dim > 0 ? exp_fwd_ : 0.0);
      }
      r.lambda = contraction;  // equals 1/exp_fwd_
      break;
    }
  }
  return r;
}

std::vector<std::pair<int, int>> Model::connection_edges() const {
  switch (id_) {
    case ModelId::cat_map: return {};
    case ModelId::north_south_circle: return {{0, 1}};
    case ModelId::gradient_torus:
      return {{0, 1}, {0, 2}, {1, 3}, {2, 3}, {0, 3}};
  }
  return {};
}

Pt Model::apply_rk4(const Pt& x, int steps, bool backward) const {
  if (id_ != ModelId::gradient_torus) throw ModelMismatch("apply_rk4 is gradient_torus only");
  if (steps < 1) throw ConfigError("apply_rk4 needs steps >= 1");
  double sign = backward ? -1.0 : 1.0;
  auto field = [sign](double u) { return sign * 2.0 * kPi * std::sin(2.0 * kPi * u); };
  Pt y = x;
  double h = param_ / steps;
  for (int c = 0; c < m_; ++c) {
    double u = y[c];
    for (int k = 0; k < steps; ++k) {
      double k1 = field(u);
      double k2 = field(u + 0.5 * h * k1);
      double k3 = field(u + 0.5 * h * k2);
      double k4 = field(u + h * k3);
      u += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    y[c] = wrap01(u);
  }
  return y;
}

}  // namespace shadowlab
