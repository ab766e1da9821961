#include "shadowlab/pseudotraj.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "shadowlab/rng.hpp"

namespace shadowlab {

using nlohmann::json;

ValidationReport validate(const Model& model, const Pseudotrajectory& xi) {
  ValidationReport rep;
  rep.max_jump = 0.0;
  for (long k = xi.k_min; k < xi.k_max; ++k) {
    double jump = torus_dist(model.forward(xi.at(k)), xi.at(k + 1));
    rep.max_jump = std::max(rep.max_jump, jump);
  }
  rep.ok = rep.max_jump < xi.d;
  if (xi.d == 0.0) rep.ok = rep.max_jump == 0.0;
  return rep;
}

Pseudotrajectory generate(const Model& model, const Pt& x0, long k_min, long k_max,
                          double d, uint64_t seed) {
  if (d < 0) throw InvalidInput("generate: d must be >= 0");
  if (k_min > 0 || k_max < 0) throw InvalidInput("generate: index range must contain 0");
  Pseudotrajectory xi;
  xi.k_min = k_min;
  xi.k_max = k_max;
  xi.d = d;
  xi.model_name = model.name();
  xi.seed = seed;
  xi.points.assign(static_cast<size_t>(k_max - k_min + 1), Pt());
  Rng rng(seed);

  Pt x = x0;
  x.m = model.dim();
  xi.at(0) = x;
  for (long k = 0; k < k_max; ++k) {
    Pt y = model.forward(xi.at(k));
    if (d > 0) y = translate(y, rng.in_ball(model.dim(), d * 0.99));
    xi.at(k + 1) = y;
  }
  // backward: inverse map plus noise small enough that the forward jump
  // dist(f(x_{k-1}), x_k) stays below d even after the derivative acts on it
  double back_scale = 0.3;
  for (long k = 0; k > k_min; --k) {
    Pt y = model.inverse(xi.at(k));
    for (int attempt = 0; attempt < 40; ++attempt) {
      Pt cand = d > 0 ? translate(y, rng.in_ball(model.dim(), d * back_scale)) : y;
      if (torus_dist(model.forward(cand), xi.at(k)) < d || d == 0.0) {
        xi.at(k - 1) = cand;
        break;
      }
      back_scale *= 0.5;
    }
  }
  return xi;
}

namespace {

// step direction (unit vector in coordinate space) from one fixed point
// toward another, on the connecting invariant line/diagonal
Vec leg_direction(const Model& model, const BasicSet& from, const BasicSet& to) {
  Vec dir;
  dir.m = model.dim();
  for (int j = 0; j < model.dim(); ++j) {
    double delta = wrap_half(to.fixed_point[j] - from.fixed_point[j]);
    dir[j] = delta == 0.0 ? 0.0 : (delta > 0 ? 1.0 : -1.0);
  }
  return dir;
}

double unstable_growth(const Model& model) {
  ExpansionRates r = model.expansion_rates();
  double g = 1.0;
  for (double m : r.unstable_multiplier) g = std::max(g, m);
  return g;
}

}  // namespace

Pseudotrajectory craft_chain(const Model& model, const std::vector<int>& sets,
                             int dwell_n, double d) {
  if (sets.empty()) throw InvalidInput("craft_chain: empty set list");
  if (d <= 0) throw InvalidInput("craft_chain: need d > 0");
  const auto& basic = model.basic_sets();
  for (size_t i = 0; i + 1 < sets.size(); ++i) {
    auto edges = model.connection_edges();
    bool found = false;
    for (auto& e : edges)
      if (e.first == sets[i] && e.second == sets[i + 1]) found = true;
    if (!found)
      throw NoConnection("no edge " + std::to_string(sets[i]) + " -> " + std::to_string(sets[i + 1]));
  }

  Pseudotrajectory xi;
  xi.k_min = 0;
  xi.d = d;
  xi.model_name = model.name();

  if (model.id() == ModelId::cat_map) {
    // single basic set: any exact orbit dwells in W = torus
    Pt x(0.1, 0.2);
    xi.points.push_back(x);
    for (int k = 0; k < 2 * dwell_n; ++k) {
      x = model.forward(x);
      xi.points.push_back(x);
    }
    xi.k_max = static_cast<long>(xi.points.size()) - 1;
    return xi;
  }

  const BasicSet& first = basic[static_cast<size_t>(sets.front())];
  double growth = unstable_growth(model);

  // seed point
  Pt x = first.fixed_point;
  if (sets.size() == 1) {
    if (first.unstable_dim == model.dim()) {
      // source alone: tuned offset that keeps the orbit inside W for 2*dwell_n steps
      double thresh = first.w_radius / std::sqrt(static_cast<double>(model.dim()));
      double delta = thresh * std::pow(growth, -(2.0 * dwell_n + 3.0));
      Vec v;
      v.m = model.dim();
      for (int j = 0; j < model.dim(); ++j) v[j] = delta;
      x = translate(x, v);
    } else {
      Vec v;
      v.m = model.dim();
      v[0] = 0.4 * first.w_radius;
      x = translate(x, v);
    }
    xi.points.push_back(x);
    for (int k = 0; k < 2 * dwell_n; ++k) {
      x = model.forward(x);
      xi.points.push_back(x);
    }
    xi.k_max = static_cast<long>(xi.points.size()) - 1;
    return xi;
  }

  const BasicSet& second = basic[static_cast<size_t>(sets[1])];
  if (first.unstable_dim == model.dim()) {
    // source start: offset along the first leg, tuned to dwell
    Vec dir = leg_direction(model, first, second);
    double n = dir.norm();
    double thresh = first.w_radius / n;  // coordinate value at which the orbit exits W
    double delta = thresh * std::pow(growth, -(dwell_n + 3.0));
    Vec v;
    v.m = model.dim();
    for (int j = 0; j < model.dim(); ++j) v[j] = dir[j] * delta;
    x = translate(x, v);
  } else {
    // saddle start: sit on the stable axis, converging inward
    Vec v;
    v.m = model.dim();
    for (int j = 0; j < model.dim(); ++j) {
      double cj = first.fixed_point[j];
      if (cj == 0.5 || model.dim() == 1) {
        v[j] = 0.4 * first.w_radius;
        break;
      }
    }
    x = translate(x, v);
  }

  xi.points.push_back(x);
  size_t leg = 0;  // current dwell target = sets[leg]
  int dwell_count = 0;
  bool in_dwell = true;
  const int hard_cap = 200000;
  while (static_cast<int>(xi.points.size()) < hard_cap) {
    const BasicSet& cur = basic[static_cast<size_t>(sets[leg])];
    bool inside = torus_dist(x, cur.fixed_point) <= cur.w_radius;
    if (in_dwell) {
      if (!inside) {
        // a source dwell ends by itself
        in_dwell = false;
        ++leg;
      } else if (dwell_count >= dwell_n && leg + 1 < sets.size() &&
                 cur.unstable_dim > 0 && cur.unstable_dim < model.dim()) {
        // saddle dwell over: inject a +-0.9 d jump along the unstable coordinate
        const BasicSet& nxt = basic[static_cast<size_t>(sets[leg + 1])];
        Vec dir = leg_direction(model, cur, nxt);
        Pt y = model.forward(x);
        Vec kick;
        kick.m = model.dim();
        for (int j = 0; j < model.dim(); ++j) {
          bool unstable_coord = cur.fixed_point[j] == 0.0;
          kick[j] = unstable_coord ? dir[j] * 0.9 * d : 0.0;
        }
        x = translate(y, kick);
        xi.points.push_back(x);
        in_dwell = false;
        ++leg;
        continue;
      } else if (dwell_count >= 2 * dwell_n && leg + 1 == sets.size()) {
        break;  // final dwell done
      } else {
        ++dwell_count;
      }
    } else {
      const BasicSet& target = basic[static_cast<size_t>(sets[leg])];
      if (torus_dist(x, target.fixed_point) <= target.w_radius * 0.999) {
        in_dwell = true;
        dwell_count = 0;
        continue;
      }
    }
    x = model.forward(x);
    xi.points.push_back(x);
  }
  if (static_cast<int>(xi.points.size()) >= hard_cap)
    throw NoConnection("craft_chain: transit did not close");
  xi.k_max = static_cast<long>(xi.points.size()) - 1;
  return xi;
}

Pseudotrajectory craft_transition(const Model& model, int from_set, int to_set,
                                  int dwell_n, double d) {
  if (from_set == to_set) return craft_chain(model, {from_set}, dwell_n, d);
  return craft_chain(model, {from_set, to_set}, dwell_n, d);
}

ShadowCheck verify_shadowing(const Model& model, const Pseudotrajectory& xi, const Pt& z,
                             double eps) {
  ShadowCheck out;
  Pt y = z;
  y.m = model.dim();
  out.max_deviation = torus_dist(y, xi.at(0));
  Pt fwd = y;
  for (long k = 1; k <= xi.k_max; ++k) {
    fwd = model.forward(fwd);
    out.max_deviation = std::max(out.max_deviation, torus_dist(fwd, xi.at(k)));
  }
  Pt bwd = y;
  for (long k = -1; k >= xi.k_min; --k) {
    bwd = model.inverse(bwd);
    out.max_deviation = std::max(out.max_deviation, torus_dist(bwd, xi.at(k)));
  }
  out.ok = out.max_deviation < eps;
  return out;
}

std::optional<Pt> brute_force_shadow(const Model& model, const Pseudotrajectory& xi,
                                     double eps, int grid_n) {
  if (model.dim() > 2) throw CostGuard("brute_force_shadow: m must be <= 2");
  if (xi.k_max - xi.k_min > 20) throw CostGuard("brute_force_shadow: range must be <= 20");
  if (grid_n < 2) throw InvalidInput("grid_n too small");

  double best = 1e300;
  Pt best_pt;
  best_pt.m = model.dim();
  long ny = model.dim() == 2 ? grid_n : 1;
  for (long i = 0; i < grid_n; ++i) {
    for (long j = 0; j < ny; ++j) {
      Pt z;
      z.m = model.dim();
      z[0] = (i + 0.5) / grid_n;
      if (model.dim() == 2) z[1] = (j + 0.5) / grid_n;
      // branch and bound on the running max
      double val = torus_dist(z, xi.at(0));
      Pt y = z;
      for (long k = 1; k <= xi.k_max && val < best; ++k) {
        y = model.forward(y);
        val = std::max(val, torus_dist(y, xi.at(k)));
      }
      y = z;
      for (long k = -1; k >= xi.k_min && val < best; --k) {
        y = model.inverse(y);
        val = std::max(val, torus_dist(y, xi.at(k)));
      }
      if (val < best) {
        best = val;
        best_pt = z;
      }
    }
  }
  if (best < eps) return best_pt;
  return std::nullopt;
}

Pt linear_shadow_oracle(const Model& model, const Pseudotrajectory& xi) {
  if (model.id() != ModelId::cat_map)
    throw ModelMismatch("linear_shadow_oracle is cat-map only");
  if (xi.k_min > 0 || xi.k_max < 0) throw InvalidInput("index range must contain 0");
  const double sqrt5 = std::sqrt(5.0);
  const double lam_u = (3.0 + sqrt5) / 2.0;
  const double lam_s = (3.0 - sqrt5) / 2.0;
  const double phi = (1.0 + sqrt5) / 2.0;
  double n = std::sqrt(phi * phi + 1.0);
  Vec eu(phi / n, 1.0 / n), es(1.0 / n, -phi / n);

  // unstable correction: bounded backward sum over future errors
  double a0 = 0.0;
  for (long j = xi.k_max - 1; j >= 0; --j) {
    Vec e = lift_delta(model.forward(xi.at(j)), xi.at(j + 1));
    a0 = (a0 + e.dot(eu)) / lam_u;
  }
  // stable correction: forward recursion over past errors
  double b0 = 0.0;
  for (long j = xi.k_min; j < 0; ++j) {
    Vec e = lift_delta(model.forward(xi.at(j)), xi.at(j + 1));
    b0 = lam_s * b0 - e.dot(es);
  }
  Vec corr(a0 * eu[0] + b0 * es[0], a0 * eu[1] + b0 * es[1]);
  return translate(xi.at(0), corr);
}

double linear_oracle_deviation(const Model& model, const Pseudotrajectory& xi) {
  if (model.id() != ModelId::cat_map)
    throw ModelMismatch("linear_oracle_deviation is cat-map only");
  const double sqrt5 = std::sqrt(5.0);
  const double lam_u = (3.0 + sqrt5) / 2.0;
  const double lam_s = (3.0 - sqrt5) / 2.0;
  const double phi = (1.0 + sqrt5) / 2.0;
  double n = std::sqrt(phi * phi + 1.0);
  Vec eu(phi / n, 1.0 / n), es(1.0 / n, -phi / n);

  long count = xi.k_max - xi.k_min + 1;
  std::vector<double> eps_u(static_cast<size_t>(count - 1)), eps_s(static_cast<size_t>(count - 1));
  for (long j = xi.k_min; j < xi.k_max; ++j) {
    Vec e = lift_delta(model.forward(xi.at(j)), xi.at(j + 1));
    eps_u[static_cast<size_t>(j - xi.k_min)] = e.dot(eu);
    eps_s[static_cast<size_t>(j - xi.k_min)] = e.dot(es);
  }
  // unstable deviation a_k: tail sums, computed backward (no amplification);
  // stable deviation b_k: forward recursion, contracting so roundoff damps
  std::vector<double> a(static_cast<size_t>(count), 0.0);
  for (long k = xi.k_max - 1; k >= xi.k_min; --k) {
    size_t i = static_cast<size_t>(k - xi.k_min);
    a[i] = (a[i + 1] + eps_u[i]) / lam_u;
  }
  double worst = 0.0, b = 0.0;
  for (long k = xi.k_min; k <= xi.k_max; ++k) {
    size_t i = static_cast<size_t>(k - xi.k_min);
    worst = std::max(worst, std::hypot(a[i], b));
    if (k < xi.k_max) b = lam_s * b - eps_s[i];
  }
  return worst;
}

void save_csv(const Pseudotrajectory& xi, const std::string& path) {
  json header = {{"model", xi.model_name}, {"d", xi.d},      {"k_min", xi.k_min},
                 {"k_max", xi.k_max},      {"seed", xi.seed}};
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << "# " << header.dump() << "\n";
  int m = xi.points.empty() ? 2 : xi.points.front().m;
  out << "k,x_1";
  if (m == 2) out << ",x_2";
  out << "\n";
  char buf[96];
  for (long k = xi.k_min; k <= xi.k_max; ++k) {
    const Pt& p = xi.at(k);
    if (m == 2)
      std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g\n", k, p[0], p[1]);
    else
      std::snprintf(buf, sizeof buf, "%ld,%.17g\n", k, p[0]);
    out << buf;
  }
}

Pseudotrajectory load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  std::string line;
  if (!std::getline(in, line) || line.size() < 2 || line[0] != '#')
    throw ConfigError("missing JSON header line in " + path);
  json header = json::parse(line.substr(1));
  Pseudotrajectory xi;
  xi.model_name = header.at("model").get<std::string>();
  xi.d = header.at("d").get<double>();
  xi.k_min = header.at("k_min").get<long>();
  xi.k_max = header.at("k_max").get<long>();
  xi.seed = header.value("seed", 0ULL);
  std::getline(in, line);  // column header
  int m = line.find("x_2") != std::string::npos ? 2 : 1;
  xi.points.assign(static_cast<size_t>(xi.k_max - xi.k_min + 1), Pt());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tok;
    std::getline(ss, tok, ',');
    long k = std::stol(tok);
    Pt p;
    p.m = m;
    std::getline(ss, tok, ',');
    p[0] = std::stod(tok);
    if (m == 2) {
      std::getline(ss, tok, ',');
      p[1] = std::stod(tok);
    }
    xi.at(k) = p;
  }
  return xi;
}

}  // namespace shadowlab
