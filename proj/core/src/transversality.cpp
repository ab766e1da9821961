#include "shadowlab/transversality.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <json.hpp>

#include "shadowlab/rng.hpp"

namespace shadowlab {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kSlabTol = 1e-9;

double norm3(const P3& v, int m) {
  double s = 0;
  for (int i = 0; i < m; ++i) s += v[static_cast<size_t>(i)] * v[static_cast<size_t>(i)];
  return std::sqrt(s);
}
}  // namespace

P3 AffineChart::apply(const P3& x) const {
  P3 out{0, 0, 0};
  for (int r = 0; r < m; ++r) {
    double s = 0;
    for (int c = 0; c < m; ++c)
      s += rows[static_cast<size_t>(r)][static_cast<size_t>(c)] *
           (x[static_cast<size_t>(c)] - p[static_cast<size_t>(c)]);
    out[static_cast<size_t>(r)] = s;
  }
  return out;
}

double AffineChart::op_norm() const {
  double worst = 0;
  for (int r = 0; r < m; ++r) worst = std::max(worst, norm3(rows[static_cast<size_t>(r)], m));
  return worst * std::sqrt(static_cast<double>(m));
}

P3 SampledDisk::eval(const P3& param) const {
  SampledMap view;
  view.domain = grid;
  view.codomain = grid;
  view.d = grid.dim;
  view.values = points;
  return view.eval(param);
}

double SampledDisk::max_image_spacing() const {
  double worst = 0;
  long n = grid.node_count();
  for (long idx = 0; idx < n; ++idx) {
    auto mi = grid.unflatten(idx);
    for (int a = 0; a < grid.dim; ++a) {
      if (mi[static_cast<size_t>(a)] + 1 >= grid.res[static_cast<size_t>(a)]) continue;
      auto mj = mi;
      mj[static_cast<size_t>(a)] += 1;
      const P3& u = points[static_cast<size_t>(idx)];
      const P3& v = points[static_cast<size_t>(grid.flatten(mj))];
      P3 diff{u[0] - v[0], u[1] - v[1], u[2] - v[2]};
      worst = std::max(worst, norm3(diff, m));
    }
  }
  return worst;
}

SampledDisk sample_disk(int kappa, int m, int res, const std::function<P3(const P3&)>& f) {
  SampledDisk disk;
  disk.grid = make_grid(kappa, res);
  disk.m = m;
  long n = disk.grid.node_count();
  disk.points.reserve(static_cast<size_t>(n));
  for (long idx = 0; idx < n; ++idx) {
    auto mi = disk.grid.unflatten(idx);
    P3 param{0, 0, 0};
    for (int a = 0; a < kappa; ++a)
      param[static_cast<size_t>(a)] = disk.grid.coord(a, mi[static_cast<size_t>(a)]);
    disk.points.push_back(f(param));
  }
  return disk;
}

void validate_query(const TransversalityQuery& q) {
  if (q.iota < 0 || q.iota > q.chart.m) throw InvalidInput("bad iota");
  if (q.kappa != q.h2.grid.dim) throw InvalidInput("kappa mismatch with h2 grid");
  P3 img = q.chart.apply(q.p);
  if (norm3(img, q.chart.m) > 1e-9) throw InvalidInput("chart does not send p to 0");
  for (const P3& pt : q.h1.points) {
    P3 v = q.chart.apply(pt);
    for (int c = q.iota; c < q.chart.m; ++c)
      if (std::abs(v[static_cast<size_t>(c)]) > 1e-9)
        throw InvalidInput("chart does not flatten h1");
  }
  P3 back = q.h2.eval(q.p_param);
  P3 diff{back[0] - q.p[0], back[1] - q.p[1], back[2] - q.p[2]};
  if (norm3(diff, q.chart.m) > 1e-6) throw InvalidInput("p_param does not locate p on h2");
}

namespace {

// last (m - iota) chart coordinates of the h2 image at a parameter point
P3 slab_coords(const TransversalityQuery& q, const P3& param, int codim) {
  P3 img = q.chart.apply(q.h2.eval(param));
  P3 out{0, 0, 0};
  for (int c = 0; c < codim; ++c)
    out[static_cast<size_t>(c)] = img[static_cast<size_t>(q.iota + c)];
  return out;
}

struct SliceProbe {
  bool cleared = false;
  double clearance = 0;
  double radius = 0;
  int degree = 0;
};

SliceProbe probe_slice(const TransversalityQuery& q, const std::array<int, 3>& axes,
                       int codim, double ball_radius) {
  SliceProbe out;
  double r = ball_radius;
  for (int halving = 0; halving < 20; ++halving, r *= 0.5) {
    // boundary samples of the codim-ball in the chosen parameter axes
    std::vector<P3> params;
    SphereMesh mesh;
    if (codim == 1) {
      for (double sgn : {-1.0, 1.0}) {
        P3 prm = q.p_param;
        prm[static_cast<size_t>(axes[0])] += sgn * r;
        params.push_back(prm);
      }
    } else if (codim == 2) {
      int n = 256;
      for (int k = 0; k < n; ++k) {
        double th = 2.0 * kPi * k / n;
        P3 prm = q.p_param;
        prm[static_cast<size_t>(axes[0])] += r * std::cos(th);
        prm[static_cast<size_t>(axes[1])] += r * std::sin(th);
        params.push_back(prm);
      }
    } else {
      mesh = uv_sphere(16, 32);
      for (const P3& v : mesh.vertices) {
        P3 prm = q.p_param;
        for (int a = 0; a < 3; ++a)
          prm[static_cast<size_t>(axes[static_cast<size_t>(a)])] +=
              r * v[static_cast<size_t>(a)];
        params.push_back(prm);
      }
    }
    // the ball must stay inside the parameter cube
    bool in_cube = true;
    for (const P3& prm : params)
      for (int a = 0; a < q.kappa; ++a)
        if (std::abs(prm[static_cast<size_t>(a)]) > 1.0) in_cube = false;
    if (!in_cube) continue;

    std::vector<P3> images;
    images.reserve(params.size());
    double clearance = 1e300;
    for (const P3& prm : params) {
      P3 sc = slab_coords(q, prm, codim);
      clearance = std::min(clearance, norm3(sc, codim));
      images.push_back(sc);
    }
    if (clearance <= kSlabTol) continue;  // slab hit: shrink and retry

    out.cleared = true;
    out.clearance = clearance;
    out.radius = r;
    if (codim == 1) {
      int s0 = images[0][0] > 0 ? 1 : -1;
      int s1 = images[1][0] > 0 ? 1 : -1;
      out.degree = (s1 - s0) / 2;
    } else if (codim == 2) {
      LoopSample loop;
      for (const P3& v : images) loop.points.push_back({v[0], v[1]});
      loop.points.push_back(loop.points.front());
      out.degree = winding_number(loop, {0, 0});
    } else {
      out.degree = sphere_degree(mesh, images, {0, 0, 0});
    }
    return out;
  }
  return out;  // never cleared
}

}  // namespace

TVerdict t_condition_check(const TransversalityQuery& q, double ball_radius) {
  validate_query(q);
  int m = q.chart.m;
  int codim = m - q.iota;
  TVerdict verdict;
  verdict.chart_norm = q.chart.op_norm();
  if (q.iota == m) {
    verdict.kind = TKind::iota_full;
    return verdict;
  }
  if (codim > 3) throw UnsupportedCodimension("m - iota = " + std::to_string(codim));
  if (q.kappa < codim) {
    // no (m-iota)-ball fits inside h2 (so iota + kappa >= m fails and the
    // condition cannot hold)
    verdict.kind = TKind::trivial;
    return verdict;
  }

  // enumerate parameter-axis slices; a nonzero class on any of them witnesses
  // the condition
  std::vector<std::array<int, 3>> subsets;
  if (codim == 1) {
    for (int a = 0; a < q.kappa; ++a) subsets.push_back({a, 0, 0});
  } else if (codim == 2) {
    for (int a = 0; a < q.kappa; ++a)
      for (int b = a + 1; b < q.kappa; ++b) subsets.push_back({a, b, 0});
  } else {
    subsets.push_back({0, 1, 2});
  }

  bool any_cleared = false;
  SliceProbe best_trivial;
  for (const auto& axes : subsets) {
    SliceProbe probe = probe_slice(q, axes, codim, ball_radius);
    if (!probe.cleared) continue;
    any_cleared = true;
    if (probe.degree != 0) {
      verdict.kind = TKind::nontrivial;
      verdict.degree = probe.degree;
      verdict.slab_clearance = probe.clearance;
      verdict.ball_radius = probe.radius;
      return verdict;
    }
    if (probe.clearance > best_trivial.clearance) best_trivial = probe;
  }
  if (!any_cleared) throw SlabHit("boundary image touches the slab at every tried radius");
  verdict.kind = TKind::trivial;
  verdict.slab_clearance = best_trivial.clearance;
  verdict.ball_radius = best_trivial.radius;
  return verdict;
}

std::optional<Separation> case1_separation(const ScalarField& field) {
  int dim = field.grid.dim;
  long n = field.grid.node_count();
  if (static_cast<long>(field.values.size()) != n) throw InvalidInput("field size mismatch");
  // the zero at the disk center is the precondition
  std::array<int, 3> center{0, 0, 0};
  for (int a = 0; a < dim; ++a)
    center[static_cast<size_t>(a)] = field.grid.res[static_cast<size_t>(a)] / 2;
  if (std::abs(field.values[static_cast<size_t>(field.grid.flatten(center))]) > 1e-12)
    throw InvalidInput("field is not zero at the center");

  auto param_of = [&](long idx) {
    auto mi = field.grid.unflatten(idx);
    P3 prm{0, 0, 0};
    for (int a = 0; a < dim; ++a)
      prm[static_cast<size_t>(a)] = field.grid.coord(a, mi[static_cast<size_t>(a)]);
    return prm;
  };

  long best_pos = -1, best_neg = -1;
  for (long idx = 0; idx < n; ++idx) {
    double v = field.values[static_cast<size_t>(idx)];
    if (v > 0 && (best_pos < 0 || v > field.values[static_cast<size_t>(best_pos)])) best_pos = idx;
    if (v < 0 && (best_neg < 0 || v < field.values[static_cast<size_t>(best_neg)])) best_neg = idx;
  }
  if (best_pos < 0 || best_neg < 0) return std::nullopt;

  auto on_common_ray = [&](const P3& a, const P3& b) {
    double na = norm3(a, dim), nb = norm3(b, dim);
    if (na < 1e-12 || nb < 1e-12) return true;
    double dot = 0;
    for (int c = 0; c < dim; ++c) dot += a[static_cast<size_t>(c)] * b[static_cast<size_t>(c)];
    return dot > (1.0 - 1e-9) * na * nb;
  };

  Separation sep;
  sep.v1 = param_of(best_pos);
  sep.v2 = param_of(best_neg);
  if (on_common_ray(sep.v1, sep.v2)) {
    // fallback: swap in any strictly-signed sample off the ray
    for (long idx = 0; idx < n; ++idx) {
      double v = field.values[static_cast<size_t>(idx)];
      if (v == 0) continue;
      P3 prm = param_of(idx);
      if (on_common_ray(prm, sep.v2)) continue;
      if (v > 0) {
        sep.v1 = prm;
        break;
      }
      sep.v2 = prm;
      if (!on_common_ray(sep.v1, sep.v2)) break;
    }
  }
  return sep;
}

int Case2Boundary::degree_at(double t) const {
  auto gt_value = [&](size_t i) {
    double x1 = s0_points[i][0];
    double gtilde = (g_cap2 - g_cap1) / (s2 - s1) * (x1 - s1) + g_cap1;
    return (1.0 - t) * g_values[i] + t * gtilde;
  };
  if (m == 2) {
    // S0 = two points; class in reduced H_0 of the complement of the axis
    int sa = gt_value(0) > 0 ? 1 : -1;
    int sb = gt_value(1) > 0 ? 1 : -1;
    return (sb - sa) / 2;
  }
  // m = 3: winding of (x_2, g) around the axis
  LoopSample loop;
  for (size_t i = 0; i < s0_points.size(); ++i)
    loop.points.push_back({s0_points[i][1], gt_value(i)});
  loop.points.push_back(loop.points.front());
  return winding_number(loop, {0, 0});
}

Case2Boundary case2_sphere_build(const std::function<double(const P3&)>& g, double s1,
                                 double s2, double eps, int m, int res) {
  if (m != 2 && m != 3) throw InvalidInput("case2 supports m in {2, 3}");
  if (!(s1 < 0 && 0 < s2)) throw InvalidInput("need s1 < 0 < s2");
  Case2Boundary out;
  out.m = m;
  out.s1 = s1;
  out.s2 = s2;
  out.eps = eps;
  out.g_cap1 = g(P3{s1, 0, 0});
  out.g_cap2 = g(P3{s2, 0, 0});
  if (!(out.g_cap1 > 0)) throw SignViolation("g(s1, 0) must be positive");
  if (!(out.g_cap2 < 0)) throw SignViolation("g(s2, 0) must be negative");

  if (m == 2) {
    out.s0_points = {P3{s1, 0, 0}, P3{s2, 0, 0}};
    out.g_values = {out.g_cap1, out.g_cap2};
    return out;
  }
  // rectangle boundary S1 ∪ C3 ∪ S2 ∪ C3' in the (x1, x2) plane, walked once
  auto push = [&](double x1, double x2) {
    P3 pt{x1, x2, 0};
    out.s0_points.push_back(pt);
    double val = g(pt);
    bool on_cap1 = std::abs(x1 - s1) < 1e-12;
    bool on_cap2 = std::abs(x1 - s2) < 1e-12;
    if (on_cap1 && !(val > 0)) throw SignViolation("g changes sign on the s1 cap");
    if (on_cap2 && !(val < 0)) throw SignViolation("g changes sign on the s2 cap");
    out.g_values.push_back(val);
  };
  int n = std::max(8, res);
  for (int k = 0; k < n; ++k) push(s1 + (s2 - s1) * k / n, -eps);
  for (int k = 0; k < n; ++k) push(s2, -eps + 2 * eps * k / n);
  for (int k = 0; k < n; ++k) push(s2 - (s2 - s1) * k / n, eps);
  for (int k = 0; k < n; ++k) push(s1, eps - 2 * eps * k / n);
  return out;
}

std::string ProbeReport::to_json() const {
  nlohmann::json j;
  j["verdict"] = refuted ? "refuted" : "survived";
  j["trials"] = trials_run;
  if (refuted) {
    j["witness"] = {{"trial", witness_trial},
                    {"min_distance", witness_distance},
                    {"margin", margin}};
  }
  return j.dump();
}

namespace {

// sum of <= 5 radial bumps on the parameter cube with image-space directions,
// rescaled so its sup over the grid is exactly delta
struct BumpField {
  struct Bump {
    P3 center{0, 0, 0};
    double radius = 1;
    P3 dir{0, 0, 0};
  };
  std::vector<Bump> bumps;
  double scale = 1;
  int m = 2;

  P3 eval(const P3& param, int dim) const {
    P3 out{0, 0, 0};
    for (const auto& b : bumps) {
      double r2 = 0;
      for (int a = 0; a < dim; ++a) {
        double t = param[static_cast<size_t>(a)] - b.center[static_cast<size_t>(a)];
        r2 += t * t;
      }
      double q = 1.0 - r2 / (b.radius * b.radius);
      if (q <= 0) continue;
      double w = q * q;
      for (int c = 0; c < m; ++c)
        out[static_cast<size_t>(c)] += w * b.dir[static_cast<size_t>(c)];
    }
    for (int c = 0; c < m; ++c) out[static_cast<size_t>(c)] *= scale;
    return out;
  }
};

BumpField random_bumps(Rng& rng, const SampledDisk& disk, double delta) {
  BumpField field;
  field.m = disk.m;
  int count = 1 + static_cast<int>(rng.below(5));
  for (int b = 0; b < count; ++b) {
    BumpField::Bump bump;
    for (int a = 0; a < disk.grid.dim; ++a)
      bump.center[static_cast<size_t>(a)] = rng.uniform(-1.0, 1.0);
    bump.radius = rng.uniform(0.3, 1.2);
    Vec dir = rng.unit_vector(disk.m);
    for (int c = 0; c < disk.m; ++c) bump.dir[static_cast<size_t>(c)] = dir[c];
    field.bumps.push_back(bump);
  }
  // normalize the sup over the grid to exactly delta
  double sup = 0;
  long n = disk.grid.node_count();
  for (long idx = 0; idx < n; ++idx) {
    auto mi = disk.grid.unflatten(idx);
    P3 prm{0, 0, 0};
    for (int a = 0; a < disk.grid.dim; ++a)
      prm[static_cast<size_t>(a)] = disk.grid.coord(a, mi[static_cast<size_t>(a)]);
    P3 v = field.eval(prm, disk.grid.dim);
    sup = std::max(sup, norm3(v, disk.m));
  }
  field.scale = sup > 1e-12 ? delta / sup : 0.0;
  return field;
}

double min_pair_distance(const std::vector<P3>& a, const std::vector<P3>& b, int m,
                         double early_exit_below) {
  // bucket b on a grid of cell size early_exit_below (or a fallback size)
  double cell = early_exit_below > 0 ? early_exit_below : 0.05;
  auto key = [&](const P3& p) {
    long kx = static_cast<long>(std::floor(p[0] / cell));
    long ky = static_cast<long>(std::floor(p[1] / cell));
    long kz = m > 2 ? static_cast<long>(std::floor(p[2] / cell)) : 0;
    return (kx * 73856093L) ^ (ky * 19349663L) ^ (kz * 83492791L);
  };
  std::multimap<long, size_t> buckets;
  for (size_t i = 0; i < b.size(); ++i) buckets.insert({key(b[i]), i});

  double best = 1e300;
  for (const P3& pa : a) {
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = (m > 2 ? -1 : 0); dz <= (m > 2 ? 1 : 0); ++dz) {
          P3 shifted{pa[0] + dx * cell, pa[1] + dy * cell, pa[2] + dz * cell};
          auto range = buckets.equal_range(key(shifted));
          for (auto it = range.first; it != range.second; ++it) {
            const P3& pb = b[it->second];
            P3 diff{pa[0] - pb[0], pa[1] - pb[1], pa[2] - pb[2]};
            best = std::min(best, norm3(diff, m));
          }
        }
    if (best < early_exit_below) return best;
  }
  if (best < 1e300) return best;
  // buckets found no neighbours at all: exact scan
  for (const P3& pa : a)
    for (const P3& pb : b) {
      P3 diff{pa[0] - pb[0], pa[1] - pb[1], pa[2] - pb[2]};
      best = std::min(best, norm3(diff, m));
    }
  return best;
}

std::vector<P3> perturbed_points(const SampledDisk& disk, const BumpField& field) {
  std::vector<P3> out;
  out.reserve(disk.points.size());
  long n = disk.grid.node_count();
  for (long idx = 0; idx < n; ++idx) {
    auto mi = disk.grid.unflatten(idx);
    P3 prm{0, 0, 0};
    for (int a = 0; a < disk.grid.dim; ++a)
      prm[static_cast<size_t>(a)] = disk.grid.coord(a, mi[static_cast<size_t>(a)]);
    P3 tau = field.eval(prm, disk.grid.dim);
    P3 p = disk.points[static_cast<size_t>(idx)];
    for (int c = 0; c < disk.m; ++c) p[static_cast<size_t>(c)] += tau[static_cast<size_t>(c)];
    out.push_back(p);
  }
  return out;
}

}  // namespace

ProbeReport delta_essential_probe(const SampledDisk& h1, const SampledDisk& h2, double delta,
                                  int trials, uint64_t rng_seed) {
  if (h1.m != h2.m) throw InvalidInput("ambient dimensions differ");
  double margin = 2.0 * std::max(h1.max_image_spacing(), h2.max_image_spacing());
  // precondition: the unperturbed images intersect at grid resolution
  double base = min_pair_distance(h1.points, h2.points, h1.m, margin);
  if (base > margin) throw InvalidInput("images do not intersect; nothing to probe");

  ProbeReport report;
  report.margin = margin;
  Rng rng(rng_seed);
  for (int t = 0; t < trials; ++t) {
    BumpField f1 = random_bumps(rng, h1, delta);
    BumpField f2 = random_bumps(rng, h2, delta);
    std::vector<P3> p1 = perturbed_points(h1, f1);
    std::vector<P3> p2 = perturbed_points(h2, f2);
    double dist = min_pair_distance(p1, p2, h1.m, margin);
    report.trials_run = t + 1;
    if (dist > margin) {
      report.refuted = true;
      report.witness_trial = static_cast<uint64_t>(t);
      report.witness_distance = dist;
      return report;
    }
  }
  return report;
}

TransversalityQuery saddle_connection_query(const Model& gt, int saddle_set, int source_set,
                                            int res) {
  if (gt.id() != ModelId::gradient_torus) throw ModelMismatch("gradient torus fixture");
  const auto& sets = gt.basic_sets();
  const BasicSet& saddle = sets[static_cast<size_t>(saddle_set)];
  const BasicSet& source = sets[static_cast<size_t>(source_set)];
  if (saddle.stable_dim != 1 || source.unstable_dim != 2)
    throw InvalidInput("expected a saddle and the source");

  // the connecting orbit runs along the saddle's stable coordinate line; put
  // the intersection point a quarter of the way from the source
  int stable_coord = saddle.fixed_point[0] == 0.5 ? 0 : 1;
  Pt p_torus = source.fixed_point;
  p_torus[stable_coord] = 0.25;

  double span = 0.2;  // half-width of the local picture
  TransversalityQuery q;
  q.iota = 1;
  q.kappa = 2;
  q.p = P3{p_torus[0], p_torus[1], 0};
  q.p_param = P3{0, 0, 0};

  // chart: first coordinate along W^s(saddle) (the connecting axis), second
  // the transverse coordinate; scaled by 1/span
  q.chart.m = 2;
  q.chart.iota = 1;
  q.chart.p = q.p;
  q.chart.rows[0] = P3{0, 0, 0};
  q.chart.rows[1] = P3{0, 0, 0};
  q.chart.rows[0][static_cast<size_t>(stable_coord)] = 1.0 / span;
  q.chart.rows[1][static_cast<size_t>(1 - stable_coord)] = 1.0 / span;

  // h1: the W^s(saddle) slice through p
  q.h1 = sample_disk(1, 2, res, [&](const P3& prm) {
    P3 out = q.p;
    out[static_cast<size_t>(stable_coord)] += span * prm[0];
    return out;
  });
  // h2: a 2-disk of W^u(source) around p (the unstable manifold of the
  // source is an open planar neighborhood)
  q.h2 = sample_disk(2, 2, res, [&](const P3& prm) {
    P3 out = q.p;
    out[static_cast<size_t>(stable_coord)] += span * prm[0];
    out[static_cast<size_t>(1 - stable_coord)] += span * prm[1];
    return out;
  });
  return q;
}

}  // namespace shadowlab
