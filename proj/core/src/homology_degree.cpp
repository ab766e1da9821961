#include "shadowlab/homology_degree.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace shadowlab {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kBoundaryTol = 1e-9;

double inf_norm(const P3& v, int dim) {
  double s = 0;
  for (int i = 0; i < dim; ++i) s = std::max(s, std::abs(v[static_cast<size_t>(i)]));
  return s;
}
}  // namespace

long BallGrid::node_count() const {
  long n = 1;
  for (int a = 0; a < dim; ++a) n *= res[static_cast<size_t>(a)];
  return n;
}

std::array<int, 3> BallGrid::unflatten(long idx) const {
  std::array<int, 3> mi{0, 0, 0};
  for (int a = 0; a < dim; ++a) {
    mi[static_cast<size_t>(a)] = static_cast<int>(idx % res[static_cast<size_t>(a)]);
    idx /= res[static_cast<size_t>(a)];
  }
  return mi;
}

long BallGrid::flatten(const std::array<int, 3>& mi) const {
  long idx = 0;
  for (int a = dim - 1; a >= 0; --a) idx = idx * res[static_cast<size_t>(a)] + mi[static_cast<size_t>(a)];
  return idx;
}

double BallGrid::coord(int axis, int step) const {
  int n = res[static_cast<size_t>(axis)];
  if (n == 1) return 0.0;
  return -1.0 + 2.0 * step / (n - 1);
}

bool BallGrid::on_boundary(long idx) const {
  auto mi = unflatten(idx);
  for (int a = 0; a < dim; ++a) {
    if (mi[static_cast<size_t>(a)] == 0 || mi[static_cast<size_t>(a)] == res[static_cast<size_t>(a)] - 1) return true;
  }
  return false;
}

BallGrid make_grid(int dim, int res) {
  BallGrid g;
  g.dim = dim;
  g.res = {res, res, res};
  return g;
}

P3 SampledMap::eval(const P3& x) const {
  // clamp to the cube, then multilinear interpolation
  std::array<int, 3> i0{0, 0, 0};
  std::array<double, 3> frac{0, 0, 0};
  for (int a = 0; a < domain.dim; ++a) {
    int n = domain.res[static_cast<size_t>(a)];
    double t = (std::clamp(x[static_cast<size_t>(a)], -1.0, 1.0) + 1.0) * 0.5 * (n - 1);
    int lo = static_cast<int>(std::floor(t));
    lo = std::clamp(lo, 0, n - 2 >= 0 ? n - 2 : 0);
    i0[static_cast<size_t>(a)] = lo;
    frac[static_cast<size_t>(a)] = t - lo;
  }
  P3 out{0, 0, 0};
  int corners = 1 << domain.dim;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    std::array<int, 3> mi = i0;
    for (int a = 0; a < domain.dim; ++a) {
      if (c & (1 << a)) {
        mi[static_cast<size_t>(a)] += 1;
        w *= frac[static_cast<size_t>(a)];
      } else {
        w *= 1.0 - frac[static_cast<size_t>(a)];
      }
    }
    const P3& v = values[static_cast<size_t>(domain.flatten(mi))];
    for (int j = 0; j < 3; ++j) out[static_cast<size_t>(j)] += w * v[static_cast<size_t>(j)];
  }
  return out;
}

int winding_number(const LoopSample& loop, const P2& origin) {
  if (loop.points.size() < 3) throw InvalidInput("winding_number: need at least 3 points");
  double total = 0.0;
  size_t n = loop.points.size();
  // drop an explicit closing point if present
  bool closed = std::abs(loop.points.front()[0] - loop.points.back()[0]) < 1e-15 &&
                std::abs(loop.points.front()[1] - loop.points.back()[1]) < 1e-15;
  size_t count = closed ? n - 1 : n;
  for (size_t k = 0; k < count; ++k) {
    const P2& p = loop.points[k];
    const P2& q = loop.points[(k + 1) % count];
    double ax = p[0] - origin[0], ay = p[1] - origin[1];
    double bx = q[0] - origin[0], by = q[1] - origin[1];
    double ra = std::hypot(ax, ay), rb = std::hypot(bx, by);
    if (ra <= 1e-12 || rb <= 1e-12) throw OriginOnLoop("vertex at the origin");
    double cross = ax * by - ay * bx;
    double dot = ax * bx + ay * by;
    double ang = std::atan2(cross, dot);
    if (std::abs(ang) >= kPi * (1.0 - 1e-9)) throw OriginOnLoop("segment through the origin");
    total += ang;
  }
  double turns = total / (2.0 * kPi);
  long r = std::lround(turns);
  if (std::abs(turns - r) > 0.25) throw OriginOnLoop("angle sum far from an integer");
  return static_cast<int>(r);
}

int sphere_degree(const SphereMesh& mesh, const std::vector<P3>& image, const P3& origin) {
  if (image.size() != mesh.vertices.size())
    throw InvalidInput("sphere_degree: image size mismatch");
  double total = 0.0;
  for (const auto& tri : mesh.triangles) {
    P3 a, b, c;
    for (int j = 0; j < 3; ++j) {
      a[static_cast<size_t>(j)] = image[static_cast<size_t>(tri[0])][static_cast<size_t>(j)] - origin[static_cast<size_t>(j)];
      b[static_cast<size_t>(j)] = image[static_cast<size_t>(tri[1])][static_cast<size_t>(j)] - origin[static_cast<size_t>(j)];
      c[static_cast<size_t>(j)] = image[static_cast<size_t>(tri[2])][static_cast<size_t>(j)] - origin[static_cast<size_t>(j)];
    }
    double la = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
    double lb = std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
    double lc = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
    if (la <= 1e-12 || lb <= 1e-12 || lc <= 1e-12)
      throw DegenerateTriangle("image vertex at the origin");
    double det = a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
                 a[2] * (b[0] * c[1] - b[1] * c[0]);
    double den = la * lb * lc + (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]) * lc +
                 (b[0] * c[0] + b[1] * c[1] + b[2] * c[2]) * la +
                 (c[0] * a[0] + c[1] * a[1] + c[2] * a[2]) * lb;
    if (std::abs(det) < 1e-14 && den < 1e-14)
      throw DegenerateTriangle("origin in an image triangle plane");
    total += 2.0 * std::atan2(det, den);
  }
  double deg = total / (4.0 * kPi);
  long r = std::lround(deg);
  if (std::abs(deg - r) > 0.3) throw DegenerateTriangle("solid angle sum far from an integer");
  return static_cast<int>(r);
}

void validate_sphere_mesh(const SphereMesh& mesh) {
  std::map<std::pair<int, int>, int> directed;
  for (const auto& tri : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      int a = tri[static_cast<size_t>(e)], b = tri[static_cast<size_t>((e + 1) % 3)];
      if (a == b) throw InvalidInput("degenerate triangle edge");
      directed[{a, b}] += 1;
    }
  }
  long undirected = 0;
  for (const auto& [edge, count] : directed) {
    if (count != 1) throw InvalidInput("directed edge used twice: orientation inconsistent");
    auto rev = directed.find({edge.second, edge.first});
    if (rev == directed.end()) throw InvalidInput("open edge: mesh not closed");
    ++undirected;
  }
  undirected /= 2;
  long v = static_cast<long>(mesh.vertices.size());
  long f = static_cast<long>(mesh.triangles.size());
  long chi = v - undirected + f;
  if (chi != 2) throw InvalidInput("Euler characteristic " + std::to_string(chi) + " != 2");
}

LoopSample boundary_loop(const SampledMap& h) {
  if (h.domain.dim != 2) throw InvalidInput("boundary_loop needs a 2-d domain");
  int nx = h.domain.res[0], ny = h.domain.res[1];
  LoopSample loop;
  auto push = [&](int i, int j) {
    const P3& v = h.at({i, j, 0});
    loop.points.push_back({v[0], v[1]});
  };
  for (int i = 0; i < nx; ++i) push(i, 0);
  for (int j = 1; j < ny; ++j) push(nx - 1, j);
  for (int i = nx - 2; i >= 0; --i) push(i, ny - 1);
  for (int j = ny - 2; j >= 1; --j) push(0, j);
  return loop;
}

void boundary_mesh(const SampledMap& h, SphereMesh* mesh, std::vector<P3>* image) {
  if (h.domain.dim != 3) throw InvalidInput("boundary_mesh needs a 3-d domain");
  mesh->vertices.clear();
  mesh->triangles.clear();
  image->clear();
  std::map<long, int> vertex_of_node;
  auto vertex = [&](const std::array<int, 3>& mi) {
    long flat = h.domain.flatten(mi);
    auto it = vertex_of_node.find(flat);
    if (it != vertex_of_node.end()) return it->second;
    int id = static_cast<int>(mesh->vertices.size());
    vertex_of_node[flat] = id;
    P3 p{h.domain.coord(0, mi[0]), h.domain.coord(1, mi[1]), h.domain.coord(2, mi[2])};
    mesh->vertices.push_back(p);
    image->push_back(h.values[static_cast<size_t>(flat)]);
    return id;
  };
  // cyclic (a, b, c) puts e_b x e_c = +e_a; swap b and c on the low face
  for (int axis = 0; axis < 3; ++axis) {
    int b = (axis + 1) % 3, c = (axis + 2) % 3;
    for (int side = 0; side < 2; ++side) {
      int fixed = side == 1 ? h.domain.res[static_cast<size_t>(axis)] - 1 : 0;
      int bb = side == 1 ? b : c;
      int cc = side == 1 ? c : b;
      int nb = h.domain.res[static_cast<size_t>(bb)], nc = h.domain.res[static_cast<size_t>(cc)];
      for (int i = 0; i + 1 < nb; ++i) {
        for (int j = 0; j + 1 < nc; ++j) {
          auto node = [&](int di, int dj) {
            std::array<int, 3> mi{0, 0, 0};
            mi[static_cast<size_t>(axis)] = fixed;
            mi[static_cast<size_t>(bb)] = i + di;
            mi[static_cast<size_t>(cc)] = j + dj;
            return vertex(mi);
          };
          int v00 = node(0, 0), v10 = node(1, 0), v11 = node(1, 1), v01 = node(0, 1);
          mesh->triangles.push_back({v00, v10, v11});
          mesh->triangles.push_back({v00, v11, v01});
        }
      }
    }
  }
}

BoundaryClass boundary_class(const SampledMap& h) {
  BoundaryClass out;
  if (h.d != h.domain.dim || h.d != h.codomain.dim)
    throw InvalidInput("boundary_class: dimension fields disagree");
  if (h.d < 1 || h.d > 3) throw InvalidInput("boundary_class: d must be in {1,2,3}");
  long n = h.domain.node_count();
  if (static_cast<long>(h.values.size()) != n) throw InvalidInput("values size mismatch");

  for (long idx = 0; idx < n; ++idx) {
    if (!h.domain.on_boundary(idx)) continue;
    if (inf_norm(h.values[static_cast<size_t>(idx)], h.d) < 1.0 - kBoundaryTol) return out;  // escape
  }
  out.boundary_ok = true;

  switch (h.d) {
    case 1: {
      double v0 = h.values.front()[0];
      double v1 = h.values.back()[0];
      int s0 = v0 > 0 ? 1 : -1;
      int s1 = v1 > 0 ? 1 : -1;
      out.degree = (s1 - s0) / 2;  // ±1 when endpoints separate, else 0
      break;
    }
    case 2: {
      LoopSample loop = boundary_loop(h);
      try {
        out.degree = winding_number(loop, {0.0, 0.0});
      } catch (const OriginOnLoop&) {
        out.degree = 0;
        out.boundary_ok = false;
      }
      break;
    }
    case 3: {
      SphereMesh mesh;
      std::vector<P3> image;
      boundary_mesh(h, &mesh, &image);
      try {
        out.degree = sphere_degree(mesh, image, {0.0, 0.0, 0.0});
      } catch (const DegenerateTriangle&) {
        out.degree = 0;
        out.boundary_ok = false;
      }
      break;
    }
  }
  return out;
}

bool is_d_nontrivial(const SampledMap& h) {
  if (h.d == 0) return true;  // vacuous case
  BoundaryClass bc = boundary_class(h);
  return bc.boundary_ok && bc.degree != 0;
}

bool is_d_nontrivial_strict(const SampledMap& h) {
  if (h.d == 0) return true;
  BoundaryClass bc = boundary_class(h);
  if (!bc.boundary_ok) throw BoundaryEscape("h(boundary) leaves the codomain boundary");
  return bc.degree != 0;
}

SampledMap compose(const SampledMap& h, const SampledMap& g) {
  if (h.codomain.dim != g.domain.dim)
    throw DomainMismatch("compose: h codomain dim " + std::to_string(h.codomain.dim) +
                         " vs g domain dim " + std::to_string(g.domain.dim));
  SampledMap out;
  out.domain = h.domain;
  out.codomain = g.codomain;
  out.d = h.d;
  out.values.resize(h.values.size());
  for (size_t i = 0; i < h.values.size(); ++i) {
    P3 v = g.eval(h.values[i]);
    // when h already lands on the boundary, keep the composition there: the
    // interpolated value can dip inside by the interpolation error, and the
    // max-norm retraction restores g's boundary-to-boundary behaviour
    if (inf_norm(h.values[i], g.domain.dim) >= 1.0 - kBoundaryTol) {
      double n = inf_norm(v, g.codomain.dim);
      if (n >= 0.5) {
        for (int a = 0; a < g.codomain.dim; ++a) v[static_cast<size_t>(a)] /= n;
      }
    }
    out.values[i] = v;
  }
  return out;
}

SampledMap product(const SampledMap& h, const SampledMap& g) {
  int d = h.domain.dim, e = g.domain.dim;
  if (d + e > 3) throw DimensionTooHigh("product dimension " + std::to_string(d + e));
  SampledMap out;
  out.d = d + e;
  out.domain.dim = d + e;
  out.codomain.dim = d + e;
  for (int a = 0; a < d; ++a) {
    out.domain.res[static_cast<size_t>(a)] = h.domain.res[static_cast<size_t>(a)];
    out.codomain.res[static_cast<size_t>(a)] = h.codomain.res[static_cast<size_t>(a)];
  }
  for (int a = 0; a < e; ++a) {
    out.domain.res[static_cast<size_t>(d + a)] = g.domain.res[static_cast<size_t>(a)];
    out.codomain.res[static_cast<size_t>(d + a)] = g.codomain.res[static_cast<size_t>(a)];
  }
  long n = out.domain.node_count();
  out.values.resize(static_cast<size_t>(n));
  for (long idx = 0; idx < n; ++idx) {
    auto mi = out.domain.unflatten(idx);
    std::array<int, 3> mh{0, 0, 0}, mg{0, 0, 0};
    for (int a = 0; a < d; ++a) mh[static_cast<size_t>(a)] = mi[static_cast<size_t>(a)];
    for (int a = 0; a < e; ++a) mg[static_cast<size_t>(a)] = mi[static_cast<size_t>(d + a)];
    const P3& vh = h.values[static_cast<size_t>(h.domain.flatten(mh))];
    const P3& vg = g.values[static_cast<size_t>(g.domain.flatten(mg))];
    P3 v{0, 0, 0};
    for (int a = 0; a < d; ++a) v[static_cast<size_t>(a)] = vh[static_cast<size_t>(a)];
    for (int a = 0; a < e; ++a) v[static_cast<size_t>(d + a)] = vg[static_cast<size_t>(a)];
    out.values[static_cast<size_t>(idx)] = v;
  }
  return out;
}

bool surjectivity_check(const SampledMap& h, double epsilon) {
  if (!is_d_nontrivial(h)) throw InvalidInput("surjectivity_check requires a d-nontrivial map");
  int d = h.codomain.dim;
  int per_axis = std::max(2, static_cast<int>(std::ceil(2.0 / epsilon)) + 1);
  double eps2 = epsilon * epsilon;

  // bucket image samples on a grid of cell size epsilon
  int cells = per_axis;
  auto cell_of = [&](const P3& p) {
    std::array<int, 3> c{0, 0, 0};
    for (int a = 0; a < d; ++a) {
      c[static_cast<size_t>(a)] = std::clamp(
          static_cast<int>((p[static_cast<size_t>(a)] + 1.0) / 2.0 * (cells - 1) + 0.5), 0, cells - 1);
    }
    return (c[0] * cells + c[1]) * cells + c[2];
  };
  std::multimap<long, size_t> buckets;
  for (size_t i = 0; i < h.values.size(); ++i) buckets.insert({cell_of(h.values[i]), i});

  std::array<int, 3> mi{0, 0, 0};
  long total = 1;
  for (int a = 0; a < d; ++a) total *= per_axis;
  for (long idx = 0; idx < total; ++idx) {
    long q = idx;
    P3 net{0, 0, 0};
    for (int a = 0; a < d; ++a) {
      mi[static_cast<size_t>(a)] = static_cast<int>(q % per_axis);
      q /= per_axis;
      net[static_cast<size_t>(a)] = -1.0 + 2.0 * mi[static_cast<size_t>(a)] / (per_axis - 1);
    }
    bool hit = false;
    std::array<int, 3> c{0, 0, 0};
    for (int a = 0; a < d; ++a)
      c[static_cast<size_t>(a)] = std::clamp(
          static_cast<int>((net[static_cast<size_t>(a)] + 1.0) / 2.0 * (cells - 1) + 0.5), 0, cells - 1);
    for (int dx = -1; dx <= 1 && !hit; ++dx)
      for (int dy = -1; dy <= 1 && !hit; ++dy)
        for (int dz = -1; dz <= 1 && !hit; ++dz) {
          std::array<int, 3> cc{c[0] + dx, c[1] + dy, c[2] + dz};
          bool valid = true;
          for (int a = 0; a < d; ++a)
            if (cc[static_cast<size_t>(a)] < 0 || cc[static_cast<size_t>(a)] >= cells) valid = false;
          for (int a = d; a < 3; ++a)
            if (cc[static_cast<size_t>(a)] != 0) valid = false;
          if (!valid) continue;
          long key = (cc[0] * cells + cc[1]) * cells + cc[2];
          auto range = buckets.equal_range(key);
          for (auto it = range.first; it != range.second; ++it) {
            const P3& v = h.values[it->second];
            double s = 0;
            for (int a = 0; a < d; ++a) {
              double t = v[static_cast<size_t>(a)] - net[static_cast<size_t>(a)];
              s += t * t;
            }
            if (s <= eps2) {
              hit = true;
              break;
            }
          }
        }
    if (!hit) return false;
  }
  return true;
}

SphereMesh uv_sphere(int n_lat, int n_lon) {
  if (n_lat < 2 || n_lon < 3) throw InvalidInput("uv_sphere: need n_lat >= 2, n_lon >= 3");
  SphereMesh mesh;
  mesh.vertices.push_back({0, 0, 1});  // north pole
  for (int i = 1; i < n_lat; ++i) {
    double phi = kPi * i / n_lat;
    for (int j = 0; j < n_lon; ++j) {
      double theta = 2.0 * kPi * j / n_lon;
      mesh.vertices.push_back(
          {std::cos(theta) * std::sin(phi), std::sin(theta) * std::sin(phi), std::cos(phi)});
    }
  }
  mesh.vertices.push_back({0, 0, -1});  // south pole
  int south = static_cast<int>(mesh.vertices.size()) - 1;
  auto ring = [&](int i, int j) { return 1 + (i - 1) * n_lon + (j % n_lon); };
  for (int j = 0; j < n_lon; ++j) mesh.triangles.push_back({0, ring(1, j), ring(1, j + 1)});
  for (int i = 1; i + 1 < n_lat; ++i) {
    for (int j = 0; j < n_lon; ++j) {
      int a = ring(i, j), b = ring(i, j + 1), c = ring(i + 1, j), d = ring(i + 1, j + 1);
      mesh.triangles.push_back({a, c, d});
      mesh.triangles.push_back({a, d, b});
    }
  }
  for (int j = 0; j < n_lon; ++j)
    mesh.triangles.push_back({south, ring(n_lat - 1, j + 1), ring(n_lat - 1, j)});
  return mesh;
}

SphereMesh subdivide(const SphereMesh& mesh) {
  SphereMesh out;
  out.vertices = mesh.vertices;
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    auto key = std::minmax(a, b);
    auto it = midpoint.find({key.first, key.second});
    if (it != midpoint.end()) return it->second;
    P3 p;
    for (int j = 0; j < 3; ++j)
      p[static_cast<size_t>(j)] = 0.5 * (out.vertices[static_cast<size_t>(a)][static_cast<size_t>(j)] +
                                         out.vertices[static_cast<size_t>(b)][static_cast<size_t>(j)]);
    int id = static_cast<int>(out.vertices.size());
    out.vertices.push_back(p);
    midpoint[{key.first, key.second}] = id;
    return id;
  };
  for (const auto& t : mesh.triangles) {
    int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
    out.triangles.push_back({t[0], ab, ca});
    out.triangles.push_back({t[1], bc, ab});
    out.triangles.push_back({t[2], ca, bc});
    out.triangles.push_back({ab, bc, ca});
  }
  return out;
}

}  // namespace shadowlab
