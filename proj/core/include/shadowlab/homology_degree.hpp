#pragma once

#include <array>
#include <vector>

#include "shadowlab/errors.hpp"

namespace shadowlab {

using P2 = std::array<double, 2>;
using P3 = std::array<double, 3>;

/// Tensor grid over [-1,1]^dim sampling a d-ball realized as the max-norm
/// unit cube; a node is on the boundary iff some index is extremal.
struct BallGrid {
  int dim = 1;
  std::array<int, 3> res{2, 2, 2};  // per-axis sample counts

  long node_count() const;
  std::array<int, 3> unflatten(long idx) const;
  long flatten(const std::array<int, 3>& mi) const;
  double coord(int axis, int step) const;  // -1 + 2 step/(res-1)
  bool on_boundary(long idx) const;
};

BallGrid make_grid(int dim, int res);

/// Discretized continuous map between balls; `values` holds codomain
/// coordinates per domain node (codomain.dim entries used).
struct SampledMap {
  BallGrid domain;
  BallGrid codomain;
  int d = 1;  // == domain.dim
  std::vector<P3> values;

  const P3& at(const std::array<int, 3>& mi) const { return values[static_cast<size_t>(domain.flatten(mi))]; }
  /// Multilinear interpolation at a point of the domain cube.
  P3 eval(const P3& x) const;
};

/// Closed polyline in the plane; implicitly closed (last joins to first).
struct LoopSample {
  std::vector<P2> points;
};

/// Closed oriented triangulated surface.
struct SphereMesh {
  std::vector<P3> vertices;
  std::vector<std::array<int, 3>> triangles;
};

/// Signed number of turns of the polyline around the origin point.
/// Exact for polylines avoiding the origin; throws OriginOnLoop otherwise.
int winding_number(const LoopSample& loop, const P2& origin);

/// Degree of the vertex-mapped mesh about `origin`: signed solid angles of the
/// image triangles summed and divided by 4 pi.
int sphere_degree(const SphereMesh& mesh, const std::vector<P3>& image, const P3& origin);

/// Validates the SphereMesh invariants (closed, consistently oriented,
/// Euler characteristic 2); throws InvalidInput with a reason otherwise.
void validate_sphere_mesh(const SphereMesh& mesh);

struct BoundaryClass {
  bool boundary_ok = false;  // h(∂D1) ⊂ ∂D2 within 1e-9
  int degree = 0;            // meaningful only when boundary_ok
};

/// Boundary behaviour and degree class of h; never throws on escape.
BoundaryClass boundary_class(const SampledMap& h);

/// True iff h maps boundary to boundary and the induced boundary map is
/// homologically nontrivial (sign separation / winding / sphere degree).
/// Boundary escape counts as false; use the strict variant to surface it.
bool is_d_nontrivial(const SampledMap& h);
bool is_d_nontrivial_strict(const SampledMap& h);  // throws BoundaryEscape

/// g after h (h: D1 -> D2, g: D2 -> D3), sampled on h's domain grid.
SampledMap compose(const SampledMap& h, const SampledMap& g);

/// h x g on the product grid; throws DimensionTooHigh when d+e > 3.
SampledMap product(const SampledMap& h, const SampledMap& g);

/// Desk-scale surjectivity: every point of an eps-net of the codomain cube is
/// within eps of some image sample. Requires is_d_nontrivial(h).
bool surjectivity_check(const SampledMap& h, double epsilon);

/// Boundary nodes of a 2-d map's domain walked counterclockwise, mapped.
LoopSample boundary_loop(const SampledMap& h);

/// Boundary of a 3-d map's domain cube as an outward-oriented mesh, mapped.
void boundary_mesh(const SampledMap& h, SphereMesh* mesh, std::vector<P3>* image);

// mesh builders (tests and fixtures)
SphereMesh uv_sphere(int n_lat, int n_lon);
SphereMesh subdivide(const SphereMesh& mesh);  // midpoint 1 -> 4 split

}  // namespace shadowlab
