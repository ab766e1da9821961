#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "shadowlab/homology_degree.hpp"
#include "shadowlab/models.hpp"

namespace shadowlab {

/// Affine chart phi(x) = A (x - p): sends the intersection point to 0 and
/// flattens the first disk into (-1,1)^iota x {0}^(m-iota).
struct AffineChart {
  int m = 2;
  int iota = 1;
  P3 p{0, 0, 0};
  std::array<P3, 3> rows{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

  P3 apply(const P3& x) const;
  double op_norm() const;  // row-sum estimate, enough for threshold reporting
};

/// Sampled kappa-dimensional disk in R^m: parameter grid over [-1,1]^kappa
/// with an image point per node.
struct SampledDisk {
  BallGrid grid;
  int m = 2;
  std::vector<P3> points;

  P3 eval(const P3& param) const;
  double max_image_spacing() const;  // largest distance between grid neighbours
};

/// Build a disk by sampling a map over the parameter cube.
SampledDisk sample_disk(int kappa, int m, int res, const std::function<P3(const P3&)>& f);

struct TransversalityQuery {
  AffineChart chart;
  SampledDisk h1;        // the flattened iota-dim slice
  SampledDisk h2;        // the kappa-dim disk carrying B_u
  P3 p{0, 0, 0};         // intersection point in R^m
  P3 p_param{0, 0, 0};   // h2 parameters of p
  int iota = 1;
  int kappa = 1;
};

/// Checks the query invariants (chart flattens h1 within 1e-9, p maps to 0);
/// throws InvalidInput otherwise.
void validate_query(const TransversalityQuery& q);

enum class TKind { nontrivial, trivial, iota_full };

struct TVerdict {
  TKind kind = TKind::trivial;
  int degree = 0;
  double slab_clearance = 0.0;  // min distance of the B_u boundary image to the slab
  double ball_radius = 0.0;     // radius that cleared the slab
  double chart_norm = 1.0;

  /// Perturbation sizes below this provably keep the homological witness:
  /// moving both maps by delta shifts the boundary image relative to the slab
  /// by at most 2 delta in chart units.
  double survival_threshold() const {
    return slab_clearance / (2.0 * std::max(chart_norm, 1e-12));
  }
};

/// Homological transversality at the intersection point: builds a small
/// (m-iota)-ball inside h2 around p, maps its boundary through the chart and
/// classifies the complement-of-slab homology class (sign separation,
/// winding, or sphere degree). Nontrivial is witnessed by some parameter
/// slice; trivial means every examined slice cleared the slab with class 0.
TVerdict t_condition_check(const TransversalityQuery& q, double ball_radius);

/// Scalar samples on a grid around v0 = center of the parameter cube.
struct ScalarField {
  BallGrid grid;
  std::vector<double> values;
};

struct Separation {
  P3 v1{0, 0, 0};  // parameter point with positive value
  P3 v2{0, 0, 0};  // parameter point with negative value
};

/// Strictly positive/negative sample pair around a zero of the field,
/// preferring a pair not on a common ray from the origin. nullopt when the
/// field is one-sided (no separation).
std::optional<Separation> case1_separation(const ScalarField& field);

/// Boundary S0 of the box [s1,s2] x B(eps) inside the hyperplane, together
/// with the graph values g on it: a two-point 0-sphere for m = 2, a polyline
/// 1-sphere for m = 3.
struct Case2Boundary {
  int m = 3;
  double s1 = 0, s2 = 0, eps = 0;
  std::vector<P3> s0_points;      // ordered loop (m = 3) or the two caps (m = 2)
  std::vector<double> g_values;   // g at the S0 points
  double g_cap1 = 0, g_cap2 = 0;  // g at (s1, 0, ...) and (s2, 0, ...)

  /// Homology class of x -> (x_1, .., x_{m-1}, (1-t) g + t gtilde) in the
  /// complement of the axis; t = 1 is the linear interpolation model.
  int degree_at(double t) const;
  int degree() const { return degree_at(0.0); }
};

Case2Boundary case2_sphere_build(const std::function<double(const P3&)>& g, double s1,
                                 double s2, double eps, int m, int res = 129);

struct ProbeReport {
  bool refuted = false;
  int trials_run = 0;
  uint64_t witness_trial = 0;   // valid when refuted
  double witness_distance = 0;  // observed separation of the witness pair
  double margin = 0;            // the 2x-grid-spacing separation threshold

  std::string to_json() const;
};

/// Randomized refutation search for delta-essentiality: samples pairs of
/// continuous perturbations (sums of <= 5 radial bumps, C0 norm exactly
/// delta) and reports a witness if some pair separates the images by more
/// than twice the image grid spacing. Survival is evidence, never proof.
ProbeReport delta_essential_probe(const SampledDisk& h1, const SampledDisk& h2, double delta,
                                  int trials, uint64_t rng_seed);

/// Fixture: the W^s(saddle) vs W^u(source) query of the gradient torus at an
/// intersection point on the connecting axis.
TransversalityQuery saddle_connection_query(const Model& gt, int saddle_set, int source_set,
                                            int res = 65);

}  // namespace shadowlab
