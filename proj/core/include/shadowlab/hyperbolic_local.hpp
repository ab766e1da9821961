#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "shadowlab/models.hpp"

namespace shadowlab {

enum class Sigma { stable, unstable };

/// Adapted-coordinate offset split into unstable and stable blocks.
struct SplitVec {
  Vec u{0.0, 0.0};
  Vec s{0.0, 0.0};

  SplitVec() { u.m = s.m = 0; }

  double unorm() const { return u.inf_norm(); }
  double snorm() const { return s.inf_norm(); }
  /// Adapted norm max(|v_u|, |v_s|).
  double norm() const { return std::max(unorm(), snorm()); }
};

/// Adapted chart around a base point inside one extended neighborhood U_i.
///
/// The chart linearizes the model exactly: offsets transform by constant
/// per-coordinate multipliers under the map. Concretely,
///   cat map          eigenbasis coordinates of the minimal lift,
///   north-south      Koenigs coordinate of the circle fixed point,
///   gradient torus   tan(pi (x - c))/pi per coordinate (exact flow linearizer).
///
/// to() / from() convert between torus points and adapted offsets relative to
/// the base; map_offset() is the exact action of f on offsets.
class Chart {
 public:
  Chart(const Model& model, int set, const Pt& base);

  int set() const { return set_; }
  const Pt& base() const { return base_; }
  int udim() const { return udim_; }
  int sdim() const { return sdim_; }

  /// Adapted offset of y from the base; throws OutsideExtendedNeighborhood
  /// when y leaves the chart's safe region.
  SplitVec to(const Pt& y) const;
  Pt from(const SplitVec& v) const;

  /// Offset of f(y) from f(base), given the offset of y from base. Exact.
  SplitVec map_offset(const SplitVec& v) const;
  SplitVec unmap_offset(const SplitVec& v) const;

  /// Per-coordinate multipliers: expanding (>1) for u, contracting (<1) for s.
  const Vec& mult_u() const { return mult_u_; }
  const Vec& mult_s() const { return mult_s_; }

  /// Rebuild this chart at a new base point in the same U_i.
  Chart rebased(const Pt& new_base) const;

 private:
  const Model* model_;
  int set_;
  Pt base_;
  int udim_, sdim_;
  Vec mult_u_, mult_s_;

  // per-coordinate block assignment for product models: role_[j] true => unstable
  std::array<bool, 2> coord_unstable_{false, false};
  // chart values of the base point (product models)
  std::array<double, 2> base_chart_{0.0, 0.0};

  double coord_to_chart(int j, double xj) const;
  double coord_from_chart(int j, double v) const;
};

struct HyperbolicConstants {
  double C0 = 1.0;        // metric equivalence constant
  double lambda = 0.5;    // uniform contraction rate
  double alpha_bar = 0.1; // largest safe disk radius
  double mu = 0.75;       // fixed rate in (lambda, 1)
  double claim3_C = 0.0;  // empirical only, not load-bearing
};

/// Sampled extended invariant disk W^sigma(x, radius).
struct LocalDisk {
  Pt base;
  Sigma sigma = Sigma::stable;
  double radius = 0.0;
  int dim = 0;
  int res = 0;                // samples per axis (grid over [-radius, radius]^dim)
  std::vector<Pt> samples;    // row-major; single point when dim == 0
};

/// Adapted distance d^sigma_x(y, z); y and z are expected on W^sigma(x).
double d_sigma(const Model& model, const Pt& x, const Pt& y, const Pt& z, Sigma sigma);

LocalDisk local_disk(const Model& model, const Pt& x, Sigma sigma, double radius,
                     int resolution = 129,
                     std::optional<double> alpha_bar = std::nullopt);

/// Unique intersection point of W^u(x, beta) and W^s(y, alpha).
/// Throws NoBracket when the disks at those radii miss each other.
Pt bracket(const Model& model, const Pt& x, const Pt& y, double alpha, double beta);

bool in_B_neighborhood(const Model& model, const Pt& x, double alpha, double beta,
                       const Pt& y);

/// Conservative closed-form alpha_bar used before any sampling has run.
double analytic_alpha_bar(const Model& model);

/// Empirical constants: C0 from metric-equivalence sampling, lambda
/// cross-checked against sampled disk contraction, alpha_bar by bisection on
/// the B(x, a, a) inclusion. Throws SamplingFailure on any violation of the
/// closed-form rates or of the metric equivalence.
HyperbolicConstants estimate_constants(const Model& model, int samples, uint64_t rng_seed);

}  // namespace shadowlab
