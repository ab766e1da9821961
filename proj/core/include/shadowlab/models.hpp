#pragma once

#include <memory>
#include <string>
#include <vector>

#include "shadowlab/errors.hpp"
#include "shadowlab/torus.hpp"

namespace shadowlab {

enum class ModelId { cat_map, north_south_circle, gradient_torus };

std::string model_id_name(ModelId id);

/// One basic set of the nonwandering decomposition, with its closed-form
/// hyperbolic data and the nested metric neighborhoods W_i ⊂ U_i.
struct BasicSet {
  int label = 0;
  bool whole_space = false;      // cat map: the single basic set is the torus
  Pt fixed_point;                // representative point (unused when whole_space)
  int stable_dim = 0;
  int unstable_dim = 0;
  double w_radius = 0.08;        // W_i ball radius
  double u_radius = 0.15;        // U_i ball radius
};

struct Splitting {
  std::vector<Vec> stable;    // unit directions
  std::vector<Vec> unstable;
};

struct ExpansionRates {
  double lambda = 0;                       // max(stable multiplier, 1/unstable multiplier)
  std::vector<double> stable_multiplier;   // per basic set (0 if no stable directions)
  std::vector<double> unstable_multiplier; // per basic set (0 if no unstable directions)
};

/// A concrete Axiom A diffeomorphism on the flat torus with analytically known
/// hyperbolic structure.
///
/// Shipped models:
///   cat_map             (x,y) -> (2x+y, x+y) mod 1
///   north_south_circle  x -> x - a sin(2 pi x) mod 1, source at 1/2, sink at 0
///   gradient_torus      time-t map of x_i' = 2 pi sin(2 pi x_i) per coordinate;
///                       source (0,0), saddles (0,1/2), (1/2,0), sink (1/2,1/2)
class Model {
 public:
  static Model cat_map();
  static Model north_south_circle(double a = 0.1);
  static Model gradient_torus(double time = 0.05);

  /// Model selection by string id + JSON parameter object (parsed upstream);
  /// see experiment.cpp for the JSON surface.
  static Model by_name(const std::string& name, double param);

  ModelId id() const { return id_; }
  const std::string& name() const { return name_; }
  int dim() const { return m_; }
  const std::vector<BasicSet>& basic_sets() const { return sets_; }

  /// Model parameter: a for north_south_circle, flow time for gradient_torus.
  double parameter() const { return param_; }

  Pt forward(const Pt& x) const;
  Pt inverse(const Pt& x) const;

  /// n-fold composition (inverse map when n < 0), wrapped to [0,1)^m.
  Pt apply(const Pt& x, long n = 1) const;

  /// Extended splitting directions at x; throws OutsideExtendedNeighborhood
  /// when x lies in no U_i.
  Splitting splitting_at(const Pt& x) const;

  ExpansionRates expansion_rates() const;

  /// Index of the U_i containing x, or -1. Never -1 for the cat map.
  int locate(const Pt& x) const;
  /// Index of the W_i containing x, or -1.
  int locate_w(const Pt& x) const;

  /// Analytically known edges of the connection digraph (i -> j).
  /// segmentation::connection_digraph recovers these numerically.
  std::vector<std::pair<int, int>> connection_edges() const;

  /// Override the default neighborhood radii (applied to every basic set).
  void set_radii(double w_radius, double u_radius);

  /// gradient_torus only: time-t map by fixed-step RK4 instead of the exact
  /// flow solution; used to verify the integrator against the closed form.
  Pt apply_rk4(const Pt& x, int steps_per_unit_call, bool backward = false) const;

  /// gradient_torus only: exact scalar time-t flow map of x' = 2 pi sin(2 pi x).
  static double scalar_flow(double x, double exp4pi2t);

 private:
  Model() = default;

  ModelId id_ = ModelId::cat_map;
  std::string name_;
  int m_ = 2;
  double param_ = 0;
  std::vector<BasicSet> sets_;

  // cached gradient_torus exponentials
  double exp_fwd_ = 0, exp_bwd_ = 0;
};

}  // namespace shadowlab
