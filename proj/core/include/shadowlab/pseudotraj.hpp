#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shadowlab/models.hpp"

namespace shadowlab {

/// Indexed point sequence with noise bound d: dist(f(x_k), x_{k+1}) < d.
struct Pseudotrajectory {
  long k_min = 0;
  long k_max = 0;
  std::vector<Pt> points;  // points[k - k_min]
  double d = 0.0;
  std::string model_name;
  uint64_t seed = 0;

  const Pt& at(long k) const { return points[static_cast<size_t>(k - k_min)]; }
  Pt& at(long k) { return points[static_cast<size_t>(k - k_min)]; }
  long length() const { return k_max - k_min + 1; }
};

struct ValidationReport {
  bool ok = false;
  double max_jump = 0.0;
};

ValidationReport validate(const Model& model, const Pseudotrajectory& xi);

/// Noisy orbit: x_{k+1} = f(x_k) + noise with |noise| < d (torus ball,
/// radius 0.99 d); bidirectional via the inverse map for k < 0, re-validated
/// forward. Deterministic per seed.
Pseudotrajectory generate(const Model& model, const Pt& x0, long k_min, long k_max,
                          double d, uint64_t seed);

/// Pseudotrajectory that dwells >= dwell_n steps in W_from, transits along a
/// connecting orbit with jumps < d, and dwells >= dwell_n in W_to.
Pseudotrajectory craft_transition(const Model& model, int from_set, int to_set,
                                  int dwell_n, double d);

/// Chained crafting through several basic sets in visit order.
Pseudotrajectory craft_chain(const Model& model, const std::vector<int>& sets,
                             int dwell_n, double d);

struct ShadowCheck {
  bool ok = false;
  double max_deviation = 0.0;
};

ShadowCheck verify_shadowing(const Model& model, const Pseudotrajectory& xi, const Pt& z,
                             double eps);

/// Grid search over [0,1)^m minimizing max_k dist(x_k, f^k(z)).
/// Guarded: m <= 2 and index range <= 20.
std::optional<Pt> brute_force_shadow(const Model& model, const Pseudotrajectory& xi,
                                     double eps, int grid_n);

/// Classical linear shadowing formula for the cat map: the unique bounded
/// solution of the linearized shadowing equations in the eigenbasis.
Pt linear_shadow_oracle(const Model& model, const Pseudotrajectory& xi);

/// Exact max_k dist(x_k, f^k(z*)) for the oracle's ideal point z*, evaluated
/// by stable tail recursions. Naive forward iteration of a double-precision z
/// amplifies roundoff by lambda_u per step and becomes meaningless after
/// ~35 cat-map steps; this path has no such error accumulation.
double linear_oracle_deviation(const Model& model, const Pseudotrajectory& xi);

/// CSV serialization: a '#'-prefixed JSON header line, then k,x_1[,x_2] rows.
void save_csv(const Pseudotrajectory& xi, const std::string& path);
Pseudotrajectory load_csv(const std::string& path);

}  // namespace shadowlab
