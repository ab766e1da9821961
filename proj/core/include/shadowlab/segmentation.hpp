#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shadowlab/models.hpp"
#include "shadowlab/pseudotraj.hpp"

namespace shadowlab {

/// Witness that a pseudotrajectory decomposes into dwell segments inside
/// basic-set neighborhoods W_i separated by short transits:
///   0 = tau(1) < t(2) <= tau(2) < ... < t(sbar), gaps t(i+1)-tau(i) in (0, L],
///   interior dwells tau(i)-t(i) >= N, segment points inside W_{labels[i]},
///   tails inside the first/last W.
struct Segmentation {
  long l = 0;
  std::vector<int> labels;   // visited basic sets, size sbar
  std::vector<long> taus;    // tau(1..sbar-1), relative to l
  std::vector<long> ts;      // t(2..sbar), relative to l
  double L = 0.0;
  long N = 1;
  int s0 = 1;
  double d = 0.0;

  int sbar() const { return static_cast<int>(labels.size()); }
};

std::string segmentation_to_json(const Segmentation& seg);
Segmentation segmentation_from_json(const std::string& text);

/// Independent validator: nullopt when all Segmentation invariants hold for
/// xi, otherwise the first violated condition. Used as the test oracle.
std::optional<std::string> check_segmentation(const Model& model, const Pseudotrajectory& xi,
                                              const Segmentation& seg);

/// Greedy witness that xi ∈ PT(L, N, s0, d): maximal membership runs, fewest
/// dwells, earliest starts. Returns nullopt when no witness exists.
std::optional<Segmentation> classify(const Pseudotrajectory& xi, const Model& model,
                                     double L, long N, int s0);

/// Drops interior dwells of length <= N and widens the gap bound to
/// L' = (s0-1) L + (s0-2) N, yielding a witness for (L', 1, s0-1, d).
/// Identity when every interior dwell exceeds N.
Segmentation induction_refine(const Segmentation& seg, long N);

/// 2x the longest observed excursion of sampled d-pseudotrajectories outside
/// the union of the W_i.
double birkhoff_constant(const Model& model, double d, int trials, int horizon,
                         uint64_t rng_seed);

struct ConnectionDigraph {
  int nodes = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<std::vector<Pt>> witnesses;  // sample orbit per edge
};

/// Edge (i, j) iff a sampled unstable-disk point near Lambda_i converges into
/// W_j forward and into W_i backward.
ConnectionDigraph connection_digraph(const Model& model, int samples, uint64_t rng_seed);

/// Directed cycle if one exists (DFS), else nullopt.
std::optional<std::vector<int>> has_cycle(const ConnectionDigraph& g);

}  // namespace shadowlab
