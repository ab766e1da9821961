#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shadowlab/homology_degree.hpp"
#include "shadowlab/hyperbolic_local.hpp"
#include "shadowlab/pseudotraj.hpp"
#include "shadowlab/segmentation.hpp"

namespace shadowlab {

/// One parameter axis of a certified disk running along an unstable chart
/// coordinate. offset(t) = center + halfwidth t for t in [-1,1];
/// seed-frame coordinate = seed_p * offset + seed_q (exact affine bookkeeping
/// for nesting and extraction).
struct UAxis {
  int chart_index = 0;
  double center = 0;
  double halfwidth = 0;
  double seed_p = 1;
  double seed_q = 0;
};

/// A trivial-factor axis: the disk's extent along a stable chart coordinate
/// picked up when a transition drops an unstable dimension.
/// s-offset(t) = center + halfwidth t; eta(t) = t; the seed-frame interval is
/// frozen at the transition that created the axis.
struct EtaAxis {
  int chart_index = 0;
  double center = 0;
  double halfwidth = 0;
  double seed_lo = 0;
  double seed_hi = 0;
};

/// Sampled certified disk (D, h x eta) in D(alpha, W^u(x, beta) x D^k):
/// (P1) h x eta is m0-nontrivial with m0 = u + k, and
/// (P2) h(y) = [x, y] within tolerance on the interior region V^u.
/// The grid covers the closure of V^u; u axes first, then eta axes.
struct CertifiedDisk {
  int set = 0;
  Pt base;
  double alpha = 0;
  double beta = 0;
  int u = 0;
  int k = 0;
  int m0() const { return u + k; }

  BallGrid grid;
  std::vector<Pt> points;
  std::vector<Vec> h;             // bracket u-offsets rel base, clamped to beta
  std::vector<Vec> eta;           // D^k coordinates
  std::vector<uint8_t> interior;  // V^u mask

  std::vector<UAxis> u_axes;
  std::vector<EtaAxis> eta_axes;
  Vec sigma;  // s-offsets of the disk along stable coordinates not in any axis

  /// V^u in seed-disk coordinates, per original seed axis (nesting witness).
  std::vector<double> seed_lo, seed_hi;
};

struct CertReport {
  bool p1 = false;
  int degree = 0;
  bool p2 = false;
  double max_p2_residual = 0;  // bracket residual over interior nodes
  double max_s_offset = 0;     // stable offsets, must stay <= alpha
  long interior_nodes = 0;
  bool ok() const { return p1 && p2; }
};

/// Independent re-check of (P1) via homology degree and (P2) via bracket
/// residuals at every interior node.
CertReport certify(const CertifiedDisk& cd, const Model& model, double tol_p2);

/// Parameter cascade for one run.
struct ShadowParams {
  double alpha0 = 0, beta0 = 0, beta_prime = 0;
  double Delta = 0, Delta0 = 0;
  long N0 = 0, N1 = 0;
  double d3 = 0;
  double mu = 0, lambda = 0;
  double L = 0;
  double tol_p2 = 1e-9;
  double eps = 0;
  int res_1d = 129;  // grid nodes per axis for 1-d disks
  int res_2d = 65;
};

/// Fails with Infeasible naming the violated inequality.
void validate_params(const ShadowParams& p);

/// Smallest N1 with lambda^n alpha0 + Delta0/(1-lambda) < Delta and
/// beta' mu^{-n} > beta0.
long minimal_n1(double lambda, double mu, double alpha0, double beta0, double beta_prime,
                double Delta, double Delta0);

ShadowParams choose_parameters(const Model& model, double eps, double L);

/// Seed of the pipeline: the unstable disk W^u(y, 2 beta0) certified against
/// the base x0 with alpha = Delta, beta = beta0, k = 0.
CertifiedDisk seed_disk(const Model& model, const Pt& y, const Pt& x0,
                        const ShadowParams& params);

/// f(D) with alpha' = lambda alpha, beta' = beta/lambda (semi-invariant
/// pushforward with the boundary retraction).
CertifiedDisk push_forward(const CertifiedDisk& cd, const Model& model);

/// Radial max-norm retraction onto the smaller unstable disk.
CertifiedDisk shrink_beta(const CertifiedDisk& cd, const Model& model, double beta_new);

/// Base change to a nearby point: alpha' = alpha + Delta, radius beta_prime.
CertifiedDisk rebase(const CertifiedDisk& cd, const Model& model, const Pt& y,
                     double beta_prime, double Delta);

/// One dwell step: push_forward, rebase to y_next and shrink composed so that
/// alpha' = lambda alpha + Delta0 and beta' = min(beta/mu, beta0), regridded
/// onto the new active box.
CertifiedDisk step(const CertifiedDisk& cd, const Model& model, const Pt& y_next,
                   const ShadowParams& params);

/// Grid analog of the slack repair: blends h toward the exact bracket values
/// with the cutoff weight, yielding exact (P2) at radius beta - eps.
CertifiedDisk repair_P2(const CertifiedDisk& cd, const Model& model, double eps);

/// Composition input for transfer: a ball fibered over cd0's parameter domain.
struct TransferInput {
  BallGrid grid;                // dimension u + k + ell
  std::vector<Pt> points;       // embedded D1
  std::vector<P3> h1_params;    // node -> cd0 parameter cube
  std::vector<Vec> eta1;        // node -> D^ell
  int ell = 0;
};

/// Lemma-style base-disk change: composes cd0's maps with (h1, eta1) and
/// repairs the slack, yielding alpha + eps, beta - eps, trivial factor
/// k + ell.
CertifiedDisk transfer(const CertifiedDisk& cd0, const Model& model,
                       const TransferInput& input, double eps);

/// Transit across a segmentation gap: transports the disk with f^ell,
/// re-anchors it at x_{t} via the homological transversality witness at the
/// connection, and rebuilds the certificate with alpha = alpha0,
/// beta = beta_prime and trivial factor k' = k + u_old - u_new.
CertifiedDisk transition(const CertifiedDisk& cd, const Model& model,
                         const Pseudotrajectory& xi, long tau_index, long t_index,
                         const ShadowParams& params);

struct LedgerRow {
  long index = 0;
  double alpha = 0, beta = 0;
  Pt base;
  double region_diameter = 0;  // interior-region diameter at this step
  double alpha_geom = 0;       // geometric-sum ledger lambda^n a0 + D0 (1-l^n)/(1-l)
  double alpha_paper_display = 0;  // the displayed coefficient D0 (1-l)/(1-l^n)
};

struct ShadowResult {
  Pt z;
  bool verified = false;
  double max_deviation = 0;
  std::vector<LedgerRow> ledger;

  std::string to_json() const;
  std::string ledger_csv() const;
};

struct RunOptions {
  std::optional<double> L;           // gap bound; model default when unset
  std::optional<ShadowParams> params;
  bool record_ledger = true;
};

/// The full pipeline: classify, choose parameters, seed from the backward
/// tail, walk the segmentation with step/transition, extract the shadowing
/// point from the nested regions, and measure its per-index deviation.
ShadowResult run_shadowing(const Model& model, const Pseudotrajectory& xi, double eps,
                           const RunOptions& opts = {});

/// Model-default gap bound used when classifying before a run.
double default_gap_bound(const Model& model);

}  // namespace shadowlab
