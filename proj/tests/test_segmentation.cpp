#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "shadowlab/rng.hpp"
#include "shadowlab/segmentation.hpp"

using namespace shadowlab;

namespace {

// brute-force witness search over all run subsets, used as the classify oracle
// on short trajectories
bool brute_force_classifiable(const Pseudotrajectory& xi, const Model& model, double L,
                              long N, int s0) {
  struct Run {
    long begin, end;
    int label;
  };
  std::vector<Run> runs;
  for (long k = xi.k_min; k <= xi.k_max; ++k) {
    int w = model.locate_w(xi.at(k));
    if (w >= 0 && !runs.empty() && runs.back().label == w && runs.back().end == k - 1)
      runs.back().end = k;
    else if (w >= 0)
      runs.push_back({k, k, w});
  }
  if (runs.empty()) return false;
  if (runs.front().begin != xi.k_min || runs.back().end != xi.k_max) return false;
  size_t n = runs.size();
  if (n > 20) return false;
  for (uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (!(mask & 1u) || !(mask & (1u << (n - 1)))) continue;
    std::vector<size_t> used;
    for (size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) used.push_back(i);
    if (static_cast<int>(used.size()) > s0) continue;
    bool ok = true;
    for (size_t c = 0; c + 1 < used.size(); ++c) {
      double gap = static_cast<double>(runs[used[c + 1]].begin - runs[used[c]].end);
      if (!(gap > 0 && gap <= L)) ok = false;
    }
    for (size_t c = 1; c + 1 < used.size(); ++c)
      if (runs[used[c]].end - runs[used[c]].begin < N) ok = false;
    if (ok) return true;
  }
  return false;
}

Segmentation random_segmentation(Rng& rng, int s0_cap) {
  Segmentation seg;
  seg.s0 = 3 + static_cast<int>(rng.below(static_cast<uint64_t>(s0_cap - 2)));
  int sbar = 2 + static_cast<int>(rng.below(static_cast<uint64_t>(seg.s0 - 1)));
  seg.L = 2.0 + static_cast<double>(rng.below(8));
  seg.N = 1;
  seg.d = 1e-3;
  seg.l = static_cast<long>(rng.below(5));
  long cursor = 0;
  for (int i = 1; i <= sbar; ++i) {
    seg.labels.push_back(static_cast<int>(rng.below(4)));
    if (i == 1) {
      seg.taus.push_back(0);
      cursor = 0;
      continue;
    }
    long gap = 1 + static_cast<long>(rng.below(static_cast<uint64_t>(seg.L)));
    long t_i = cursor + gap;
    seg.ts.push_back(t_i);
    if (i < sbar) {
      long dwell = 1 + static_cast<long>(rng.below(9));
      seg.taus.push_back(t_i + dwell);
      cursor = t_i + dwell;
    }
  }
  return seg;
}

// structural validity only (no trajectory): ordering, gaps, dwell, sizes
bool structurally_valid(const Segmentation& seg) {
  int sbar = seg.sbar();
  if (sbar < 1 || sbar > seg.s0) return false;
  if (static_cast<int>(seg.taus.size()) != sbar - 1) return false;
  if (static_cast<int>(seg.ts.size()) != sbar - 1) return false;
  if (sbar == 1) return true;
  if (seg.taus[0] != 0) return false;
  long prev_tau = 0;
  for (int i = 2; i <= sbar; ++i) {
    long t_i = seg.ts[static_cast<size_t>(i - 2)];
    if (!(prev_tau < t_i)) return false;
    if (!(t_i - prev_tau <= seg.L)) return false;
    if (i <= sbar - 1) {
      long tau_i = seg.taus[static_cast<size_t>(i - 1)];
      if (!(t_i <= tau_i)) return false;
      if (tau_i - t_i < seg.N) return false;
      prev_tau = tau_i;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("classify: single dwell, crafted transitions, cat map") {
  Model ns = Model::north_south_circle(0.1);
  Pseudotrajectory single = craft_transition(ns, 0, 0, 15, 1e-3);
  auto seg1 = classify(single, ns, 10.0, 5, 2);
  REQUIRE(seg1.has_value());
  CHECK(seg1->sbar() == 1);
  CHECK_FALSE(check_segmentation(ns, single, *seg1).has_value());

  Pseudotrajectory xi = craft_transition(ns, 0, 1, 20, 1e-3);
  auto seg2 = classify(xi, ns, 10.0, 15, 2);
  REQUIRE(seg2.has_value());
  CHECK(seg2->sbar() == 2);
  CHECK(seg2->labels == std::vector<int>{0, 1});
  CHECK_FALSE(check_segmentation(ns, xi, *seg2).has_value());
  CHECK(brute_force_classifiable(xi, ns, 10.0, 15, 2));

  // impossible dwell requirement: interior dwells only matter for sbar >= 3,
  // so force one by requiring three sets on a two-set trajectory
  CHECK_FALSE(classify(xi, ns, 1.0 / 16, 1, 3).has_value());

  Model cat = Model::cat_map();
  Pseudotrajectory any = generate(cat, Pt(0.15, 0.85), 0, 100, 1e-4, 3);
  auto segc = classify(any, cat, 5.0, 10, 1);
  REQUIRE(segc.has_value());
  CHECK(segc->sbar() == 1);
}

TEST_CASE("classify agrees with brute force on short gradient-torus chains") {
  Model gt = Model::gradient_torus(0.05);
  Pseudotrajectory chain = craft_chain(gt, {0, 2, 3}, 12, 1e-4);
  for (long N : {1L, 5L, 12L}) {
    for (double L : {3.0, 8.0, 15.0}) {
      bool mine = classify(chain, gt, L, N, 3).has_value();
      bool oracle = brute_force_classifiable(chain, gt, L, N, 3);
      INFO("L=" << L << " N=" << N);
      CHECK(mine == oracle);
    }
  }
  auto seg = classify(chain, gt, 15.0, 10, 3);
  REQUIRE(seg.has_value());
  CHECK(seg->sbar() == 3);
  CHECK(seg->labels == std::vector<int>{0, 2, 3});
  CHECK_FALSE(check_segmentation(gt, chain, *seg).has_value());

  // excessive dwell demand fails
  CHECK_FALSE(classify(chain, gt, 15.0, 500, 3).has_value());
}

TEST_CASE("induction_refine: worked example and validator property") {
  // gap bound arithmetic: (s0-1) L + (s0-2) N = 3*5 + 2*3 = 21
  Segmentation seg;
  seg.s0 = 4;
  seg.L = 5;
  seg.N = 1;
  seg.d = 1e-3;
  seg.labels = {0, 1, 2, 3};
  seg.taus = {0, 7, 12};
  seg.ts = {3, 10, 15};
  Segmentation out = induction_refine(seg, 3);
  CHECK(out.L == 21.0);
  CHECK(out.s0 == 3);
  CHECK(out.N == 1);
  // interior dwells: tau2-t2 = 4 >= N+1, tau3-t3 = 2 <= N -> drop index 3
  CHECK(out.sbar() == 3);
  CHECK(out.labels == std::vector<int>{0, 1, 3});
  CHECK(structurally_valid(out));

  // identity case: all interior dwells >= N+1
  Segmentation same = induction_refine(seg, 1);
  CHECK(same.sbar() == seg.sbar());
  CHECK(same.L == seg.L);

  // random crafted segmentations: output always structurally valid
  Rng rng(2718);
  int refined = 0;
  for (int t = 0; t < 1000; ++t) {
    Segmentation r = random_segmentation(rng, 6);
    REQUIRE(structurally_valid(r));
    long N = 1 + static_cast<long>(rng.below(8));
    Segmentation ref = induction_refine(r, N);
    if (ref.sbar() < r.sbar()) {
      ++refined;
      CHECK(ref.s0 == r.s0 - 1);
      CHECK(ref.L == (r.s0 - 1) * r.L + (r.s0 - 2) * static_cast<double>(N));
      CHECK(ref.N == 1);
    }
    CHECK(structurally_valid(ref));
  }
  CHECK(refined > 100);  // the generator produces plenty of droppable dwells
}

TEST_CASE("PT membership does not depend on N when s0 <= 2") {
  Model ns = Model::north_south_circle(0.1);
  Pseudotrajectory xi = craft_transition(ns, 0, 1, 8, 1e-3);
  for (long N : {1L, 3L, 50L, 1000L}) {
    bool a = classify(xi, ns, 10.0, 1, 2).has_value();
    bool b = classify(xi, ns, 10.0, N, 2).has_value();
    CHECK(a == b);
  }
}

TEST_CASE("birkhoff constant: excursions bounded by the noiseless transit") {
  Model ns = Model::north_south_circle(0.1);
  double L_est = birkhoff_constant(ns, 1e-3, 40, 400, 31);
  CHECK(L_est > 0);

  // oracle: iterate the noiseless map from just outside the source arc and
  // count steps outside both W arcs
  Pt x(0.5 + 0.08 + 1e-6);
  long transit = 0;
  while (ns.locate_w(x) < 0) {
    x = ns.forward(x);
    ++transit;
  }
  CHECK(std::abs(L_est / 2.0 - static_cast<double>(transit)) <= 2.0);

  // monotonicity: larger W arcs shorten excursions (same seeds)
  Model wide = Model::north_south_circle(0.1);
  wide.set_radii(0.12, 0.18);
  double L_wide = birkhoff_constant(wide, 1e-3, 40, 400, 31);
  CHECK(L_wide <= L_est);
}

TEST_CASE("connection digraphs of the shipped models") {
  Model ns = Model::north_south_circle(0.1);
  ConnectionDigraph g1 = connection_digraph(ns, 20, 4);
  REQUIRE(g1.edges.size() == 1);
  CHECK(g1.edges[0] == std::make_pair(0, 1));
  CHECK_FALSE(has_cycle(g1).has_value());

  Model gt = Model::gradient_torus(0.05);
  ConnectionDigraph g2 = connection_digraph(gt, 60, 5);
  std::vector<std::pair<int, int>> expect = gt.connection_edges();
  std::sort(expect.begin(), expect.end());
  std::vector<std::pair<int, int>> got = g2.edges;
  std::sort(got.begin(), got.end());
  CHECK(got == expect);
  CHECK_FALSE(has_cycle(g2).has_value());

  // topological order source < saddle < sink
  for (auto [a, b] : g2.edges) CHECK(a < b);

  Model cat = Model::cat_map();
  ConnectionDigraph g3 = connection_digraph(cat, 20, 6);
  CHECK(g3.edges.empty());
  CHECK_FALSE(has_cycle(g3).has_value());
}

TEST_CASE("cycle detection on synthetic digraphs") {
  ConnectionDigraph g;
  g.nodes = 3;
  g.edges = {{0, 1}, {1, 2}, {2, 0}};
  auto cycle = has_cycle(g);
  REQUIRE(cycle.has_value());
  CHECK(cycle->size() == 3);
  // the witness is an actual cycle
  for (size_t i = 0; i < cycle->size(); ++i) {
    std::pair<int, int> e{(*cycle)[i], (*cycle)[(i + 1) % cycle->size()]};
    CHECK(std::find(g.edges.begin(), g.edges.end(), e) != g.edges.end());
  }

  ConnectionDigraph empty;
  empty.nodes = 4;
  CHECK_FALSE(has_cycle(empty).has_value());
}

TEST_CASE("segmentation json roundtrip") {
  Segmentation seg;
  seg.l = 3;
  seg.labels = {0, 2, 3};
  seg.taus = {0, 9};
  seg.ts = {4, 13};
  seg.L = 7.5;
  seg.N = 4;
  seg.s0 = 3;
  seg.d = 1e-4;
  Segmentation back = segmentation_from_json(segmentation_to_json(seg));
  CHECK(back.l == seg.l);
  CHECK(back.labels == seg.labels);
  CHECK(back.taus == seg.taus);
  CHECK(back.ts == seg.ts);
  CHECK(back.L == seg.L);
  CHECK(back.N == seg.N);
  CHECK(back.s0 == seg.s0);
  CHECK(back.d == seg.d);
}
