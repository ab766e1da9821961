#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>

#include "shadowlab/pseudotraj.hpp"
#include "shadowlab/rng.hpp"

using namespace shadowlab;

TEST_CASE("validate: exact orbits, injected jumps, noisy orbits") {
  Model cat = Model::cat_map();
  Pseudotrajectory exact = generate(cat, Pt(0.1, 0.2), 0, 200, 0.0, 1);
  exact.d = 1e-9;
  ValidationReport rep = validate(cat, exact);
  CHECK(rep.ok);
  CHECK(rep.max_jump == 0.0);

  Pseudotrajectory broken = exact;
  broken.d = 1e-3;
  broken.at(100) = translate(broken.at(100), Vec(2e-3, 0.0));
  CHECK_FALSE(validate(cat, broken).ok);

  Pseudotrajectory noisy = generate(cat, Pt(0.3, 0.9), -50, 50, 1e-3, 2);
  ValidationReport nrep = validate(cat, noisy);
  CHECK(nrep.ok);
  CHECK(nrep.max_jump < 1e-3);
  CHECK(nrep.max_jump > 0.0);
}

TEST_CASE("generate is deterministic and always validates") {
  for (const Model& mdl :
       {Model::cat_map(), Model::north_south_circle(0.1), Model::gradient_torus(0.05)}) {
    Pseudotrajectory a = generate(mdl, Pt(0.31, 0.17), -20, 80, 1e-4, 99);
    Pseudotrajectory b = generate(mdl, Pt(0.31, 0.17), -20, 80, 1e-4, 99);
    REQUIRE(a.points.size() == b.points.size());
    for (size_t i = 0; i < a.points.size(); ++i)
      for (int c = 0; c < mdl.dim(); ++c) CHECK(a.points[i][c] == b.points[i][c]);

    Rng seeds(5);
    for (int t = 0; t < 100; ++t) {
      Pseudotrajectory xi =
          generate(mdl, seeds.point_on_torus(mdl.dim()), 0, 60, 1e-3, seeds.next_u64());
      CHECK(validate(mdl, xi).ok);
    }
  }
}

TEST_CASE("verify_shadowing detects unstable separation") {
  Model cat = Model::cat_map();
  Pseudotrajectory exact = generate(cat, Pt(0.41, 0.77), 0, 60, 0.0, 3);
  CHECK(verify_shadowing(cat, exact, exact.at(0), 1e-9).ok);

  double eps = 1e-4;
  Splitting sp = cat.splitting_at(exact.at(0));
  Pt off = translate(exact.at(0),
                     Vec(2 * eps * sp.unstable[0][0], 2 * eps * sp.unstable[0][1]));
  ShadowCheck chk = verify_shadowing(cat, exact, off, eps);
  CHECK_FALSE(chk.ok);
  CHECK(chk.max_deviation > eps);
}

TEST_CASE("linear shadow oracle") {
  Model cat = Model::cat_map();

  // zero errors: the oracle returns x0
  Pseudotrajectory exact = generate(cat, Pt(0.2, 0.5), -30, 30, 0.0, 4);
  CHECK(torus_dist(linear_shadow_oracle(cat, exact), exact.at(0)) < 1e-13);

  // a single stable-direction error at k = 0 leaves z0 = x0
  Pseudotrajectory one = exact;
  Splitting sp = cat.splitting_at(Pt(0, 0));
  one.at(1) = translate(cat.forward(one.at(0)),
                        Vec(1e-4 * sp.stable[0][0], 1e-4 * sp.stable[0][1]));
  // indices beyond 1 no longer form an orbit; truncate to [k_min, 1]
  Pseudotrajectory trunc;
  trunc.k_min = exact.k_min;
  trunc.k_max = 1;
  trunc.d = 2e-4;
  trunc.model_name = "cat";
  for (long k = trunc.k_min; k <= 1; ++k) trunc.points.push_back(one.at(k));
  CHECK(torus_dist(linear_shadow_oracle(cat, trunc), exact.at(0)) < 1e-12);

  // random noisy orbits: the ideal oracle orbit shadows at the
  // geometric-series bound (exact tail-sum evaluation; naive iteration of the
  // rounded z diverges after ~35 steps and cannot check 1000)
  double lam_s = cat.expansion_rates().lambda;
  for (double d : {1e-3, 1e-4, 1e-5, 1e-6}) {
    Pseudotrajectory xi = generate(cat, Pt(0.1, 0.9), 0, 1000, d, 7);
    CHECK(linear_oracle_deviation(cat, xi) < 5.0 * d / (1.0 - lam_s));
    // the rounded point itself verifies on a short prefix window
    Pseudotrajectory prefix;
    prefix.k_min = 0;
    prefix.k_max = 25;
    prefix.d = d;
    prefix.model_name = "cat";
    for (long k = 0; k <= 25; ++k) prefix.points.push_back(xi.at(k));
    Pt z = linear_shadow_oracle(cat, xi);
    CHECK(verify_shadowing(cat, prefix, z, 5.0 * d / (1.0 - lam_s) + 1e-9).ok);
  }

  // deviation scales linearly in d (ratio within factor 1.5 across decades)
  double prev_ratio = -1;
  for (double d : {1e-3, 1e-4, 1e-5}) {
    Pseudotrajectory xi = generate(cat, Pt(0.6, 0.3), 0, 500, d, 11);
    double ratio = linear_oracle_deviation(cat, xi) / d;
    if (prev_ratio > 0) {
      CHECK(ratio < prev_ratio * 1.5);
      CHECK(ratio > prev_ratio / 1.5);
    }
    prev_ratio = ratio;
  }

  CHECK_THROWS_AS(linear_shadow_oracle(Model::gradient_torus(0.05), exact), ModelMismatch);
}

TEST_CASE("brute force shadow agrees with the linear oracle") {
  Model cat = Model::cat_map();
  // two-sided windows pin both the stable and the unstable offset; a long
  // one-sided window cannot be matched by any lattice point
  Pseudotrajectory exact = generate(cat, Pt(0.62, 0.13), -3, 3, 0.0, 5);
  auto z = brute_force_shadow(cat, exact, 0.05, 512);
  REQUIRE(z.has_value());
  CHECK(torus_dist(*z, exact.at(0)) < 1.5 * std::sqrt(2.0) / 512);

  Pseudotrajectory noisy = generate(cat, Pt(0.62, 0.13), -6, 6, 1e-3, 6);
  auto zb = brute_force_shadow(cat, noisy, 0.05, 2048);
  Pt zo = linear_shadow_oracle(cat, noisy);
  REQUIRE(zb.has_value());
  CHECK(torus_dist(*zb, zo) < 2.0 * std::sqrt(2.0) / 2048);

  // unreachable tolerance
  CHECK_FALSE(brute_force_shadow(cat, noisy, 1e-7, 128).has_value());

  Pseudotrajectory longxi = generate(cat, Pt(0.1, 0.1), 0, 40, 1e-3, 7);
  CHECK_THROWS_AS(brute_force_shadow(cat, longxi, 0.1, 64), CostGuard);
}

TEST_CASE("craft_transition produces classifiable trajectories") {
  Model ns = Model::north_south_circle(0.1);
  Pseudotrajectory xi = craft_transition(ns, 0, 1, 20, 1e-3);
  CHECK(validate(ns, xi).ok);
  // dwell counts: at least 20 inside each W
  long in_source = 0, in_sink = 0;
  for (long k = xi.k_min; k <= xi.k_max; ++k) {
    int w = ns.locate_w(xi.at(k));
    if (w == 0) ++in_source;
    if (w == 1) ++in_sink;
  }
  CHECK(in_source >= 20);
  CHECK(in_sink >= 20);

  Pseudotrajectory degen = craft_transition(ns, 0, 0, 10, 1e-3);
  for (long k = degen.k_min; k <= degen.k_max; ++k) CHECK(ns.locate_w(degen.at(k)) == 0);

  CHECK_THROWS_AS(craft_transition(ns, 1, 0, 5, 1e-3), NoConnection);

  Model gt = Model::gradient_torus(0.05);
  for (auto [a, b] : gt.connection_edges()) {
    Pseudotrajectory leg = craft_transition(gt, a, b, 12, 1e-4);
    CHECK(validate(gt, leg).ok);
  }
  Pseudotrajectory chain = craft_chain(gt, {0, 2, 3}, 12, 1e-4);
  CHECK(validate(gt, chain).ok);
}

TEST_CASE("csv roundtrip") {
  Model gt = Model::gradient_torus(0.05);
  Pseudotrajectory xi = generate(gt, Pt(0.52, 0.48), -5, 25, 1e-4, 12);
  std::string path = "traj_roundtrip_test.csv";
  save_csv(xi, path);
  Pseudotrajectory back = load_csv(path);
  CHECK(back.model_name == xi.model_name);
  CHECK(back.k_min == xi.k_min);
  CHECK(back.k_max == xi.k_max);
  CHECK(back.d == xi.d);
  for (long k = xi.k_min; k <= xi.k_max; ++k)
    for (int c = 0; c < 2; ++c) CHECK(back.at(k)[c] == xi.at(k)[c]);
  std::remove(path.c_str());
}
