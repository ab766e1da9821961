#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "shadowlab/hyperbolic_local.hpp"
#include "shadowlab/rng.hpp"

using namespace shadowlab;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("d_sigma basics") {
  Model cat = Model::cat_map();
  Pt x(0.3, 0.4);
  CHECK(d_sigma(cat, x, x, x, Sigma::stable) == 0.0);

  // stable displacement of size 0.01 measures exactly 0.01 (eigenbasis projection)
  Splitting sp = cat.splitting_at(x);
  Pt y = translate(x, Vec(0.01 * sp.stable[0][0], 0.01 * sp.stable[0][1]));
  CHECK_THAT(d_sigma(cat, x, y, x, Sigma::stable), Catch::Matchers::WithinAbs(0.01, 1e-12));

  // symmetry on random triples
  Rng rng(5);
  for (int t = 0; t < 1000; ++t) {
    Pt z = rng.point_on_torus(2);
    Chart chart(cat, 0, z);
    SplitVec v1, v2;
    v1.u.m = v1.s.m = v2.u.m = v2.s.m = 1;
    v1.s[0] = rng.uniform(-0.05, 0.05);
    v2.s[0] = rng.uniform(-0.05, 0.05);
    Pt a = chart.from(v1), b = chart.from(v2);
    CHECK(d_sigma(cat, z, a, b, Sigma::stable) == d_sigma(cat, z, b, a, Sigma::stable));
  }
}

TEST_CASE("charts linearize the map exactly") {
  Rng rng(31);
  for (const Model& mdl :
       {Model::cat_map(), Model::north_south_circle(0.1), Model::gradient_torus(0.05)}) {
    for (const auto& bs : mdl.basic_sets()) {
      for (int t = 0; t < 40; ++t) {
        Pt base = bs.whole_space ? rng.point_on_torus(mdl.dim())
                                 : translate(bs.fixed_point, rng.in_ball(mdl.dim(), bs.w_radius));
        if (mdl.locate_w(mdl.forward(base)) != bs.label && !bs.whole_space) continue;
        Chart chart(mdl, bs.label, base);
        SplitVec v;
        v.u.m = chart.udim();
        v.s.m = chart.sdim();
        for (int i = 0; i < v.u.m; ++i) v.u[i] = rng.uniform(-0.02, 0.02);
        for (int i = 0; i < v.s.m; ++i) v.s[i] = rng.uniform(-0.02, 0.02);
        Pt y = chart.from(v);

        // roundtrip
        SplitVec w = chart.to(y);
        CHECK_THAT(w.unorm(), Catch::Matchers::WithinAbs(v.unorm(), 1e-11));
        CHECK_THAT(w.snorm(), Catch::Matchers::WithinAbs(v.snorm(), 1e-11));

        // exact multiplier action under f
        Chart fwd = chart.rebased(mdl.forward(base));
        SplitVec fv = fwd.to(mdl.forward(y));
        SplitVec expect = chart.map_offset(v);
        for (int i = 0; i < fv.u.m; ++i)
          CHECK_THAT(fv.u[i], Catch::Matchers::WithinAbs(expect.u[i], 1e-10));
        for (int i = 0; i < fv.s.m; ++i)
          CHECK_THAT(fv.s[i], Catch::Matchers::WithinAbs(expect.s[i], 1e-10));
      }
    }
  }
}

TEST_CASE("local disks: degenerate radius, closed-form lines, continuity") {
  Model cat = Model::cat_map();
  Pt x(0.2, 0.6);
  LocalDisk point_disk = local_disk(cat, x, Sigma::stable, 0.0);
  REQUIRE(point_disk.samples.size() == 1);
  CHECK(torus_dist(point_disk.samples[0], x) == 0.0);

  // stable segment x + t e_s, |t| <= 0.05
  LocalDisk seg = local_disk(cat, x, Sigma::stable, 0.05, 41);
  Splitting sp = cat.splitting_at(x);
  for (size_t i = 0; i < seg.samples.size(); ++i) {
    double t = -0.05 + 0.1 * static_cast<double>(i) / 40.0;
    Pt expect = translate(x, Vec(t * sp.stable[0][0], t * sp.stable[0][1]));
    CHECK(torus_dist(seg.samples[i], expect) < 1e-12);
  }

  // semi-invariance: forward image of a stable disk sits in the disk at f(x)
  for (const Pt& p : seg.samples) {
    double d = d_sigma(cat, cat.forward(x), cat.forward(x), cat.forward(p), Sigma::stable);
    CHECK(d <= 0.05 + 1e-12);
  }

  // Hausdorff continuity as the base point converges
  Model gt = Model::gradient_torus(0.05);
  Pt b0(0.52, 0.53);
  LocalDisk d0 = local_disk(gt, b0, Sigma::stable, 0.01, 17);
  double prev = 1.0;
  for (double off : {1e-2, 1e-3, 1e-4}) {
    LocalDisk d1 = local_disk(gt, Pt(0.52 + off, 0.53), Sigma::stable, 0.01, 17);
    double hausdorff = 0;
    for (size_t i = 0; i < d0.samples.size(); ++i) {
      double nearest = 1.0;
      for (size_t j = 0; j < d1.samples.size(); ++j)
        nearest = std::min(nearest, torus_dist(d0.samples[i], d1.samples[j]));
      hausdorff = std::max(hausdorff, nearest);
    }
    CHECK(hausdorff < prev);
    prev = hausdorff;
  }
  CHECK(prev < 1e-3);

  CHECK_THROWS_AS(local_disk(gt, Pt(0.52, 0.53), Sigma::stable, 0.2), RadiusTooLarge);
  CHECK_THROWS_AS(local_disk(gt, Pt(0.25, 0.25), Sigma::stable, 0.01),
                  OutsideExtendedNeighborhood);
}

TEST_CASE("bracket: identity, stable offset, eigenbasis solve") {
  Model cat = Model::cat_map();
  Pt x(0.4, 0.1);
  CHECK(torus_dist(bracket(cat, x, x, 0.05, 0.05), x) < 1e-12);

  Splitting sp = cat.splitting_at(x);
  double a = 0.013, b = 0.021;
  Pt y = translate(x, Vec(a * sp.unstable[0][0] + b * sp.stable[0][0],
                          a * sp.unstable[0][1] + b * sp.stable[0][1]));
  // pure stable offset: intersection at x
  Pt ys = translate(x, Vec(b * sp.stable[0][0], b * sp.stable[0][1]));
  CHECK(torus_dist(bracket(cat, x, ys, 0.05, 0.05), x) < 1e-10);
  // mixed offset: x + a e_u
  Pt expect = translate(x, Vec(a * sp.unstable[0][0], a * sp.unstable[0][1]));
  CHECK(torus_dist(bracket(cat, x, y, 0.05, 0.05), expect) < 1e-10);

  // bracket point lies on both disks within 1e-10
  Pt p = bracket(cat, x, y, 0.05, 0.05);
  CHECK(d_sigma(cat, x, x, p, Sigma::unstable) <= 0.05 + 1e-10);
  CHECK(d_sigma(cat, y, y, p, Sigma::stable) <= 0.05 + 1e-10);

  // idempotence: bracket(x, bracket(x,y)) = bracket(x,y)
  CHECK(torus_dist(bracket(cat, x, p, 0.05, 0.05), p) < 1e-9);
}

TEST_CASE("B-neighborhood membership") {
  Model cat = Model::cat_map();
  Pt x(0.7, 0.2);
  CHECK(in_B_neighborhood(cat, x, 0.01, 0.01, x));

  Splitting sp = cat.splitting_at(x);
  double beta = 0.02;
  Pt far = translate(x, Vec(2 * beta * sp.unstable[0][0], 2 * beta * sp.unstable[0][1]));
  CHECK_FALSE(in_B_neighborhood(cat, x, 0.02, beta, far));

  // membership region is open: interior points survive 1e-6 nudges
  Pt inside = translate(x, Vec(0.5 * beta * sp.unstable[0][0], 0.5 * beta * sp.unstable[0][1]));
  REQUIRE(in_B_neighborhood(cat, x, 0.02, beta, inside));
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    Pt nudged = translate(inside, rng.in_ball(2, 1e-6));
    CHECK(in_B_neighborhood(cat, x, 0.02, beta, nudged));
  }
}

TEST_CASE("estimate_constants recovers the closed-form rates") {
  Model cat = Model::cat_map();
  HyperbolicConstants hc = estimate_constants(cat, 2000, 42);
  CHECK_THAT(hc.lambda, Catch::Matchers::WithinAbs((3.0 - std::sqrt(5.0)) / 2.0, 1e-6));
  CHECK(hc.C0 >= 1.0);
  CHECK(hc.mu > hc.lambda);
  CHECK(hc.mu < 1.0);

  Model gt = Model::gradient_torus(0.05);
  HyperbolicConstants hg = estimate_constants(gt, 1500, 43);
  CHECK_THAT(hg.lambda, Catch::Matchers::WithinAbs(std::exp(-4.0 * kPi * kPi * 0.05), 1e-4));
  CHECK(hg.C0 >= 1.0);
  CHECK(hg.alpha_bar > 0.005);

  Model ns = Model::north_south_circle(0.1);
  HyperbolicConstants hn = estimate_constants(ns, 1200, 44);
  double expect = std::max(1.0 - 0.2 * kPi, 1.0 / (1.0 + 0.2 * kPi));
  CHECK_THAT(hn.lambda, Catch::Matchers::WithinAbs(expect, 1e-6));
}

TEST_CASE("bracket continuity in the second argument (uniform modulus)") {
  // for eps = 1e-3 find delta by bisection so that moving y by < delta moves
  // the bracket by < eps in d^u_x
  Model gt = Model::gradient_torus(0.05);
  Pt x(0.015, 0.51);
  Rng rng(77);
  double eps = 1e-3;
  auto worst_motion = [&](double delta) {
    double worst = 0;
    Rng local(123);
    for (int t = 0; t < 400; ++t) {
      Vec off = local.in_ball(2, 0.01);
      Pt y = translate(x, off);
      Vec nudge = local.in_ball(2, delta);
      Pt y2 = translate(y, nudge);
      Pt p1 = bracket(gt, x, y, 0.02, 0.02);
      Pt p2 = bracket(gt, x, y2, 0.03, 0.03);
      worst = std::max(worst, d_sigma(gt, x, p1, p2, Sigma::unstable));
    }
    return worst;
  };
  double lo = 0, hi = 0.01;
  for (int it = 0; it < 20; ++it) {
    double mid = 0.5 * (lo + hi);
    if (worst_motion(mid) < eps)
      lo = mid;
    else
      hi = mid;
  }
  CHECK(lo > 0);  // a positive modulus exists
  CHECK(worst_motion(lo) < eps);
  (void)rng;
}
