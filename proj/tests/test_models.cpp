#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "shadowlab/hyperbolic_local.hpp"
#include "shadowlab/models.hpp"
#include "shadowlab/rng.hpp"

using namespace shadowlab;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("cat map fixed point and exact arithmetic") {
  Model cat = Model::cat_map();
  Pt z = cat.apply(Pt(0.0, 0.0), 5);
  CHECK(torus_dist(z, Pt(0.0, 0.0)) == 0.0);

  // (2*0.5+0.5, 0.5+0.5) mod 1 = (0.5, 0.0), exact in binary
  Pt w = cat.apply(Pt(0.5, 0.5), 1);
  CHECK(w[0] == 0.5);
  CHECK(w[1] == 0.0);
}

TEST_CASE("north-south circle map formula") {
  Model ns = Model::north_south_circle(0.1);
  Pt y = ns.apply(Pt(0.25), 1);
  CHECK_THAT(y[0], Catch::Matchers::WithinAbs(0.25 - 0.1 * std::sin(kPi / 2), 1e-15));
}

TEST_CASE("cat map splitting solves the eigenproblem") {
  Model cat = Model::cat_map();
  Splitting sp = cat.splitting_at(Pt(0.3, 0.7));
  REQUIRE(sp.stable.size() == 1);
  REQUIRE(sp.unstable.size() == 1);

  // oracle: A v = mult v with mult a root of the characteristic polynomial
  auto apply_a = [](const Vec& v) { return Vec(2 * v[0] + v[1], v[0] + v[1]); };
  ExpansionRates rates = cat.expansion_rates();
  double lam_s = rates.stable_multiplier[0];
  double lam_u = rates.unstable_multiplier[0];
  CHECK_THAT(lam_s * lam_s - 3 * lam_s + 1, Catch::Matchers::WithinAbs(0.0, 1e-14));
  CHECK_THAT(lam_u * lam_u - 3 * lam_u + 1, Catch::Matchers::WithinAbs(0.0, 1e-14));

  Vec as = apply_a(sp.stable[0]);
  Vec au = apply_a(sp.unstable[0]);
  for (int i = 0; i < 2; ++i) {
    CHECK_THAT(as[i], Catch::Matchers::WithinAbs(lam_s * sp.stable[0][i], 1e-13));
    CHECK_THAT(au[i], Catch::Matchers::WithinAbs(lam_u * sp.unstable[0][i], 1e-13));
  }
}

TEST_CASE("gradient torus splitting by basic set") {
  Model gt = Model::gradient_torus(0.05);
  Splitting sink = gt.splitting_at(Pt(0.52, 0.47));
  CHECK(sink.stable.size() == 2);
  CHECK(sink.unstable.empty());

  Splitting saddle = gt.splitting_at(Pt(0.02, 0.5));
  CHECK(saddle.stable.size() == 1);
  CHECK(saddle.unstable.size() == 1);
  CHECK(saddle.unstable[0][0] == 1.0);  // x-axis expands at x = 0

  Model ns = Model::north_south_circle(0.1);
  Splitting src = ns.splitting_at(Pt(0.52));
  CHECK(src.unstable.size() == 1);
  CHECK(src.stable.empty());

  CHECK_THROWS_AS(gt.splitting_at(Pt(0.25, 0.25)), OutsideExtendedNeighborhood);
}

TEST_CASE("expansion rates against linearization oracles") {
  // cat: root of lambda^2 - 3 lambda + 1
  CHECK_THAT(Model::cat_map().expansion_rates().lambda,
             Catch::Matchers::WithinAbs((3.0 - std::sqrt(5.0)) / 2.0, 1e-15));

  // north-south: finite-difference derivative at the fixed points
  Model ns = Model::north_south_circle(0.1);
  auto fd = [&](double x) {
    double h = 1e-6;
    return wrap_half(ns.apply(Pt(x + h), 1)[0] - ns.apply(Pt(x - h), 1)[0]) / (2 * h);
  };
  double f0 = fd(0.0), fhalf = fd(0.5);
  CHECK_THAT(f0, Catch::Matchers::WithinAbs(1.0 - 0.2 * kPi, 1e-8));
  CHECK_THAT(fhalf, Catch::Matchers::WithinAbs(1.0 + 0.2 * kPi, 1e-8));
  CHECK_THAT(ns.expansion_rates().lambda,
             Catch::Matchers::WithinAbs(std::max(f0, 1.0 / fhalf), 1e-8));

  // gradient torus: multiplier of the time-t flow at a critical point
  Model gt = Model::gradient_torus(0.05);
  CHECK_THAT(gt.expansion_rates().lambda,
             Catch::Matchers::WithinAbs(std::exp(-4.0 * kPi * kPi * 0.05), 1e-14));
}

TEST_CASE("forward-inverse roundtrip on random points") {
  Rng rng(2024);
  for (const Model& mdl :
       {Model::cat_map(), Model::north_south_circle(0.1), Model::gradient_torus(0.05)}) {
    double worst = 0;
    for (int t = 0; t < 2000; ++t) {
      Pt x = rng.point_on_torus(mdl.dim());
      worst = std::max(worst, torus_dist(mdl.apply(mdl.apply(x, 1), -1), x));
    }
    INFO(mdl.name());
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("gradient torus RK4 integrator matches the exact flow") {
  Model gt = Model::gradient_torus(0.05);
  Rng rng(7);
  double worst = 0;
  for (int t = 0; t < 200; ++t) {
    Pt x = rng.point_on_torus(2);
    worst = std::max(worst, torus_dist(gt.apply_rk4(x, 256), gt.forward(x)));
  }
  CHECK(worst < 1e-10);

  double worst_inv = 0;
  for (int t = 0; t < 200; ++t) {
    Pt x = rng.point_on_torus(2);
    worst_inv = std::max(worst_inv, torus_dist(gt.apply_rk4(x, 256, true), gt.inverse(x)));
  }
  CHECK(worst_inv < 1e-10);
}

TEST_CASE("basic set geometry invariants") {
  for (const Model& mdl :
       {Model::cat_map(), Model::north_south_circle(0.1), Model::gradient_torus(0.05)}) {
    const auto& sets = mdl.basic_sets();
    for (const auto& s : sets) {
      CHECK(s.stable_dim + s.unstable_dim == mdl.dim());
      if (!s.whole_space) CHECK(s.w_radius < s.u_radius);
      // invariance of the representative point
      if (!s.whole_space) {
        CHECK(torus_dist(mdl.forward(s.fixed_point), s.fixed_point) < 1e-10);
        CHECK(torus_dist(mdl.inverse(s.fixed_point), s.fixed_point) < 1e-10);
      }
    }
    // pairwise disjoint W_i with positive gap
    for (size_t i = 0; i < sets.size(); ++i) {
      for (size_t j = i + 1; j < sets.size(); ++j) {
        if (sets[i].whole_space || sets[j].whole_space) continue;
        double gap = torus_dist(sets[i].fixed_point, sets[j].fixed_point) -
                     sets[i].w_radius - sets[j].w_radius;
        CHECK(gap > 0.01);
      }
    }
  }
}

TEST_CASE("stable differential contracts by at most lambda in adapted charts") {
  Rng rng(99);
  for (const Model& mdl :
       {Model::cat_map(), Model::north_south_circle(0.1), Model::gradient_torus(0.05)}) {
    double lambda = mdl.expansion_rates().lambda;
    for (const auto& bs : mdl.basic_sets()) {
      if (bs.stable_dim == 0) continue;
      for (int t = 0; t < 60; ++t) {
        Vec off = rng.in_ball(mdl.dim(), bs.whole_space ? 0.4 : bs.w_radius);
        Pt z = bs.whole_space ? rng.point_on_torus(mdl.dim()) : translate(bs.fixed_point, off);
        if (mdl.locate_w(mdl.forward(z)) != bs.label) continue;
        Chart chart(mdl, bs.label, z);
        SplitVec v;
        v.u.m = chart.udim();
        v.s.m = chart.sdim();
        v.s[0] = 1e-4;
        Pt y = chart.from(v);
        double before = d_sigma(mdl, z, z, y, Sigma::stable);
        double after =
            d_sigma(mdl, mdl.forward(z), mdl.forward(z), mdl.forward(y), Sigma::stable);
        REQUIRE(before > 0);
        CHECK(after / before <= lambda + 1e-9);
      }
    }
  }
}
