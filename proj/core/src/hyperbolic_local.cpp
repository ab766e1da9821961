#include "shadowlab/hyperbolic_local.hpp"

#include <algorithm>
#include <cmath>

#include "shadowlab/rng.hpp"

namespace shadowlab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kChartMaxOffsetProduct = 0.24;  // pole of tan(pi d) at d = 1/2

const double kSqrt5 = std::sqrt(5.0);
const double kCatLambdaU = (3.0 + kSqrt5) / 2.0;
const double kCatLambdaS = (3.0 - kSqrt5) / 2.0;

Vec cat_dir(bool unstable) {
  const double phi = (1.0 + kSqrt5) / 2.0;
  double n = std::sqrt(phi * phi + 1.0);
  return unstable ? Vec(phi / n, 1.0 / n) : Vec(1.0 / n, -phi / n);
}

// Koenigs linearizing coordinate of a 1-d map around an attracting fixed
// point: phi(w) = lim step^n(w) / mult^n with phi'(0) = 1 and
// phi(step(w)) = mult * phi(w). `step` acts on the centered lift.
struct Koenigs {
  double mult;                           // multiplier in (0,1)
  double (*step)(double, double);        // (w, a) -> next w
  double a;                              // model parameter

  double eval(double w) const {
    double scale = 1.0;
    for (int n = 0; n < 400; ++n) {
      if (std::abs(w) < 1e-13) break;
      w = step(w, a);
      scale *= mult;
    }
    return w / scale;
  }

  // derivative of eval at w, via the product formula
  double deriv(double w, double (*fprime)(double, double)) const {
    double prod = 1.0;
    for (int n = 0; n < 400; ++n) {
      if (std::abs(w) < 1e-13) break;
      prod *= fprime(w, a) / mult;
      w = step(w, a);
    }
    return prod;
  }

  double invert(double v, double (*fprime)(double, double)) const {
    double w = v;  // phi ~ id near 0
    for (int it = 0; it < 80; ++it) {
      double err = eval(w) - v;
      if (std::abs(err) < 1e-14 * std::max(1.0, std::abs(v))) break;
      double dd = deriv(w, fprime);
      w -= err / dd;
      if (w <= -0.49) w = -0.49;
      if (w >= 0.49) w = 0.49;
    }
    return w;
  }
};

// centered-lift steps for the north-south circle map x -> x - a sin(2 pi x)
double ns_sink_step(double w, double a) { return w - a * std::sin(2.0 * kPi * w); }
double ns_sink_fprime(double w, double a) { return 1.0 - 2.0 * kPi * a * std::cos(2.0 * kPi * w); }

double ns_source_step(double w, double a) {
  // inverse map centered at the source 1/2: solve v - a sin(2 pi (v + 1/2)) = w + 1/2
  double v = w;
  for (int it = 0; it < 60; ++it) {
    double fv = v + a * std::sin(2.0 * kPi * v);  // sin(2 pi (v+1/2)) = -sin(2 pi v)
    double err = fv - w;
    if (std::abs(err) < 1e-16) break;
    double deriv = 1.0 + 2.0 * kPi * a * std::cos(2.0 * kPi * v);
    v -= err / deriv;
  }
  return v;
}
double ns_source_fprime(double w, double a) {
  // derivative of the centered inverse map = 1 / f'(f^{-1})
  double v = ns_source_step(w, a);
  return 1.0 / (1.0 + 2.0 * kPi * a * std::cos(2.0 * kPi * v));
}

}  // namespace

Chart::Chart(const Model& model, int set, const Pt& base)
    : model_(&model), set_(set), base_(base) {
  const auto& sets = model.basic_sets();
  if (set < 0 || set >= static_cast<int>(sets.size()))
    throw OutsideExtendedNeighborhood("chart: bad basic set index");
  const BasicSet& bs = sets[static_cast<size_t>(set)];
  udim_ = bs.unstable_dim;
  sdim_ = bs.stable_dim;
  mult_u_.m = udim_;
  mult_s_.m = sdim_;

  switch (model.id()) {
    case ModelId::cat_map:
      mult_u_[0] = kCatLambdaU;
      mult_s_[0] = kCatLambdaS;
      break;
    case ModelId::north_south_circle: {
      double a = model.parameter();
      if (udim_ == 1)
        mult_u_[0] = 1.0 + 2.0 * kPi * a;
      else
        mult_s_[0] = 1.0 - 2.0 * kPi * a;
      coord_unstable_[0] = (udim_ == 1);
      base_chart_[0] = coord_to_chart(0, base[0]);
      break;
    }
    case ModelId::gradient_torus: {
      double e = std::exp(4.0 * kPi * kPi * model.parameter());
      int iu = 0, is = 0;
      for (int j = 0; j < 2; ++j) {
        bool unstable = bs.fixed_point[j] == 0.0;
        coord_unstable_[static_cast<size_t>(j)] = unstable;
        if (unstable)
          mult_u_[iu++] = e;
        else
          mult_s_[is++] = 1.0 / e;
        base_chart_[static_cast<size_t>(j)] = coord_to_chart(j, base[j]);
      }
      break;
    }
  }
  if (model.id() != ModelId::cat_map) {
    double r = torus_dist(base, bs.fixed_point);
    if (r > bs.u_radius * 1.35)
      throw OutsideExtendedNeighborhood("chart base outside U_i: " + to_string(base));
  }
}

double Chart::coord_to_chart(int j, double xj) const {
  const BasicSet& bs = model_->basic_sets()[static_cast<size_t>(set_)];
  switch (model_->id()) {
    case ModelId::north_south_circle: {
      double c = bs.fixed_point[0];
      double w = wrap_half(xj - c);
      if (std::abs(w) > 0.45)
        throw OutsideExtendedNeighborhood("chart: point too far from fixed point");
      double a = model_->parameter();
      if (coord_unstable_[0]) {
        Koenigs k{1.0 / (1.0 + 2.0 * kPi * a), ns_source_step, a};
        return k.eval(w);
      }
      Koenigs k{1.0 - 2.0 * kPi * a, ns_sink_step, a};
      return k.eval(w);
    }
    case ModelId::gradient_torus: {
      double c = bs.fixed_point[j];
      double w = wrap_half(xj - c);
      if (std::abs(w) > kChartMaxOffsetProduct)
        throw OutsideExtendedNeighborhood("chart: coordinate too far from center");
      return std::tan(kPi * w) / kPi;
    }
    default:
      return xj;
  }
}

double Chart::coord_from_chart(int j, double v) const {
  const BasicSet& bs = model_->basic_sets()[static_cast<size_t>(set_)];
  switch (model_->id()) {
    case ModelId::north_south_circle: {
      double c = bs.fixed_point[0];
      double a = model_->parameter();
      double w;
      if (coord_unstable_[0]) {
        Koenigs k{1.0 / (1.0 + 2.0 * kPi * a), ns_source_step, a};
        w = k.invert(v, ns_source_fprime);
      } else {
        Koenigs k{1.0 - 2.0 * kPi * a, ns_sink_step, a};
        w = k.invert(v, ns_sink_fprime);
      }
      return wrap01(c + w);
    }
    case ModelId::gradient_torus: {
      double c = bs.fixed_point[j];
      return wrap01(c + std::atan(kPi * v) / kPi);
    }
    default:
      return v;
  }
}

SplitVec Chart::to(const Pt& y) const {
  SplitVec out;
  out.u.m = udim_;
  out.s.m = sdim_;
  switch (model_->id()) {
    case ModelId::cat_map: {
      Vec d = lift_delta(base_, y);
      out.u[0] = d.dot(cat_dir(true));
      out.s[0] = d.dot(cat_dir(false));
      break;
    }
    case ModelId::north_south_circle: {
      double v = coord_to_chart(0, y[0]) - base_chart_[0];
      if (udim_ == 1)
        out.u[0] = v;
      else
        out.s[0] = v;
      break;
    }
    case ModelId::gradient_torus: {
      int iu = 0, is = 0;
      for (int j = 0; j < 2; ++j) {
        double v = coord_to_chart(j, y[j]) - base_chart_[static_cast<size_t>(j)];
        if (coord_unstable_[static_cast<size_t>(j)])
          out.u[iu++] = v;
        else
          out.s[is++] = v;
      }
      break;
    }
  }
  return out;
}

Pt Chart::from(const SplitVec& v) const {
  switch (model_->id()) {
    case ModelId::cat_map: {
      Vec eu = cat_dir(true), es = cat_dir(false);
      Vec d(v.u[0] * eu[0] + v.s[0] * es[0], v.u[0] * eu[1] + v.s[0] * es[1]);
      return translate(base_, d);
    }
    case ModelId::north_south_circle: {
      double val = base_chart_[0] + (udim_ == 1 ? v.u[0] : v.s[0]);
      Pt p(coord_from_chart(0, val));
      p.m = 1;
      return p;
    }
    case ModelId::gradient_torus: {
      Pt p(0.0, 0.0);
      int iu = 0, is = 0;
      for (int j = 0; j < 2; ++j) {
        double val = base_chart_[static_cast<size_t>(j)] +
                     (coord_unstable_[static_cast<size_t>(j)] ? v.u[iu++] : v.s[is++]);
        p[j] = coord_from_chart(j, val);
      }
      return p;
    }
  }
  return base_;
}

SplitVec Chart::map_offset(const SplitVec& v) const {
  SplitVec out = v;
  for (int i = 0; i < udim_; ++i) out.u[i] *= mult_u_[i];
  for (int i = 0; i < sdim_; ++i) out.s[i] *= mult_s_[i];
  return out;
}

SplitVec Chart::unmap_offset(const SplitVec& v) const {
  SplitVec out = v;
  for (int i = 0; i < udim_; ++i) out.u[i] /= mult_u_[i];
  for (int i = 0; i < sdim_; ++i) out.s[i] /= mult_s_[i];
  return out;
}

Chart Chart::rebased(const Pt& new_base) const { return Chart(*model_, set_, new_base); }

double d_sigma(const Model& model, const Pt& x, const Pt& y, const Pt& z, Sigma) {
  int set = model.locate(x);
  if (set < 0) throw OutsideExtendedNeighborhood("d_sigma at " + to_string(x));
  Chart chart(model, set, x);
  SplitVec vy = chart.to(y);
  SplitVec vz = chart.to(z);
  SplitVec d;
  d.u.m = vy.u.m;
  d.s.m = vy.s.m;
  for (int i = 0; i < d.u.m; ++i) d.u[i] = vy.u[i] - vz.u[i];
  for (int i = 0; i < d.s.m; ++i) d.s[i] = vy.s[i] - vz.s[i];
  return d.norm();
}

double analytic_alpha_bar(const Model& model) {
  switch (model.id()) {
    case ModelId::cat_map: return 0.2;  // lift stays unambiguous with margin
    case ModelId::north_south_circle: return 0.010;
    case ModelId::gradient_torus: return 0.0115;
  }
  return 0.01;
}

LocalDisk local_disk(const Model& model, const Pt& x, Sigma sigma, double radius,
                     int resolution, std::optional<double> alpha_bar) {
  int set = model.locate(x);
  if (set < 0) throw OutsideExtendedNeighborhood("local_disk at " + to_string(x));
  double ab = alpha_bar.value_or(analytic_alpha_bar(model));
  if (radius > ab + 1e-12) throw RadiusTooLarge("local_disk radius > alpha_bar");
  if (radius < 0) throw InvalidInput("negative radius");

  Chart chart(model, set, x);
  LocalDisk disk;
  disk.base = x;
  disk.sigma = sigma;
  disk.radius = radius;
  disk.dim = sigma == Sigma::unstable ? chart.udim() : chart.sdim();
  if (disk.dim == 0 || radius == 0.0) {
    disk.dim = std::max(disk.dim, 0);
    disk.res = 1;
    disk.samples = {x};
    return disk;
  }
  disk.res = std::max(2, resolution);
  int n = disk.res;
  auto offset_at = [&](int idx, int axis) {
    int q = idx;
    for (int a = 0; a < axis; ++a) q /= n;
    return -radius + 2.0 * radius * (q % n) / (n - 1);
  };
  long total = 1;
  for (int a = 0; a < disk.dim; ++a) total *= n;
  disk.samples.reserve(static_cast<size_t>(total));
  for (long idx = 0; idx < total; ++idx) {
    SplitVec v;
    v.u.m = chart.udim();
    v.s.m = chart.sdim();
    for (int a = 0; a < disk.dim; ++a) {
      double t = offset_at(static_cast<int>(idx), a);
      if (sigma == Sigma::unstable)
        v.u[a] = t;
      else
        v.s[a] = t;
    }
    disk.samples.push_back(chart.from(v));
  }
  return disk;
}

Pt bracket(const Model& model, const Pt& x, const Pt& y, double alpha, double beta) {
  int set = model.locate(x);
  if (set < 0) throw OutsideExtendedNeighborhood("bracket at " + to_string(x));
  Chart chart(model, set, x);
  SplitVec v = chart.to(y);
  if (v.snorm() > alpha || v.unorm() > beta)
    throw NoBracket("offsets (" + std::to_string(v.unorm()) + ", " + std::to_string(v.snorm()) +
                    ") exceed radii");
  SplitVec w;
  w.u = v.u;
  w.s.m = v.s.m;
  return chart.from(w);
}

bool in_B_neighborhood(const Model& model, const Pt& x, double alpha, double beta,
                       const Pt& y) {
  try {
    bracket(model, x, y, alpha, beta);
    return true;
  } catch (const NoBracket&) {
    return false;
  } catch (const OutsideExtendedNeighborhood&) {
    return false;
  }
}

namespace {

// sample a point of W_i that stays inside the chart's safe region
Pt sample_in_w(const Model& model, const BasicSet& bs, Rng& rng) {
  if (bs.whole_space) return rng.point_on_torus(model.dim());
  while (true) {
    Vec v = rng.in_ball(model.dim(), bs.w_radius);
    Pt p = translate(bs.fixed_point, v);
    if (torus_dist(p, bs.fixed_point) <= bs.w_radius) return p;
  }
}

SplitVec random_sigma_offset(const Chart& chart, Sigma sigma, double radius, Rng& rng) {
  SplitVec v;
  v.u.m = chart.udim();
  v.s.m = chart.sdim();
  int dim = sigma == Sigma::unstable ? chart.udim() : chart.sdim();
  for (int i = 0; i < dim; ++i) {
    double t = rng.uniform(-radius, radius);
    if (sigma == Sigma::unstable)
      v.u[i] = t;
    else
      v.s[i] = t;
  }
  return v;
}

}  // namespace

HyperbolicConstants estimate_constants(const Model& model, int samples, uint64_t rng_seed) {
  Rng rng(rng_seed);
  HyperbolicConstants out;
  ExpansionRates rates = model.expansion_rates();

  // alpha_bar: bisect the largest radius with B(x, a, a) ⊂ U_i ∩ f^{-1}(U_i)
  // over sampled x ∈ W_i (Claim on the W_i neighborhoods, item (1)).
  auto alpha_ok = [&](double a) {
    Rng local(rng_seed ^ 0x9e3779b97f4a7c15ULL);
    for (const auto& bs : model.basic_sets()) {
      if (bs.whole_space) continue;
      int set = bs.label;
      for (int t = 0; t < 160; ++t) {
        Pt x = sample_in_w(model, bs, local);
        Chart chart(model, set, x);
        SplitVec v;
        v.u.m = chart.udim();
        v.s.m = chart.sdim();
        for (int i = 0; i < v.u.m; ++i) v.u[i] = (local.below(2) ? a : -a);
        for (int i = 0; i < v.s.m; ++i) v.s[i] = (local.below(2) ? a : -a);
        Pt y;
        try {
          y = chart.from(v);
        } catch (const shadow_error&) {
          return false;
        }
        if (model.locate(y) != set) return false;
        if (model.locate(model.forward(y)) != set) return false;
      }
    }
    return true;
  };
  {
    double hi = analytic_alpha_bar(model) * 2.5;
    double lo = 0.0;
    if (alpha_ok(hi)) {
      lo = hi;
    } else {
      for (int it = 0; it < 40; ++it) {
        double mid = 0.5 * (lo + hi);
        if (alpha_ok(mid))
          lo = mid;
        else
          hi = mid;
      }
    }
    out.alpha_bar = std::min(lo * 0.95, analytic_alpha_bar(model) * 2.0);
    if (model.id() == ModelId::cat_map) out.alpha_bar = analytic_alpha_bar(model);
  }

  // C0 from sampled metric-distortion extremes, then a strict verification pass.
  double max_ratio = 1.0, min_ratio = 1.0;
  double claim3 = 0.0;
  for (int t = 0; t < samples; ++t) {
    const auto& sets = model.basic_sets();
    const BasicSet& bs = sets[rng.below(sets.size())];
    Pt x = sample_in_w(model, bs, rng);
    Chart chart(model, bs.label, x);
    for (Sigma sigma : {Sigma::stable, Sigma::unstable}) {
      int dim = sigma == Sigma::unstable ? chart.udim() : chart.sdim();
      if (dim == 0) continue;
      SplitVec v1 = random_sigma_offset(chart, sigma, out.alpha_bar, rng);
      SplitVec v2 = random_sigma_offset(chart, sigma, out.alpha_bar, rng);
      Pt y = chart.from(v1), z = chart.from(v2);
      double dist = torus_dist(y, z);
      if (dist < 1e-12) continue;
      double dsig = d_sigma(model, x, y, z, sigma);
      double r = dsig / dist;
      max_ratio = std::max(max_ratio, r);
      min_ratio = std::min(min_ratio, r);
      if (sigma == Sigma::stable) claim3 = std::max(claim3, dsig);
    }
  }
  out.C0 = std::max(max_ratio, 1.0 / min_ratio) * (1.0 + 1e-6);
  out.claim3_C = claim3;

  // verification pass: strict Eq-style inequalities on fresh samples
  for (int t = 0; t < samples; ++t) {
    const auto& sets = model.basic_sets();
    const BasicSet& bs = sets[rng.below(sets.size())];
    Pt x = sample_in_w(model, bs, rng);
    Chart chart(model, bs.label, x);
    for (Sigma sigma : {Sigma::stable, Sigma::unstable}) {
      int dim = sigma == Sigma::unstable ? chart.udim() : chart.sdim();
      if (dim == 0) continue;
      SplitVec v1 = random_sigma_offset(chart, sigma, out.alpha_bar, rng);
      SplitVec v2 = random_sigma_offset(chart, sigma, out.alpha_bar, rng);
      Pt y = chart.from(v1), z = chart.from(v2);
      double dist = torus_dist(y, z);
      if (dist < 1e-12) continue;
      double dsig = d_sigma(model, x, y, z, sigma);
      if (!(dist / out.C0 < dsig && dsig < out.C0 * dist))
        throw SamplingFailure("metric equivalence violated at " + to_string(x));
    }
  }

  // lambda: sampled disk contraction against the closed-form multipliers
  double lambda_obs = 0.0;
  for (const auto& bs : model.basic_sets()) {
    int set = bs.label;
    int per_set = std::max(8, samples / 8);
    for (int t = 0; t < per_set; ++t) {
      Pt z = sample_in_w(model, bs, rng);
      Chart chart(model, set, z);
      if (chart.sdim() > 0 && model.locate_w(model.forward(z)) == set) {
        SplitVec v1 = random_sigma_offset(chart, Sigma::stable, out.alpha_bar, rng);
        SplitVec v2 = random_sigma_offset(chart, Sigma::stable, out.alpha_bar, rng);
        Pt x1 = chart.from(v1), x2 = chart.from(v2);
        double before = d_sigma(model, z, x1, x2, Sigma::stable);
        if (before > 1e-12) {
          double after = d_sigma(model, model.forward(z), model.forward(x1),
                                 model.forward(x2), Sigma::stable);
          double ratio = after / before;
          double mult = rates.stable_multiplier[static_cast<size_t>(set)];
          if (ratio > mult * (1.0 + 1e-6) + 1e-12)
            throw SamplingFailure("stable contraction exceeds multiplier");
          lambda_obs = std::max(lambda_obs, ratio);
        }
      }
      if (chart.udim() > 0 && model.locate_w(model.inverse(z)) == set) {
        SplitVec v1 = random_sigma_offset(chart, Sigma::unstable, out.alpha_bar, rng);
        SplitVec v2 = random_sigma_offset(chart, Sigma::unstable, out.alpha_bar, rng);
        Pt x1 = chart.from(v1), x2 = chart.from(v2);
        double before = d_sigma(model, z, x1, x2, Sigma::unstable);
        if (before > 1e-12) {
          double after = d_sigma(model, model.inverse(z), model.inverse(x1),
                                 model.inverse(x2), Sigma::unstable);
          double ratio = after / before;
          double mult = 1.0 / rates.unstable_multiplier[static_cast<size_t>(set)];
          if (ratio > mult * (1.0 + 1e-6) + 1e-12)
            throw SamplingFailure("backward unstable contraction exceeds multiplier");
          lambda_obs = std::max(lambda_obs, ratio);
        }
      }
    }
  }
  out.lambda = std::max(lambda_obs, rates.lambda * (1.0 - 1e-9));
  if (std::abs(out.lambda - rates.lambda) > 1e-6 + 1e-4 * rates.lambda)
    throw SamplingFailure("sampled lambda disagrees with closed form");
  out.mu = 0.5 * (1.0 + out.lambda);
  return out;
}

}  // namespace shadowlab
