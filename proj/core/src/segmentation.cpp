#include "shadowlab/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

#include <json.hpp>

#include "shadowlab/rng.hpp"

namespace shadowlab {

using nlohmann::json;

std::string segmentation_to_json(const Segmentation& seg) {
  json j = {{"l", seg.l},   {"labels", seg.labels}, {"t", seg.ts}, {"tau", seg.taus},
            {"L", seg.L},   {"N", seg.N},           {"s0", seg.s0}, {"d", seg.d}};
  return j.dump();
}

Segmentation segmentation_from_json(const std::string& text) {
  json j = json::parse(text);
  Segmentation seg;
  seg.l = j.at("l").get<long>();
  seg.labels = j.at("labels").get<std::vector<int>>();
  seg.ts = j.at("t").get<std::vector<long>>();
  seg.taus = j.at("tau").get<std::vector<long>>();
  seg.L = j.at("L").get<double>();
  seg.N = j.at("N").get<long>();
  seg.s0 = j.at("s0").get<int>();
  seg.d = j.at("d").get<double>();
  return seg;
}

std::optional<std::string> check_segmentation(const Model& model, const Pseudotrajectory& xi,
                                              const Segmentation& seg) {
  int sbar = seg.sbar();
  if (sbar < 1) return "empty label list";
  if (sbar > seg.s0) return "sbar exceeds s0";
  if (static_cast<int>(seg.taus.size()) != sbar - 1) return "taus size != sbar-1";
  if (static_cast<int>(seg.ts.size()) != sbar - 1) return "ts size != sbar-1";

  auto in_w = [&](long k, int label) {
    const auto& bs = model.basic_sets()[static_cast<size_t>(label)];
    if (bs.whole_space) return true;
    return torus_dist(xi.at(k), bs.fixed_point) <= bs.w_radius + 1e-12;
  };

  // ordering 0 = tau(1) < t(2) <= tau(2) < ... < t(sbar)
  if (sbar >= 2) {
    if (seg.taus[0] != 0) return "tau(1) != 0";
    long prev_tau = seg.taus[0];
    for (int i = 2; i <= sbar; ++i) {
      long t_i = seg.ts[static_cast<size_t>(i - 2)];
      if (!(prev_tau < t_i)) return "t(i+1) <= tau(i)";
      double gap = static_cast<double>(t_i - prev_tau);
      if (!(gap > 0 && gap <= seg.L)) return "gap outside (0, L]";
      if (i <= sbar - 1) {
        long tau_i = seg.taus[static_cast<size_t>(i - 1)];
        if (!(t_i <= tau_i)) return "tau(i) < t(i)";
        if (tau_i - t_i < seg.N) return "interior dwell below N";
        prev_tau = tau_i;
      }
    }
  }

  // membership: interior segments, then the finite tails
  for (int i = 2; i <= sbar - 1; ++i) {
    long t_i = seg.l + seg.ts[static_cast<size_t>(i - 2)];
    long tau_i = seg.l + seg.taus[static_cast<size_t>(i - 1)];
    for (long k = std::max(t_i, xi.k_min); k <= std::min(tau_i, xi.k_max); ++k)
      if (!in_w(k, seg.labels[static_cast<size_t>(i - 1)]))
        return "interior segment leaves its W";
  }
  long left_end = seg.l + (sbar >= 2 ? seg.taus[0] : 0);
  for (long k = xi.k_min; k <= std::min(left_end, xi.k_max); ++k)
    if (!in_w(k, seg.labels.front())) return "left tail leaves W_1";
  long right_start = seg.l + (sbar >= 2 ? seg.ts.back() : 0);
  for (long k = std::max(right_start, xi.k_min); k <= xi.k_max; ++k)
    if (!in_w(k, seg.labels.back())) return "right tail leaves W_sbar";

  if (left_end < xi.k_min || right_start > xi.k_max) return "l places segments outside xi";
  return std::nullopt;
}

namespace {

struct Run {
  long begin = 0, end = 0;  // inclusive index range
  int label = -1;
  long length() const { return end - begin; }  // dwell in steps
};

std::vector<Run> membership_runs(const Pseudotrajectory& xi, const Model& model) {
  std::vector<Run> runs;
  for (long k = xi.k_min; k <= xi.k_max; ++k) {
    int w = model.locate_w(xi.at(k));
    if (w >= 0 && !runs.empty() && runs.back().label == w && runs.back().end == k - 1) {
      runs.back().end = k;
    } else if (w >= 0) {
      runs.push_back({k, k, w});
    }
  }
  return runs;
}

}  // namespace

std::optional<Segmentation> classify(const Pseudotrajectory& xi, const Model& model,
                                     double L, long N, int s0) {
  {
    ValidationReport rep = validate(model, xi);
    if (!rep.ok && xi.d > 0) throw InvalidInput("classify: xi is not a d-pseudotrajectory");
  }
  std::vector<Run> runs = membership_runs(xi, model);
  if (runs.empty()) return std::nullopt;
  // tails: the first run must cover k_min, the last must cover k_max
  if (runs.front().begin != xi.k_min || runs.back().end != xi.k_max) return std::nullopt;

  size_t last = runs.size() - 1;
  if (last == 0) {
    // single dwell: interior conditions vacuous
    Segmentation seg;
    seg.l = 0;
    seg.labels = {runs[0].label};
    seg.L = L;
    seg.N = N;
    seg.s0 = s0;
    seg.d = xi.d;
    if (s0 < 1) return std::nullopt;
    return seg;
  }

  // BFS over runs: fewest dwells, then earliest starts; interior runs need
  // dwell >= N, consecutive gap in (0, L]
  std::vector<int> parent(runs.size(), -2);
  std::deque<size_t> queue;
  parent[0] = -1;
  queue.push_back(0);
  while (!queue.empty()) {
    size_t r = queue.front();
    queue.pop_front();
    if (r == last) break;
    for (size_t q = r + 1; q < runs.size(); ++q) {
      if (parent[q] != -2) continue;
      double gap = static_cast<double>(runs[q].begin - runs[r].end);
      if (gap > L) break;  // runs are ordered; later gaps only grow
      if (q != last && runs[q].length() < N) continue;
      parent[q] = static_cast<int>(r);
      queue.push_back(q);
    }
  }
  if (parent[last] == -2) return std::nullopt;
  std::vector<size_t> chain;
  for (int r = static_cast<int>(last); r != -1; r = parent[static_cast<size_t>(r)])
    chain.push_back(static_cast<size_t>(r));
  std::reverse(chain.begin(), chain.end());
  if (static_cast<int>(chain.size()) > s0) return std::nullopt;

  Segmentation seg;
  seg.L = L;
  seg.N = N;
  seg.s0 = s0;
  seg.d = xi.d;
  seg.l = runs[chain[0]].end;  // tau(1) = 0 at the end of the first dwell
  for (size_t c = 0; c < chain.size(); ++c) {
    const Run& run = runs[chain[c]];
    seg.labels.push_back(run.label);
    if (c > 0) seg.ts.push_back(run.begin - seg.l);
    if (c + 1 < chain.size()) seg.taus.push_back(c == 0 ? 0 : run.end - seg.l);
  }
  return seg;
}

Segmentation induction_refine(const Segmentation& seg, long N) {
  int sbar = seg.sbar();
  if (sbar < 1) throw InvalidInput("induction_refine: empty segmentation");
  if (seg.s0 < 3) throw InvalidInput("induction_refine: needs s0 >= 3");

  double L_prime = (seg.s0 - 1) * seg.L + (seg.s0 - 2) * static_cast<double>(N);

  // I = {1, sbar} ∪ {interior i with dwell >= N+1}
  std::vector<int> keep;
  bool dropped = false;
  for (int i = 1; i <= sbar; ++i) {
    if (i == 1 || i == sbar) {
      keep.push_back(i);
      continue;
    }
    long dwell = seg.taus[static_cast<size_t>(i - 1)] - seg.ts[static_cast<size_t>(i - 2)];
    if (dwell >= N + 1)
      keep.push_back(i);
    else
      dropped = true;
  }
  if (!dropped) return seg;  // already in PT(L, N+1, s0, d)

  Segmentation out;
  out.l = seg.l;
  out.L = L_prime;
  out.N = 1;
  out.s0 = seg.s0 - 1;
  out.d = seg.d;
  for (size_t c = 0; c < keep.size(); ++c) {
    int i = keep[c];
    out.labels.push_back(seg.labels[static_cast<size_t>(i - 1)]);
    if (c > 0) out.ts.push_back(i == sbar && sbar >= 2 ? seg.ts.back()
                                                       : seg.ts[static_cast<size_t>(i - 2)]);
    if (c + 1 < keep.size())
      out.taus.push_back(i == 1 ? 0 : seg.taus[static_cast<size_t>(i - 1)]);
  }
  return out;
}

double birkhoff_constant(const Model& model, double d, int trials, int horizon,
                         uint64_t rng_seed) {
  Rng rng(rng_seed);
  long worst = 0;
  for (int t = 0; t < trials; ++t) {
    Pt x = rng.point_on_torus(model.dim());
    long outside = 0;
    for (int k = 0; k < horizon; ++k) {
      if (model.locate_w(x) >= 0) {
        outside = 0;
      } else {
        ++outside;
        worst = std::max(worst, outside);
      }
      Pt y = model.forward(x);
      if (d > 0) y = translate(y, rng.in_ball(model.dim(), d * 0.99));
      x = y;
    }
  }
  return 2.0 * static_cast<double>(worst);
}

ConnectionDigraph connection_digraph(const Model& model, int samples, uint64_t rng_seed) {
  Rng rng(rng_seed);
  ConnectionDigraph g;
  g.nodes = static_cast<int>(model.basic_sets().size());
  const int horizon = 1000;
  std::map<std::pair<int, int>, std::vector<Pt>> found;

  for (const auto& bs : model.basic_sets()) {
    if (bs.whole_space) continue;  // single-basic-set models have no edges
    if (bs.unstable_dim == 0) continue;
    int i = bs.label;
    // sample directions on the unstable disk: cardinal axes plus random
    std::vector<Vec> dirs;
    for (int j = 0; j < model.dim(); ++j) {
      if (bs.fixed_point[j] != 0.0 && model.dim() == 2) continue;  // stable coordinate
      for (double sgn : {1.0, -1.0}) {
        Vec v;
        v.m = model.dim();
        v[model.dim() == 1 ? 0 : j] = sgn;
        dirs.push_back(v);
      }
    }
    for (int t = 0; t < samples; ++t) {
      Vec v = rng.unit_vector(model.dim());
      if (model.dim() == 2) {
        for (int j = 0; j < 2; ++j)
          if (bs.fixed_point[j] != 0.0) v[j] = 0.0;  // project onto the unstable plane
      }
      if (v.norm() > 1e-9) dirs.push_back(v);
    }
    for (const Vec& dir : dirs) {
      double n = dir.norm();
      if (n < 1e-12) continue;
      Vec off;
      off.m = model.dim();
      for (int j = 0; j < model.dim(); ++j) off[j] = dir[j] / n * 1e-4;
      Pt x = translate(bs.fixed_point, off);
      // backward limit must come home
      Pt b = x;
      for (int k = 0; k < horizon; ++k) b = model.inverse(b);
      if (model.locate_w(b) != i) continue;
      // forward limit
      Pt f = x;
      std::vector<Pt> orbit{x};
      for (int k = 0; k < horizon; ++k) {
        f = model.forward(f);
        if (orbit.size() < 64) orbit.push_back(f);
      }
      int j = model.locate_w(f);
      if (j >= 0 && j != i) {
        auto key = std::make_pair(i, j);
        if (!found.count(key)) found[key] = orbit;
      }
    }
  }
  for (auto& [key, orbit] : found) {
    g.edges.push_back(key);
    g.witnesses.push_back(orbit);
  }
  return g;
}

std::optional<std::vector<int>> has_cycle(const ConnectionDigraph& g) {
  std::vector<std::vector<int>> adj(static_cast<size_t>(g.nodes));
  for (auto& e : g.edges) adj[static_cast<size_t>(e.first)].push_back(e.second);
  std::vector<int> color(static_cast<size_t>(g.nodes), 0);  // 0 new, 1 active, 2 done
  std::vector<int> stack;

  std::optional<std::vector<int>> result;
  auto dfs = [&](auto&& self, int v) -> bool {
    color[static_cast<size_t>(v)] = 1;
    stack.push_back(v);
    for (int w : adj[static_cast<size_t>(v)]) {
      if (color[static_cast<size_t>(w)] == 1) {
        auto it = std::find(stack.begin(), stack.end(), w);
        result = std::vector<int>(it, stack.end());
        return true;
      }
      if (color[static_cast<size_t>(w)] == 0 && self(self, w)) return true;
    }
    stack.pop_back();
    color[static_cast<size_t>(v)] = 2;
    return false;
  };
  for (int v = 0; v < g.nodes; ++v)
    if (color[static_cast<size_t>(v)] == 0 && dfs(dfs, v)) return result;
  return std::nullopt;
}

}  // namespace shadowlab
