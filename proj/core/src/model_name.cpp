#include "speedup/model_name.hpp"

#include <algorithm>
#include <limits>

namespace speedup {

NameBlock ModelName::Block(int i, int group_order) const {
  NameBlock b(n);
  for (int c = 0; c < n; ++c) b[c] = PackCoordinate(F[i * n + c], group_order);
  return b;
}

namespace {

struct Candidate {
  std::vector<NamePoint> name;
  std::vector<SkewPoint> points;
};

Candidate Segment(const GExtensionSystem& target, const std::vector<SkewPoint>& cycle, int start,
                  int length) {
  Candidate c;
  for (int s = 0; s < length; ++s) {
    SkewPoint p = cycle[(static_cast<size_t>(start) + s) % cycle.size()];
    c.points.push_back(p);
    c.name.push_back({target.labels[p.x], p.g});
  }
  return c;
}

}  // namespace

ModelName BuildModelName(const GExtensionSystem& target, const ModelNameConfig& config,
                         const NamePartition& q_atom, int q_atoms) {
  const FiniteGroup& G = target.group;
  if (config.n < 1 || config.n1 % config.n != 0)
    throw Error("Infeasible", "n1 must be a multiple of n");
  if (config.length < config.n1 || config.length % config.n1 != 0)
    throw Error("Infeasible", "|F| must be a positive multiple of n1");
  // The skew cycle through (0, id); the whole space when the target is ergodic.
  std::vector<SkewPoint> cycle;
  SkewPoint p{0, G.identity()};
  do {
    cycle.push_back(p);
    p = {target.Step(p.x), G.Mul(target.sigma[p.x], p.g)};
  } while (!(p == SkewPoint{0, G.identity()}));

  NameDistribution target_n1 = SystemBlockDistribution(target, config.n1);
  NameDistribution target_n = SystemBlockDistribution(target, config.n);
  std::vector<int64_t> charged(q_atoms, 0);
  for (const auto& [block, c] : target_n.counts) {
    int a = q_atom(block);
    if (a >= 0) charged[a] += c;
  }

  for (int length = config.length; length <= std::max(config.length, config.max_length);
       length += config.n1) {
    ModelName best;
    double best_score = std::numeric_limits<double>::infinity();
    const int stride =
        config.start_stride > 0
            ? config.start_stride
            : std::max(1, static_cast<int>(cycle.size()) / std::max(1, config.max_candidates));
    std::vector<int> all, disjoint;
    for (int i = 0; i + config.n1 <= length; ++i) all.push_back(i);
    for (int i = 0; i + config.n1 <= length; i += config.n1) disjoint.push_back(i);
    int tried = 0;
    for (int start = 0; start < static_cast<int>(cycle.size()) && tried < config.max_candidates;
         start += stride, ++tried) {
      Candidate cand = Segment(target, cycle, start, length);
      double da = NameKantorovich(BlockDistribution(cand.name, config.n1, all, G.order()),
                                  target_n1, G);
      double db = NameKantorovich(BlockDistribution(cand.name, config.n1, disjoint, G.order()),
                                  target_n1, G);
      double score = std::max(da, db);
      if (score < best_score) {
        best_score = score;
        best.F = std::move(cand.name);
        best.source_points = std::move(cand.points);
        best.start = start;
        best.distance_a = da;
        best.distance_b = db;
      }
    }
    best.n = config.n;
    best.n1 = config.n1;
    best.a_ok = best.distance_a < config.tolerance_ab;
    best.b_ok = best.distance_b < config.tolerance_ab;
    double worst_c = 0.0;
    for (int k = 0; k < length / config.n1; ++k) {
      std::vector<int> starts;
      for (int i = k * config.n1; i < (k + 1) * config.n1; i += config.n) starts.push_back(i);
      worst_c = std::max(worst_c,
                         NameKantorovich(BlockDistribution(best.F, config.n, starts, G.order()),
                                         target_n, G));
    }
    best.worst_c = worst_c;
    best.c_ok = worst_c < config.tolerance_c;
    std::vector<int> counts(q_atoms, 0);
    for (int i = 0; i < best.blocks(); ++i) {
      int a = q_atom(best.Block(i, G.order()));
      if (a >= 0) ++counts[a];
    }
    int min_count = std::numeric_limits<int>::max();
    for (int a = 0; a < q_atoms; ++a)
      if (charged[a] > 0) min_count = std::min(min_count, counts[a]);
    best.min_atom_count = min_count == std::numeric_limits<int>::max() ? 0 : min_count;
    best.d_ok = best.min_atom_count >= config.min_atom_count;
    if (best.d_ok) return best;
  }
  throw Error("Infeasible", "some Q atom stays below K blocks up to the maximum model length");
}

}  // namespace speedup
