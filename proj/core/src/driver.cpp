#include "speedup/driver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

#include "speedup/matching.hpp"
#include "speedup/towers.hpp"

namespace speedup {

IterationSchedule IterationSchedule::Halving(int budget, std::vector<int> n, double delta0,
                                             double total_epsilon,
                                             std::vector<Rectangle> rectangles) {
  IterationSchedule s;
  s.budget = budget;
  s.n = std::move(n);
  s.total_epsilon = total_epsilon;
  for (int k = 0; k <= budget; ++k) s.delta.push_back(delta0 * std::ldexp(1.0, -k));
  for (int k = 0; k < budget; ++k) s.epsilon.push_back(total_epsilon * std::ldexp(1.0, -(k + 2)));
  s.rectangles = std::move(rectangles);
  return s;
}

std::vector<std::string> IterationSchedule::Check() const {
  std::vector<std::string> out;
  if (budget < 0) out.push_back("budget must be >= 0");
  if (static_cast<int>(n.size()) < budget + 1) out.push_back("n_k missing");
  if (static_cast<int>(delta.size()) < budget + 1) out.push_back("delta_k missing");
  if (static_cast<int>(epsilon.size()) < budget) out.push_back("epsilon_k missing");
  if (budget > 0 && rectangles.empty()) out.push_back("no rectangles");
  double sum = 0.0;
  for (size_t k = 0; k < epsilon.size(); ++k) {
    sum += epsilon[k];
    if (!(epsilon[k] > 0.0)) out.push_back("epsilon_" + std::to_string(k) + " is not positive");
    if (k > 0 && !(epsilon[k] < epsilon[k - 1]))
      out.push_back("epsilon_" + std::to_string(k) + " is not decreasing");
    if (k < delta.size() && !(delta[k] < epsilon[k] / 2.0))
      out.push_back("delta_" + std::to_string(k) + " < epsilon_" + std::to_string(k) + "/2 fails");
  }
  if (!epsilon.empty() && !(sum < total_epsilon / 2.0))
    out.push_back("sum of epsilon_k < epsilon/2 fails");
  // Every rectangle must recur within the budget.
  if (!rectangles.empty() && budget < 2 * static_cast<int>(rectangles.size()))
    out.push_back("some rectangle appears only once within the budget");
  for (size_t k = 1; k < n.size(); ++k)
    if (n[k] % n[k - 1] != 0) out.push_back("n_" + std::to_string(k) + " is not a multiple of n_" + std::to_string(k - 1));
  return out;
}

double ChangeMass(const PartialSpeedup& speedup) {
  int64_t changed = 0;
  for (int k : speedup.exponent()) changed += k != 1;
  return static_cast<double>(changed) / speedup.exponent().size();
}

double ChangedBetween(const PartialSpeedup& a, const PartialSpeedup& b) {
  int64_t changed = 0;
  for (size_t x = 0; x < a.exponent().size(); ++x) changed += a.exponent()[x] != b.exponent()[x];
  return static_cast<double>(changed) / a.exponent().size();
}

BootstrapResult BootstrapRegular(std::shared_ptr<const GExtensionSystem> source,
                                 const std::vector<int>& labels, int n, double delta,
                                 double epsilon, int base_stride) {
  const int N = source->size;
  if (n < 1 || n > N) throw Error("Infeasible", "n must lie in [1, N]");
  const int stride = base_stride > 0 ? base_stride : std::max(1, N / 256);
  BootstrapResult best;
  double best_distance = std::numeric_limits<double>::infinity();
  bool any_length = false;
  for (int len = N / n * n; len >= n; len -= n) {
    // Domain mass (len - 1)/N must stay above 1 - delta; change mass below eps/2.
    double domain = static_cast<double>(len - 1) / N;
    double change = static_cast<double>(N - len + 1) / N;
    if (!(domain > 1.0 - delta) || !(change < epsilon / 2.0)) break;
    any_length = true;
    for (int b = 0; b < N; b += stride) {
      std::vector<int> k(N, 0);
      for (int i = 0; i + 1 < len; ++i) k[(b + i) % N] = 1;
      PartialSpeedup s(source, k, 1);
      s.set_tower({{b}, len});
      RegularityCertificate cert = CheckRegular(s, labels, n, delta);
      if (cert.disjoint_tower && cert.height_multiple && cert.max_ladder_distance < best_distance) {
        best_distance = cert.max_ladder_distance;
        best.speedup = s;
        best.certificate = cert;
        best.change_mass = ChangeMass(s);
      }
    }
    // The longest height with a regular tower wins.
    if (best.certificate.regular()) break;
  }
  if (!any_length)
    throw Error("Infeasible", "no height L' (a multiple of n) has domain mass > 1 - delta and "
                              "change mass < epsilon/2 at N = " + std::to_string(N));
  if (!best.certificate.regular())
    throw Error("Infeasible", "best bootstrap tower fails: " + best.certificate.refusal);
  return best;
}

namespace {

// Chains of the partial speedup ordered by their first point, then cycles.
std::vector<std::vector<int>> Chains(const PartialSpeedup& s) {
  const int N = s.parent().size;
  std::vector<char> has_pre(N, 0), seen(N, 0);
  for (int x = 0; x < N; ++x)
    if (s.InDomain(x)) has_pre[s.BaseImage(x)] = 1;
  std::vector<std::vector<int>> out;
  for (int x = 0; x < N; ++x) {
    if (has_pre[x]) continue;
    std::vector<int> chain;
    for (int y = x;; y = s.BaseImage(y)) {
      chain.push_back(y);
      seen[y] = 1;
      if (!s.InDomain(y)) break;
    }
    out.push_back(std::move(chain));
  }
  for (int x = 0; x < N; ++x) {
    if (seen[x]) continue;
    std::vector<int> cycle;
    for (int y = x; !seen[y]; y = s.BaseImage(y)) {
      cycle.push_back(y);
      seen[y] = 1;
    }
    out.push_back(std::move(cycle));
  }
  return out;
}

}  // namespace

PartialSpeedup FullExtension(const PartialSpeedup& speedup) {
  const int N = speedup.parent().size;
  std::vector<std::vector<int>> chains = Chains(speedup);
  std::vector<int> k = speedup.exponent();
  // Tower chains first (in base order), then the rest by first point.
  std::vector<std::vector<int>> ordered;
  std::vector<char> in_tower(N, 0);
  if (const SpeedupTower* t = speedup.tower())
    for (int b : t->base) in_tower[b] = 1;
  for (auto& c : chains)
    if (in_tower[c.front()]) ordered.push_back(c);
  for (auto& c : chains)
    if (!in_tower[c.front()]) ordered.push_back(c);
  bool has_cycle = false;
  for (auto& c : ordered) has_cycle = has_cycle || speedup.InDomain(c.back());
  if (has_cycle && ordered.size() == 1) return speedup;
  if (has_cycle) throw Error("ValidationError", "speedup already has a cycle among other orbits");
  auto link = [&](const std::vector<std::vector<int>>& order) {
    std::vector<int> kk = k;
    for (size_t i = 0; i < order.size(); ++i) {
      int from = order[i].back();
      int to = order[(i + 1) % order.size()].front();
      int gap = ((to - from) % N + N) % N;
      kk[from] = gap == 0 ? N : gap;
    }
    int k_max = 1;
    for (int e : kk) k_max = std::max(k_max, e);
    return PartialSpeedup(speedup.parent_ptr(), kk, k_max);
  };
  // The extension over the single cycle is ergodic iff the cycle's holonomy
  // generates G; the order of the chains changes the holonomy, so adjacent
  // swaps are tried in turn.
  const FiniteGroup& G = speedup.parent().group;
  auto generates = [&](const PartialSpeedup& s) {
    int h = G.identity(), x = ordered.front().front();
    for (int i = 0; i < N; ++i) {
      h = G.Mul(s.Skew(x), h);
      x = s.BaseImage(x);
    }
    int order = 1;
    for (int y = h; y != G.identity(); y = G.Mul(h, y)) ++order;
    return order == G.order();
  };
  PartialSpeedup first = link(ordered);
  if (G.order() == 1 || generates(first)) return first;
  for (size_t j = 1; j < ordered.size(); ++j) {
    std::vector<std::vector<int>> order = ordered;
    std::swap(order[j - 1], order[j]);
    PartialSpeedup s = link(order);
    if (generates(s)) return s;
  }
  return first;
}

namespace {

struct OrbitIndex {
  std::vector<int> cls, pos;
  std::vector<int> inverse;  // packed preimage under Apply, -1 if none
};

OrbitIndex IndexOrbits(const PartialSpeedup& s) {
  const GExtensionSystem& ext = s.parent();
  const int m = ext.group.order();
  const int total = ext.size * m;
  OrbitIndex idx;
  idx.cls.assign(total, -1);
  idx.pos.assign(total, 0);
  idx.inverse.assign(total, -1);
  std::vector<int> image(total, -1);
  for (int x = 0; x < ext.size; ++x)
    if (s.InDomain(x))
      for (int g = 0; g < m; ++g) {
        SkewPoint q = s.Apply({x, g});
        image[x * m + g] = q.x * m + q.g;
        idx.inverse[q.x * m + q.g] = x * m + g;
      }
  int classes = 0;
  auto walk = [&](int start) {
    int p = start, i = 0;
    while (p >= 0 && idx.cls[p] < 0) {
      idx.cls[p] = classes;
      idx.pos[p] = i++;
      p = image[p];
    }
    ++classes;
  };
  for (int p = 0; p < total; ++p)
    if (idx.inverse[p] < 0) walk(p);
  for (int p = 0; p < total; ++p)
    if (idx.cls[p] < 0) walk(p);
  return idx;
}

}  // namespace

std::vector<FullGroupWitness> ErgodicityCertificate(const PartialSpeedup& speedup,
                                                    const std::vector<std::vector<int>>& sets,
                                                    double epsilon) {
  OrbitIndex idx = IndexOrbits(speedup);
  std::vector<FullGroupWitness> out;
  for (size_t i = 0; i < sets.size(); ++i)
    for (size_t j = 0; j < sets.size(); ++j) {
      if (i != j && !(sets[i].size() < sets[j].size())) continue;
      FullGroupWitness w;
      w.set_from = static_cast<int>(i);
      w.set_to = static_cast<int>(j);
      w.required = MostCount(epsilon, static_cast<int64_t>(sets[i].size()));
      if (i == j) {
        for (int p : sets[i]) w.pieces.push_back({p, 0, p});
      } else {
        std::map<int, std::vector<int>> targets;
        for (int p : sets[j]) targets[idx.cls[p]].push_back(p);
        std::map<int, size_t> next;
        for (int p : sets[i]) {
          auto it = targets.find(idx.cls[p]);
          if (it == targets.end() || next[it->first] >= it->second.size()) continue;
          int q = it->second[next[it->first]++];
          w.pieces.push_back({p, idx.pos[q] - idx.pos[p], q});
        }
      }
      w.carried = static_cast<int64_t>(w.pieces.size());
      if (w.carried < w.required)
        throw Error("NotReachable", "set " + std::to_string(i) + " reaches only " +
                                        std::to_string(w.carried) + " points of set " +
                                        std::to_string(j));
      out.push_back(std::move(w));
    }
  return out;
}

int64_t ExecuteWitness(const PartialSpeedup& speedup, const FullGroupWitness& witness,
                       const std::vector<int>& set_to) {
  const int m = speedup.parent().group.order();
  OrbitIndex idx = IndexOrbits(speedup);
  std::vector<char> in_to(idx.cls.size(), 0), hit(idx.cls.size(), 0);
  for (int p : set_to) in_to[p] = 1;
  int64_t landed = 0;
  for (const FullGroupPiece& piece : witness.pieces) {
    int p = piece.from;
    for (int s = 0; s < piece.power && p >= 0; ++s) {
      int x = p / m;
      if (!speedup.InDomain(x)) {
        p = -1;
        break;
      }
      SkewPoint q = speedup.Apply({x, p % m});
      p = q.x * m + q.g;
    }
    for (int s = 0; s > piece.power && p >= 0; --s) p = idx.inverse[p];
    if (p >= 0 && in_to[p] && !hit[p]) {
      hit[p] = 1;
      ++landed;
    }
  }
  return landed;
}

SpeedupProcess ProcessOfSpeedup(const PartialSpeedup& full, const std::vector<int>& labels,
                                int start) {
  const GExtensionSystem& ext = full.parent();
  SpeedupProcess out;
  int x = start;
  do {
    if (!full.InDomain(x)) throw Error("ValidationError", "speedup is not total");
    out.order.push_back(x);
    x = full.BaseImage(x);
  } while (x != start && static_cast<int>(out.order.size()) <= ext.size);
  if (static_cast<int>(out.order.size()) != ext.size)
    throw Error("ValidationError", "speedup is not a single cycle");
  out.system.size = ext.size;
  out.system.group = ext.group;
  for (int y : out.order) {
    out.system.labels.push_back(labels[y]);
    out.system.sigma.push_back(full.Skew(y));
  }
  return out;
}

namespace {

struct LoopState {
  std::shared_ptr<const GExtensionSystem> twisted;
  PartialSpeedup current;
  std::vector<int> labels;
  TwistFunction beta;
  ImproveResult last;
  bool has_last = false;
};

FactorResult FactorLoop(const GExtensionSystem& target,
                        std::shared_ptr<const GExtensionSystem> source,
                        const std::vector<int>& labels, const IterationSchedule& schedule,
                        const std::function<void(int, LoopState&, ConstructionLog&)>& after) {
  FactorResult out;
  ConstructionLog& log = out.log;
  log.schedule_warnings = schedule.Check();
  if (schedule.n.empty() || schedule.delta.empty())
    throw Error("ValidationError", "schedule needs n_0 and delta_0");
  BootstrapResult boot = BootstrapRegular(source, labels, schedule.n[0], schedule.delta[0],
                                          schedule.total_epsilon);
  log.bootstrap_change = boot.change_mass;
  log.bootstrap_certificate = boot.certificate;
  LoopState st{source, boot.speedup, labels, IdentityTwist(*source), {}, false};
  double changed_sum = 0.0;
  for (int k = 0; k < schedule.budget; ++k) {
    const Rectangle& rect = schedule.RectangleAt(k);
    ImproveParams params{schedule.n[k],     schedule.delta[k], schedule.n[k + 1],
                         schedule.delta[k + 1], schedule.epsilon[k], rect.a1, rect.a2};
    ImproveResult step;
    try {
      step = Improve(target, st.current, st.labels, params, schedule.improve);
    } catch (const Error& e) {
      throw Error(e.kind(), e.kind() + " at iteration " + std::to_string(k) + ": " + e.detail());
    }
    IterationRecord rec;
    rec.k = k + 1;
    rec.report = step.report;
    rec.distance = step.report.final_distance;
    rec.delta = schedule.delta[k + 1];
    rec.below_delta = rec.distance < rec.delta;
    rec.changed_mass = ChangedBetween(st.current, step.speedup);
    rec.drift = step.report.partition_drift;
    changed_sum += rec.changed_mass;
    log.cumulative_drift += rec.drift;
    log.iterations.push_back(rec);
    log.alphas.push_back(step.alpha);
    st.beta = ComposeTwists(source->group, step.alpha, st.beta);
    st.twisted = std::make_shared<const GExtensionSystem>(Twist(*st.twisted, step.alpha));
    st.current = step.speedup.Reparent(st.twisted);
    st.labels = step.labels;
    st.last = std::move(step);
    st.has_last = true;
    if (after) after(k, st, log);
  }
  log.cumulative_change = log.bootstrap_change + changed_sum;
  log.beta = st.beta;
  out.twisted = st.twisted;
  out.last = st.current;
  out.full = FullExtension(st.current);
  log.direct_change = ChangeMass(out.full);
  out.labels = st.labels;
  out.beta = st.beta;
  if (st.has_last) {
    out.model_position = st.last.model_position;
    out.model = st.last.model;
  } else {
    out.model_position.assign(source->size, -1);
  }
  int start = out.full.tower() ? out.full.tower()->base.front() : 0;
  if (const SpeedupTower* t = out.last.tower()) start = t->base.front();
  log.final_ergodicity = CheckExtensionErgodic(ProcessOfSpeedup(out.full, out.labels, start).system);
  return out;
}

}  // namespace

FactorResult RunFactor(const GExtensionSystem& target,
                       std::shared_ptr<const GExtensionSystem> source,
                       const std::vector<int>& labels, const IterationSchedule& schedule,
                       const std::vector<std::vector<int>>& ergodicity_sets,
                       double ergodicity_epsilon) {
  FactorResult out = FactorLoop(target, source, labels, schedule, nullptr);
  if (!ergodicity_sets.empty())
    out.log.witnesses = ErgodicityCertificate(out.full, ergodicity_sets, ergodicity_epsilon);
  return out;
}

CopyResult CopyPartition(const GExtensionSystem& big, const GExtensionSystem& small,
                         const std::vector<int>& phi, const std::vector<int>& q_big, int n,
                         int height) {
  const int N = small.size;
  const int NB = big.size;
  if (height < 1 || height > N || n < 1 || n > height)
    throw Error("TowerInfeasible", "need 1 <= n <= height <= N");
  if (!(big.group == small.group)) throw Error("SpaceMismatch", "groups differ");
  const FiniteGroup& G = small.group;
  CopyResult out;
  out.tower_height = height;
  int64_t defects = 0;
  std::vector<char> commutes(NB, 0);
  for (int y = 0; y < NB; ++y) {
    int ny = big.Step(y);
    bool ok = phi[y] >= 0 && phi[ny] == small.Step(phi[y]) && big.sigma[y] == small.sigma[phi[y]];
    commutes[y] = ok;
    defects += !ok;
  }
  out.factor_defect = static_cast<double>(defects) / NB;
  std::vector<std::vector<int>> preimages(N);
  for (int y = 0; y < NB; ++y)
    if (phi[y] >= 0) preimages[phi[y]].push_back(y);
  // Columns: tower bases j*height with identical (P v c)-names from (b, id).
  std::map<std::vector<int>, std::vector<int>> columns;
  for (int b = 0; b + height <= N; b += height) {
    std::vector<int> key;
    int g = G.identity();
    for (int i = 0; i < height; ++i) {
      key.push_back(PackCoordinate({small.labels[b + i], g}, G.order()));
      g = G.Mul(small.sigma[b + i], g);
    }
    columns[key].push_back(b);
  }
  out.columns = static_cast<int>(columns.size());
  std::vector<int> q(N, 0);
  for (const auto& [key, bases] : columns) {
    std::map<std::vector<int>, int64_t> pooled;
    int64_t total = 0;
    for (int b : bases)
      for (int y : preimages[b]) {
        bool ok = true;
        std::vector<int> name;
        int z = y;
        for (int i = 0; i < height && ok; ++i) {
          name.push_back(q_big[z]);
          if (i + 1 < height) {
            ok = commutes[z];
            z = big.Step(z);
          }
        }
        if (!ok) continue;
        ++pooled[name];
        ++total;
      }
    if (total == 0) continue;
    // Cumulative endpoints floor(|column| * cum / total), the last at |column|.
    const int64_t slots = static_cast<int64_t>(bases.size());
    int64_t cum = 0, prev = 0;
    size_t atom = 0, next_base = 0;
    for (const auto& [name, c] : pooled) {
      cum += c;
      int64_t end = ++atom == pooled.size() ? slots : slots * cum / total;
      for (int64_t s = prev; s < end; ++s, ++next_base)
        for (int i = 0; i < height; ++i) q[bases[next_base] + i] = name[i];
      prev = end;
    }
  }
  out.q = q;
  int qa = 1;
  for (int v : q_big) qa = std::max(qa, v + 1);
  for (int v : q) qa = std::max(qa, v + 1);
  GExtensionSystem joint_small = small, joint_big = big;
  for (int x = 0; x < N; ++x) joint_small.labels[x] = small.labels[x] * qa + q[x];
  for (int y = 0; y < NB; ++y) joint_big.labels[y] = big.labels[y] * qa + q_big[y];
  out.distance = NameKantorovich(SystemBlockDistribution(joint_small, n),
                                 SystemBlockDistribution(joint_big, n), G);
  return out;
}

std::vector<std::vector<int>> CylinderSequence(const GExtensionSystem& system,
                                               const std::vector<int>& labels, int max_length) {
  std::vector<std::vector<int>> out;
  for (int len = 1; len <= max_length; ++len) {
    std::map<std::vector<int>, std::vector<int>> words;
    for (int x = 0; x < system.size; ++x) {
      std::vector<int> w;
      for (int i = 0, y = x; i < len; ++i, y = system.Step(y)) w.push_back(labels[y]);
      words[w].push_back(x);
    }
    for (auto& [w, members] : words) out.push_back(std::move(members));
  }
  return out;
}

namespace {

std::vector<int> InverseBase(const PartialSpeedup& full) {
  std::vector<int> inv(full.parent().size, -1);
  for (int x = 0; x < full.parent().size; ++x)
    if (full.InDomain(x)) inv[full.BaseImage(x)] = x;
  return inv;
}

}  // namespace

double ApproximationDefect(const PartialSpeedup& full, const std::vector<int>& labels,
                           const std::vector<int>& set, int window) {
  const int N = full.parent().size;
  std::vector<int> inv = InverseBase(full);
  std::vector<char> in_set(N, 0);
  for (int x : set) in_set[x] = 1;
  std::map<std::vector<int>, std::pair<int64_t, int64_t>> atoms;
  for (int x = 0; x < N; ++x) {
    int y = x;
    for (int i = 0; i < window && inv[y] >= 0; ++i) y = inv[y];
    std::vector<int> name;
    for (int i = 0; i < 2 * window + 1; ++i) {
      name.push_back(labels[y]);
      if (!full.InDomain(y)) break;
      y = full.BaseImage(y);
    }
    auto& a = atoms[name];
    (in_set[x] ? a.first : a.second) += 1;
  }
  int64_t miss = 0;
  for (auto& [name, c] : atoms) miss += std::min(c.first, c.second);
  return static_cast<double>(miss) / N;
}

double SeparationFailure(const PartialSpeedup& full, const std::vector<int>& labels, int length) {
  const int N = full.parent().size;
  std::map<std::vector<int>, int64_t> names;
  for (int x = 0; x < N; ++x) {
    std::vector<int> name;
    int y = x;
    for (int i = 0; i < length; ++i) {
      name.push_back(labels[y]);
      if (!full.InDomain(y)) break;
      y = full.BaseImage(y);
    }
    ++names[name];
  }
  int64_t same = 0;
  for (auto& [name, c] : names) same += c * (c - 1) / 2;
  const int64_t pairs = static_cast<int64_t>(N) * (N - 1) / 2;
  return pairs == 0 ? 0.0 : static_cast<double>(same) / pairs;
}

bool IsGenerator(const GExtensionSystem& system) {
  const int N = system.size;
  for (int d = 1; d < N; ++d) {
    if (N % d != 0) continue;
    bool periodic = true;
    for (int x = 0; x < N && periodic; ++x) periodic = system.labels[x] == system.labels[(x + d) % N];
    if (periodic) return false;
  }
  return true;
}

std::vector<int> NameMatchedFactor(const GExtensionSystem& big, const GExtensionSystem& small,
                                   int height) {
  const FiniteGroup& G = small.group;
  auto name_from = [&](const GExtensionSystem& sys, int x) {
    std::vector<int> key;
    int g = G.identity();
    for (int i = 0; i < height; ++i, x = sys.Step(x)) {
      key.push_back(PackCoordinate({sys.labels[x], g}, G.order()));
      if (i + 1 < height) g = G.Mul(sys.sigma[x], g);
    }
    key.push_back(sys.sigma[x == 0 ? sys.size - 1 : x - 1]);
    return key;
  };
  std::map<std::vector<int>, int> base_of;
  for (int b = 0; b + height <= small.size; b += height) base_of.emplace(name_from(small, b), b);
  std::vector<int> phi(big.size, -1);
  for (int y = 0; y + height <= big.size;) {
    auto it = base_of.find(name_from(big, y));
    if (it == base_of.end()) {
      ++y;
      continue;
    }
    for (int i = 0; i < height; ++i) phi[y + i] = it->second + i;
    y += height;
  }
  return phi;
}

FactorResult RunIsomorphism(const GExtensionSystem& target,
                            std::shared_ptr<const GExtensionSystem> source,
                            const std::vector<int>& labels, const IterationSchedule& schedule,
                            int copy_height) {
  if (!IsGenerator(target))
    throw Error("GeneratorCheckFailed", "target labels are periodic: names do not separate points");
  const std::vector<std::vector<int>> cylinders = CylinderSequence(*source, labels, 3);
  const int max_window = std::max(1, source->size / 64);
  FactorResult out = FactorLoop(
      target, source, labels, schedule, [&](int k, LoopState& st, ConstructionLog& log) {
        PartialSpeedup full = FullExtension(st.current);
        const std::vector<int>& set = cylinders[k % cylinders.size()];
        const double bound = 2.0 * schedule.epsilon[k];
        double defect = 1.0;
        int window = 0;
        for (int m = 0; m <= max_window; ++m) {
          double d = ApproximationDefect(full, st.labels, set, m);
          if (d < defect) {
            defect = d;
            window = m;
          }
          if (defect <= bound) break;
        }
        log.generator_defects.push_back(defect);
        log.generator_windows.push_back(window);
        // Copy the set to the target through the orbit factor map.
        SpeedupProcess proc = ProcessOfSpeedup(full, st.labels, st.current.tower()->base.front());
        std::vector<int> phi = NameMatchedFactor(proc.system, target, copy_height);
        std::vector<int> q_big(proc.order.size(), 0);
        std::vector<char> in_set(source->size, 0);
        for (int x : set) in_set[x] = 1;
        for (size_t i = 0; i < proc.order.size(); ++i) q_big[i] = in_set[proc.order[i]];
        CopyResult copy = CopyPartition(proc.system, target, phi, q_big, schedule.n[k + 1],
                                        copy_height);
        log.copy_distances.push_back(copy.distance);
      });
  out.log.separation_failure = SeparationFailure(out.full, out.labels, source->size);
  return out;
}

SeedResult SeedFromOrbit(const GExtensionSystem& target, const GExtensionSystem& source,
                         int length, double zeta, int n, int start) {
  if (length < n || length > source.size)
    throw Error("ValidationError", "orbit length must lie in [n, source size]");
  if (!(target.group == source.group)) throw Error("SpaceMismatch", "groups differ");
  const FiniteGroup& G = target.group;
  const int m = G.order();
  NameDistribution full = SystemBlockDistribution(target, n);
  // A full cycle is read cyclically, so its n-distribution is the target's.
  const bool full_cycle = length == target.size;
  std::vector<int> starts;
  for (int i = 0; full_cycle ? i < length : i + n <= length; ++i) starts.push_back(i);
  const int stride = std::max(1, target.size / 64);
  SeedResult out;
  double best = std::numeric_limits<double>::infinity();
  std::vector<NamePoint> best_name;
  for (int x = start >= 0 ? start : 0; x < target.size; x += stride) {
    std::vector<NamePoint> name =
        SkewOrbit(target, {x, G.identity()}, full_cycle ? length + n - 1 : length);
    double d = NameKantorovich(BlockDistribution(name, n, starts, m), full, G);
    name.resize(length);
    if (d < best) {
      best = d;
      best_name = std::move(name);
      out.start = {x, G.identity()};
    }
    if (start >= 0) break;
  }
  out.orbit_distance = best;
  if (!(best < zeta))
    throw Error("NoGoodOrbit", "best orbit distance " + std::to_string(best) + " >= zeta " +
                                   std::to_string(zeta));
  // Stacked copies of the tower of height `length`, each carrying the name.
  out.labels.resize(source.size);
  out.alpha.resize(source.size);
  int cocycle = G.identity();  // sigma_source^(i)(0)
  for (int i = 0; i < source.size; ++i) {
    const NamePoint& np = best_name[i % length];
    out.labels[i] = np.label;
    out.alpha[i] = G.Mul(np.g, G.Inv(cocycle));
    cocycle = G.Mul(source.sigma[i], cocycle);
  }
  return out;
}

TruncationResult TruncatePartition(const GExtensionSystem& system, int cut, int n) {
  TruncationResult out;
  out.labels = system.labels;
  for (int& l : out.labels) l = std::min(l, cut);
  // The merged atom is everything indexed at or past the cut.
  int64_t tail = 0;
  for (int l : system.labels) tail += l >= cut;
  out.merged_mass = static_cast<double>(tail) / system.size;
  GExtensionSystem truncated = system;
  truncated.labels = out.labels;
  out.distance = NameKantorovich(SystemBlockDistribution(system, n),
                                 SystemBlockDistribution(truncated, n), system.group);
  return out;
}

}  // namespace speedup
