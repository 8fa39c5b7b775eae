#include "speedup/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "speedup/transport.hpp"

namespace speedup {

FiniteMetricSpace::FiniteMetricSpace(int size, std::vector<int64_t> dist_num, int64_t den)
    : size_(size), dist_(std::move(dist_num)), den_(den) {
  if (static_cast<int64_t>(dist_.size()) != static_cast<int64_t>(size) * size || den < 1)
    throw Error("ValidationError", "distance table shape");
}

FiniteMetricSpace FiniteMetricSpace::Discrete(int size) {
  std::vector<int64_t> d(static_cast<size_t>(size) * size, 1);
  for (int i = 0; i < size; ++i) d[static_cast<size_t>(i) * size + i] = 0;
  return FiniteMetricSpace(size, std::move(d), 1);
}

FiniteMetricSpace FiniteMetricSpace::OfGroup(const FiniteGroup& group) {
  return FiniteMetricSpace(group.order(), group.metric_table(), group.metric_den());
}

std::string FiniteMetricSpace::Check() const {
  for (int a = 0; a < size_; ++a)
    for (int b = 0; b < size_; ++b) {
      int64_t d = DistNum(a, b);
      if (d < 0 || d > den_) return "distance outside [0,1]";
      if (d != DistNum(b, a)) return "not symmetric";
      if ((d == 0) != (a == b)) return "identity of indiscernibles fails";
      for (int c = 0; c < size_; ++c)
        if (d > DistNum(a, c) + DistNum(c, b)) return "triangle inequality fails";
    }
  return {};
}

EmpiricalDistribution::EmpiricalDistribution(std::shared_ptr<const FiniteMetricSpace> space,
                                             std::vector<int64_t> mass)
    : space_(std::move(space)), mass_(std::move(mass)) {
  if (static_cast<int>(mass_.size()) != space_->size())
    throw Error("ValidationError", "mass vector length differs from space size");
  for (int64_t m : mass_) {
    if (m < 0) throw Error("ValidationError", "negative mass");
    total_ += m;
  }
  if (total_ <= 0) throw Error("ValidationError", "zero total mass");
}

EmpiricalDistribution EmpiricalDistribution::FromWeights(
    std::shared_ptr<const FiniteMetricSpace> space, const std::vector<double>& weights) {
  constexpr int64_t kScale = int64_t{1} << 40;
  double sum = 0;
  for (double w : weights) {
    if (w < 0) throw Error("ValidationError", "negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw Error("ValidationError", "weights do not sum to 1");
  std::vector<int64_t> mass(weights.size());
  int64_t total = 0;
  size_t largest = 0;
  for (size_t i = 0; i < weights.size(); ++i) {
    mass[i] = std::llround(weights[i] * static_cast<double>(kScale));
    total += mass[i];
    if (weights[i] > weights[largest]) largest = i;
  }
  // The correction keeps every quantized distribution at the same total.
  mass[largest] += kScale - total;
  return EmpiricalDistribution(std::move(space), std::move(mass));
}

namespace {

ExactDistance TransportExact(const std::vector<int64_t>& m1, int64_t t1,
                             const std::vector<int64_t>& m2, int64_t t2,
                             const std::vector<TransportEdge>& cheap, int64_t den,
                             bool cancel_diagonal) {
  // Common scale t1*t2/gcd; both sides then carry the same total.
  int64_t g = std::gcd(t1, t2);
  __int128 s1 = t2 / g, s2 = t1 / g;
  __int128 total = static_cast<__int128>(t1) * s1;
  if (total > (static_cast<__int128>(1) << 62)) throw Error("Overflow", "transport totals too large");
  std::vector<int64_t> a(m1.size()), b(m2.size());
  for (size_t i = 0; i < m1.size(); ++i) a[i] = static_cast<int64_t>(m1[i] * s1);
  for (size_t j = 0; j < m2.size(); ++j) b[j] = static_cast<int64_t>(m2[j] * s2);
  if (cancel_diagonal) {
    // Transport cost under a metric depends only on the signed difference.
    for (size_t i = 0; i < a.size(); ++i) {
      int64_t c = std::min(a[i], b[i]);
      a[i] -= c;
      b[i] -= c;
    }
  }
  return {SolveTransport(a, b, cheap, den), total * den};
}

double TransportValue(const std::vector<int64_t>& m1, int64_t t1, const std::vector<int64_t>& m2,
                      int64_t t2, const std::vector<TransportEdge>& cheap, int64_t den,
                      bool cancel_diagonal) {
  return TransportExact(m1, t1, m2, t2, cheap, den, cancel_diagonal).value();
}

}  // namespace

ExactDistance KantorovichExact(const EmpiricalDistribution& d1, const EmpiricalDistribution& d2) {
  if (d1.space_ptr() != d2.space_ptr()) {
    const FiniteMetricSpace& s1 = d1.space();
    const FiniteMetricSpace& s2 = d2.space();
    bool same = s1.size() == s2.size() && s1.den() == s2.den();
    for (int a = 0; same && a < s1.size(); ++a)
      for (int b = 0; same && b < s1.size(); ++b) same = s1.DistNum(a, b) == s2.DistNum(a, b);
    if (!same) throw Error("SpaceMismatch", "distributions live in different metric spaces");
  }
  const FiniteMetricSpace& space = d1.space();
  std::vector<TransportEdge> cheap;
  for (int a = 0; a < space.size(); ++a)
    for (int b = 0; b < space.size(); ++b)
      if (a != b && space.DistNum(a, b) < space.den()) cheap.push_back({a, b, space.DistNum(a, b)});
  return TransportExact(d1.mass(), d1.total(), d2.mass(), d2.total(), cheap, space.den(), true);
}

double Kantorovich(const EmpiricalDistribution& d1, const EmpiricalDistribution& d2) {
  return KantorovichExact(d1, d2).value();
}

int64_t NameDistanceNum(const NameBlock& a, const NameBlock& b, const FiniteGroup& group) {
  const int m = group.order();
  int64_t worst = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) continue;
    if (a[i] / m != b[i] / m) return group.metric_den();
    worst = std::max(worst, group.MetricNum(a[i] % m, b[i] % m));
  }
  return worst;
}

double NameKantorovich(const NameDistribution& d1, const NameDistribution& d2,
                       const FiniteGroup& group) {
  if (d1.total <= 0 || d2.total <= 0) throw Error("ValidationError", "empty name distribution");
  // Union of supports in sorted order; index i is shared by both sides.
  std::vector<const NameBlock*> atoms;
  std::vector<int64_t> m1, m2;
  auto it1 = d1.counts.begin(), it2 = d2.counts.begin();
  while (it1 != d1.counts.end() || it2 != d2.counts.end()) {
    if (it2 == d2.counts.end() || (it1 != d1.counts.end() && it1->first < it2->first)) {
      atoms.push_back(&it1->first);
      m1.push_back(it1->second);
      m2.push_back(0);
      ++it1;
    } else if (it1 == d1.counts.end() || it2->first < it1->first) {
      atoms.push_back(&it2->first);
      m1.push_back(0);
      m2.push_back(it2->second);
      ++it2;
    } else {
      atoms.push_back(&it1->first);
      m1.push_back(it1->second);
      m2.push_back(it2->second);
      ++it1;
      ++it2;
    }
  }
  const int64_t den = group.metric_den();
  std::vector<TransportEdge> cheap;
  if (group.order() > 1) {
    // Pairs below the diameter share the label sequence.
    const int m = group.order();
    std::map<std::vector<int>, std::vector<int>> by_labels;
    for (size_t i = 0; i < atoms.size(); ++i) {
      if (m1[i] == m2[i]) continue;
      std::vector<int> key(atoms[i]->size());
      for (size_t c = 0; c < key.size(); ++c) key[c] = (*atoms[i])[c] / m;
      by_labels[key].push_back(static_cast<int>(i));
    }
    for (const auto& [key, members] : by_labels)
      for (int a : members)
        for (int b : members) {
          if (a == b || m1[a] <= m2[a] || m2[b] <= m1[b]) continue;
          int64_t d = NameDistanceNum(*atoms[a], *atoms[b], group);
          if (d < den) cheap.push_back({a, b, d});
        }
  }
  return TransportValue(m1, d1.total, m2, d2.total, cheap, den, true);
}

NameDistribution BlockDistribution(const std::vector<NamePoint>& name, int n,
                                   const std::vector<int>& positions, int group_order) {
  NameDistribution out;
  NameBlock block(n);
  for (int i : positions) {
    if (i < 0 || static_cast<size_t>(i) + n > name.size())
      throw Error("PositionOutOfRange", "block at " + std::to_string(i));
    for (int c = 0; c < n; ++c) block[c] = PackCoordinate(name[i + c], group_order);
    out.Add(block);
  }
  return out;
}

NameDistribution SystemBlockDistribution(const GExtensionSystem& ext, int n) {
  NameDistribution out;
  const int m = ext.group.order();
  NameBlock block(n);
  for (int x = 0; x < ext.size; ++x)
    for (int g = 0; g < m; ++g) {
      SkewPoint p{x, g};
      for (int c = 0; c < n; ++c) {
        block[c] = ext.labels[p.x] * m + p.g;
        p = {ext.Step(p.x), ext.group.Mul(ext.sigma[p.x], p.g)};
      }
      out.Add(block);
    }
  return out;
}

std::vector<int> ContinuityPartition(const FiniteMetricSpace& space, double diameter_bound) {
  std::vector<int> cell(space.size(), -1);
  std::vector<std::vector<int>> members;
  for (int p = 0; p < space.size(); ++p) {
    for (size_t c = 0; c < members.size() && cell[p] < 0; ++c) {
      bool fits = true;
      for (int q : members[c]) fits = fits && space.Dist(p, q) < diameter_bound;
      if (fits) {
        cell[p] = static_cast<int>(c);
        members[c].push_back(p);
      }
    }
    if (cell[p] < 0) {
      cell[p] = static_cast<int>(members.size());
      members.push_back({p});
    }
  }
  return cell;
}

std::vector<int> TranslateSequence(const std::vector<int>& gamma, int h, const FiniteGroup& group) {
  std::vector<int> out(gamma.size());
  for (size_t i = 0; i < gamma.size(); ++i) out[i] = group.Mul(gamma[i], h);
  return out;
}

EmpiricalDistribution GroupSequenceDistribution(const std::vector<int>& gamma,
                                                std::shared_ptr<const FiniteMetricSpace> space) {
  std::vector<int64_t> mass(space->size(), 0);
  for (int g : gamma) ++mass[g];
  return EmpiricalDistribution(std::move(space), std::move(mass));
}

EmpiricalDistribution HaarDistribution(std::shared_ptr<const FiniteMetricSpace> space) {
  std::vector<int64_t> mass(space->size(), 1);
  return EmpiricalDistribution(std::move(space), std::move(mass));
}

DensityBound DensityLowerBound(const std::vector<int>& gamma, const std::vector<int>& a_set,
                               double epsilon, const FiniteGroup& group) {
  std::vector<char> in_a(group.order(), 0);
  for (int a : a_set) in_a[a] = 1;
  int64_t best = static_cast<int64_t>(gamma.size());
  for (int h = 0; h < group.order(); ++h) {
    int64_t hits = 0;
    for (int g : gamma) hits += in_a[group.Mul(g, h)];
    best = std::min(best, hits);
  }
  DensityBound out;
  out.fraction = static_cast<double>(best) / static_cast<double>(gamma.size());
  double lambda = static_cast<double>(a_set.size()) / group.order();
  out.holds = out.fraction >= lambda - epsilon;
  return out;
}

double DensityModulus(const std::vector<int>& a_set, double epsilon, const FiniteGroup& group) {
  std::vector<char> in_a(group.order(), 0);
  for (int a : a_set) in_a[a] = 1;
  double gap = 1.0;
  for (int a = 0; a < group.order(); ++a)
    for (int b = 0; b < group.order(); ++b)
      if (in_a[a] && !in_a[b]) gap = std::min(gap, group.Rho(a, b));
  double eta = 0.0;
  for (int k = 64; k >= 1; --k) {
    double candidate = epsilon * k / 64.0;
    if (candidate / gap <= epsilon) {
      eta = candidate;
      break;
    }
  }
  return eta;
}

}  // namespace speedup
