#include "speedup/systems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace speedup {

FiniteGroup FiniteGroup::Cyclic(int order) {
  if (order < 1) throw Error("ValidationError", "group order must be positive");
  FiniteGroup g;
  g.order_ = order;
  g.identity_ = 0;
  g.cyclic_order_ = order;
  g.mul_.resize(static_cast<size_t>(order) * order);
  g.inv_.resize(order);
  g.metric_num_.resize(static_cast<size_t>(order) * order);
  g.metric_den_ = std::max(1, order / 2);
  for (int a = 0; a < order; ++a) {
    g.inv_[a] = (order - a) % order;
    for (int b = 0; b < order; ++b) {
      g.mul_[a * order + b] = (a + b) % order;
      int d = std::abs(a - b);
      g.metric_num_[a * order + b] = std::min<int64_t>(std::min(d, order - d), g.metric_den_);
    }
  }
  return g;
}

FiniteGroup FiniteGroup::FromTables(std::vector<int> mul, std::vector<int64_t> metric_num,
                                    int64_t metric_den) {
  FiniteGroup g;
  const size_t m2 = mul.size();
  int m = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m2))));
  if (m < 1 || static_cast<size_t>(m) * m != m2)
    throw Error("ValidationError", "mul table is not square");
  if (metric_num.size() != m2) throw Error("ValidationError", "metric table size differs from mul");
  if (metric_den < 1) throw Error("ValidationError", "metric denominator must be positive");
  for (int v : mul)
    if (v < 0 || v >= m) throw Error("ValidationError", "mul entry out of range");
  g.order_ = m;
  g.mul_ = std::move(mul);
  g.metric_num_ = std::move(metric_num);
  g.metric_den_ = metric_den;
  g.identity_ = -1;
  for (int e = 0; e < m && g.identity_ < 0; ++e) {
    bool ok = true;
    for (int a = 0; a < m && ok; ++a) ok = g.Mul(e, a) == a && g.Mul(a, e) == a;
    if (ok) g.identity_ = e;
  }
  if (g.identity_ < 0) throw Error("ValidationError", "no identity element");
  g.inv_.assign(m, -1);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      if (g.Mul(a, b) == g.identity_ && g.Mul(b, a) == g.identity_) g.inv_[a] = b;
  std::string problem = g.Check();
  if (!problem.empty()) throw Error("ValidationError", problem);
  return g;
}

std::string FiniteGroup::Check() const {
  const int m = order_;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c)
        if (Mul(Mul(a, b), c) != Mul(a, Mul(b, c))) return "mul is not associative";
  for (int a = 0; a < m; ++a) {
    if (Mul(identity_, a) != a || Mul(a, identity_) != a) return "identity law fails";
    if (inv_[a] < 0 || Mul(a, inv_[a]) != identity_ || Mul(inv_[a], a) != identity_)
      return "inverse law fails";
  }
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      int64_t d = MetricNum(a, b);
      if (d < 0 || d > metric_den_) return "metric value outside [0,1]";
      if (d != MetricNum(b, a)) return "metric is not symmetric";
      if ((d == 0) != (a == b)) return "metric violates identity of indiscernibles";
      for (int c = 0; c < m; ++c)
        if (d > MetricNum(a, c) + MetricNum(c, b)) return "metric violates triangle inequality";
    }
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int h = 0; h < m; ++h)
        if (MetricNum(Mul(a, h), Mul(b, h)) != MetricNum(a, b) ||
            MetricNum(Mul(h, a), Mul(h, b)) != MetricNum(a, b))
          return "metric is not two-sided invariant";
  return {};
}

int GExtensionSystem::alphabet_size() const {
  int top = 0;
  for (int p : labels) top = std::max(top, p + 1);
  return top;
}

std::string GExtensionSystem::Check() const {
  if (size < 1) return "size must be positive";
  if (static_cast<int>(labels.size()) != size) return "labels length differs from size";
  if (static_cast<int>(sigma.size()) != size) return "sigma length differs from size";
  for (int p : labels)
    if (p < 0) return "labels must be nonnegative";
  for (int s : sigma)
    if (s < 0 || s >= group.order()) return "sigma entry outside the group";
  return {};
}

std::vector<NamePoint> SkewOrbit(const GExtensionSystem& ext, SkewPoint start, int length) {
  std::vector<NamePoint> out;
  out.reserve(length);
  SkewPoint p = start;
  for (int i = 0; i < length; ++i) {
    out.push_back({ext.labels[p.x], p.g});
    p = {ext.Step(p.x), ext.group.Mul(ext.sigma[p.x], p.g)};
  }
  return out;
}

int CocycleProduct(const GExtensionSystem& ext, int x, int k) {
  int acc = ext.group.identity();
  for (int i = 0; i < k; ++i) {
    acc = ext.group.Mul(ext.sigma[x], acc);
    x = ext.Step(x);
  }
  return acc;
}

TwistFunction IdentityTwist(const GExtensionSystem& ext) {
  return TwistFunction(ext.size, ext.group.identity());
}

GExtensionSystem Twist(const GExtensionSystem& ext, const TwistFunction& alpha) {
  GExtensionSystem out = ext;
  const FiniteGroup& G = ext.group;
  for (int x = 0; x < ext.size; ++x)
    out.sigma[x] = G.Mul(G.Mul(alpha[ext.Step(x)], ext.sigma[x]), G.Inv(alpha[x]));
  return out;
}

TwistFunction ComposeTwists(const FiniteGroup& group, const TwistFunction& outer,
                            const TwistFunction& inner) {
  TwistFunction out(outer.size());
  for (size_t x = 0; x < outer.size(); ++x) out[x] = group.Mul(outer[x], inner[x]);
  return out;
}

double TwistSize(const FiniteGroup& group, const TwistFunction& alpha) {
  int64_t num = 0;
  for (int a : alpha) num += group.MetricNum(a, group.identity());
  return static_cast<double>(num) /
         (static_cast<double>(group.metric_den()) * static_cast<double>(alpha.size()));
}

PartialSpeedup::PartialSpeedup(std::shared_ptr<const GExtensionSystem> parent,
                               std::vector<int> exponent, int k_max)
    : parent_(std::move(parent)), exponent_(std::move(exponent)), k_max_(k_max) {
  const int n = parent_->size;
  if (static_cast<int>(exponent_.size()) != n)
    throw Error("ValidationError", "exponent length differs from base size");
  std::vector<char> hit(n, 0);
  skew_.assign(n, parent_->group.identity());
  for (int x = 0; x < n; ++x) {
    int k = exponent_[x];
    if (k == 0) continue;
    if (k < 0 || k > k_max_) throw Error("ValidationError", "exponent outside [1, k_max]");
    int y = static_cast<int>((static_cast<int64_t>(x) + k) % n);
    if (hit[y]) throw Error("ValidationError", "induced base map is not injective");
    hit[y] = 1;
    skew_[x] = CocycleProduct(*parent_, x, k);
  }
}

PartialSpeedup PartialSpeedup::Trivial(std::shared_ptr<const GExtensionSystem> parent) {
  std::vector<int> k(parent->size, 1);
  return PartialSpeedup(std::move(parent), std::move(k), 1);
}

int PartialSpeedup::BaseImage(int x) const {
  return static_cast<int>((static_cast<int64_t>(x) + exponent_[x]) % parent_->size);
}

SkewPoint PartialSpeedup::Apply(SkewPoint p) const {
  if (!InDomain(p.x)) throw Error("OutOfDomain", "base point " + std::to_string(p.x));
  return {BaseImage(p.x), parent_->group.Mul(skew_[p.x], p.g)};
}

double PartialSpeedup::DomainMass() const {
  int64_t c = std::count_if(exponent_.begin(), exponent_.end(), [](int k) { return k > 0; });
  return static_cast<double>(c) / static_cast<double>(exponent_.size());
}

PartialSpeedup PartialSpeedup::Reparent(std::shared_ptr<const GExtensionSystem> parent) const {
  PartialSpeedup out(std::move(parent), exponent_, k_max_);
  out.tower_ = tower_;
  return out;
}

ErgodicityWitness CheckExtensionErgodic(const GExtensionSystem& ext) {
  ErgodicityWitness w;
  const FiniteGroup& G = ext.group;
  w.holonomy = CocycleProduct(ext, 0, ext.size);
  int order = 1;
  for (int h = w.holonomy; h != G.identity(); h = G.Mul(w.holonomy, h)) ++order;
  w.holonomy_order = order;
  w.cycle_length = static_cast<int64_t>(ext.size) * order;
  w.ergodic = order == G.order();
  return w;
}

}  // namespace speedup
