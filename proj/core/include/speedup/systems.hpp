#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "speedup/errors.hpp"

namespace speedup {

// Table-driven finite group with a two-sided invariant metric rho <= 1.
// rho(a, b) = metric_num(a, b) / metric_den exactly; integer numerators keep
// every transport cost exact.
class FiniteGroup {
 public:
  // The trivial group.
  FiniteGroup() : cyclic_order_(1), mul_{0}, inv_{0}, metric_num_{0} {}

  // Z/m with rho(a, b) = min(|a-b|, m-|a-b|) / floor(m/2).
  static FiniteGroup Cyclic(int order);
  // Throws Error("ValidationError") naming the first violated invariant.
  static FiniteGroup FromTables(std::vector<int> mul, std::vector<int64_t> metric_num,
                                int64_t metric_den);

  int order() const { return order_; }
  int identity() const { return identity_; }
  int Mul(int a, int b) const { return mul_[a * order_ + b]; }
  int Inv(int a) const { return inv_[a]; }
  int64_t MetricNum(int a, int b) const { return metric_num_[a * order_ + b]; }
  int64_t metric_den() const { return metric_den_; }
  double Rho(int a, int b) const {
    return static_cast<double>(MetricNum(a, b)) / static_cast<double>(metric_den_);
  }
  double Haar(int) const { return 1.0 / order_; }
  // 0 for groups given by explicit tables.
  int cyclic_order() const { return cyclic_order_; }
  const std::vector<int>& mul_table() const { return mul_; }
  const std::vector<int64_t>& metric_table() const { return metric_num_; }

  // Empty string when all invariants hold.
  std::string Check() const;

  bool operator==(const FiniteGroup& o) const {
    return order_ == o.order_ && mul_ == o.mul_ && metric_num_ == o.metric_num_ &&
           metric_den_ == o.metric_den_;
  }

 private:
  int order_ = 1;
  int identity_ = 0;
  int cyclic_order_ = 0;
  std::vector<int> mul_;
  std::vector<int> inv_;
  std::vector<int64_t> metric_num_;
  int64_t metric_den_ = 1;
};

// Base map is x -> x+1 mod size; the skew map is S(x, g) = (x+1, sigma(x) g).
struct GExtensionSystem {
  int size = 0;
  std::vector<int> labels;
  FiniteGroup group;
  std::vector<int> sigma;

  int Step(int x) const { return x + 1 == size ? 0 : x + 1; }
  int alphabet_size() const;
  // Empty string when valid.
  std::string Check() const;
  bool operator==(const GExtensionSystem& o) const = default;
};

struct NamePoint {
  int label = 0;
  int g = 0;
  bool operator==(const NamePoint&) const = default;
};

struct SkewPoint {
  int x = 0;
  int g = 0;
  bool operator==(const SkewPoint&) const = default;
};

// (P v c)-name of S^i(start), i < length.
std::vector<NamePoint> SkewOrbit(const GExtensionSystem& ext, SkewPoint start, int length);

// sigma(T^{k-1}x) ... sigma(Tx) sigma(x).
int CocycleProduct(const GExtensionSystem& ext, int x, int k);

// alpha(x) for every base point.
using TwistFunction = std::vector<int>;

TwistFunction IdentityTwist(const GExtensionSystem& ext);
// sigma'(x) = alpha(Tx) sigma(x) alpha(x)^{-1}.
GExtensionSystem Twist(const GExtensionSystem& ext, const TwistFunction& alpha);
// Pointwise product (outer * inner)(x); twisting by inner then outer equals
// twisting by the product.
TwistFunction ComposeTwists(const FiniteGroup& group, const TwistFunction& outer,
                            const TwistFunction& inner);
// Integral of rho(alpha(x), id) over the uniform base measure.
double TwistSize(const FiniteGroup& group, const TwistFunction& alpha);

// Tower structure shared by regular speedups: base points and height L.
// Levels are S'^i(base), i < L; the domain is the union of levels i < L-1.
struct SpeedupTower {
  std::vector<int> base;
  int height = 0;
};

// Partial speedup S'(x, g) = S0^{k(x)}(x, g). exponent[x] == 0 marks x outside
// the domain; 1 <= exponent <= k_max inside. Fiber constancy is structural
// because the exponent is indexed by the base coordinate alone.
class PartialSpeedup {
 public:
  PartialSpeedup() = default;
  // Throws Error("ValidationError") if the induced base map is not injective
  // or an exponent exceeds k_max.
  PartialSpeedup(std::shared_ptr<const GExtensionSystem> parent, std::vector<int> exponent,
                 int k_max);

  static PartialSpeedup Trivial(std::shared_ptr<const GExtensionSystem> parent);

  const GExtensionSystem& parent() const { return *parent_; }
  std::shared_ptr<const GExtensionSystem> parent_ptr() const { return parent_; }
  const std::vector<int>& exponent() const { return exponent_; }
  int k_max() const { return k_max_; }
  bool InDomain(int x) const { return exponent_[x] > 0; }
  int BaseImage(int x) const;
  // sigma^{(k(x))}(x).
  int Skew(int x) const { return skew_[x]; }
  // Throws Error("OutOfDomain").
  SkewPoint Apply(SkewPoint p) const;
  double DomainMass() const;

  const SpeedupTower* tower() const { return tower_.height > 0 ? &tower_ : nullptr; }
  void set_tower(SpeedupTower t) { tower_ = std::move(t); }

  // Same exponent and k_max over another parent (e.g. a twist of this one).
  PartialSpeedup Reparent(std::shared_ptr<const GExtensionSystem> parent) const;

 private:
  std::shared_ptr<const GExtensionSystem> parent_;
  std::vector<int> exponent_;
  std::vector<int> skew_;
  int k_max_ = 0;
  SpeedupTower tower_;
};

struct ErgodicityWitness {
  bool ergodic = false;
  // sigma^{(N)}(0) and its order; the skew cycle through (0, id) has length
  // size * holonomy_order.
  int holonomy = 0;
  int holonomy_order = 0;
  int64_t cycle_length = 0;
};

ErgodicityWitness CheckExtensionErgodic(const GExtensionSystem& ext);

}  // namespace speedup
