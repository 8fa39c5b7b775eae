#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "speedup/systems.hpp"

namespace speedup {

// Distances are dist_num / den with 0 <= dist_num <= den.
class FiniteMetricSpace {
 public:
  FiniteMetricSpace(int size, std::vector<int64_t> dist_num, int64_t den);
  // Every pair of distinct points at distance 1.
  static FiniteMetricSpace Discrete(int size);
  // The group itself under rho.
  static FiniteMetricSpace OfGroup(const FiniteGroup& group);

  int size() const { return size_; }
  int64_t DistNum(int a, int b) const { return dist_[static_cast<size_t>(a) * size_ + b]; }
  int64_t den() const { return den_; }
  double Dist(int a, int b) const { return static_cast<double>(DistNum(a, b)) / den_; }
  // Empty when the metric axioms and the diameter bound hold.
  std::string Check() const;

 private:
  int size_;
  std::vector<int64_t> dist_;
  int64_t den_;
};

// Weights are integer masses over `total`, so exact rational distributions
// (counts) pass through unchanged; real weights are quantized at 2^-40.
class EmpiricalDistribution {
 public:
  EmpiricalDistribution(std::shared_ptr<const FiniteMetricSpace> space, std::vector<int64_t> mass);
  static EmpiricalDistribution FromWeights(std::shared_ptr<const FiniteMetricSpace> space,
                                           const std::vector<double>& weights);

  const FiniteMetricSpace& space() const { return *space_; }
  const std::shared_ptr<const FiniteMetricSpace>& space_ptr() const { return space_; }
  const std::vector<int64_t>& mass() const { return mass_; }
  int64_t total() const { return total_; }
  double Weight(int i) const { return static_cast<double>(mass_[i]) / static_cast<double>(total_); }

 private:
  std::shared_ptr<const FiniteMetricSpace> space_;
  std::vector<int64_t> mass_;
  int64_t total_ = 0;
};

// num / den in lowest terms is not guaranteed; compare by cross-multiplying.
struct ExactDistance {
  __int128 num = 0;
  __int128 den = 1;
  double value() const {
    return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
  }
};

// Exact optimal transport value; throws Error("SpaceMismatch").
ExactDistance KantorovichExact(const EmpiricalDistribution& d1, const EmpiricalDistribution& d2);
double Kantorovich(const EmpiricalDistribution& d1, const EmpiricalDistribution& d2);

// A block of n (label, group element) coordinates packed as label*|G| + g.
using NameBlock = std::vector<int>;

inline int PackCoordinate(NamePoint p, int group_order) { return p.label * group_order + p.g; }

// max over coordinates of (1 if labels differ else rho(g, g')), as a
// numerator over group.metric_den().
int64_t NameDistanceNum(const NameBlock& a, const NameBlock& b, const FiniteGroup& group);

// Multiset of name blocks, kept sorted for deterministic iteration.
struct NameDistribution {
  std::map<NameBlock, int64_t> counts;
  int64_t total = 0;
  void Add(const NameBlock& b, int64_t c = 1) {
    counts[b] += c;
    total += c;
  }
};

// Exact Kantorovich distance between two name distributions under the block
// metric. The common part is cancelled first; only pairs sharing a label
// sequence can cost less than the diameter.
double NameKantorovich(const NameDistribution& d1, const NameDistribution& d2,
                       const FiniteGroup& group);

// Blocks s[i .. i+n) for i in positions; throws Error("PositionOutOfRange").
NameDistribution BlockDistribution(const std::vector<NamePoint>& name, int n,
                                   const std::vector<int>& positions, int group_order);

// n-names of every point of X x G under the skew map.
NameDistribution SystemBlockDistribution(const GExtensionSystem& ext, int n);

// Greedy partition in index order into cells of diameter < bound.
std::vector<int> ContinuityPartition(const FiniteMetricSpace& space, double diameter_bound);

std::vector<int> TranslateSequence(const std::vector<int>& gamma, int h, const FiniteGroup& group);

// Distribution of a group-valued sequence over the group's own metric space.
EmpiricalDistribution GroupSequenceDistribution(const std::vector<int>& gamma,
                                                std::shared_ptr<const FiniteMetricSpace> space);
EmpiricalDistribution HaarDistribution(std::shared_ptr<const FiniteMetricSpace> space);

struct DensityBound {
  double fraction = 0.0;  // min over h of the frequency of A among gamma(i) h
  bool holds = false;     // fraction >= lambda(A) - epsilon
};
DensityBound DensityLowerBound(const std::vector<int>& gamma, const std::vector<int>& a_set,
                               double epsilon, const FiniteGroup& group);

// Largest eta on the grid epsilon * k / 64 such that every distribution
// within eta of Haar gives A frequency >= lambda(A) - epsilon under every
// right translate; removing mass t from a translate of A costs at least
// t * dist(A, complement).
double DensityModulus(const std::vector<int>& a_set, double epsilon, const FiniteGroup& group);

}  // namespace speedup
