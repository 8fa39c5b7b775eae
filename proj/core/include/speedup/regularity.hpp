#pragma once

#include <string>
#include <vector>

#include "speedup/distributions.hpp"
#include "speedup/systems.hpp"

namespace speedup {

struct RegularityCertificate {
  int n = 0;
  double delta = 0.0;
  std::vector<int> tower_base;
  int height = 0;
  // Condition 1: disjoint levels and domain = levels below the top.
  bool disjoint_tower = false;
  // Condition 2.
  bool bounded_exponent = false;
  int max_exponent = 0;
  // Condition 3: every base point with the same starting group element sees
  // the same (labels v c)-name along the tower.
  bool fiberwise_identical = false;
  // Condition 4.
  bool height_multiple = false;
  double max_ladder_distance = 0.0;
  bool ladder_close = false;
  // Condition 5.
  double domain_mass = 0.0;
  bool domain_large = false;
  // Name of the first failed condition; empty when (n, delta)-regular.
  std::string refusal;
  bool regular() const { return refusal.empty(); }
};

// Names follow the skew coordinates of `speedup.parent()` with labels taken
// from `labels` (a partition of the base). Never throws on failed conditions.
RegularityCertificate CheckRegular(const PartialSpeedup& speedup, const std::vector<int>& labels,
                                   int n, double delta);

// (labels v c)-name of the speedup orbit of (x, g), `length` points, stopping
// early when the orbit leaves the domain.
std::vector<NamePoint> SpeedupOrbitName(const PartialSpeedup& speedup,
                                        const std::vector<int>& labels, SkewPoint start,
                                        int length);

// n-distribution over Dom(S'^n) x G: blocks whose first n points stay in the
// domain for n applications.
NameDistribution SpeedupBlockDistribution(const PartialSpeedup& speedup,
                                          const std::vector<int>& labels, int n);

}  // namespace speedup
