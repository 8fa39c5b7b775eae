#pragma once

#include <functional>
#include <vector>

#include "speedup/distributions.hpp"
#include "speedup/systems.hpp"

namespace speedup {

struct ModelNameConfig {
  int n = 1;
  int n1 = 1;
  int length = 0;  // |F|, a multiple of n1; grown by n1 while (d) fails
  int max_length = 0;
  double tolerance_ab = 0.0;  // certificate bound for (a) and (b)
  double tolerance_c = 1.0;   // certificate bound for (c)
  int min_atom_count = 1;     // K in (d)
  int start_stride = 1;       // candidate starts along the target skew cycle; 0 spreads
                              // max_candidates starts over the whole cycle
  int max_candidates = 256;
};

// Atom index of an n-name; -1 for names outside every atom.
using NamePartition = std::function<int(const NameBlock&)>;

struct ModelName {
  int n = 0;
  int n1 = 0;
  std::vector<NamePoint> F;
  // Target point (x, g) whose (P v c)-name coordinate is F[s].
  std::vector<SkewPoint> source_points;
  int start = 0;  // offset along the skew cycle through (0, id)
  double distance_a = 0.0;  // all n1-blocks of F vs the target
  double distance_b = 0.0;  // disjoint n1-blocks of F vs the target
  double worst_c = 0.0;     // worst n-block distribution of an n1-block H_k
  int min_atom_count = 0;   // smallest count of a target-charged Q atom among F's n-blocks
  bool a_ok = false, b_ok = false, c_ok = false, d_ok = false;
  int length() const { return static_cast<int>(F.size()); }
  int blocks() const { return length() / n; }
  NameBlock Block(int i, int group_order) const;
};

// F is the (P v c)-name of a target skew-orbit segment. The start minimizes
// max(distance_a, distance_b) over the candidates (lowest start on ties);
// the length grows by n1 until (d) holds. Throws Infeasible when (d) fails at
// max_length; (a)-(c) are certified by measurement.
// F is compared to the target without translating it over G. Since the target
// distribution is translation invariant, closeness from one starting element
// gives the same closeness from every element.
ModelName BuildModelName(const GExtensionSystem& target, const ModelNameConfig& config,
                         const NamePartition& q_atom, int q_atoms);

}  // namespace speedup
