#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "speedup/driver.hpp"

namespace speedup::fixtures {

// One marked point at x = (N - shift) mod N on a cycle of length N. For
// nontrivial G the skew is the identity except one generator step placed
// away from the mark, so the extension is a single cycle.
inline GExtensionSystem MarkedCycle(int size, int order, int shift) {
  GExtensionSystem s;
  s.size = size;
  s.group = FiniteGroup::Cyclic(order);
  for (int x = 0; x < size; ++x) {
    s.labels.push_back((x + shift) % size == 0 ? 1 : 0);
    s.sigma.push_back(0);
  }
  if (order > 1) s.sigma[((size / 2 - 1 - shift) % size + size) % size] = 1;
  return s;
}

// Labels alternate with phase `shift`; every label-1 point also steps the
// group. The last skew value is toggled when needed to make one cycle.
inline GExtensionSystem AlternatingSkew(int size, int order, int shift) {
  GExtensionSystem s;
  s.size = size;
  s.group = FiniteGroup::Cyclic(order);
  for (int x = 0; x < size; ++x) {
    int marked = (x + shift) % 2 == 0;
    s.labels.push_back(marked);
    s.sigma.push_back(order > 1 && marked ? 1 : 0);
  }
  if (order > 1 && !CheckExtensionErgodic(s).ergodic) s.sigma[size - 1] ^= 1;
  return s;
}

// Target of the trivial-group single-step pair: one marked point.
inline GExtensionSystem SingleStepTarget(int size, int order) {
  return MarkedCycle(size, order, 0);
}

// Its source: the same mark half a cycle away plus a second mark, so the
// labels differ from the target's.
inline GExtensionSystem SingleStepSource(int size, int order) {
  GExtensionSystem s = MarkedCycle(size, order, size / 2 + 1);
  s.labels[size / 4] = 1;
  return s;
}

// Target of the Z/2 loop pair: alternating labels with one flipped label so
// the names separate points.
inline GExtensionSystem LoopTarget(int size) {
  GExtensionSystem s = AlternatingSkew(size, 2, 0);
  s.labels[size / 2] ^= 1;
  return s;
}

// Its source: the opposite phase with a label flip every `period` points.
inline GExtensionSystem LoopSource(int size, int period) {
  GExtensionSystem s = AlternatingSkew(size, 2, 1);
  for (int x = period / 2; x < size; x += period) s.labels[x] ^= 1;
  return s;
}

// Base residues r mod 3, paired with the identity of G.
inline std::vector<Rectangle> ResidueRectangles(int size, int count) {
  std::vector<Rectangle> out(count);
  for (int r = 0; r < count; ++r) {
    for (int x = r; x < size; x += 3) out[r].a1.push_back(x);
    out[r].a2 = {0};
  }
  return out;
}

// Packed points x * |G| + g of each (label, g) class, at most `limit` sets.
inline std::vector<std::vector<int>> LabelGroupClasses(const std::vector<int>& labels,
                                                       int order, size_t limit) {
  std::vector<std::vector<int>> out;
  int alphabet = 0;
  for (int l : labels) alphabet = std::max(alphabet, l + 1);
  for (int l = 0; l < alphabet && out.size() < limit; ++l)
    for (int g = 0; g < order && out.size() < limit; ++g) {
      std::vector<int> set;
      for (size_t x = 0; x < labels.size(); ++x)
        if (labels[x] == l) set.push_back(static_cast<int>(x) * order + g);
      if (!set.empty()) out.push_back(std::move(set));
    }
  return out;
}

inline GExtensionSystem RandomSystem(std::mt19937_64& rng, int size, int order, int alphabet) {
  GExtensionSystem s;
  s.size = size;
  s.group = FiniteGroup::Cyclic(order);
  for (int x = 0; x < size; ++x) {
    s.labels.push_back(static_cast<int>(rng() % alphabet));
    s.sigma.push_back(static_cast<int>(rng() % order));
  }
  return s;
}

}  // namespace speedup::fixtures
