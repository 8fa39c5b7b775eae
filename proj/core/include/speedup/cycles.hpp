#pragma once

#include <vector>

#include "speedup/errors.hpp"

namespace speedup {

// w windows of length M in [M'], window s starting at u[s]; u increases with
// gaps >= M and u[s] + M <= M'.
struct WindowSystem {
  int window_length = 0;  // M
  int span = 0;           // M'
  std::vector<int> starts;  // u
  int count() const { return static_cast<int>(starts.size()); }
  int Position(int s, int j) const { return starts[s] + j; }
  // Throws ValidationError on a gap or range violation.
  void Check() const;
  static WindowSystem Tiled(int window_length, int count);
};

// Stage j of pass l: window jp+l+i supplies offset t(i). Stages exist while
// jp + l + p <= w, so every stage visits p whole windows.
struct Stage {
  int pass = 0;
  int index = 0;
  std::vector<int> positions;  // g^l_j(i), strictly increasing
};

struct Cycle {
  int p = 0;
  int sample = 0;
  std::vector<Stage> stages;
};

// offsets[s][i]: offset in window s used by block index i (-1 when window s
// supplies no point for i). One Cycle per sample.
using WindowSamples = std::vector<std::vector<int>>;

int StageCount(int w, int p, int pass);

// samples[t][s][i]. Throws Collision when two tuples hit one position, and
// ValidationError when a stage needs an undefined offset.
std::vector<Cycle> BuildCycles(const WindowSystem& windows,
                               const std::vector<WindowSamples>& samples, int p);

// Number of (l, j, i) with jp + l + i = s over all complete stages.
std::vector<int> CoveringMultiplicity(int w, int p);

}  // namespace speedup
