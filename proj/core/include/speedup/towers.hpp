#pragma once

#include <string>
#include <vector>

#include "speedup/systems.hpp"

namespace speedup {

// Tower for the base cycle x -> x+1: levels base + i, i < height.
struct RokhlinTower {
  int size = 0;
  std::vector<int> base;
  int height = 0;
  double coverage = 0.0;     // height * |base| / size
  double base_distance = 0.0;  // kantorovich(dist_B(f), dist_X(f)), discrete metric on f-values
};

// Base points b + j*K, j < floor(N/K); the offset b in [K] minimizes the
// distance between the base and global distributions of f (lowest b on ties).
// Throws Infeasible.
RokhlinTower BuildTower(int size, int height, double epsilon, const std::vector<int>& f,
                        double zeta);

struct Column {
  std::vector<int> base;  // tower base points sharing all tagged level values
  // level_values[i][k]: value of observable k on level i (constant by construction).
  std::vector<std::vector<int>> level_values;
  std::vector<int> sigma_representative;  // sigma along the levels of base[0]
};

// Columns are groups of tower base points whose observable names agree
// exactly and whose sigma names stay within zeta_prime level by level.
std::vector<Column> PureColumns(const RokhlinTower& tower,
                                const std::vector<std::vector<int>>& observables,
                                const GExtensionSystem& ext, double zeta_prime);

struct Ladder {
  int n = 0;
  int height = 0;
  // Initial base points of every ladder block, tower order.
  std::vector<int> rungs;
  // Base points of each block in order; blocks[r][i] = S'^i(rungs[r]).
  std::vector<std::vector<int>> blocks;
};

// Throws NotMultiple when n does not divide the tower height, or
// ValidationError when the speedup carries no tower.
Ladder BuildLadder(const PartialSpeedup& speedup, int n);

// Mass of points of X x G lying in a ladder block where `other` disagrees
// with the owner at some block offset i <= n-2.
double BrokenFraction(const Ladder& ladder, const PartialSpeedup& owner,
                      const PartialSpeedup& other);

// One character per column, one line per level (top level first).
std::string RenderColumns(const std::vector<Column>& columns, int observable);

}  // namespace speedup
