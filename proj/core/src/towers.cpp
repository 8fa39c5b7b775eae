#include "speedup/towers.hpp"

#include <algorithm>
#include <map>
#include <memory>

#include "speedup/distributions.hpp"

namespace speedup {

RokhlinTower BuildTower(int size, int height, double epsilon, const std::vector<int>& f,
                        double zeta) {
  if (height < 1 || height > size) throw Error("Infeasible", "height must lie in [1, N]");
  const int copies = size / height;
  const double residual = 1.0 - static_cast<double>(copies) * height / size;
  if (residual > epsilon + 1e-15)
    throw Error("Infeasible", "residual " + std::to_string(residual) + " exceeds epsilon");
  std::map<int, int> value_index;
  for (int v : f) value_index.emplace(v, 0);
  int next = 0;
  for (auto& [v, idx] : value_index) idx = next++;
  auto space = std::make_shared<const FiniteMetricSpace>(FiniteMetricSpace::Discrete(next));
  std::vector<int64_t> global_mass(next, 0);
  for (int v : f) ++global_mass[value_index[v]];
  EmpiricalDistribution global(space, global_mass);
  RokhlinTower best;
  best.size = size;
  best.height = height;
  best.coverage = static_cast<double>(copies) * height / size;
  best.base_distance = 2.0;
  for (int offset = 0; offset < height && offset + copies * height <= size; ++offset) {
    std::vector<int64_t> local(next, 0);
    for (int j = 0; j < copies; ++j) ++local[value_index[f[offset + j * height]]];
    double d = Kantorovich(EmpiricalDistribution(space, local), global);
    if (d < best.base_distance) {
      best.base_distance = d;
      best.base.clear();
      for (int j = 0; j < copies; ++j) best.base.push_back(offset + j * height);
    }
  }
  if (!(best.base_distance < zeta))
    throw Error("Infeasible", "base distribution distance " + std::to_string(best.base_distance) +
                                  " is not below zeta");
  return best;
}

std::vector<Column> PureColumns(const RokhlinTower& tower,
                                const std::vector<std::vector<int>>& observables,
                                const GExtensionSystem& ext, double zeta_prime) {
  std::vector<Column> columns;
  std::map<std::vector<int>, std::vector<size_t>> by_name;
  for (int b : tower.base) {
    std::vector<int> name;
    name.reserve(static_cast<size_t>(tower.height) * observables.size());
    for (int i = 0; i < tower.height; ++i)
      for (const auto& obs : observables) name.push_back(obs[(b + i) % tower.size]);
    std::vector<int> sig(tower.height);
    for (int i = 0; i < tower.height; ++i) sig[i] = ext.sigma[(b + i) % tower.size];
    auto& candidates = by_name[name];
    bool placed = false;
    for (size_t c : candidates) {
      bool close = true;
      for (int i = 0; i < tower.height && close; ++i)
        close = ext.group.Rho(sig[i], columns[c].sigma_representative[i]) < zeta_prime;
      if (close) {
        columns[c].base.push_back(b);
        placed = true;
        break;
      }
    }
    if (placed) continue;
    Column col;
    col.base.push_back(b);
    col.sigma_representative = sig;
    col.level_values.resize(tower.height);
    for (int i = 0; i < tower.height; ++i)
      for (const auto& obs : observables) col.level_values[i].push_back(obs[(b + i) % tower.size]);
    candidates.push_back(columns.size());
    columns.push_back(std::move(col));
  }
  return columns;
}

Ladder BuildLadder(const PartialSpeedup& speedup, int n) {
  const SpeedupTower* tower = speedup.tower();
  if (tower == nullptr) throw Error("ValidationError", "speedup carries no tower");
  if (n < 1 || tower->height % n != 0)
    throw Error("NotMultiple", std::to_string(n) + " does not divide " + std::to_string(tower->height));
  Ladder out;
  out.n = n;
  out.height = tower->height;
  for (int b : tower->base) {
    int x = b;
    for (int r = 0; r < tower->height / n; ++r) {
      std::vector<int> block(n);
      for (int i = 0; i < n; ++i) {
        block[i] = x;
        if (r * n + i + 1 < tower->height) x = speedup.BaseImage(x);
      }
      out.rungs.push_back(block[0]);
      out.blocks.push_back(std::move(block));
    }
  }
  return out;
}

double BrokenFraction(const Ladder& ladder, const PartialSpeedup& owner,
                      const PartialSpeedup& other) {
  int64_t broken_points = 0;
  for (const auto& block : ladder.blocks) {
    bool broken = false;
    for (int i = 0; i + 1 < ladder.n && !broken; ++i)
      broken = owner.exponent()[block[i]] != other.exponent()[block[i]];
    if (broken) broken_points += ladder.n;
  }
  return static_cast<double>(broken_points) / owner.parent().size;
}

std::string RenderColumns(const std::vector<Column>& columns, int observable) {
  std::string out;
  if (columns.empty()) return out;
  const int height = static_cast<int>(columns[0].level_values.size());
  static const char kGlyphs[] = "0123456789abcdefghijklmnopqrstuvwxyz";
  for (int i = height - 1; i >= 0; --i) {
    for (const Column& c : columns) {
      int v = c.level_values[i][observable];
      out.push_back(v >= 0 && v < 36 ? kGlyphs[v] : '?');
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace speedup
