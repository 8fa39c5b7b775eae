#include "speedup/regularity.hpp"

#include <algorithm>
#include <map>

namespace speedup {

std::vector<NamePoint> SpeedupOrbitName(const PartialSpeedup& speedup,
                                        const std::vector<int>& labels, SkewPoint start,
                                        int length) {
  std::vector<NamePoint> out;
  SkewPoint p = start;
  for (int i = 0; i < length; ++i) {
    out.push_back({labels[p.x], p.g});
    if (i + 1 == length || !speedup.InDomain(p.x)) break;
    p = speedup.Apply(p);
  }
  return out;
}

NameDistribution SpeedupBlockDistribution(const PartialSpeedup& speedup,
                                          const std::vector<int>& labels, int n) {
  const GExtensionSystem& ext = speedup.parent();
  const int m = ext.group.order();
  auto has_depth = [&](int x) {
    for (int c = 0; c < n; ++c) {
      if (!speedup.InDomain(x)) return false;
      x = speedup.BaseImage(x);
    }
    return true;
  };
  NameDistribution out;
  NameBlock block(n);
  for (int x = 0; x < ext.size; ++x) {
    if (!has_depth(x)) continue;
    for (int g = 0; g < m; ++g) {
      SkewPoint p{x, g};
      for (int c = 0; c < n; ++c) {
        block[c] = labels[p.x] * m + p.g;
        if (c + 1 < n) p = speedup.Apply(p);
      }
      out.Add(block);
    }
  }
  return out;
}

RegularityCertificate CheckRegular(const PartialSpeedup& speedup, const std::vector<int>& labels,
                                   int n, double delta) {
  RegularityCertificate cert;
  cert.n = n;
  cert.delta = delta;
  const GExtensionSystem& ext = speedup.parent();
  const int m = ext.group.order();
  const SpeedupTower* tower = speedup.tower();
  auto refuse = [&](const std::string& why) {
    if (cert.refusal.empty()) cert.refusal = why;
  };
  // Condition 1.
  if (tower == nullptr || tower->height < 1 || tower->base.empty()) {
    refuse("condition 1: no speedup tower");
  } else {
    cert.tower_base = tower->base;
    cert.height = tower->height;
    std::vector<char> seen(ext.size, 0), level_below_top(ext.size, 0);
    bool ok = true;
    for (int b : tower->base) {
      int x = b;
      for (int i = 0; i < tower->height && ok; ++i) {
        if (seen[x]) ok = false;
        seen[x] = 1;
        if (i + 1 < tower->height) {
          level_below_top[x] = 1;
          if (!speedup.InDomain(x)) {
            ok = false;
            break;
          }
          x = speedup.BaseImage(x);
        }
      }
    }
    for (int x = 0; x < ext.size && ok; ++x) ok = speedup.InDomain(x) == (level_below_top[x] != 0);
    cert.disjoint_tower = ok;
    if (!ok) refuse("condition 1: levels overlap or the domain is not the lower levels");
  }
  // Condition 2.
  int kmax = 0;
  for (int k : speedup.exponent()) kmax = std::max(kmax, k);
  cert.max_exponent = kmax;
  cert.bounded_exponent = kmax <= speedup.k_max() && speedup.k_max() < ext.size;
  if (!cert.bounded_exponent) refuse("condition 2: exponent is not bounded");
  // Condition 3.
  if (cert.disjoint_tower) {
    bool same = true;
    for (int g = 0; g < m && same; ++g) {
      std::vector<NamePoint> first =
          SpeedupOrbitName(speedup, labels, {tower->base.front(), g}, tower->height);
      for (int b : tower->base) {
        if (SpeedupOrbitName(speedup, labels, {b, g}, tower->height) != first) {
          same = false;
          break;
        }
      }
    }
    cert.fiberwise_identical = same;
    if (!same) refuse("condition 3: tower names differ between base fibers");
  }
  // Condition 4.
  cert.height_multiple = cert.height > 0 && n > 0 && cert.height % n == 0;
  if (!cert.height_multiple) refuse("condition 4: height is not a multiple of n");
  if (cert.disjoint_tower && cert.height_multiple) {
    NameDistribution full = SpeedupBlockDistribution(speedup, labels, n);
    if (full.total == 0) {
      cert.max_ladder_distance = 1.0;
    } else {
      // Names are fiberwise identical only after condition 3; measure every
      // base point and starting element anyway.
      double worst = 0.0;
      std::map<std::vector<int>, double> memo;
      for (int b : tower->base)
        for (int g = 0; g < m; ++g) {
          std::vector<NamePoint> name = SpeedupOrbitName(speedup, labels, {b, g}, tower->height);
          std::vector<int> key;
          for (const NamePoint& q : name) key.push_back(q.label * m + q.g);
          auto it = memo.find(key);
          if (it == memo.end()) {
            std::vector<int> rungs;
            for (int r = 0; r + n <= static_cast<int>(name.size()); r += n) rungs.push_back(r);
            double d = NameKantorovich(BlockDistribution(name, n, rungs, m), full, ext.group);
            it = memo.emplace(std::move(key), d).first;
          }
          worst = std::max(worst, it->second);
        }
      cert.max_ladder_distance = worst;
    }
    cert.ladder_close = cert.max_ladder_distance < delta;
    if (!cert.ladder_close) refuse("condition 4: ladder distribution is not within delta");
  }
  // Condition 5.
  cert.domain_mass = speedup.DomainMass();
  cert.domain_large = cert.domain_mass > 1.0 - delta;
  if (!cert.domain_large) refuse("condition 5: domain mass is not above 1 - delta");
  return cert;
}

}  // namespace speedup
