#include "speedup/matching.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace speedup {

int64_t SamplingBound(double delta, double zeta, int n) {
  double bound = std::min(delta, zeta / std::ldexp(1.0, n));
  int64_t k = static_cast<int64_t>(std::floor(1.0 / bound)) + 1;
  return k;
}

SampleAssignment SampleOnto(const EmpiricalDistribution& nu, int domain_size, double delta,
                            double zeta, int n) {
  const int64_t k_bound = SamplingBound(delta, zeta, n);
  if (domain_size < k_bound)
    throw Error("DomainTooSmall", "|D| = " + std::to_string(domain_size) + " < K = " +
                                      std::to_string(k_bound) + " from 1/K < min{delta, zeta/2^n}");
  const int atoms = nu.space().size();
  const __int128 total = nu.total();
  for (int e = 0; e < atoms; ++e)
    if (static_cast<__int128>(nu.mass()[e]) * domain_size <= total)
      throw Error("AtomTooSmall", "atom " + std::to_string(e) + " has weight <= 1/|D|");
  SampleAssignment out;
  out.counts.assign(atoms, 0);
  __int128 cumulative = 0;
  int64_t previous_end = 0;
  for (int e = 0; e < atoms; ++e) {
    cumulative += nu.mass()[e];
    // floor(|D| * cumulative / total), exact in integers.
    int64_t end = e + 1 == atoms ? domain_size
                                 : static_cast<int64_t>(cumulative * domain_size / total);
    out.counts[e] = end - previous_end;
    previous_end = end;
  }
  for (int e = 0; e < atoms; ++e)
    for (int64_t c = 0; c < out.counts[e]; ++c) out.f.push_back(e);
  EmpiricalDistribution realized(nu.space_ptr(), out.counts);
  out.error = Kantorovich(realized, nu);
  return out;
}

SampleFamily ExhaustSamples(const std::vector<int>& atom_of,
                            const std::vector<int64_t>& template_counts,
                            const ExhaustionOptions& options) {
  const int z = static_cast<int>(atom_of.size());
  const int atoms = static_cast<int>(template_counts.size());
  int64_t k_prime = 0;
  for (int64_t c : template_counts) k_prime += c;
  if (k_prime <= 0 || k_prime > z)
    throw Error("PreconditionViolated", "sample size K' must lie in [1, |Z|]");
  std::vector<std::vector<int>> members(atoms);
  for (int i = 0; i < z; ++i) {
    if (atom_of[i] < 0 || atom_of[i] >= atoms) throw Error("PreconditionViolated", "atom index");
    members[atom_of[i]].push_back(i);
  }
  if (options.enforce_size_bound) {
    double need = static_cast<double>(k_prime) / (options.epsilon * options.delta_prime / 2.0);
    if (!(static_cast<double>(z) > need))
      throw Error("PreconditionViolated", "N' > K'/(eps*delta'/2) fails: |Z| = " +
                                              std::to_string(z) + ", bound " + std::to_string(need));
    if (!(options.zeta < options.epsilon * options.delta_prime / 2.0))
      throw Error("PreconditionViolated", "zeta < eps*delta'/2 fails");
    double l1 = 0;
    for (int a = 0; a < atoms; ++a)
      l1 += std::abs(static_cast<double>(template_counts[a]) / k_prime -
                     static_cast<double>(members[a].size()) / z);
    if (!(l1 / 2.0 < options.zeta))
      throw Error("PreconditionViolated", "template is not within zeta of dist_Z(Q)");
  }
  for (int a = 0; a < atoms; ++a)
    if (template_counts[a] > static_cast<int64_t>(members[a].size()))
      throw Error("InfeasibleTemplate", "template count exceeds atom " + std::to_string(a));
  SampleFamily out;
  out.ground_size = z;
  out.sample_size = static_cast<int>(k_prime);
  out.template_counts = template_counts;
  std::vector<size_t> next(atoms, 0);
  while (true) {
    bool fits = true;
    for (int a = 0; a < atoms && fits; ++a)
      fits = next[a] + template_counts[a] <= members[a].size();
    if (!fits) break;
    std::vector<std::vector<int>> sample(atoms);
    for (int a = 0; a < atoms; ++a) {
      sample[a].assign(members[a].begin() + next[a],
                       members[a].begin() + next[a] + template_counts[a]);
      next[a] += template_counts[a];
    }
    out.samples.push_back(std::move(sample));
  }
  int64_t used = static_cast<int64_t>(out.samples.size()) * k_prime;
  out.leftover_fraction = static_cast<double>(z - used) / z;
  return out;
}

int64_t MostCount(double zeta, int64_t n) {
  return static_cast<int64_t>(std::ceil((1.0 - zeta) * static_cast<double>(n) - 1e-12));
}

namespace {

Matching MatchMultiset(const std::vector<int>& source_points, const std::vector<int>& source_ids,
                       const std::vector<int>& gamma2, double zeta,
                       const FiniteMetricSpace& space) {
  std::vector<int> cell = ContinuityPartition(space, zeta);
  const size_t n = gamma2.size();
  Matching out;
  out.map.assign(n, -1);
  std::vector<char> taken(source_points.size(), 0);
  // Per cell queue of free source slots, lowest first.
  int cells = 0;
  for (int c : cell) cells = std::max(cells, c + 1);
  std::vector<std::vector<int>> free_slots(cells);
  for (size_t s = 0; s < source_points.size(); ++s) free_slots[cell[source_points[s]]].push_back(static_cast<int>(s));
  std::vector<size_t> head(cells, 0);
  for (size_t i = 0; i < n; ++i) {
    int c = cell[gamma2[i]];
    if (head[c] < free_slots[c].size()) {
      int s = free_slots[c][head[c]++];
      taken[s] = 1;
      out.map[i] = s;
    }
  }
  size_t cursor = 0;
  for (size_t i = 0; i < n; ++i) {
    if (out.map[i] >= 0) continue;
    while (taken[cursor]) ++cursor;
    taken[cursor] = 1;
    out.map[i] = static_cast<int>(cursor);
  }
  for (size_t i = 0; i < n; ++i) {
    int s = out.map[i];
    if (space.Dist(source_points[s], gamma2[i]) < zeta) ++out.good;
    out.map[i] = source_ids[s];
  }
  if (out.good < MostCount(zeta, static_cast<int64_t>(n)))
    throw Error("TooFar", std::to_string(out.good) + " good coordinates of " + std::to_string(n));
  return out;
}

}  // namespace

Matching MatchBijection(const std::vector<int>& gamma1, const std::vector<int>& gamma2,
                        double zeta, const FiniteMetricSpace& space) {
  if (gamma1.size() != gamma2.size()) throw Error("ValidationError", "lengths differ");
  std::vector<int> ids(gamma1.size());
  for (size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
  return MatchMultiset(gamma1, ids, gamma2, zeta, space);
}

Matching MatchSurjection(const std::vector<int>& gamma1, const std::vector<int>& gamma2,
                         double zeta, const FiniteMetricSpace& space) {
  const int64_t n = static_cast<int64_t>(gamma1.size());
  const int64_t n1 = static_cast<int64_t>(gamma2.size());
  if (n == 0 || n1 < n) throw Error("TooShort", "n1 < n");
  // Fibers: the first n1 mod n indices get the ceiling.
  const int64_t base = n1 / n, extra = n1 % n;
  for (int64_t i = 0; i < n; ++i) {
    double size = static_cast<double>(base + (i < extra ? 1 : 0));
    if (!(std::abs(size / n1 - 1.0 / n) < zeta))
      throw Error("TooShort", "fiber balance needs a longer second sequence");
  }
  std::vector<int> points, ids;
  for (int64_t i = 0; i < n; ++i)
    for (int64_t r = 0; r < base + (i < extra ? 1 : 0); ++r) {
      points.push_back(gamma1[i]);
      ids.push_back(static_cast<int>(i));
    }
  return MatchMultiset(points, ids, gamma2, zeta, space);
}

}  // namespace speedup
