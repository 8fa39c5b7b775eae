#pragma once

#include <cstdint>
#include <vector>

#include "speedup/distributions.hpp"

namespace speedup {

// Smallest K with 1/K < min{delta, zeta / 2^n}.
int64_t SamplingBound(double delta, double zeta, int n);

struct SampleAssignment {
  std::vector<int> f;          // domain index -> atom of E, in blocks by atom
  std::vector<int64_t> counts;  // |f^{-1}(e)|
  double error = 0.0;           // kantorovich(dist_D(f), nu)
};

// nu is given as integer masses over its total. Cumulative endpoints are
// rounded down to multiples of 1/|D| (the last endpoint stays at 1).
// Throws DomainTooSmall or AtomTooSmall.
SampleAssignment SampleOnto(const EmpiricalDistribution& nu, int domain_size, double delta,
                            double zeta, int n);

struct SampleFamily {
  int ground_size = 0;
  int sample_size = 0;
  std::vector<int64_t> template_counts;
  // samples[t][a] lists the ground elements of atom a taken by sample t,
  // lowest index first.
  std::vector<std::vector<std::vector<int>>> samples;
  double leftover_fraction = 0.0;
};

struct ExhaustionOptions {
  double epsilon = 0.1;
  double delta_prime = 0.0;  // minimum atom mass of Q on Z
  double zeta = 0.0;         // template tolerance; must be < epsilon * delta_prime / 2
  bool enforce_size_bound = true;
};

// atom_of[z] in [0, template_counts.size()). Throws PreconditionViolated or
// InfeasibleTemplate.
SampleFamily ExhaustSamples(const std::vector<int>& atom_of,
                            const std::vector<int64_t>& template_counts,
                            const ExhaustionOptions& options);

// ceil((1 - zeta) * n), the integer reading of "(1 - zeta)-most".
int64_t MostCount(double zeta, int64_t n);

struct Matching {
  std::vector<int> map;  // index into gamma2 -> index into gamma1
  int64_t good = 0;      // coordinates with rho < zeta
};

// gamma1, gamma2: points of `space`. Exact matching within the cells of a
// diameter-zeta partition, then lowest-index pairing of the rest. Throws
// TooFar when fewer than MostCount(zeta, n) coordinates are good.
Matching MatchBijection(const std::vector<int>& gamma1, const std::vector<int>& gamma2,
                        double zeta, const FiniteMetricSpace& space);

// phi: [n1] -> [n]; fibers have size floor or ceil of n1/n. Throws TooShort
// when a fiber misses | |phi^{-1}(i)|/n1 - 1/n | < zeta, TooFar as above.
Matching MatchSurjection(const std::vector<int>& gamma1, const std::vector<int>& gamma2,
                         double zeta, const FiniteMetricSpace& space);

}  // namespace speedup
