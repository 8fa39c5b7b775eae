#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <set>

#include "speedup/matching.hpp"

namespace speedup {
namespace {

std::shared_ptr<const FiniteMetricSpace> Discrete(int n) {
  return std::make_shared<const FiniteMetricSpace>(FiniteMetricSpace::Discrete(n));
}

TEST(SamplingBound, IsTheSmallestIntegerAboveTheReciprocal) {
  // min{0.1, 0.5 / 4} = 0.1, so 1/K < 0.1 needs K = 11.
  EXPECT_EQ(SamplingBound(0.1, 0.5, 2), 11);
  // min{0.5, 0.4 / 8} = 0.05.
  EXPECT_EQ(SamplingBound(0.5, 0.4, 3), 21);
  for (double d : {0.03, 0.2, 0.7})
    for (int n = 1; n < 5; ++n) {
      int64_t k = SamplingBound(d, 0.3, n);
      double bound = std::min(d, 0.3 / (1 << n));
      EXPECT_LT(1.0 / k, bound);
      EXPECT_GE(1.0 / (k - 1), bound);
    }
}

TEST(SampleOnto, UniformTargetIsExact) {
  auto space = Discrete(4);
  SampleAssignment s = SampleOnto(EmpiricalDistribution(space, {1, 1, 1, 1}), 40, 0.1, 0.9, 1);
  EXPECT_EQ(s.counts, (std::vector<int64_t>{10, 10, 10, 10}));
  EXPECT_EQ(s.error, 0.0);
  EXPECT_EQ(s.f.size(), 40u);
}

TEST(SampleOnto, RefusesSmallDomainsAndLightAtoms) {
  auto space = Discrete(2);
  try {
    SampleOnto(EmpiricalDistribution(space, {1, 1}), 5, 0.1, 0.9, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), "DomainTooSmall");
  }
  try {
    SampleOnto(EmpiricalDistribution(space, {1, 99}), 50, 0.1, 0.9, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), "AtomTooSmall");
  }
}

TEST(SampleOnto, CountsMatchAnIndependentRecount) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    int atoms = 1 + static_cast<int>(rng() % 8);
    std::vector<int64_t> mass(atoms);
    for (auto& m : mass) m = 100 + static_cast<int64_t>(rng() % 100);
    int64_t total = std::accumulate(mass.begin(), mass.end(), int64_t{0});
    int domain = 50 + static_cast<int>(rng() % 500);
    SampleAssignment s = SampleOnto(EmpiricalDistribution(Discrete(atoms), mass), domain, 0.5, 0.99, 1);
    // Largest remainder would differ; the contract is floor of cumulative mass.
    int64_t prev = 0, cum = 0;
    double half_l1 = 0;
    for (int e = 0; e < atoms; ++e) {
      cum += mass[e];
      int64_t end = e + 1 == atoms ? domain : cum * domain / total;
      EXPECT_EQ(s.counts[e], end - prev);
      half_l1 += std::abs(static_cast<double>(end - prev) / domain -
                          static_cast<double>(mass[e]) / total);
      prev = end;
    }
    EXPECT_NEAR(s.error, half_l1 / 2, 1e-12);
    for (size_t i = 1; i < s.f.size(); ++i) EXPECT_LE(s.f[i - 1], s.f[i]);
  }
}

TEST(ExhaustSamples, SamplesAreDisjointWithExactCounts) {
  std::vector<int> atom_of;
  for (int i = 0; i < 90; ++i) atom_of.push_back(i % 3 == 0 ? 1 : 0);
  ExhaustionOptions opt{0.5, 1.0 / 3, 0.0, false};
  SampleFamily f = ExhaustSamples(atom_of, {2, 1}, opt);
  EXPECT_EQ(f.samples.size(), 30u);
  std::set<int> seen;
  for (const auto& s : f.samples) {
    ASSERT_EQ(s[0].size(), 2u);
    ASSERT_EQ(s[1].size(), 1u);
    for (int a = 0; a < 2; ++a)
      for (int z : s[a]) {
        EXPECT_EQ(atom_of[z], a);
        EXPECT_TRUE(seen.insert(z).second);
      }
  }
  EXPECT_EQ(f.leftover_fraction, 0.0);
}

TEST(ExhaustSamples, EnforcesTheSizeBound) {
  std::vector<int> atom_of(20, 0);
  for (int i = 0; i < 10; ++i) atom_of[i] = 1;
  // K' / (eps delta' / 2) = 2 / (0.1 * 0.5 / 2) = 80 > 20.
  try {
    ExhaustSamples(atom_of, {1, 1}, {0.1, 0.5, 0.01, true});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), "PreconditionViolated");
  }
  EXPECT_THROW(ExhaustSamples(atom_of, {11, 1}, {0.1, 0.5, 0.0, false}), Error);
}

TEST(MostCount, RoundsUp) {
  EXPECT_EQ(MostCount(0.1, 10), 9);
  EXPECT_EQ(MostCount(0.15, 10), 9);
  EXPECT_EQ(MostCount(0.0, 7), 7);
}

TEST(MatchBijection, IdenticalSequencesMatchEverywhere) {
  FiniteMetricSpace space = FiniteMetricSpace::Discrete(5);
  std::mt19937_64 rng(42);
  std::vector<int> g1(60);
  for (int& v : g1) v = static_cast<int>(rng() % 5);
  std::vector<int> g2 = g1;
  std::shuffle(g2.begin(), g2.end(), rng);
  Matching m = MatchBijection(g1, g2, 0.5, space);
  EXPECT_EQ(m.good, 60);
  std::set<int> image(m.map.begin(), m.map.end());
  EXPECT_EQ(image.size(), 60u);
  for (size_t i = 0; i < g2.size(); ++i) EXPECT_EQ(g1[m.map[i]], g2[i]);
}

TEST(MatchBijection, RefusesDistantSequences) {
  FiniteMetricSpace space = FiniteMetricSpace::Discrete(2);
  std::vector<int> g1(10, 0), g2(10, 1);
  g2[0] = 0;
  try {
    MatchBijection(g1, g2, 0.5, space);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), "TooFar");
  }
}

TEST(MatchSurjection, FibersAreBalanced) {
  FiniteMetricSpace space = FiniteMetricSpace::Discrete(3);
  std::vector<int> g1 = {0, 1, 2};
  std::vector<int> g2;
  for (int i = 0; i < 300; ++i) g2.push_back(i % 3);
  Matching m = MatchSurjection(g1, g2, 0.1, space);
  std::vector<int> fiber(3, 0);
  for (int i : m.map) ++fiber[i];
  EXPECT_EQ(fiber, (std::vector<int>{100, 100, 100}));
  EXPECT_EQ(m.good, 300);
  EXPECT_THROW(MatchSurjection(g1, {0, 1}, 0.1, space), Error);
}

}  // namespace
}  // namespace speedup
