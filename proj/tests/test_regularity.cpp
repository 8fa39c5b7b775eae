#include <gtest/gtest.h>

#include "speedup/regularity.hpp"
#include "support/fixtures.hpp"

namespace speedup {
namespace {

// Alternating labels on 64 points; four towers of height 16.
struct Tower16 {
  std::shared_ptr<const GExtensionSystem> system =
      std::make_shared<const GExtensionSystem>(fixtures::AlternatingSkew(64, 1, 0));
  std::vector<int> exponent = std::vector<int>(64, 0);
  std::vector<int> base = {0, 16, 32, 48};
  Tower16() {
    for (int b : base)
      for (int i = 0; i < 15; ++i) exponent[b + i] = 1;
  }
  PartialSpeedup Make() const {
    PartialSpeedup sp(system, exponent, 1);
    sp.set_tower({base, 16});
    return sp;
  }
};

TEST(CheckRegular, LadderDistanceFromTheDefinition) {
  Tower16 t;
  // Ladder blocks are all (1,0). Depth-2 blocks start on levels 0..13, half
  // of them (0,1), and moving that half costs 1 per unit: distance 1/2.
  RegularityCertificate c = CheckRegular(t.Make(), t.system->labels, 2, 0.6);
  EXPECT_TRUE(c.regular()) << c.refusal;
  EXPECT_NEAR(c.max_ladder_distance, 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(c.domain_mass, 60.0 / 64.0);
  RegularityCertificate tight = CheckRegular(t.Make(), t.system->labels, 2, 0.5);
  EXPECT_EQ(tight.refusal, "condition 4: ladder distribution is not within delta");
}

TEST(CheckRegular, HeightMustBeAMultipleOfN) {
  Tower16 t;
  EXPECT_EQ(CheckRegular(t.Make(), t.system->labels, 3, 0.6).refusal,
            "condition 4: height is not a multiple of n");
}

TEST(CheckRegular, DomainOutsideTheLowerLevelsFailsConditionOne) {
  Tower16 t;
  t.exponent[15] = 1;  // top level of the first tower
  t.exponent[16] = 0;
  PartialSpeedup sp(t.system, t.exponent, 1);
  sp.set_tower({t.base, 16});
  EXPECT_EQ(CheckRegular(sp, t.system->labels, 2, 0.6).refusal.rfind("condition 1", 0), 0u);
}

TEST(CheckRegular, DifferentColumnNamesFailConditionThree) {
  Tower16 t;
  std::vector<int> labels = t.system->labels;
  labels[20] ^= 1;
  EXPECT_EQ(CheckRegular(t.Make(), labels, 2, 0.6).refusal,
            "condition 3: tower names differ between base fibers");
}

TEST(CheckRegular, SmallDomainFailsConditionFive) {
  Tower16 t;
  EXPECT_EQ(CheckRegular(t.Make(), t.system->labels, 2, 0.05).refusal.rfind("condition", 0), 0u);
  // delta 0.05 also breaks condition 4 first; a single long tower isolates 5.
  auto s = std::make_shared<const GExtensionSystem>(fixtures::AlternatingSkew(64, 1, 0));
  std::vector<int> e(64, 0);
  for (int i = 0; i < 31; ++i) e[i] = 1;
  PartialSpeedup sp(s, e, 1);
  sp.set_tower({{0}, 32});
  RegularityCertificate c = CheckRegular(sp, s->labels, 1, 0.4);
  EXPECT_EQ(c.refusal, "condition 5: domain mass is not above 1 - delta");
}

TEST(SpeedupBlockDistribution, OnlyBlocksThatStayInTheDomain) {
  Tower16 t;
  NameDistribution d = SpeedupBlockDistribution(t.Make(), t.system->labels, 2);
  EXPECT_EQ(d.total, 4 * 14);
}

}  // namespace
}  // namespace speedup
