#include <gtest/gtest.h>

#include <random>

#include "speedup/spec_io.hpp"
#include "support/fixtures.hpp"

namespace speedup {
namespace {

TEST(SystemSpec, CyclicRoundTrip) {
  std::mt19937_64 rng(81);
  GExtensionSystem s = fixtures::RandomSystem(rng, 25, 4, 3);
  std::string text = SerializeSystem(s);
  EXPECT_EQ(ParseSystemSpec(text), s);
  EXPECT_EQ(SerializeSystem(ParseSystemSpec(text)), text);
  EXPECT_NE(text.find("\"cyclic\""), std::string::npos);
}

TEST(SystemSpec, TableGroupMatchesTheCyclicShorthand) {
  const char* table = R"({"size": 3, "labels": [0, 1, 0], "sigma": [1, 0, 2],
    "group": {"type": "table", "order": 3, "mul": [[0,1,2],[1,2,0],[2,0,1]],
              "metric_num": [[0,1,1],[1,0,1],[1,1,0]], "metric_den": 1}})";
  const char* shorthand = R"({"size": 3, "labels": [0, 1, 0], "sigma": [1, 0, 2],
    "group": {"type": "cyclic", "order": 3}, "base": "cycle"})";
  GExtensionSystem a = ParseSystemSpec(table), b = ParseSystemSpec(shorthand);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.sigma, b.sigma);
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y) {
      EXPECT_EQ(a.group.Mul(x, y), b.group.Mul(x, y));
      EXPECT_DOUBLE_EQ(a.group.Rho(x, y), b.group.Rho(x, y));
    }
}

TEST(SystemSpec, NonAssociativeTableIsAValidationError) {
  const char* text = R"({"size": 1, "labels": [0], "sigma": [0],
    "group": {"type": "table", "order": 5,
      "mul": [[0,1,2,3,4],[1,0,3,4,2],[2,4,0,1,3],[3,2,4,0,1],[4,3,1,2,0]],
      "metric_num": [[0,1,1,1,1],[1,0,1,1,1],[1,1,0,1,1],[1,1,1,0,1],[1,1,1,1,0]],
      "metric_den": 1}})";
  try {
    ParseSystemSpec(text);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), "ValidationError");
  }
}

TEST(SystemSpec, ParseErrorsNameTheLineAndField) {
  try {
    ParseSystemSpec("{\n  \"size\": 2,\n  \"labels\": [0, 1,\n}");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), "ParseError");
    EXPECT_EQ(e.detail().rfind("line 4", 0), 0u) << e.detail();
  }
  try {
    ParseSystemSpec(R"({"size": 2, "labels": [0, "a"], "sigma": [0, 0],
                        "group": {"type": "cyclic", "order": 1}})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), "ParseError");
    EXPECT_NE(e.detail().find("labels[1]"), std::string::npos);
  }
  EXPECT_THROW(ParseSystemSpec(R"({"size": 2, "labels": [0, 0], "sigma": [0, 0],
                                   "group": {"type": "cyclic", "order": 1}, "base": "odometer"})"),
               Error);
}

TEST(SpeedupSpec, RoundTripKeepsExponentsAndTwistedSkew) {
  std::mt19937_64 rng(82);
  auto s = std::make_shared<const GExtensionSystem>(fixtures::RandomSystem(rng, 12, 3, 2));
  std::vector<int> exponent(12, 0);
  exponent[0] = 2;
  exponent[2] = 3;
  exponent[5] = 1;
  PartialSpeedup sp(s, exponent, 3);
  sp.set_tower({{0}, 4});
  TwistFunction alpha(12);
  for (int& a : alpha) a = static_cast<int>(rng() % 3);
  SpeedupSpec spec = ParseSpeedupSpec(SerializeSpeedup(sp, s->labels, alpha));
  EXPECT_EQ(spec.system, *s);
  EXPECT_EQ(spec.exponent, exponent);
  EXPECT_EQ(spec.alpha, alpha);
  EXPECT_EQ(spec.tower.base, std::vector<int>{0});
  EXPECT_EQ(spec.tower.height, 4);
  GExtensionSystem twisted = Twist(*s, alpha);
  for (int x = 0; x < 12; ++x) {
    int expect = 0;
    for (int i = 0; i < exponent[x]; ++i)
      expect = twisted.group.Mul(twisted.sigma[(x + i) % 12], expect);
    EXPECT_EQ(spec.skew[x], expect) << x;
  }
  // The system spec reader accepts a speedup document.
  EXPECT_EQ(ParseSystemSpec(SerializeSpeedup(sp, s->labels, alpha)), *s);
}

TEST(Reports, RoundingAndLayout) {
  EXPECT_EQ(Round12(0.1 + 0.2), 0.3);
  EXPECT_EQ(Round12(1.0 / 3), 0.333333333333);
  EXPECT_EQ(RefusalToJson("NotRegular", "x"),
            "{\n  \"refusal\": \"NotRegular\",\n  \"detail\": \"x\"\n}\n");
  std::string m = MetricsToJson(3, 2.0 / 3, 4, 5);
  EXPECT_NE(m.find("\"distance\": 0.666666666667"), std::string::npos) << m;
}

}  // namespace
}  // namespace speedup
