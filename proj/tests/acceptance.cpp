// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails. Reports of every run are written under the output
// directory (first argument, default "acceptance_reports").

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "speedup/cycles.hpp"
#include "speedup/driver.hpp"
#include "speedup/matching.hpp"
#include "speedup/spec_io.hpp"
#include "support/fixtures.hpp"

namespace {

using namespace speedup;
namespace fs = std::filesystem;

constexpr uint64_t kSeed = 20240611;

struct Outcome {
  bool pass = false;
  std::string detail;
  std::string report;  // compared byte for byte by the determinism criterion
};

double Seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string Fmt(const char* format, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

std::shared_ptr<const FiniteMetricSpace> DiscreteSpace(int size) {
  return std::make_shared<const FiniteMetricSpace>(FiniteMetricSpace::Discrete(size));
}

std::vector<int64_t> RandomMasses(std::mt19937_64& rng, int atoms, int64_t max_mass) {
  std::vector<int64_t> m(atoms);
  int64_t total = 0;
  for (auto& v : m) total += (v = static_cast<int64_t>(rng() % (max_mass + 1)));
  if (total == 0) m[rng() % atoms] = 1;
  return m;
}

Outcome Kantorovich1() {
  auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(kSeed);
  double worst_l1 = 0, worst_axiom = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    int atoms = 1 + static_cast<int>(rng() % 32);
    auto space = DiscreteSpace(atoms);
    EmpiricalDistribution a(space, RandomMasses(rng, atoms, 1000));
    EmpiricalDistribution b(space, RandomMasses(rng, atoms, 1000));
    EmpiricalDistribution c(space, RandomMasses(rng, atoms, 1000));
    double half_l1 = 0;
    for (int i = 0; i < atoms; ++i) half_l1 += std::abs(a.Weight(i) - b.Weight(i));
    half_l1 /= 2;
    double ab = Kantorovich(a, b), ba = Kantorovich(b, a);
    double ac = Kantorovich(a, c), cb = Kantorovich(c, b);
    worst_l1 = std::max(worst_l1, std::abs(ab - half_l1));
    worst_axiom = std::max({worst_axiom, std::abs(ab - ba), ab - (ac + cb), -ab,
                            std::abs(Kantorovich(a, a))});
  }
  double t = Seconds(t0);
  Outcome o;
  o.pass = worst_l1 <= 1e-9 && worst_axiom <= 1e-9 && t < 10;
  o.detail = Fmt("max |W - L1/2| %.3g, max axiom defect %.3g, %.2f s", worst_l1, worst_axiom, t);
  o.report = Fmt("%.17g %.17g", worst_l1, worst_axiom);
  return o;
}

// Points on a line with integer positions; the metric is the gap over the span.
std::shared_ptr<const FiniteMetricSpace> LineSpace(std::mt19937_64& rng, int atoms) {
  std::vector<int64_t> pos(atoms);
  int64_t p = 0;
  for (auto& v : pos) v = (p += 1 + static_cast<int64_t>(rng() % 5));
  int64_t span = std::max<int64_t>(1, pos.back() - pos.front());
  std::vector<int64_t> d(static_cast<size_t>(atoms) * atoms);
  for (int i = 0; i < atoms; ++i)
    for (int j = 0; j < atoms; ++j) d[i * atoms + j] = std::abs(pos[i] - pos[j]);
  return std::make_shared<const FiniteMetricSpace>(atoms, d, span);
}

Outcome Convexity2() {
  std::mt19937_64 rng(kSeed + 2);
  int identity_failures = 0, premise = 0, bound_failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    int atoms = 2 + static_cast<int>(rng() % 7);
    auto space = LineSpace(rng, atoms);
    // v1 and v2 share the total T; epsilon = a / b.
    std::vector<int64_t> v1 = RandomMasses(rng, atoms, 50);
    const int64_t total = std::accumulate(v1.begin(), v1.end(), int64_t{0});
    std::vector<int64_t> v2 = v1;
    // Move a random amount of mass, small half of the time.
    int64_t moves = trial % 2 ? static_cast<int64_t>(rng() % 3) : static_cast<int64_t>(rng() % total + 1);
    for (int64_t k = 0; k < moves; ++k) {
      int from = static_cast<int>(rng() % atoms), to = static_cast<int>(rng() % atoms);
      if (v2[from] > 0) --v2[from], ++v2[to];
    }
    int64_t b = 2 + static_cast<int64_t>(rng() % 50);
    int64_t a = 1 + static_cast<int64_t>(rng() % (b - 1));
    std::vector<int64_t> vq(atoms), v1b(atoms), v2b(atoms);
    for (int i = 0; i < atoms; ++i) {
      vq[i] = (b - a) * v1[i] + a * v2[i];
      v1b[i] = b * v1[i];
      v2b[i] = b * v2[i];
    }
    EmpiricalDistribution d1(space, v1b), d2(space, v2b), dq(space, vq);
    ExactDistance n1 = KantorovichExact(d1, dq), n2 = KantorovichExact(d2, dq);
    // eps * |v2 - vQ| == (1 - eps) * |v1 - vQ|, cross-multiplied.
    if (static_cast<__int128>(a) * n2.num * n1.den !=
        static_cast<__int128>(b - a) * n1.num * n2.den)
      ++identity_failures;
    double eps = static_cast<double>(a) / b;
    double zeta = std::min(eps, n1.value() * (1.0 + static_cast<double>(rng() % 100) / 100.0) + 1e-12);
    if (n1.value() < zeta && zeta <= eps) {
      ++premise;
      if (!(n2.value() < zeta / eps)) ++bound_failures;
    }
  }
  Outcome o;
  o.pass = identity_failures == 0 && bound_failures == 0 && premise > 0;
  o.detail = Fmt("identity failures %.0f of 1000, bound failures %.0f of %.0f premises",
                 identity_failures, bound_failures, premise);
  o.report = o.detail;
  return o;
}

Outcome Sampling3() {
  std::mt19937_64 rng(kSeed + 3);
  int failures = 0, mismatches = 0;
  double worst_gap = 0;
  for (int done = 0; done < 500;) {
    int n = 1 + static_cast<int>(rng() % 4);
    int atoms = 1 + static_cast<int>(rng() % (1 << n));
    double delta = 0.02 + 0.2 * static_cast<double>(rng() % 100) / 100.0;
    double zeta = 0.05 + 0.5 * static_cast<double>(rng() % 100) / 100.0;
    int64_t k = SamplingBound(delta, zeta, n);
    int domain = static_cast<int>(k + static_cast<int64_t>(rng() % 200));
    std::vector<int64_t> mass(atoms);
    for (auto& m : mass) m = 1000 + static_cast<int64_t>(rng() % 1000);
    int64_t total = std::accumulate(mass.begin(), mass.end(), int64_t{0});
    // Instances outside "every atom weighs more than 1/|D|" are redrawn.
    if (*std::min_element(mass.begin(), mass.end()) * domain <= total) continue;
    ++done;
    auto space = DiscreteSpace(atoms);
    EmpiricalDistribution nu(space, mass);
    SampleAssignment s = SampleOnto(nu, domain, delta, zeta, n);
    // Independent recount: cumulative endpoints floor(|D| c / T), last at |D|.
    std::vector<int64_t> counts(atoms);
    __int128 c = 0;
    int64_t prev = 0;
    for (int e = 0; e < atoms; ++e) {
      c += mass[e];
      int64_t end = e + 1 == atoms ? domain : static_cast<int64_t>(c * domain / total);
      counts[e] = end - prev;
      prev = end;
    }
    double half_l1 = 0;
    for (int e = 0; e < atoms; ++e)
      half_l1 += std::abs(static_cast<double>(counts[e]) / domain -
                          static_cast<double>(mass[e]) / static_cast<double>(total));
    half_l1 /= 2;
    bool onto = true;
    for (int64_t cnt : s.counts) onto = onto && cnt > 0;
    if (!onto || !(s.error < zeta) || static_cast<int>(s.f.size()) != domain) ++failures;
    if (s.counts != counts) ++mismatches;
    worst_gap = std::max(worst_gap, std::abs(s.error - half_l1));
  }
  Outcome o;
  o.pass = failures == 0 && mismatches == 0 && worst_gap <= 1e-9;
  o.detail = Fmt("contract failures %.0f, recount mismatches %.0f, max error gap %.3g", failures,
                 mismatches, worst_gap);
  o.report = o.detail;
  return o;
}

Outcome Exhaustion4() {
  std::mt19937_64 rng(kSeed + 4);
  int done = 0, failures = 0;
  double worst_leftover = 0;
  while (done < 200) {
    int atoms = 1 + static_cast<int>(rng() % 4);
    std::vector<int64_t> tmpl(atoms);
    for (auto& t : tmpl) t = 1 + static_cast<int64_t>(rng() % 5);
    int64_t k_prime = std::accumulate(tmpl.begin(), tmpl.end(), int64_t{0});
    double epsilon = 0.05 + 0.45 * static_cast<double>(rng() % 100) / 100.0;
    int64_t copies = 50 + static_cast<int64_t>(rng() % 400);
    std::vector<int> atom_of;
    for (int a = 0; a < atoms; ++a)
      for (int64_t i = 0; i < tmpl[a] * copies + static_cast<int64_t>(rng() % 2); ++i)
        atom_of.push_back(a);
    std::shuffle(atom_of.begin(), atom_of.end(), rng);
    const double z = static_cast<double>(atom_of.size());
    std::vector<int64_t> members(atoms, 0);
    for (int a : atom_of) ++members[a];
    double delta_prime = 1.0;
    for (int64_t m : members) delta_prime = std::min(delta_prime, m / z);
    double zeta = 0.99 * epsilon * delta_prime / 2.0;
    double l1 = 0;
    for (int a = 0; a < atoms; ++a)
      l1 += std::abs(static_cast<double>(tmpl[a]) / k_prime - members[a] / z);
    if (!(z > k_prime / (epsilon * delta_prime / 2.0)) || !(l1 / 2 < zeta)) continue;
    ++done;
    SampleFamily f = ExhaustSamples(atom_of, tmpl, {epsilon, delta_prime, zeta, true});
    std::set<int> seen;
    bool ok = f.leftover_fraction <= epsilon;
    for (const auto& sample : f.samples)
      for (int a = 0; a < atoms; ++a) {
        ok = ok && static_cast<int64_t>(sample[a].size()) == tmpl[a];
        for (int e : sample[a]) ok = ok && atom_of[e] == a && seen.insert(e).second;
      }
    ok = ok && std::abs(1.0 - static_cast<double>(seen.size()) / z - f.leftover_fraction) < 1e-12;
    worst_leftover = std::max(worst_leftover, f.leftover_fraction);
    failures += !ok;
  }
  Outcome o;
  o.pass = failures == 0;
  o.detail = Fmt("failures %.0f of 200, max leftover %.4f", failures, worst_leftover);
  o.report = o.detail;
  return o;
}

Outcome Cycles5() {
  int failures = 0, cases = 0;
  for (int p = 1; p <= 8; ++p)
    for (int w = p; w <= 64; ++w) {
      ++cases;
      WindowSystem windows = WindowSystem::Tiled(p, w);
      WindowSamples offsets(w, std::vector<int>(p));
      for (int s = 0; s < w; ++s)
        for (int i = 0; i < p; ++i) offsets[s][i] = i;
      std::vector<Cycle> cycles = BuildCycles(windows, {offsets}, p);
      std::set<int> positions;
      std::vector<int> per_window(w, 0);
      bool ok = true;
      for (const Stage& st : cycles[0].stages)
        for (int pos : st.positions) {
          ok = ok && positions.insert(pos).second;
          ++per_window[pos / p];
        }
      for (int s = p - 1; s <= w - p; ++s) ok = ok && per_window[s] == p;
      ok = ok && per_window == CoveringMultiplicity(w, p);
      failures += !ok;
    }
  Outcome o;
  o.pass = failures == 0;
  o.detail = Fmt("failures %.0f of %.0f (p, w) pairs", failures, cases);
  o.report = o.detail;
  return o;
}

// Exact right-action commutation on every constructed orbit point.
int64_t EquivarianceDefects(const ImproveResult& r) {
  const GExtensionSystem& src = r.speedup.parent();
  auto twisted = std::make_shared<const GExtensionSystem>(Twist(src, r.alpha));
  PartialSpeedup tw = r.speedup.Reparent(twisted);
  const FiniteGroup& G = src.group;
  int64_t defects = 0;
  for (int x = 0; x < src.size; ++x) {
    if (r.model_position[x] < 0 || !tw.InDomain(x)) continue;
    for (int g = 0; g < G.order(); ++g)
      for (int h = 0; h < G.order(); ++h) {
        SkewPoint a = tw.Apply({x, G.Mul(g, h)});
        SkewPoint b = tw.Apply({x, g});
        defects += !(a.x == b.x && a.g == G.Mul(b.g, h));
      }
  }
  return defects;
}

Outcome SingleStep(int order, double limit_seconds) {
  auto t0 = std::chrono::steady_clock::now();
  const int N = 2048;
  GExtensionSystem target = fixtures::SingleStepTarget(N, order);
  auto source = std::make_shared<const GExtensionSystem>(fixtures::SingleStepSource(N, order));
  Outcome o;
  if (!CheckExtensionErgodic(target).ergodic || !CheckExtensionErgodic(*source).ergodic ||
      target == *source) {
    o.detail = "systems are not two distinct ergodic extensions";
    return o;
  }
  try {
    ImproveParams params{8, 0.1, 64, 0.05, 0.2, fixtures::ResidueRectangles(N, 1)[0].a1, {0}};
    BootstrapResult boot = BootstrapRegular(source, source->labels, 8, 0.1, 0.2);
    ImproveResult r =
        Improve(target, boot.speedup, source->labels, params, ImproveSchedule::Tuned(params));
    const ImprovementReport& rep = r.report;
    int64_t defects = order > 1 ? EquivarianceDefects(r) : 0;
    double t = Seconds(t0);
    bool alpha_zero = order > 1 || rep.alpha_size == 0.0;
    o.pass = rep.regular_ok && rep.partition_drift < 0.2 && rep.alpha_size < 0.2 && alpha_zero &&
             rep.broken_mass < 0.05 && rep.final_distance < 0.05 && rep.good_a_fraction > 0.8 &&
             defects == 0 && t < limit_seconds;
    o.detail = "regular " + std::string(rep.regular_ok ? "yes" : "no (" + rep.regularity.refusal + ")") +
               Fmt(", drift %.4f, alpha %.4f, broken %.4f", rep.partition_drift, rep.alpha_size,
                   rep.broken_mass) +
               Fmt(", distance %.4f, good-A %.3f, equivariance defects %.0f, %.1f s",
                   rep.final_distance, rep.good_a_fraction, static_cast<double>(defects), t);
    o.report = ReportToJson(rep);
  } catch (const Error& e) {
    o.detail = std::string("refused: ") + e.what();
    o.report = o.detail;
  }
  return o;
}

IterationSchedule LoopSchedule(int size, int budget) {
  const int n = 17;
  IterationSchedule s = IterationSchedule::Halving(budget, std::vector<int>(budget + 1, n), 0.1,
                                                   0.3, fixtures::ResidueRectangles(size, 2));
  s.improve = ImproveSchedule::Tuned(ImproveParams{n, 0.1, n, 0.05, 0.2, {}, {0}});
  return s;
}

constexpr int kLoopSize = 4096;
constexpr int kLoopPeriod = 1019;

Outcome Factor8() {
  auto t0 = std::chrono::steady_clock::now();
  GExtensionSystem target = fixtures::LoopTarget(kLoopSize);
  auto source =
      std::make_shared<const GExtensionSystem>(fixtures::LoopSource(kLoopSize, kLoopPeriod));
  IterationSchedule schedule = LoopSchedule(kLoopSize, 3);
  Outcome o;
  try {
    FactorResult r = RunFactor(target, source, source->labels, schedule);
    bool below = r.log.iterations.size() == 3;
    std::string dists;
    for (const IterationRecord& it : r.log.iterations) {
      below = below && it.distance < it.delta;
      dists += Fmt("%.4f<%.4f ", it.distance, it.delta);
    }
    auto sets = fixtures::LabelGroupClasses(r.labels, 2, 4);
    std::vector<FullGroupWitness> witnesses = ErgodicityCertificate(r.full, sets, 0.1);
    bool executed = true;
    for (const FullGroupWitness& w : witnesses)
      executed = executed && ExecuteWitness(r.full, w, sets[w.set_to]) >= w.required;
    double t = Seconds(t0);
    o.pass = below && r.log.cumulative_change < 0.3 && executed && sets.size() == 4 && t < 600;
    o.detail = "distances " + dists +
               Fmt("cumulative change %.4f, %.0f witnesses on %.0f sets, %.1f s",
                   r.log.cumulative_change, static_cast<double>(witnesses.size()),
                   static_cast<double>(sets.size()), t);
    r.log.witnesses = witnesses;
    o.report = LogToJson(r.log);
  } catch (const Error& e) {
    o.detail = std::string("refused: ") + e.what();
    o.report = o.detail;
  }
  return o;
}

Outcome Identity9() {
  const int N = 2048, n = 9;
  GExtensionSystem target = fixtures::AlternatingSkew(N, 1, 0);
  Outcome o;
  try {
    SeedResult seed = SeedFromOrbit(target, target, N, 0.01, n, 0);
    GExtensionSystem seeded = Twist(target, seed.alpha);
    seeded.labels = seed.labels;
    auto source = std::make_shared<const GExtensionSystem>(seeded);
    IterationSchedule schedule = IterationSchedule::Halving(
        1, {n, n}, 0.1, 0.3, fixtures::ResidueRectangles(N, 1));
    schedule.improve = ImproveSchedule::Tuned(ImproveParams{n, 0.1, n, 0.05, 0.2, {}, {0}});
    // The sliding count |F| - n of the model must be even for the period-2
    // target to be reproduced exactly, and the ladder of one column needs
    // 11 blocks to stay within delta.
    schedule.improve.search = false;
    schedule.improve.model_length = 11 * n;
    schedule.improve.model_max_length = 11 * n;
    FactorResult r = RunFactor(target, source, seed.labels, schedule);
    const IterationRecord& it = r.log.iterations.at(0);
    o.pass = it.distance == 0.0 && it.report.alpha_size == 0.0;
    o.detail = Fmt("seed distance %.4f, distance %.6f, alpha-size %.6f", seed.orbit_distance,
                   it.distance, it.report.alpha_size);
    o.report = LogToJson(r.log);
  } catch (const Error& e) {
    o.detail = std::string("refused: ") + e.what();
    o.report = o.detail;
  }
  return o;
}

Outcome Isomorphism10() {
  GExtensionSystem target = fixtures::LoopTarget(kLoopSize);
  auto source =
      std::make_shared<const GExtensionSystem>(fixtures::LoopSource(kLoopSize, kLoopPeriod));
  IterationSchedule schedule = LoopSchedule(kLoopSize, 3);
  Outcome o;
  try {
    FactorResult r = RunIsomorphism(target, source, source->labels, schedule, 64);
    const ConstructionLog& log = r.log;
    bool ok = log.generator_defects.size() == 3 && log.copy_distances.size() == 3;
    std::string parts;
    for (size_t k = 0; k < log.generator_defects.size(); ++k) {
      // The copy tolerance of interleave k is the regularity tolerance it feeds.
      double zeta = schedule.delta[k + 1];
      ok = ok && log.generator_defects[k] <= 2 * schedule.epsilon[k] &&
           log.copy_distances[k] < zeta;
      parts += Fmt("[defect %.4f<=%.4f copy %.4f<%.4f] ", log.generator_defects[k],
                   2 * schedule.epsilon[k], log.copy_distances[k], zeta);
    }
    ok = ok && log.separation_failure <= 0.3;
    o.pass = ok;
    o.detail = parts + Fmt("separation failure %.4f", log.separation_failure);
    o.report = LogToJson(log);
  } catch (const Error& e) {
    o.detail = std::string("refused: ") + e.what();
    o.report = o.detail;
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path out_dir = argc > 1 ? argv[1] : "acceptance_reports";
  std::vector<std::function<Outcome()>> criteria = {
      Kantorovich1, Convexity2, Sampling3, Exhaustion4, Cycles5,
      [] { return SingleStep(1, 60); }, [] { return SingleStep(2, 120); },
      Factor8, Identity9, Isomorphism10};
  auto write_reports = [&](const std::string& run, const std::vector<Outcome>& outcomes) {
    fs::create_directories(out_dir / run);
    for (size_t i = 0; i < outcomes.size(); ++i) {
      std::ofstream f(out_dir / run / ("criterion" + std::to_string(i + 1) + ".json"),
                      std::ios::binary);
      f << outcomes[i].report;
    }
  };
  std::vector<Outcome> first;
  bool all = true;
  for (size_t i = 0; i < criteria.size(); ++i) {
    first.push_back(criteria[i]());
    all = all && first.back().pass;
    std::printf("criterion %zu: %s  %s\n", i + 1, first.back().pass ? "PASS" : "FAIL",
                first.back().detail.c_str());
    std::fflush(stdout);
  }
  write_reports("run1", first);

  std::vector<Outcome> second;
  for (auto& c : criteria) second.push_back(c());
  write_reports("run2", second);
  int differing = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    auto read = [&](const std::string& run) {
      std::ifstream f(out_dir / run / ("criterion" + std::to_string(i + 1) + ".json"),
                      std::ios::binary);
      std::stringstream ss;
      ss << f.rdbuf();
      return ss.str();
    };
    differing += read("run1") != read("run2");
  }
  bool deterministic = differing == 0;
  all = all && deterministic;
  std::printf("criterion 11: %s  %d of %zu report files differ between two runs\n",
              deterministic ? "PASS" : "FAIL", differing, criteria.size());
  return all ? 0 : 1;
}
