#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <random>

#include <json.hpp>

#include "speedup/driver.hpp"
#include "speedup/spec_io.hpp"

namespace speedup::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

void WriteFile(const RunConfig& config, const std::string& name, const std::string& text) {
  fs::create_directories(config.out_dir);
  std::ofstream out(fs::path(config.out_dir) / name, std::ios::binary);
  if (!out) throw Error("ValidationError", "cannot write " + name + " in " + config.out_dir);
  out << text;
}

// One rectangle per iteration: A1 is a seeded random half of the base, A2 a
// seeded single element. This is the only place the seed enters.
std::vector<Rectangle> SeededRectangles(const GExtensionSystem& system, uint64_t seed,
                                        int count) {
  std::mt19937_64 rng(seed);
  std::vector<Rectangle> out(std::max(1, count));
  for (Rectangle& r : out) {
    for (int x = 0; x < system.size; ++x)
      if (rng() & 1) r.a1.push_back(x);
    if (r.a1.empty()) r.a1.push_back(0);
    r.a2 = {static_cast<int>(rng() % static_cast<uint64_t>(system.group.order()))};
  }
  return out;
}

ImproveParams ParamsOf(const RunConfig& c, const Rectangle& r) {
  return ImproveParams{c.n, c.delta, c.n1, c.delta1, c.epsilon, r.a1, r.a2};
}

ImproveSchedule ScheduleOf(const RunConfig& c, const ImproveParams& p, const FiniteGroup& g) {
  return c.strict_schedule ? ImproveSchedule::Strict(p, g) : ImproveSchedule::Tuned(p);
}

IterationSchedule LoopSchedule(const RunConfig& c, const GExtensionSystem& source) {
  std::vector<int> n(c.budget + 1, c.n1);
  n[0] = c.n;
  IterationSchedule s = IterationSchedule::Halving(c.budget, n, c.delta, c.epsilon,
                                                   SeededRectangles(source, c.seed, c.budget));
  s.improve = ScheduleOf(c, ParamsOf(c, s.RectangleAt(0)), source.group);
  return s;
}

// The (label, g) classes of the constructed partition, at most four.
std::vector<std::vector<int>> LabelClasses(const std::vector<int>& labels, int group_order) {
  std::map<int, std::vector<int>> classes;
  for (size_t x = 0; x < labels.size(); ++x)
    for (int g = 0; g < group_order; ++g)
      classes[labels[x] * group_order + g].push_back(static_cast<int>(x) * group_order + g);
  std::vector<std::vector<int>> out;
  for (auto& [key, members] : classes)
    if (out.size() < 4) out.push_back(std::move(members));
  return out;
}

int Metrics(const RunConfig& c, std::ostream& log) {
  GExtensionSystem target = LoadSystemSpec(c.target_path);
  GExtensionSystem source = LoadSystemSpec(c.source_path);
  if (!(target.group == source.group)) throw Error("SpaceMismatch", "groups differ");
  NameDistribution t = SystemBlockDistribution(target, c.n);
  NameDistribution s = SystemBlockDistribution(source, c.n);
  double d = NameKantorovich(t, s, target.group);
  WriteFile(c, "metrics.json",
            MetricsToJson(c.n, d, static_cast<int>(t.counts.size()),
                          static_cast<int>(s.counts.size())));
  log << "metrics: distance " << d << "\n";
  return 0;
}

int ImproveCommand(const RunConfig& c, std::ostream& log) {
  GExtensionSystem target = LoadSystemSpec(c.target_path);
  auto source = std::make_shared<const GExtensionSystem>(LoadSystemSpec(c.source_path));
  Rectangle rect = SeededRectangles(*source, c.seed, 1).front();
  ImproveParams params = ParamsOf(c, rect);
  ImproveSchedule schedule = ScheduleOf(c, params, source->group);
  BootstrapResult boot = BootstrapRegular(source, source->labels, c.n, c.delta, c.epsilon);
  ImproveResult r = Improve(target, boot.speedup, source->labels, params, schedule);
  WriteFile(c, "report.json", ReportToJson(r.report));
  WriteFile(c, "speedup.json", SerializeSpeedup(r.speedup, r.labels, r.alpha));
  log << "improve: all conclusions " << (r.report.all_hold() ? "hold" : "do not hold") << "\n";
  return r.report.all_hold() ? 0 : 1;
}

int FactorCommand(const RunConfig& c, std::ostream& log, bool isomorphism) {
  GExtensionSystem target = LoadSystemSpec(c.target_path);
  auto source = std::make_shared<const GExtensionSystem>(LoadSystemSpec(c.source_path));
  IterationSchedule schedule = LoopSchedule(c, *source);
  FactorResult r = isomorphism
                       ? RunIsomorphism(target, source, source->labels, schedule, c.copy_height)
                       : RunFactor(target, source, source->labels, schedule,
                                   LabelClasses(source->labels, source->group.order()), 0.1);
  WriteFile(c, "log.json", LogToJson(r.log));
  WriteFile(c, "speedup.json", SerializeSpeedup(r.full, r.labels, r.beta));
  bool ok = true;
  for (const IterationRecord& it : r.log.iterations) ok = ok && it.below_delta;
  if (isomorphism) {
    for (size_t k = 0; k < r.log.generator_defects.size(); ++k)
      ok = ok && r.log.generator_defects[k] <= 2.0 * schedule.epsilon[k];
    ok = ok && r.log.separation_failure <= c.epsilon;
  }
  log << (isomorphism ? "iso" : "factor") << ": " << r.log.iterations.size()
      << " iterations, checks " << (ok ? "pass" : "fail") << "\n";
  return ok ? 0 : 1;
}

int SeedOrbitCommand(const RunConfig& c, std::ostream& log) {
  GExtensionSystem target = LoadSystemSpec(c.target_path);
  GExtensionSystem source = LoadSystemSpec(c.source_path);
  int length = c.orbit_length > 0 ? c.orbit_length : source.size;
  SeedResult r = SeedFromOrbit(target, source, length, c.delta, c.n);
  GExtensionSystem seeded = Twist(source, r.alpha);
  seeded.labels = r.labels;
  Json out;
  out["start"] = {{"x", r.start.x}, {"g", r.start.g}};
  out["orbit_length"] = length;
  out["orbit_distance"] = Round12(r.orbit_distance);
  out["alpha_size"] = Round12(TwistSize(source.group, r.alpha));
  out["alpha"] = r.alpha;
  WriteFile(c, "seed.json", out.dump(2) + "\n");
  WriteFile(c, "seeded_source.json", SerializeSystem(seeded));
  log << "seed-orbit: start " << r.start.x << ", distance " << r.orbit_distance << "\n";
  return 0;
}

}  // namespace

std::string ValidateConfig(const RunConfig& c) {
  auto unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!unit(c.delta) || !unit(c.delta1) || !unit(c.epsilon))
    return "tolerances must lie in (0, 1)";
  if (c.budget < 0) return "budget must be >= 0";
  if (c.n < 1 || c.n1 < 1 || c.copy_height < 1 || c.orbit_length < 0)
    return "block lengths must be positive";
  if (c.target_path.empty() || c.source_path.empty()) return "--target and --source are required";
  return {};
}

int ExitCodeFor(const std::string& kind) {
  static const std::map<std::string, int> codes = {
      {"ParseError", 2},        {"ValidationError", 3}, {"HypothesisDistance", 4},
      {"NotRegular", 5},        {"ScheduleInfeasible", 6}, {"Infeasible", 7},
      {"NoGoodOrbit", 8},       {"GeneratorCheckFailed", 9}, {"NotReachable", 10},
  };
  auto it = codes.find(kind);
  return it == codes.end() ? 11 : it->second;
}

int RunCommand(const RunConfig& config, std::ostream& log) {
  std::string invalid = ValidateConfig(config);
  try {
    if (!invalid.empty()) throw Error("ValidationError", invalid);
    if (config.command == "metrics") return Metrics(config, log);
    if (config.command == "improve") return ImproveCommand(config, log);
    if (config.command == "factor") return FactorCommand(config, log, false);
    if (config.command == "iso") return FactorCommand(config, log, true);
    if (config.command == "seed-orbit") return SeedOrbitCommand(config, log);
    throw Error("ValidationError", "unknown command '" + config.command + "'");
  } catch (const Error& e) {
    WriteFile(config, "refusal.json", RefusalToJson(e.kind(), e.detail()));
    log << config.command << ": refused: " << e.what() << "\n";
    return ExitCodeFor(e.kind());
  }
}

}  // namespace speedup::cli
