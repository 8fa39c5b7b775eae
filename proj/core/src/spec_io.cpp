#include "speedup/spec_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace speedup {

using Json = nlohmann::ordered_json;

double Round12(double v) {
  if (!std::isfinite(v)) return v;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

namespace {

Error ParseFailure(const std::string& what) { return Error("ParseError", what); }

int LineOf(const std::string& text, size_t byte) {
  int line = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) line += text[i] == '\n';
  return line;
}

Json ParseText(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseFailure("line " + std::to_string(LineOf(text, e.byte)) + ": " + e.what());
  }
}

const Json& Field(const Json& obj, const char* name) {
  if (!obj.is_object() || !obj.contains(name))
    throw ParseFailure(std::string("missing field '") + name + "'");
  return obj.at(name);
}

int64_t Integer(const Json& v, const std::string& field) {
  if (!v.is_number_integer()) throw ParseFailure("field '" + field + "' must be an integer");
  return v.get<int64_t>();
}

std::vector<int> IntList(const Json& v, const std::string& field) {
  if (!v.is_array()) throw ParseFailure("field '" + field + "' must be an array");
  std::vector<int> out;
  for (size_t i = 0; i < v.size(); ++i)
    out.push_back(static_cast<int>(Integer(v[i], field + "[" + std::to_string(i) + "]")));
  return out;
}

template <typename T>
std::vector<T> Matrix(const Json& v, const std::string& field, int order) {
  if (!v.is_array() || static_cast<int>(v.size()) != order)
    throw ParseFailure("field '" + field + "' must have " + std::to_string(order) + " rows");
  std::vector<T> out;
  for (int r = 0; r < order; ++r) {
    std::string row_field = field + "[" + std::to_string(r) + "]";
    if (!v[r].is_array() || static_cast<int>(v[r].size()) != order)
      throw ParseFailure("field '" + row_field + "' must have " + std::to_string(order) + " entries");
    for (int c = 0; c < order; ++c)
      out.push_back(static_cast<T>(Integer(v[r][c], row_field + "[" + std::to_string(c) + "]")));
  }
  return out;
}

FiniteGroup ParseGroup(const Json& g) {
  const std::string type = Field(g, "type").is_string() ? g.at("type").get<std::string>() : "";
  const int order = static_cast<int>(Integer(Field(g, "order"), "group.order"));
  if (order < 1) throw Error("ValidationError", "group order must be positive");
  if (type == "cyclic") return FiniteGroup::Cyclic(order);
  if (type == "table")
    return FiniteGroup::FromTables(Matrix<int>(Field(g, "mul"), "group.mul", order),
                                   Matrix<int64_t>(Field(g, "metric_num"), "group.metric_num", order),
                                   Integer(Field(g, "metric_den"), "group.metric_den"));
  throw ParseFailure("field 'group.type' must be \"cyclic\" or \"table\"");
}

GExtensionSystem SystemFromJson(const Json& doc) {
  const Json& s = doc.is_object() && doc.contains("system") ? doc.at("system") : doc;
  if (s.contains("base") && !(s.at("base").is_string() && s.at("base") == "cycle"))
    throw Error("ValidationError", "only the cyclic base x -> x+1 mod N is supported");
  GExtensionSystem sys;
  sys.size = static_cast<int>(Integer(Field(s, "size"), "size"));
  sys.labels = IntList(Field(s, "labels"), "labels");
  sys.group = ParseGroup(Field(s, "group"));
  sys.sigma = IntList(Field(s, "sigma"), "sigma");
  std::string problem = sys.Check();
  if (!problem.empty()) throw Error("ValidationError", problem);
  return sys;
}

Json GroupToJson(const FiniteGroup& g) {
  Json out;
  if (g.cyclic_order() == g.order() && FiniteGroup::Cyclic(g.order()) == g) {
    out["type"] = "cyclic";
    out["order"] = g.order();
    return out;
  }
  out["type"] = "table";
  out["order"] = g.order();
  Json mul = Json::array(), metric = Json::array();
  for (int a = 0; a < g.order(); ++a) {
    Json row = Json::array(), mrow = Json::array();
    for (int b = 0; b < g.order(); ++b) {
      row.push_back(g.Mul(a, b));
      mrow.push_back(g.MetricNum(a, b));
    }
    mul.push_back(row);
    metric.push_back(mrow);
  }
  out["mul"] = mul;
  out["metric_num"] = metric;
  out["metric_den"] = g.metric_den();
  return out;
}

Json SystemToJson(const GExtensionSystem& s) {
  Json out;
  out["size"] = s.size;
  out["base"] = "cycle";
  out["group"] = GroupToJson(s.group);
  out["labels"] = s.labels;
  out["sigma"] = s.sigma;
  return out;
}

std::string Dump(const Json& j) { return j.dump(2) + "\n"; }

Json CertificateToJson(const RegularityCertificate& c) {
  Json out;
  out["n"] = c.n;
  out["delta"] = Round12(c.delta);
  out["regular"] = c.regular();
  out["refusal"] = c.refusal;
  out["height"] = c.height;
  out["tower_bases"] = c.tower_base.size();
  out["disjoint_tower"] = c.disjoint_tower;
  out["bounded_exponent"] = c.bounded_exponent;
  out["max_exponent"] = c.max_exponent;
  out["fiberwise_identical"] = c.fiberwise_identical;
  out["height_multiple"] = c.height_multiple;
  out["max_ladder_distance"] = Round12(c.max_ladder_distance);
  out["ladder_close"] = c.ladder_close;
  out["domain_mass"] = Round12(c.domain_mass);
  out["domain_large"] = c.domain_large;
  return out;
}

Json ReportJson(const ImprovementReport& r) {
  Json out;
  out["n"] = r.n;
  out["n1"] = r.n1;
  out["delta"] = Round12(r.delta);
  out["delta1"] = Round12(r.delta1);
  out["epsilon"] = Round12(r.epsilon);
  out["hypothesis_distance"] = Round12(r.hypothesis_distance);
  Json c;
  c["regularity"] = {{"holds", r.regular_ok}, {"certificate", CertificateToJson(r.regularity)}};
  c["partition_drift"] = {{"holds", r.drift_ok}, {"value", Round12(r.partition_drift)}};
  c["alpha_size"] = {{"holds", r.alpha_ok}, {"value", Round12(r.alpha_size)}};
  c["broken_mass"] = {{"holds", r.broken_ok}, {"value", Round12(r.broken_mass)}};
  c["final_distance"] = {{"holds", r.distance_ok}, {"value", Round12(r.final_distance)}};
  c["good_a_fraction"] = {{"holds", r.good_a_ok}, {"value", Round12(r.good_a_fraction)},
                          {"a_mass", Round12(r.a_mass)}};
  out["conclusions"] = c;
  out["all_conclusions_hold"] = r.all_hold();
  Json by = Json::array();
  for (double d : r.ladder_distance_by_element) by.push_back(Round12(d));
  out["ladder_distance_by_element"] = by;
  Json diag = Json::object();
  for (const auto& [k, v] : r.diagnostics) diag[k] = Round12(v);
  out["diagnostics"] = diag;
  return out;
}

Json WitnessesJson(const std::vector<FullGroupWitness>& ws) {
  Json out = Json::array();
  for (const auto& w : ws)
    out.push_back({{"from_set", w.set_from},
                   {"to_set", w.set_to},
                   {"carried", w.carried},
                   {"required", w.required},
                   {"pieces", w.pieces.size()}});
  return out;
}

std::vector<double> Rounded(const std::vector<double>& v) {
  std::vector<double> out;
  for (double d : v) out.push_back(Round12(d));
  return out;
}

}  // namespace

GExtensionSystem ParseSystemSpec(const std::string& text) { return SystemFromJson(ParseText(text)); }

GExtensionSystem LoadSystemSpec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseFailure("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseSystemSpec(ss.str());
}

std::string SerializeSystem(const GExtensionSystem& system) { return Dump(SystemToJson(system)); }

std::string SerializeSpeedup(const PartialSpeedup& speedup, const std::vector<int>& labels,
                             const TwistFunction& alpha) {
  const GExtensionSystem& src = speedup.parent();
  Json out;
  out["system"] = SystemToJson(src);
  Json sp;
  sp["domain"] = Json::array();
  std::vector<int> skew;
  GExtensionSystem twisted = Twist(src, alpha);
  for (int x = 0; x < src.size; ++x) {
    if (speedup.InDomain(x)) sp["domain"].push_back(x);
    skew.push_back(speedup.InDomain(x) ? CocycleProduct(twisted, x, speedup.exponent()[x])
                                       : src.group.identity());
  }
  sp["exponent"] = speedup.exponent();
  sp["k_max"] = speedup.k_max();
  sp["skew"] = skew;
  if (const SpeedupTower* t = speedup.tower())
    sp["tower"] = {{"base", t->base}, {"height", t->height}};
  out["speedup"] = sp;
  out["labels"] = labels;
  out["alpha"] = alpha;
  return Dump(out);
}

SpeedupSpec ParseSpeedupSpec(const std::string& text) {
  Json doc = ParseText(text);
  SpeedupSpec out;
  out.system = SystemFromJson(doc);
  const Json& sp = Field(doc, "speedup");
  out.exponent = IntList(Field(sp, "exponent"), "speedup.exponent");
  out.skew = IntList(Field(sp, "skew"), "speedup.skew");
  out.labels = IntList(Field(doc, "labels"), "labels");
  out.alpha = IntList(Field(doc, "alpha"), "alpha");
  if (sp.contains("tower")) {
    out.tower.base = IntList(Field(sp.at("tower"), "base"), "speedup.tower.base");
    out.tower.height = static_cast<int>(Integer(Field(sp.at("tower"), "height"), "speedup.tower.height"));
  }
  const size_t n = static_cast<size_t>(out.system.size);
  if (out.exponent.size() != n || out.skew.size() != n || out.labels.size() != n ||
      out.alpha.size() != n)
    throw Error("ValidationError", "speedup arrays must have one entry per base point");
  return out;
}

std::string ReportToJson(const ImprovementReport& report) { return Dump(ReportJson(report)); }

std::string LogToJson(const ConstructionLog& log) {
  Json out;
  out["bootstrap_change"] = Round12(log.bootstrap_change);
  out["bootstrap_certificate"] = CertificateToJson(log.bootstrap_certificate);
  Json its = Json::array();
  for (const auto& r : log.iterations)
    its.push_back({{"k", r.k},
                   {"distance", Round12(r.distance)},
                   {"delta", Round12(r.delta)},
                   {"below_delta", r.below_delta},
                   {"changed_mass", Round12(r.changed_mass)},
                   {"drift", Round12(r.drift)},
                   {"report", ReportJson(r.report)}});
  out["iterations"] = its;
  out["cumulative_drift"] = Round12(log.cumulative_drift);
  out["cumulative_change"] = Round12(log.cumulative_change);
  out["direct_change"] = Round12(log.direct_change);
  out["beta"] = log.beta;
  out["schedule_warnings"] = log.schedule_warnings;
  out["witnesses"] = WitnessesJson(log.witnesses);
  out["final_ergodicity"] = {{"ergodic", log.final_ergodicity.ergodic},
                             {"holonomy", log.final_ergodicity.holonomy},
                             {"holonomy_order", log.final_ergodicity.holonomy_order},
                             {"cycle_length", log.final_ergodicity.cycle_length}};
  out["generator_defects"] = Rounded(log.generator_defects);
  out["generator_windows"] = log.generator_windows;
  out["copy_distances"] = Rounded(log.copy_distances);
  out["separation_failure"] = Round12(log.separation_failure);
  return Dump(out);
}

std::string RefusalToJson(const std::string& kind, const std::string& detail) {
  Json out;
  out["refusal"] = kind;
  out["detail"] = detail;
  return Dump(out);
}

std::string MetricsToJson(int n, double distance, int target_names, int source_names) {
  Json out;
  out["n"] = n;
  out["distance"] = Round12(distance);
  out["target_distinct_names"] = target_names;
  out["source_distinct_names"] = source_names;
  return Dump(out);
}

}  // namespace speedup
