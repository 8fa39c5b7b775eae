#include "speedup/improve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>

#include "speedup/cycles.hpp"
#include "speedup/matching.hpp"
#include "speedup/towers.hpp"

namespace speedup {

ImproveSchedule ImproveSchedule::Tuned(const ImproveParams& params) {
  ImproveSchedule s;
  // The top tower level leaves the domain, so 1/|F| < delta1/2 keeps room for
  // the points outside R'.
  const int floor_length = static_cast<int>(std::ceil(2.0 / params.delta1));
  s.model_length = std::max(2, (floor_length + params.n1 - 1) / params.n1) * params.n1;
  s.search = true;
  return s;
}

ImproveSchedule ImproveSchedule::Strict(const ImproveParams& params, const FiniteGroup& group) {
  const double eps_prime = DensityModulus(params.a2, params.epsilon, group);
  if (!(params.n > 100.0 / params.epsilon))
    throw Error("ScheduleInfeasible", "n > 100/epsilon fails");
  if (!(params.delta < std::pow(eps_prime, 4) / (std::ldexp(1.0, params.n) * 100.0)))
    throw Error("ScheduleInfeasible", "delta < eps'^4/(2^n * 100) fails");
  ImproveSchedule s;
  s.strict = true;
  const double zeta = std::min(params.delta / 100.0, params.delta1 * params.delta / 200.0);
  int len = static_cast<int>(std::ceil(params.n1 / zeta / params.n1)) * params.n1;
  s.model_length = std::max(2 * params.n1, len);
  s.model_max_length = 4 * s.model_length;
  s.min_atom_count = static_cast<int>(SamplingBound(params.delta, zeta, params.n));
  s.q_diameter = params.delta;
  s.theta_zeta = params.delta;
  s.phi_zeta = zeta;
  s.misc_delta = params.delta;
  s.sample_delta = params.delta;
  s.sample_zeta = zeta;
  s.exhaustion_epsilon = params.delta1 / 100.0;
  s.exhaustion_zeta = zeta;
  return s;
}

namespace {

Error Infeasible(const std::string& what) { return Error("ScheduleInfeasible", what); }

// Greedy cells of diameter < bound over the distinct names, in map order.
std::map<NameBlock, int> NameCells(const NameDistribution& names, double bound,
                                   const FiniteGroup& group, int* count) {
  std::map<NameBlock, int> cell;
  std::vector<std::vector<const NameBlock*>> members;
  const double den = static_cast<double>(group.metric_den());
  for (const auto& [name, c] : names.counts) {
    int found = -1;
    for (size_t k = 0; k < members.size() && found < 0; ++k) {
      bool fits = true;
      for (const NameBlock* other : members[k])
        fits = fits && NameDistanceNum(name, *other, group) / den < bound;
      if (fits) found = static_cast<int>(k);
    }
    if (found < 0) {
      found = static_cast<int>(members.size());
      members.emplace_back();
    }
    members[found].push_back(&name);
    cell[name] = found;
  }
  *count = static_cast<int>(members.size());
  return cell;
}

// Distinct names as points of a finite metric space.
struct NameSpace {
  std::map<NameBlock, int> index;
  std::vector<NameBlock> names;
  int Id(const NameBlock& b) {
    auto [it, inserted] = index.emplace(b, static_cast<int>(names.size()));
    if (inserted) names.push_back(b);
    return it->second;
  }
  FiniteMetricSpace Build(const FiniteGroup& group) const {
    const int k = static_cast<int>(names.size());
    std::vector<int64_t> d(static_cast<size_t>(k) * k);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) d[static_cast<size_t>(a) * k + b] = NameDistanceNum(names[a], names[b], group);
    return FiniteMetricSpace(k, std::move(d), group.metric_den());
  }
};

struct UsefulBlock {
  std::vector<int> points;  // absolute base points, increasing
  NameBlock name;           // (P v c)
  NameBlock name_a;         // (P v c v 1_A1)
};

struct Assembly {
  std::vector<int> exponent;
  std::vector<int> labels;
  TwistFunction alpha;
  std::vector<int> model_position;
  std::vector<char> used;
  std::vector<int> bases;
  std::map<std::string, double> diag;
};

// Writes one orbit through `points` carrying the model name. `start_g` is the
// coordinate of points[0] along the column orbit, so alpha only corrects the
// coordinates that disagree with F.
void WriteOrbit(const GExtensionSystem& source, const ModelName& model,
                const std::vector<int>& points, int start_g, Assembly* out) {
  const FiniteGroup& G = source.group;
  int coordinate = start_g;  // g_s = sigma^(x_s - x_0)(x_0) g_0
  for (size_t s = 0; s < points.size(); ++s) {
    int x = points[s];
    if (out->used[x]) throw Error("Collision", "base point " + std::to_string(x) + " reused");
    out->used[x] = 1;
    if (s > 0) {
      int gap = points[s] - points[s - 1];
      if (gap <= 0) throw Error("Collision", "orbit positions not increasing");
      out->exponent[points[s - 1]] = gap;
      coordinate = G.Mul(CocycleProduct(source, points[s - 1], gap), coordinate);
    }
    out->labels[x] = model.F[s].label;
    // alpha(x_s) g_s = g'_s
    out->alpha[x] = G.Mul(model.F[s].g, G.Inv(coordinate));
    out->model_position[x] = static_cast<int>(s);
  }
  out->exponent[points.back()] = 0;
  out->bases.push_back(points.front());
}

struct ColumnInput {
  const GExtensionSystem* source;
  const std::vector<int>* labels;
  const std::vector<char>* in_a1;
  const Ladder* ladder;
  const ModelName* model;
  const std::map<NameBlock, int>* q_cell;
  const ImproveParams* params;
  const ImproveSchedule* schedule;
  int column_base;
  int column_height;  // levels of the R' column; windows tile a prefix
  int window_length;
  int windows;
  std::vector<char> pseudo;  // per model block
};

void Note(std::map<std::string, double>* diag, const std::string& key, double value,
          bool take_min = false) {
  auto it = diag->find(key);
  if (it == diag->end())
    (*diag)[key] = value;
  else
    it->second = take_min ? std::min(it->second, value) : it->second + value;
}

// Steps 1-7 and 9 on one column of R'.
void BuildColumn(const ColumnInput& in, Assembly* out) {
  const GExtensionSystem& src = *in.source;
  const FiniteGroup& G = src.group;
  const int m = G.order();
  const int n = in.params->n;
  const int M = in.window_length;
  const int w = in.windows;
  const int span = M * w;
  const int height = in.column_height;
  const ModelName& model = *in.model;
  const int p = model.blocks();
  const ImproveSchedule& sch = *in.schedule;
  auto& diag = out->diag;

  // Coordinates tracked from (column base, id) along the source.
  std::vector<int> track(height);
  track[0] = G.identity();
  for (int j = 1; j < height; ++j) {
    int x = in.column_base + j - 1;
    track[j] = G.Mul(src.sigma[x], track[j - 1]);
  }

  // Useful blocks: old ladder blocks lying inside one window.
  std::vector<UsefulBlock> blocks;
  std::vector<std::vector<int>> windows_v(w);
  for (const auto& b : in.ladder->blocks) {
    int rel = b.front() - in.column_base;
    if (rel < 0 || rel >= span) continue;
    int s = rel / M;
    bool inside = true;
    for (size_t i = 0; i < b.size() && inside; ++i) {
      int r = b[i] - in.column_base;
      inside = r >= s * M && r < (s + 1) * M && (i == 0 || b[i] > b[i - 1]);
    }
    if (!inside) continue;
    UsefulBlock ub;
    ub.points = b;
    for (int x : b) {
      int g = track[x - in.column_base];
      ub.name.push_back(PackCoordinate({(*in.labels)[x], g}, m));
      ub.name_a.push_back(PackCoordinate({(*in.labels)[x] * 2 + (*in.in_a1)[x], g}, m));
    }
    windows_v[s].push_back(static_cast<int>(blocks.size()));
    blocks.push_back(std::move(ub));
  }
  size_t v_size = std::numeric_limits<size_t>::max();
  for (const auto& v : windows_v) v_size = std::min(v_size, v.size());
  for (auto& v : windows_v) v.resize(v_size);  // (same number): keep the lowest
  std::vector<int> real;
  for (int i = 0; i < p; ++i)
    if (!in.pseudo[i]) real.push_back(i);
  if (real.empty()) throw Infeasible("model name has no real n-blocks");
  if (v_size < real.size())
    throw Infeasible("|V_s| >= |J|: window holds " + std::to_string(v_size) +
                     " useful blocks for " + std::to_string(real.size()) + " real n-blocks");
  const auto& v0 = windows_v[0];
  Note(&diag, "sizing.useful_per_window", static_cast<double>(v_size), true);

  // theta: V_0 -> J, a distribution match onto the real blocks.
  NameSpace theta_space;
  std::vector<int> j_ids, v_ids;
  for (int i : real) j_ids.push_back(theta_space.Id(model.Block(i, m)));
  for (int v : v0) v_ids.push_back(theta_space.Id(blocks[v].name));
  Matching theta;
  try {
    theta = MatchSurjection(j_ids, v_ids, sch.theta_zeta, theta_space.Build(G));
  } catch (const Error& e) {
    throw Infeasible("theta match: " + e.detail());
  }
  Note(&diag, "step1.theta_good_fraction", static_cast<double>(theta.good) / v0.size(), true);

  // Step 1: Q_0 = Q o theta, R_0 = A1-names, miscellaneous atoms per q.
  std::vector<int> q0(v0.size());
  for (size_t v = 0; v < v0.size(); ++v)
    q0[v] = in.q_cell->at(model.Block(real[theta.map[v]], m));
  std::map<NameBlock, int> r_code;
  std::vector<int> r0(v0.size());
  for (size_t v = 0; v < v0.size(); ++v) {
    NameBlock bits;
    for (int x : blocks[v0[v]].points) bits.push_back((*in.in_a1)[x]);
    r0[v] = r_code.emplace(bits, static_cast<int>(r_code.size())).first->second;
  }
  std::map<int, std::vector<int>> q_members;
  for (size_t v = 0; v < v0.size(); ++v) q_members[q0[v]].push_back(static_cast<int>(v));
  std::vector<int> rt(v0.size());  // atom of R~_0 within q
  std::map<int, int> rt_atoms;      // q -> number of R~ atoms
  int misc_atoms = 0;
  for (auto& [q, mem] : q_members) {
    const double total = static_cast<double>(mem.size());
    std::map<int, std::vector<int>> by_r;
    for (int v : mem) by_r[r0[v]].push_back(v);
    std::vector<int> small;
    std::vector<std::vector<int>> kept;
    for (auto& [r, list] : by_r) {
      if (list.size() / total < sch.misc_delta)
        small.insert(small.end(), list.begin(), list.end());
      else
        kept.push_back(list);
    }
    if (!small.empty()) {
      ++misc_atoms;
      std::sort(small.begin(), small.end());
      if (small.size() / total >= sch.misc_delta || kept.empty()) {
        kept.push_back(small);
      } else {
        // Donor r: the largest atom; r' its lowest members with mass in
        // (2^-(n+2), 2^-(n+1)].
        size_t donor = 0;
        for (size_t k = 1; k < kept.size(); ++k)
          if (kept[k].size() > kept[donor].size()) donor = k;
        size_t carve = static_cast<size_t>(std::floor(std::ldexp(total, -(n + 1))));
        if (kept[donor].size() / total > std::ldexp(1.0, -n) && carve > 0 &&
            carve / total > std::ldexp(1.0, -(n + 2)) && carve < kept[donor].size()) {
          std::vector<int> carved(kept[donor].begin(), kept[donor].begin() + carve);
          kept[donor].erase(kept[donor].begin(), kept[donor].begin() + carve);
          carved.insert(carved.end(), small.begin(), small.end());
          std::sort(carved.begin(), carved.end());
          kept.push_back(carved);
        } else {
          // Too few members to carve r': the small atoms join the donor.
          kept[donor].insert(kept[donor].end(), small.begin(), small.end());
          std::sort(kept[donor].begin(), kept[donor].end());
          Note(&diag, "step1.misc_merged_into_donor", 1.0);
        }
      }
    }
    for (size_t k = 0; k < kept.size(); ++k)
      for (int v : kept[k]) rt[v] = static_cast<int>(k);
    rt_atoms[q] = static_cast<int>(kept.size());
  }
  Note(&diag, "step1.misc_atoms", misc_atoms);
  Note(&diag, "step1.q_atoms_in_v0", static_cast<double>(q_members.size()));

  // Step 2: f on the real blocks, one sampling per Q atom.
  std::map<int, std::vector<int>> j_by_q;  // q -> positions in `real`
  for (size_t k = 0; k < real.size(); ++k)
    j_by_q[in.q_cell->at(model.Block(real[k], m))].push_back(static_cast<int>(k));
  std::map<std::pair<int, int>, int> combined;
  std::vector<int> f(real.size());
  double worst_sample_error = 0.0;
  int collapsed = 0;
  for (auto& [q, js] : j_by_q) {
    auto qm = q_members.find(q);
    if (qm == q_members.end()) throw Infeasible("theta leaves a real block without preimage");
    const int atoms = rt_atoms[q];
    std::vector<int> local(js.size(), 0);
    if (atoms > 1) {
      std::vector<int64_t> mass(atoms, 0);
      for (int v : qm->second) ++mass[rt[v]];
      auto space = std::make_shared<const FiniteMetricSpace>(FiniteMetricSpace::Discrete(atoms));
      try {
        SampleAssignment a = SampleOnto(EmpiricalDistribution(space, mass),
                                        static_cast<int>(js.size()), sch.sample_delta,
                                        sch.sample_zeta, n);
        local = a.f;
        worst_sample_error = std::max(worst_sample_error, a.error);
      } catch (const Error& e) {
        if (sch.strict) throw Infeasible("sampling: " + e.detail());
        // Too few real blocks in q to sample R~^q: q keeps one atom.
        for (int v : qm->second) rt[v] = 0;
        rt_atoms[q] = 1;
        ++collapsed;
      }
    }
    for (size_t k = 0; k < js.size(); ++k) {
      auto key = std::make_pair(q, local[k]);
      auto it = combined.emplace(key, static_cast<int>(combined.size())).first;
      f[js[k]] = it->second;
    }
  }
  for (auto& [q, mem] : q_members)
    for (int v : mem) combined.emplace(std::make_pair(q, rt[v]), static_cast<int>(combined.size()));
  Note(&diag, "step2.sample_error_max", worst_sample_error);
  Note(&diag, "step2.collapsed_q_atoms", collapsed);

  // Step 3: samples tau_{0,t} from V_0 by exhaustion.
  std::vector<int> atom_of(v0.size());
  for (size_t v = 0; v < v0.size(); ++v) atom_of[v] = combined.at({q0[v], rt[v]});
  std::vector<int64_t> templ(combined.size(), 0);
  for (int a : f) ++templ[a];
  ExhaustionOptions opts;
  opts.epsilon = sch.exhaustion_epsilon;
  opts.zeta = sch.exhaustion_zeta;
  opts.enforce_size_bound = sch.strict;
  {
    std::vector<int64_t> counts(combined.size(), 0);
    for (int a : atom_of) ++counts[a];
    int64_t least = std::numeric_limits<int64_t>::max();
    for (int64_t c : counts)
      if (c > 0) least = std::min(least, c);
    opts.delta_prime = static_cast<double>(least) / v0.size();
  }
  SampleFamily family;
  try {
    family = ExhaustSamples(atom_of, templ, opts);
  } catch (const Error& e) {
    throw Infeasible("exhaustion: " + e.detail());
  }
  const int T = static_cast<int>(family.samples.size());
  if (T == 0) throw Infeasible("no complete sample in V_0");
  Note(&diag, "step3.samples", T);
  Note(&diag, "step3.leftover_fraction", family.leftover_fraction, true);
  // tau0[t][k]: index into V_0 for real block real[k].
  std::vector<std::vector<int>> tau0(T, std::vector<int>(real.size()));
  for (int t = 0; t < T; ++t) {
    std::vector<size_t> next(combined.size(), 0);
    for (size_t k = 0; k < real.size(); ++k) tau0[t][k] = family.samples[t][f[k]][next[f[k]]++];
  }

  // phi_s: V_s -> V_0 on (P v c v 1_A1)-names; stored as V_0 index -> V_s index.
  NameSpace a_space;
  std::vector<std::vector<int>> a_ids(w);
  for (int s = 0; s < w; ++s)
    for (int v : windows_v[s]) a_ids[s].push_back(a_space.Id(blocks[v].name_a));
  const FiniteMetricSpace a_metric = a_space.Build(G);
  std::vector<std::vector<int>> phi_inv(w);
  for (int s = 0; s < w; ++s) {
    if (s == 0) {
      phi_inv[0].resize(v_size);
      for (size_t v = 0; v < v_size; ++v) phi_inv[0][v] = static_cast<int>(v);
      continue;
    }
    try {
      Matching mt = MatchBijection(a_ids[s], a_ids[0], sch.phi_zeta, a_metric);
      phi_inv[s] = mt.map;
      Note(&diag, "step3.phi_good_fraction", static_cast<double>(mt.good) / v_size, true);
    } catch (const Error& e) {
      throw Infeasible("phi match in window " + std::to_string(s) + ": " + e.detail());
    }
  }

  // Step 4/5: real tuples of complete stages, then pseudo blocks from U_s.
  std::vector<int> j_of(p, -1);  // model block -> position in `real`
  for (size_t k = 0; k < real.size(); ++k) j_of[real[k]] = static_cast<int>(k);
  auto block_at = [&](int t, int s, int i) {
    return windows_v[s][phi_inv[s][tau0[t][j_of[i]]]];
  };
  std::vector<std::vector<char>> taken(w, std::vector<char>(M, 0));
  int real_tuples = 0, pseudo_tuples = 0, stages = 0;
  for (int t = 0; t < T; ++t)
    for (int l = 0; l < p; ++l)
      for (int j = 0; j < StageCount(w, p, l); ++j) {
        ++stages;
        for (int i : real) {
          int s = j * p + l + i;
          for (int x : blocks[block_at(t, s, i)].points)
            taken[s][x - in.column_base - s * M] = 1;
          ++real_tuples;
        }
      }
  // pseudo_points[t][s][i]: allocated lowest free positions of U_s.
  std::map<std::tuple<int, int, int>, std::vector<int>> pseudo_points;
  std::vector<int> cursor(w, 0);
  for (int t = 0; t < T; ++t)
    for (int l = 0; l < p; ++l)
      for (int j = 0; j < StageCount(w, p, l); ++j)
        for (int i = 0; i < p; ++i) {
          if (!in.pseudo[i]) continue;
          int s = j * p + l + i;
          std::vector<int> pts;
          while (static_cast<int>(pts.size()) < n && cursor[s] < M) {
            if (!taken[s][cursor[s]]) {
              taken[s][cursor[s]] = 1;
              pts.push_back(in.column_base + s * M + cursor[s]);
            }
            ++cursor[s];
          }
          if (static_cast<int>(pts.size()) < n)
            throw Infeasible("U_s too small for pseudo blocks in window " + std::to_string(s));
          pseudo_points[{t, s, i}] = std::move(pts);
          ++pseudo_tuples;
        }
  std::vector<WindowSamples> samples(T, WindowSamples(w, std::vector<int>(p, -1)));
  for (int t = 0; t < T; ++t)
    for (int s = 0; s < w; ++s)
      for (int i = 0; i < p; ++i) {
        int first;
        if (in.pseudo[i]) {
          auto it = pseudo_points.find({t, s, i});
          if (it == pseudo_points.end()) continue;
          first = it->second.front();
        } else {
          first = blocks[block_at(t, s, i)].points.front();
        }
        samples[t][s][i] = first - in.column_base - s * M;
      }
  std::vector<Cycle> cycles =
      BuildCycles(WindowSystem::Tiled(M, w), samples, p);
  Note(&diag, "step4.cycles", static_cast<double>(cycles.size()));
  Note(&diag, "step4.stages", stages);
  Note(&diag, "step4.real_tuples", real_tuples);
  Note(&diag, "step5.pseudo_tuples", pseudo_tuples);

  // Step 6/7: concatenate blocks along each stage into an orbit carrying F.
  int orbits = 0;
  for (const Cycle& c : cycles)
    for (const Stage& st : c.stages) {
      std::vector<int> pts;
      for (int i = 0; i < p; ++i) {
        int s = st.index * p + st.pass + i;
        const std::vector<int>& part =
            in.pseudo[i] ? pseudo_points.at({c.sample, s, i})
                         : blocks[block_at(c.sample, s, i)].points;
        if (part.front() != in.column_base + st.positions[i])
          throw Error("Collision", "stage position disagrees with its block");
        pts.insert(pts.end(), part.begin(), part.end());
      }
      WriteOrbit(src, model, pts, track[pts.front() - in.column_base], out);
      ++orbits;
    }
  Note(&diag, "step6.orbits", orbits);

  // Step 9: remaining levels of the column, order preserving, in runs of |F|.
  // Each model block takes the first free whole old ladder block after the
  // previous pick whose (P v c)-name equals it, else the first free whole
  // block, else single free levels; whole blocks stay unbroken.
  std::vector<int> rest;
  for (int j = 0; j < height; ++j)
    if (!out->used[in.column_base + j]) rest.push_back(in.column_base + j);
  const int len = static_cast<int>(model.F.size());
  const int runs = static_cast<int>(rest.size()) / len;
  std::vector<int> rest_index(height, -1);
  for (size_t i = 0; i < rest.size(); ++i) rest_index[rest[i] - in.column_base] = static_cast<int>(i);
  std::vector<std::vector<int>> whole;  // old ladder blocks as rest indices, by first level
  for (const auto& b : in.ladder->blocks) {
    std::vector<int> idx;
    for (int x : b) {
      int r = x - in.column_base;
      if (r < 0 || r >= height || rest_index[r] < 0) break;
      if (!idx.empty() && rest_index[r] <= idx.back()) break;  // wraps past the column
      idx.push_back(rest_index[r]);
    }
    if (static_cast<int>(idx.size()) == n) whole.push_back(std::move(idx));
  }
  std::sort(whole.begin(), whole.end());
  auto name_agrees = [&](int x, const NamePoint& f) {
    return (*in.labels)[x] == f.label && track[x - in.column_base] == f.g;
  };
  std::vector<char> free_level(rest.size(), 1);
  std::vector<int> free_after(rest.size() + 1);
  int extra = 0, agreeing = 0, whole_taken = 0;
  for (int r = 0; r < runs; ++r) {
    free_after[rest.size()] = 0;
    for (size_t i = rest.size(); i-- > 0;) free_after[i] = free_after[i + 1] + free_level[i];
    std::vector<int> run;
    int pos = 0;  // first rest index the run may still use
    size_t cursor = 0;
    for (int i = 0; i < p; ++i) {
      const int need_after = len - (i + 1) * n;
      const std::vector<int>* chosen = nullptr;
      const std::vector<int>* fallback = nullptr;
      for (; cursor < whole.size() && whole[cursor].front() < pos; ++cursor) {
      }
      for (size_t k = cursor; k < whole.size(); ++k) {
        const auto& idx = whole[k];
        if (free_after[idx.back() + 1] < need_after) break;
        bool free = true;
        for (int v : idx) free = free && free_level[v];
        if (!free) continue;
        if (fallback == nullptr) fallback = &idx;
        bool agrees = true;
        for (int c = 0; c < n && agrees; ++c) agrees = name_agrees(rest[idx[c]], model.F[i * n + c]);
        if (agrees) {
          chosen = &idx;
          break;
        }
      }
      if (chosen == nullptr) chosen = fallback;
      if (chosen != nullptr) {
        for (int c = 0; c < n; ++c) {
          int v = (*chosen)[c];
          free_level[v] = 0;
          run.push_back(rest[v]);
          agreeing += name_agrees(rest[v], model.F[i * n + c]);
        }
        pos = chosen->back() + 1;
        ++whole_taken;
        continue;
      }
      for (int c = 0; c < n; ++c) {
        while (pos < static_cast<int>(rest.size()) && !free_level[pos]) ++pos;
        if (pos == static_cast<int>(rest.size())) throw Error("Collision", "step 9 run overflows");
        free_level[pos] = 0;
        run.push_back(rest[pos]);
        agreeing += name_agrees(rest[pos], model.F[i * n + c]);
        ++pos;
      }
    }
    WriteOrbit(src, model, run, track[run.front() - in.column_base], out);
    ++extra;
  }
  Note(&diag, "step9.extra_orbits", extra);
  Note(&diag, "step9.agreeing_levels", agreeing);
  Note(&diag, "step9.whole_blocks", whole_taken);
}

}  // namespace

double GoodAFraction(const PartialSpeedup& speedup, int n1, const std::vector<int>& a1,
                     const std::vector<int>& a2, double epsilon) {
  const GExtensionSystem& ext = speedup.parent();
  const FiniteGroup& G = ext.group;
  std::vector<char> in_a1(ext.size, 0), in_a2(G.order(), 0);
  for (int x : a1) in_a1[x] = 1;
  for (int g : a2) in_a2[g] = 1;
  const double a_mass = static_cast<double>(a1.size()) / ext.size *
                        static_cast<double>(a2.size()) / G.order();
  Ladder ladder = BuildLadder(speedup, n1);
  int64_t good = 0, total = 0;
  for (const auto& block : ladder.blocks)
    for (int h = 0; h < G.order(); ++h) {
      int g = h, hits = 0;
      for (int i = 0; i < n1; ++i) {
        hits += in_a1[block[i]] && in_a2[g];
        if (i + 1 < n1) g = G.Mul(speedup.Skew(block[i]), g);
      }
      ++total;
      if (static_cast<double>(hits) / n1 > a_mass - epsilon) ++good;
    }
  return total == 0 ? 0.0 : static_cast<double>(good) / total;
}

ImprovementReport MeasureImprovement(const GExtensionSystem& target,
                                     const PartialSpeedup& current,
                                     const std::vector<int>& labels, const ImproveParams& params,
                                     const PartialSpeedup& next,
                                     const std::vector<int>& next_labels,
                                     const TwistFunction& alpha) {
  const GExtensionSystem& src = current.parent();
  const FiniteGroup& G = src.group;
  ImprovementReport r;
  r.n = params.n;
  r.n1 = params.n1;
  r.delta = params.delta;
  r.delta1 = params.delta1;
  r.epsilon = params.epsilon;
  r.hypothesis_distance =
      NameKantorovich(SystemBlockDistribution(target, params.n),
                      SpeedupBlockDistribution(current, labels, params.n), G);
  auto twisted = std::make_shared<const GExtensionSystem>(Twist(src, alpha));
  PartialSpeedup next_tw = next.Reparent(twisted);
  r.regularity = CheckRegular(next_tw, next_labels, params.n1, params.delta1);
  int64_t drift = 0;
  for (int x = 0; x < src.size; ++x) drift += labels[x] != next_labels[x];
  r.partition_drift = static_cast<double>(drift) / src.size;
  r.alpha_size = TwistSize(G, alpha);
  r.broken_mass = BrokenFraction(BuildLadder(current, params.n), current, next);
  NameDistribution speedup_n1 = SpeedupBlockDistribution(next_tw, next_labels, params.n1);
  r.final_distance =
      NameKantorovich(SystemBlockDistribution(target, params.n1), speedup_n1, G);
  r.a_mass = static_cast<double>(params.a1.size()) / src.size *
             static_cast<double>(params.a2.size()) / G.order();
  const SpeedupTower* tower = next.tower();
  if (tower != nullptr && tower->height % params.n1 == 0) {
    r.good_a_fraction = GoodAFraction(next, params.n1, params.a1, params.a2, params.epsilon);
    std::vector<int> starts;
    for (int i = 0; i < tower->height; i += params.n1) starts.push_back(i);
    for (int h = 0; h < G.order(); ++h) {
      auto name = SpeedupOrbitName(next_tw, next_labels, {tower->base.front(), h}, tower->height);
      r.ladder_distance_by_element.push_back(NameKantorovich(
          BlockDistribution(name, params.n1, starts, G.order()), speedup_n1, G));
    }
  }
  r.regular_ok = r.regularity.regular();
  r.drift_ok = r.partition_drift < params.epsilon;
  r.alpha_ok = r.alpha_size < params.epsilon;
  r.broken_ok = r.broken_mass < params.delta1;
  r.distance_ok = r.final_distance < params.delta1;
  r.good_a_ok = r.good_a_fraction > 1.0 - params.epsilon;
  return r;
}

namespace {

// Worst conclusion relative to its bound; below 1 when the five measured
// bounds hold, plus 1 when regularity fails.
double ConclusionScore(const ImprovementReport& r) {
  double s = std::max({r.partition_drift / r.epsilon, r.alpha_size / r.epsilon,
                       r.broken_mass / r.delta1, r.final_distance / r.delta1,
                       (1.0 - r.good_a_fraction) / r.epsilon});
  return r.regular_ok ? s : s + 1.0;
}

}  // namespace

ImproveResult Improve(const GExtensionSystem& target, const PartialSpeedup& current,
                      const std::vector<int>& labels, const ImproveParams& params,
                      const ImproveSchedule& schedule) {
  const GExtensionSystem& src = current.parent();
  const FiniteGroup& G = src.group;
  const int N = src.size;
  if (!(target.group == G)) throw Error("SpaceMismatch", "target and source groups differ");
  if (static_cast<int>(labels.size()) != N) throw Error("ValidationError", "labels size");
  if (params.n < 1 || params.n1 % params.n != 0)
    throw Error("ValidationError", "n1 must be a positive multiple of n");
  if (params.a2.empty()) throw Error("ValidationError", "A2 must be nonempty");

  RegularityCertificate cert = CheckRegular(current, labels, params.n, params.delta);
  if (!cert.regular()) throw Error("NotRegular", cert.refusal);
  NameDistribution target_n = SystemBlockDistribution(target, params.n);
  const double hypothesis =
      NameKantorovich(target_n, SpeedupBlockDistribution(current, labels, params.n), G);
  if (!(hypothesis < params.delta))
    throw Error("HypothesisDistance", "distance " + std::to_string(hypothesis) +
                                          " >= delta " + std::to_string(params.delta));

  int q_count = 0;
  std::map<NameBlock, int> q_cell = NameCells(target_n, schedule.q_diameter, G, &q_count);
  const NamePartition q_atom = [&](const NameBlock& b) {
    auto it = q_cell.find(b);
    return it == q_cell.end() ? -1 : it->second;
  };
  std::vector<char> in_a1(N, 0);
  for (int x : params.a1) in_a1[x] = 1;
  const Ladder ladder = BuildLadder(current, params.n);
  const int columns = std::max(1, schedule.columns);
  const int per_column = N / columns;

  ModelNameConfig mc;
  mc.n = params.n;
  mc.n1 = params.n1;
  mc.length = schedule.model_length > 0 ? schedule.model_length : 2 * params.n1;
  mc.max_length = std::max(mc.length, schedule.model_max_length);
  mc.tolerance_ab = params.delta1 / 100.0;
  mc.tolerance_c = params.delta;
  mc.min_atom_count = schedule.min_atom_count;
  mc.start_stride = schedule.model_stride;
  mc.max_candidates = schedule.model_candidates;
  // Searching tries every multiple of n1 from model_length while w >= p stays
  // possible (|F|/n windows of length |F| fit in a column); otherwise one
  // model, grown until (d) holds.
  std::vector<int> model_lengths;
  if (schedule.search) {
    for (int L = mc.length; static_cast<int64_t>(L / params.n) * L <= per_column; L += params.n1)
      model_lengths.push_back(L);
    if (model_lengths.empty()) model_lengths.push_back(mc.length);
  } else {
    model_lengths.push_back(0);
  }

  // Step 9 outside R', the report, and the Step 7 identity for one assembly.
  auto finish = [&](Assembly a, const ModelName& model, int M, int window_count) {
    const int len = model.length();
    // Outside R': one atom of P1 (the majority old label there), alpha = id.
    std::map<int, int> outside_votes;
    int outside = 0;
    for (int x = 0; x < N; ++x)
      if (!a.used[x]) {
        ++outside_votes[labels[x]];
        ++outside;
      }
    int outside_label = 0, best_votes = -1;
    for (auto [label, votes] : outside_votes)
      if (votes > best_votes) {
        best_votes = votes;
        outside_label = label;
      }
    for (int x = 0; x < N; ++x)
      if (!a.used[x]) a.labels[x] = outside_label;

    int k_max = 1;
    for (int k : a.exponent) k_max = std::max(k_max, k);
    ImproveResult out;
    out.speedup = PartialSpeedup(current.parent_ptr(), a.exponent, k_max);
    std::sort(a.bases.begin(), a.bases.end());
    out.speedup.set_tower({a.bases, len});
    out.labels = std::move(a.labels);
    out.alpha = std::move(a.alpha);
    out.model = model;
    out.model_position = std::move(a.model_position);
    out.report = MeasureImprovement(target, current, labels, params, out.speedup, out.labels,
                                    out.alpha);

    auto twisted = std::make_shared<const GExtensionSystem>(Twist(src, out.alpha));
    PartialSpeedup next_tw = out.speedup.Reparent(twisted);
    int mismatches = 0;
    for (int b : out.speedup.tower()->base)
      if (SpeedupOrbitName(next_tw, out.labels, {b, out.model.F[0].g}, len) != out.model.F)
        ++mismatches;
    auto& d = a.diag;
    d["sizing.model_length"] = len;
    d["sizing.p"] = model.blocks();
    d["sizing.window_length"] = M;
    d["sizing.windows"] = per_column / M;
    d["sizing.span"] = (per_column / M) * M;
    d["sizing.window_candidates"] = window_count;
    d["sizing.model_candidates"] = static_cast<double>(model_lengths.size());
    d["sizing.q_atoms"] = q_count;
    d["step0.model_distance_a"] = out.model.distance_a;
    d["step0.model_distance_b"] = out.model.distance_b;
    d["step0.model_worst_c"] = out.model.worst_c;
    d["step0.model_min_atom_count"] = out.model.min_atom_count;
    d["step7.name_mismatches"] = mismatches;
    d["step8.columns"] = columns;
    d["step9.outside_fraction"] = static_cast<double>(outside) / N;
    d["step9.tower_bases"] = static_cast<double>(out.speedup.tower()->base.size());
    d["tolerance.theta_zeta"] = schedule.theta_zeta;
    d["tolerance.phi_zeta"] = schedule.phi_zeta;
    d["tolerance.q_diameter"] = schedule.q_diameter;
    d["tolerance.misc_delta"] = schedule.misc_delta;
    d["tolerance.sample_delta"] = schedule.sample_delta;
    d["tolerance.sample_zeta"] = schedule.sample_zeta;
    d["tolerance.exhaustion_epsilon"] = schedule.exhaustion_epsilon;
    d["tolerance.strict"] = schedule.strict ? 1.0 : 0.0;
    out.report.diagnostics = std::move(d);
    return out;
  };

  std::optional<ImproveResult> best;
  double best_score = std::numeric_limits<double>::infinity();
  std::string last_failure = "no model length fits a column of " + std::to_string(per_column);
  for (int L : model_lengths) {
    ModelNameConfig config = mc;
    if (L > 0) config.length = config.max_length = L;
    ModelName model;
    try {
      model = BuildModelName(target, config, q_atom, q_count);
    } catch (const Error& e) {
      if (!schedule.search) throw Infeasible("model name: " + e.detail());
      last_failure = "model name: " + e.detail();
      continue;
    }
    const int len = model.length();
    const int p = model.blocks();
    std::vector<char> pseudo(p, 0);
    for (int i = 0; i < p; ++i) pseudo[i] = q_cell.count(model.Block(i, G.order())) == 0;

    std::vector<int> window_lengths;
    if (schedule.window_length > 0) {
      window_lengths.push_back(schedule.window_length);
    } else {
      for (int M = len; M * p <= per_column; M += params.n) window_lengths.push_back(M);
      const size_t cap = std::max(2, schedule.search_candidates);
      if (schedule.search && window_lengths.size() > cap) {
        std::vector<int> thin;
        for (size_t i = 0; i < cap; ++i)
          thin.push_back(window_lengths[i * (window_lengths.size() - 1) / (cap - 1)]);
        window_lengths = std::move(thin);
      }
    }
    if (window_lengths.empty())
      last_failure = "w >= p fails: a column of " + std::to_string(per_column) +
                     " points cannot hold p = " + std::to_string(p) +
                     " windows of length |F| = " + std::to_string(len) +
                     " (needs M' = w*M <= N)";
    for (int M : window_lengths) {
      const int w = per_column / M;
      if (w < p) {
        last_failure = "w >= p fails at M = " + std::to_string(M);
        continue;
      }
      Assembly a;
      a.exponent.assign(N, 0);
      a.labels = labels;
      a.alpha.assign(N, G.identity());
      a.model_position.assign(N, -1);
      a.used.assign(N, 0);
      try {
        for (int c = 0; c < columns; ++c) {
          ColumnInput in{&src,     &labels,   &in_a1,         &ladder,    &model, &q_cell,
                         &params,  &schedule, c * per_column, per_column, M,     w,
                         pseudo};
          BuildColumn(in, &a);
        }
      } catch (const Error& e) {
        if (e.kind() != "ScheduleInfeasible") throw;
        last_failure = e.detail() + " (M = " + std::to_string(M) + ")";
        continue;
      }
      ImproveResult r = finish(std::move(a), model, M, static_cast<int>(window_lengths.size()));
      if (!schedule.search) return r;
      const double score = ConclusionScore(r.report);
      if (score < best_score) {
        best_score = score;
        best = std::move(r);
      }
    }
  }
  if (!best) throw Infeasible(last_failure);
  best->report.diagnostics["sizing.search_score"] = best_score;
  return std::move(*best);
}

}  // namespace speedup
