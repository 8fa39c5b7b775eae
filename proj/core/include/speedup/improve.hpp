#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "speedup/model_name.hpp"
#include "speedup/regularity.hpp"
#include "speedup/systems.hpp"

namespace speedup {

struct ImproveParams {
  int n = 1;
  double delta = 0.1;
  int n1 = 1;
  double delta1 = 0.1;
  double epsilon = 0.1;
  std::vector<int> a1;  // base subset, as a list of points
  std::vector<int> a2;  // group subset, nonempty
};

// Every tolerance the construction uses. Tuned() picks desk-scale values;
// Strict() applies the sufficient constants and refuses when they cannot hold.
struct ImproveSchedule {
  bool strict = false;
  int model_length = 0;      // |F|; 0 picks 2 * n1
  int model_max_length = 0;  // 0 picks model_length
  int model_stride = 0;      // 0 spreads the candidates over the target skew cycle
  int model_candidates = 256;
  // Tries every model length (multiples of n1 from model_length while w >= p
  // can hold) and up to search_candidates window lengths each, keeping the
  // assembly whose measured conclusions are best. Off: first assembly wins.
  bool search = false;
  int search_candidates = 24;
  int min_atom_count = 0;    // K in (d)
  double q_diameter = 1e-9;  // diameter of the Q cells on n-names
  int window_length = 0;     // M; 0 tries lengths from |F| upward
  int columns = 1;           // columns of the long tower R'
  double theta_zeta = 1.0;   // theta: V_0 -> J match tolerance
  double phi_zeta = 1.0;     // phi_s: V_s -> V_0 match tolerance
  double misc_delta = 0.0;   // Step 1 threshold for small R atoms
  double sample_delta = 1.0;
  double sample_zeta = 1.0;
  double exhaustion_epsilon = 1.0;
  double exhaustion_zeta = 0.0;

  static ImproveSchedule Tuned(const ImproveParams& params);
  // Throws ScheduleInfeasible naming the first failed constant.
  static ImproveSchedule Strict(const ImproveParams& params, const FiniteGroup& group);
};

struct ImprovementReport {
  int n = 0, n1 = 0;
  double delta = 0.0, delta1 = 0.0, epsilon = 0.0;
  double hypothesis_distance = 0.0;
  RegularityCertificate regularity;  // of the twisted result at (n1, delta1)
  double partition_drift = 0.0;      // fraction of base points with P1 != P
  double alpha_size = 0.0;           // mean rho(alpha, id)
  double broken_mass = 0.0;
  double final_distance = 0.0;
  double good_a_fraction = 0.0;
  double a_mass = 0.0;               // (mu x lambda)(A1 x A2)
  // Regularity-4 ladder distance of the first tower base point, per starting
  // group element.
  std::vector<double> ladder_distance_by_element;
  bool regular_ok = false, drift_ok = false, alpha_ok = false, broken_ok = false,
       distance_ok = false, good_a_ok = false;
  bool all_hold() const {
    return regular_ok && drift_ok && alpha_ok && broken_ok && distance_ok && good_a_ok;
  }
  // "stepK.key" -> value; sizes and tolerances actually used included.
  std::map<std::string, double> diagnostics;
};

struct ImproveResult {
  PartialSpeedup speedup;      // over the untwisted source
  std::vector<int> labels;     // P1
  TwistFunction alpha;
  ModelName model;
  // Orbit position in F of each base point on a constructed orbit, else -1.
  std::vector<int> model_position;
  ImprovementReport report;
};

// `current` must be (n, delta)-regular over the source with `labels`.
// Throws NotRegular, HypothesisDistance, or ScheduleInfeasible.
ImproveResult Improve(const GExtensionSystem& target, const PartialSpeedup& current,
                      const std::vector<int>& labels, const ImproveParams& params,
                      const ImproveSchedule& schedule);

// Recomputes every measured report field from the outputs.
ImprovementReport MeasureImprovement(const GExtensionSystem& target,
                                     const PartialSpeedup& current,
                                     const std::vector<int>& labels, const ImproveParams& params,
                                     const PartialSpeedup& next,
                                     const std::vector<int>& next_labels,
                                     const TwistFunction& alpha);

// Mass of n1-ladder points whose orbit frequency of A1 x A2 exceeds
// (mu x lambda)(A) - epsilon, over the ladder mass.
double GoodAFraction(const PartialSpeedup& speedup, int n1, const std::vector<int>& a1,
                     const std::vector<int>& a2, double epsilon);

}  // namespace speedup
