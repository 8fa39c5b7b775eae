#pragma once

#include <memory>
#include <string>
#include <vector>

#include "speedup/improve.hpp"

namespace speedup {

struct Rectangle {
  std::vector<int> a1;  // base points
  std::vector<int> a2;  // group elements
};

struct IterationSchedule {
  int budget = 0;
  std::vector<int> n;          // n_0 .. n_budget
  std::vector<double> delta;   // delta_0 .. delta_budget
  std::vector<double> epsilon; // epsilon_0 .. epsilon_{budget-1}
  double total_epsilon = 0.0;
  std::vector<Rectangle> rectangles;  // cycled: A^(k) = rectangles[k mod size]
  ImproveSchedule improve;     // tolerances for every improve call
  // epsilon_k = total * 2^-(k+2), delta_k = delta0 * 2^-k.
  static IterationSchedule Halving(int budget, std::vector<int> n, double delta0,
                                   double total_epsilon, std::vector<Rectangle> rectangles);
  const Rectangle& RectangleAt(int k) const { return rectangles[k % rectangles.size()]; }
  // Violated invariants, one line each; empty when all hold.
  std::vector<std::string> Check() const;
};

struct BootstrapResult {
  PartialSpeedup speedup;
  RegularityCertificate certificate;
  double change_mass = 0.0;  // mass where the speedup differs from the source map
};

// One speedup orbit of consecutive points whose length is a multiple of n;
// the base point and length minimize the ladder distance. Throws Infeasible
// naming the binding constraint.
BootstrapResult BootstrapRegular(std::shared_ptr<const GExtensionSystem> source,
                                 const std::vector<int>& labels, int n, double delta,
                                 double epsilon, int base_stride = 0);

// Fraction of base points where the exponent is not 1.
double ChangeMass(const PartialSpeedup& speedup);
// Fraction of base points where the exponents differ.
double ChangedBetween(const PartialSpeedup& a, const PartialSpeedup& b);

// Links the tower orbits, then the points outside them, into a single cycle,
// preferring a chain order whose cycle holonomy generates G.
PartialSpeedup FullExtension(const PartialSpeedup& speedup);

struct FullGroupPiece {
  int from = 0;   // packed x * |G| + g
  int power = 0;  // signed power of the speedup
  int to = 0;
};

struct FullGroupWitness {
  int set_from = 0, set_to = 0;
  std::vector<FullGroupPiece> pieces;
  int64_t carried = 0;
  int64_t required = 0;
};

// sets hold packed points x * |G| + g. For each ordered pair with
// |C_i| < |C_j| (and for i == j) a piecewise-power map carrying at least
// ceil((1-eps)|C_i|) points of C_i into C_j. Throws NotReachable.
std::vector<FullGroupWitness> ErgodicityCertificate(const PartialSpeedup& speedup,
                                                    const std::vector<std::vector<int>>& sets,
                                                    double epsilon);

// Applies a witness; returns the number of pieces landing in C_j.
int64_t ExecuteWitness(const PartialSpeedup& speedup, const FullGroupWitness& witness,
                       const std::vector<int>& set_to);

struct IterationRecord {
  int k = 0;
  ImprovementReport report;
  double distance = 0.0;      // n_k-distance after the step
  double delta = 0.0;         // delta_k it is logged against
  double changed_mass = 0.0;  // exponents changed by this step
  double drift = 0.0;
  bool below_delta = false;
};

struct ConstructionLog {
  double bootstrap_change = 0.0;
  RegularityCertificate bootstrap_certificate;
  std::vector<IterationRecord> iterations;
  std::vector<TwistFunction> alphas;  // per iteration
  TwistFunction beta;                 // pointwise product, latest outermost
  double cumulative_drift = 0.0;
  double cumulative_change = 0.0;     // bootstrap + sum of changed masses
  double direct_change = 0.0;         // measured against the source map
  std::vector<std::string> schedule_warnings;
  std::vector<FullGroupWitness> witnesses;
  ErgodicityWitness final_ergodicity;
  // Isomorphism runs only.
  std::vector<double> generator_defects;
  std::vector<int> generator_windows;
  std::vector<double> copy_distances;
  double separation_failure = 0.0;
};

struct FactorResult {
  std::shared_ptr<const GExtensionSystem> twisted;  // source twisted by beta
  PartialSpeedup last;        // last regular speedup over `twisted`
  PartialSpeedup full;        // FullExtension(last)
  std::vector<int> labels;
  TwistFunction beta;
  std::vector<int> model_position;  // from the last step; -1 off the orbits
  ModelName model;
  ConstructionLog log;
};

// source carries its partition `labels`; ergodicity sets are checked on the
// full extension when nonempty. Refusals are rethrown as
// "<kind> at iteration k: <detail>".
FactorResult RunFactor(const GExtensionSystem& target,
                       std::shared_ptr<const GExtensionSystem> source,
                       const std::vector<int>& labels, const IterationSchedule& schedule,
                       const std::vector<std::vector<int>>& ergodicity_sets = {},
                       double ergodicity_epsilon = 0.1);

struct CopyResult {
  std::vector<int> q;        // partition of the small base
  double distance = 0.0;     // joint (P v Q v c) n-distribution distance
  double factor_defect = 0.0;  // fraction of big points where phi fails to commute
  int tower_height = 0;
  int columns = 0;
};

// phi maps big base points to small base points (-1 where undefined); the
// pair is a G-factor where phi(x+1) = phi(x)+1 and the skews agree. Columns
// of a height-`height` tower on the small base take Q-names from the pooled
// Q-names above their preimages. Throws TowerInfeasible when height > N or
// n > height.
CopyResult CopyPartition(const GExtensionSystem& big, const GExtensionSystem& small,
                         const std::vector<int>& phi, const std::vector<int>& q_big, int n,
                         int height);

// The process (full speedup, labels v alpha c) as a base cycle of its own,
// listed along the cycle from `start`.
struct SpeedupProcess {
  GExtensionSystem system;
  std::vector<int> order;  // system point i = base point order[i]
};
SpeedupProcess ProcessOfSpeedup(const PartialSpeedup& full, const std::vector<int>& labels,
                                int start);

// Source cylinder sets [w] at position 0, words of length 1, 2, ... present
// in `labels`, in lexicographic order, concatenated.
std::vector<std::vector<int>> CylinderSequence(const GExtensionSystem& system,
                                               const std::vector<int>& labels, int max_length);

// Best approximation of `set` by unions of atoms of the names over
// [-window, window] of `labels` along the full speedup.
double ApproximationDefect(const PartialSpeedup& full, const std::vector<int>& labels,
                           const std::vector<int>& set, int window);

// Fraction of unordered base-point pairs sharing the labels-name of length
// `length` along the full speedup.
double SeparationFailure(const PartialSpeedup& full, const std::vector<int>& labels, int length);

// True when the length-N names of the labels separate all base points.
bool IsGenerator(const GExtensionSystem& system);

// Finite stand-in for the orbit factor map: big runs whose (labels v c)-name
// over `height` points, with the last skew value, equals the name of a small
// tower base b (multiples of height) map level by level onto b + i; other
// points map to -1. Earlier tower bases win ties.
std::vector<int> NameMatchedFactor(const GExtensionSystem& big, const GExtensionSystem& small,
                                   int height);

FactorResult RunIsomorphism(const GExtensionSystem& target,
                            std::shared_ptr<const GExtensionSystem> source,
                            const std::vector<int>& labels, const IterationSchedule& schedule,
                            int copy_height);

struct SeedResult {
  std::vector<int> labels;
  TwistFunction alpha;
  SkewPoint start;            // target start point
  double orbit_distance = 0.0;  // n-distribution of the copied orbit vs the target
};

// Copies the (P v c)-name of the target orbit segment of length `length` from
// the best start (x, id) onto the source from (0, id); the rest of the source
// continues the same orbit. start >= 0 fixes x instead of searching. A
// full-length orbit is scored cyclically. Throws NoGoodOrbit when no start is
// within zeta.
SeedResult SeedFromOrbit(const GExtensionSystem& target, const GExtensionSystem& source,
                         int length, double zeta, int n, int start = -1);

struct TruncationResult {
  std::vector<int> labels;
  double merged_mass = 0.0;
  double distance = 0.0;  // n-name distributions of P and P_N
};

// Atoms with index >= cut merge into atom `cut`.
TruncationResult TruncatePartition(const GExtensionSystem& system, int cut, int n);

}  // namespace speedup
