#pragma once

// Executable checks of the filter-tree regret bounds, the tournament depth
// formulas and the worked examples, plus regret instrumentation.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ect/core.hpp"
#include "ect/learners.hpp"
#include "ect/tournaments.hpp"

namespace ect {

// Cost-sensitive distribution for one fixed context: a finite mixture of
// cost vectors.
struct CostDistribution {
  std::vector<CostVector> outcomes;
  std::vector<double> probs;

  int num_labels() const { return outcomes.empty() ? 0 : outcomes.front().num_labels(); }
  std::vector<double> expected_costs() const;
  void validate() const;
};

// Multiclass distribution as costs: label y costs 0 when drawn, 1 otherwise.
CostDistribution as_cost_distribution(const ConditionalDistribution& dist);

struct NodeRegret {
  int node = 0;
  Label a = 0, b = 0;  // arriving labels
  Label output = 0;
  double W = 0.0;    // E|c_a - c_b|
  double r = 0.0;    // |E c_a - E c_b| when the costlier side advanced, else 0
  double reg = 0.0;  // r / W (importance-weighted binary regret), 0 when W = 0
};

struct RegretReport {
  int k = 0;
  Label prediction = 0;
  std::vector<NodeRegret> nodes;
  double sum_W = 0.0;
  double sum_r = 0.0;
  double avg_regret = 0.0;  // sum_n reg_n W_n / sum_n W_n
  double creg = 0.0;
  double main_bound = 0.0;  // avg_regret * sum_W
  double k_bound = 0.0;     // k * avg_regret / 2

  double main_slack() const { return main_bound - creg; }
  double k_slack() const { return k_bound - creg; }
};

// Evaluates the tree with fixed node decisions (one per internal node) on
// the distribution and computes both regret bounds.
RegretReport check_filter_theorems(const LabelTree& tree, const CostDistribution& dist,
                                   const std::vector<Side>& decisions);

// Decisions for assignment index `bits`: bit n is node n's side.
std::vector<Side> decisions_from_bits(int num_nodes, std::uint64_t bits);

// Seeded instance generator: 1 to 3 uniformly random cost vectors with
// random mixing weights.
CostDistribution random_cost_distribution(int k, std::uint64_t seed);

struct SweepConfig {
  std::vector<int> ks{2, 3, 4, 5, 6};
  int distributions = 256;
  std::uint64_t seed = 1;
  double tolerance = 1e-9;
  std::size_t max_dumps = 20;
  int jobs = 1;
};

struct SweepCheck {
  std::size_t violations = 0;
  double worst_slack = kUnbounded;
};

struct Counterexample {
  std::string check;  // "main" or "bound"
  int k = 0;
  std::uint64_t instance_seed = 0;
  std::uint64_t assignment = 0;
  CostDistribution dist;
  double lhs = 0.0;  // creg
  double rhs = 0.0;
};

struct SweepReport {
  std::size_t instances = 0;  // (distribution, assignment) pairs
  std::size_t distributions = 0;
  SweepCheck main, bound;
  std::vector<Counterexample> counterexamples;
};

SweepReport filter_theorem_sweep(const SweepConfig& cfg);

nlohmann::ordered_json to_json(const Counterexample& c);
Counterexample counterexample_from_json(const nlohmann::json& j);
// Re-evaluates a dumped instance.
RegretReport replay(const Counterexample& c);

struct Lemma1Result {
  double S = 0.0;    // S_T
  double I = 0.0;    // I_T
  double c_T = 0.0;  // winner cost
  Label winner = 0;
  bool holds = true;  // S_T + c_T <= I_T + k/2
};

AuditCounters audit(const LabelTree& tree, const CostVector& costs, const std::vector<Side>& decisions, Label* winner = nullptr);
Lemma1Result lemma1_check(const CostVector& costs, const std::vector<Side>& decisions);

struct Lemma1Sweep {
  std::size_t checked = 0;
  std::size_t violations = 0;
  double worst_slack = kUnbounded;
};

Lemma1Sweep lemma1_sweep(const std::vector<int>& ks, int per_k, std::uint64_t seed);

struct Tightness {
  double reg_T = 0.0;
  double S_T = 0.0;
  double I_T = 0.0;
  double ratio = 0.0;
};

// Alternating costs (label i costs i mod 2) on the balanced tree with the
// last label winning every game. k must be a power of two, k >= 4.
Tightness tightness_example(int k);

struct InconsistencyResult {
  double tree_regret = 0.0;
  double ft_regret = 0.0;
  Label tree_prediction = 0;
  Label ft_prediction = 0;
};

// Three labels with probabilities (1/4 + eps, 1/4 + eps, 1/2 - 2 eps) and a
// single context. The oracle learner sees exact probability-weighted
// examples; other learners see n_samples seeded draws.
InconsistencyResult inconsistency_demo(double eps, int n_samples, LearnerKind learner, std::uint64_t seed = 1);

int ceil_log2(long long k);
long long ceil_pow2(long long m);
long long floor_pow2(long long m);

double chernoff_depth(double k, int m);

struct DepthBounds {
  int k = 0, m = 0;
  std::vector<double> first_phase;  // applicable first-phase cases (3 or 4)
  std::vector<double> importance;   // applicable importance-depth cases (3 or 4)
  bool case4 = false;               // m <= 4 log2 k
  long long ceil_m2 = 1, floor_m2 = 1;
  double chernoff_d = 0.0;
  int second_phase = 0;  // ceil_m2 - 1 for m > 1, else 0

  double min_first_phase() const;
  double min_importance() const;
};

DepthBounds depth_bounds(int k, int m);

struct LevelTracker {
  int rounds = 0;
  std::vector<std::vector<long long>> occupancy;  // before round 1 and after each round
};

// Halving-with-byes count simulation of the loss pools: each round a pool
// of n keeps ceil(n/2) and sends floor(n/2) to the next pool (the last pool
// eliminates them). Stops once every pool holds at most one label.
LevelTracker level_tracker(long long k, int m);

struct MeasuredDepth {
  int first_phase_rounds = 0;  // max over outcome patterns
  int final_depth = 0;
  int importance_depth = 0;
  int patterns = 0;
};

// Runs truthful, reversed and random outcome patterns.
MeasuredDepth measure_depth(int k, int m, Semantics semantics, int random_patterns = 3, std::uint64_t seed = 1);

// Bracketed m-elimination final phase, for comparison: sum_{i=1}^m (i - 1).
int bracketed_final_rounds(int m);

double multi_bound_1(int k, double m);
double multi_bound_2(int k, double m);

struct RatioReport {
  int k = 0, m = 0;
  Semantics semantics = Semantics::Complete;
  double worst_ratio = 0.0;
  std::string worst_source;
  double dethroning_cost = kUnbounded;
  bool dethroning_exact = true;
  double bound_1 = 0.0;
  bool bound_1_applies = false;
  double bound_2 = 0.0;
  bool bound_2_applies = false;
  // m = 1: the filter-tree corollary, ratio <= tree depth.
  std::optional<double> corollary_bound;
};

// Measures regret ratios d * reg / adversary regret for the exhaustive
// dethroning witness, the parity strategy and the budget liars. Reported,
// not asserted.
RatioReport ratio_report(int k, int m, Semantics semantics, const DethroningOptions& search = {});

}  // namespace ect
