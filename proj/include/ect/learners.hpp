#pragma once

// Binary and importance-weighted binary learners, plus the costing transform
// from importance-weighted to plain binary examples.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ect/core.hpp"

namespace ect {

enum class LearnerKind { LogisticSgd, DecisionStump, Constant, BayesOracle };

std::string to_string(LearnerKind kind);
LearnerKind parse_learner_kind(const std::string& name);

// P(Right | x) per context, keyed on the exact feature vector.
using OracleTable = std::map<std::vector<double>, double>;

struct LearnerSpec {
  LearnerKind kind = LearnerKind::LogisticSgd;
  double lr = 0.1;
  int epochs = 10;
  std::uint64_t seed = 42;
  Side constant_side = Side::Left;
  // BayesOracle only. When null the oracle reads the conditionals off the
  // training weights, which is exact for probability-weighted enumerations.
  std::shared_ptr<const OracleTable> oracle;

  void validate() const;
};

struct ConstantModel {
  Side side = Side::Left;
};

// Decision is Right iff w.x + b > 0.
struct LogisticModel {
  std::vector<double> w;
  double b = 0.0;
};

// x[feature] <= threshold goes to `below`, everything else to the other side.
struct StumpModel {
  int feature = 0;
  double threshold = 0.0;
  Side below = Side::Left;
};

// Right iff P(Right | x) > 1/2; unseen contexts go Left.
struct TruthTableModel {
  OracleTable p_right;
};

struct Classifier {
  std::variant<ConstantModel, LogisticModel, StumpModel, TruthTableModel> model;

  Side predict(std::span<const double> x) const;
};

// Throws InvalidArgument on nonfinite features or negative weights, and
// TrainingDataError when a trainable kind gets no data.
Classifier learn(const LearnerSpec& spec, std::span<const WeightedBinaryExample> examples);

enum class CostingNormalization { MaxWeight, UnitCap };

struct CostingConfig {
  CostingNormalization normalization = CostingNormalization::MaxWeight;
  std::uint64_t seed = 1;
};

struct CostingResult {
  std::vector<WeightedBinaryExample> kept;  // weights reset to 1
  bool all_zero = false;                    // nothing to sample from
};

// Rejection sampling: example i survives with probability w_i / w_max
// (MaxWeight) or min(w_i, 1) (UnitCap).
CostingResult costing_resample(std::span<const WeightedBinaryExample> examples, const CostingConfig& cfg);

// How the reductions train their per-node classifiers.
struct NodeLearner {
  LearnerSpec spec;
  // Importance weights are turned into samples with costing before training
  // learners that ignore weights in their loss. Set to false to pass weights
  // straight through.
  bool costing = true;
  CostingNormalization normalization = CostingNormalization::MaxWeight;

  Classifier train(std::span<const WeightedBinaryExample> examples, std::uint64_t stream) const;
};

// Sum w * 1(pred != y) / sum w; nullopt when the total weight is zero.
std::optional<double> weighted_error(const Classifier& f, std::span<const WeightedBinaryExample> examples);

// Minimum weighted error attainable by any function of the exact features,
// i.e. the truth-table optimum sum_x min(w_left(x), w_right(x)) / sum w.
std::optional<double> truth_table_min_error(std::span<const WeightedBinaryExample> examples);

// weighted_error minus truth_table_min_error.
std::optional<double> weighted_regret(const Classifier& f, std::span<const WeightedBinaryExample> examples);

}  // namespace ect
