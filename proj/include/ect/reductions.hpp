#pragma once

// Multiclass and cost-sensitive reductions to binary classification: the
// plain divide-and-conquer tree, the filter tree, its cost-sensitive form,
// all-pairs, and the all-pairs filter tree.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ect/core.hpp"
#include "ect/learners.hpp"

namespace ect {

enum class ReductionKind { Tree, FilterTree, CsFilterTree, AllPairs, Apft };

std::string to_string(ReductionKind kind);
ReductionKind parse_reduction_kind(const std::string& name);

// One binary decision per internal node. In shared mode a single classifier
// per tree level sees the features with a one-hot node id appended.
class NodeClassifierSet {
 public:
  NodeClassifierSet() = default;
  NodeClassifierSet(std::vector<Classifier> classifiers, bool shared, int num_nodes);

  Side decide(const LabelTree& tree, int node, std::span<const double> x) const;

  bool shared() const { return shared_; }
  int num_nodes() const { return num_nodes_; }
  const std::vector<Classifier>& classifiers() const { return classifiers_; }

 private:
  std::vector<Classifier> classifiers_;
  bool shared_ = false;
  int num_nodes_ = 0;
};

// Features with a one-hot encoding of `node` among `num_nodes` appended.
std::vector<double> with_node_id(std::span<const double> x, int node, int num_nodes);

// Index of the unordered pair {a, b} among k labels (a != b).
int pair_index(int k, Label a, Label b);

// Cost-sensitive node example for arriving labels a (left) and b (right):
// the cheaper side with importance |c_a - c_b| times the example weight.
// Nothing when the costs tie.
std::optional<WeightedBinaryExample> cs_node_example(const Example& e, Label a, Label b);

struct TrainingCounters {
  // Binary examples emitted per internal node (tree kinds) or per pair.
  std::vector<std::size_t> examples_per_node;
  std::size_t oracle_calls = 0;
  // Max over examples and tree levels of the number of nodes at that level
  // the example was routed to during training.
  std::size_t max_touches_per_level = 0;
};

struct ReductionModel {
  ReductionKind kind = ReductionKind::FilterTree;
  LabelTree tree = LabelTree::balanced(2);
  NodeClassifierSet nodes;        // Tree, FilterTree, CsFilterTree
  std::vector<Classifier> pairs;  // AllPairs, Apft; Left means the lower label wins
  TrainingCounters counters;
  std::vector<std::string> warnings;
  std::vector<std::string> label_names;  // empty when labels are bare ids

  int num_labels() const { return tree.num_labels(); }
};

struct TrainOptions {
  bool shared = false;
  // Keep, per internal node, the indices of the training examples routed to it.
  bool record_membership = false;
};

struct TrainResult {
  ReductionModel model;
  std::vector<std::vector<std::size_t>> membership;  // filled when requested
};

TrainResult train_tree(std::span<const Example> examples, const LabelTree& tree, const NodeLearner& learner,
                       const TrainOptions& opts = {});
TrainResult train_filter_tree(std::span<const Example> examples, const LabelTree& tree, const NodeLearner& learner,
                              const TrainOptions& opts = {});
TrainResult train_cs_filter_tree(std::span<const Example> examples, const LabelTree& tree,
                                 const NodeLearner& learner, const TrainOptions& opts = {});
TrainResult train_all_pairs(std::span<const Example> examples, int k, const NodeLearner& learner);
TrainResult train_apft(std::span<const Example> examples, const LabelTree& tree, const NodeLearner& learner);

// Dispatch on kind. Cost-sensitive examples are required for CsFilterTree and
// rejected elsewhere.
TrainResult train(ReductionKind kind, std::span<const Example> examples, const LabelTree& tree,
                  const NodeLearner& learner, const TrainOptions& opts = {});

struct DecodeResult {
  Label label = 0;
  // Internal nodes on the returned label's path, root first.
  std::vector<int> path;
  std::size_t evaluations = 0;
};

DecodeResult decode(const ReductionModel& model, std::span<const double> x);

// Fraction of multiclass examples whose decoded label differs (weighted).
double error_rate(const ReductionModel& model, std::span<const Example> examples);
// Mean cost of the decoded label over cost-sensitive examples (weighted).
double mean_cost(const ReductionModel& model, std::span<const Example> examples);

}  // namespace ect
