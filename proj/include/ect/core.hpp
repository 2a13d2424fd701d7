#pragma once

// Domain types shared by every module: label trees, conditional
// distributions, cost vectors and training examples.

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ect/error.hpp"

namespace ect {

using Label = int;

// Binary decision at an internal node. Left is the lower-index side and is
// the tie-break everywhere.
enum class Side : std::uint8_t { Left = 0, Right = 1 };

constexpr Side opposite(Side s) { return s == Side::Left ? Side::Right : Side::Left; }
constexpr int to_bit(Side s) { return static_cast<int>(s); }
constexpr Side from_bit(int bit) { return bit ? Side::Right : Side::Left; }

// Child reference inside a LabelTree: either a leaf (label) or an internal node.
struct NodeRef {
  bool leaf = true;
  int index = 0;

  static NodeRef label(Label y) { return {true, y}; }
  static NodeRef internal(int node) { return {false, node}; }
  friend bool operator==(const NodeRef&, const NodeRef&) = default;
};

// Binary tree over k labels. Internal nodes are indexed 0..k-2 with children
// always indexed below their parent, so ascending index order is a valid
// leaves-to-root order.
class LabelTree {
 public:
  struct Node {
    NodeRef left;
    NodeRef right;
    int parent = -1;
  };

  struct PathStep {
    int node;
    Side side;  // which child of `node` the label lives under
  };

  // Validates structure: k leaves, k-1 internal nodes, each label exactly once,
  // children indexed below parents.
  LabelTree(int k, std::vector<Node> nodes);

  // Recursive halving with the larger half on the left, so the right-most
  // subtree is the shallow one when a level is odd. Depth is ceil(log2 k).
  static LabelTree balanced(int k);

  int num_labels() const { return k_; }
  int num_internal() const { return static_cast<int>(nodes_.size()); }
  int root() const { return num_internal() - 1; }
  const Node& node(int n) const { return nodes_.at(static_cast<std::size_t>(n)); }
  const std::vector<Node>& nodes() const { return nodes_; }

  // Sorted labels under internal node n.
  std::span<const Label> leafset(int n) const { return leafsets_.at(static_cast<std::size_t>(n)); }
  bool contains(int n, Label y) const;
  Side side_of(int n, Label y) const;

  // Internal nodes from the leaf's parent up to the root.
  std::span<const PathStep> path(Label y) const { return paths_.at(static_cast<std::size_t>(y)); }
  int leaf_depth(Label y) const { return static_cast<int>(path(y).size()); }
  int depth() const { return depth_; }

  // Height of an internal node: 1 for nodes whose children are both leaves.
  int height(int n) const { return heights_.at(static_cast<std::size_t>(n)); }
  // levels()[h-1] lists the internal nodes of height h in index order.
  const std::vector<std::vector<int>>& levels() const { return levels_; }

  int lca(Label a, Label b) const;

  // Checks the leaf-set partition invariant on every node.
  bool check_invariants() const;

 private:
  int k_;
  std::vector<Node> nodes_;
  std::vector<std::vector<Label>> leafsets_;
  std::vector<std::vector<PathStep>> paths_;
  std::vector<int> heights_;
  std::vector<std::vector<int>> levels_;
  int depth_ = 0;
};

inline constexpr double kProbabilityTolerance = 1e-9;

// D(y | x) for one fixed context x.
class ConditionalDistribution {
 public:
  // Rejects negative entries and sums outside 1 +- 1e-9; never renormalizes.
  explicit ConditionalDistribution(std::vector<double> p);

  int num_labels() const { return static_cast<int>(p_.size()); }
  double operator[](Label y) const { return p_.at(static_cast<std::size_t>(y)); }
  const std::vector<double>& probabilities() const { return p_; }
  double max_probability() const;
  // Lowest label attaining the max.
  Label best() const;

 private:
  std::vector<double> p_;
};

// r_y = p* - p_y for every label.
std::vector<double> label_regrets(const ConditionalDistribution& dist);

class CostVector {
 public:
  explicit CostVector(std::vector<double> c);

  int num_labels() const { return static_cast<int>(c_.size()); }
  double operator[](Label y) const { return c_.at(static_cast<std::size_t>(y)); }
  const std::vector<double>& values() const { return c_; }

 private:
  std::vector<double> c_;
};

struct Example {
  std::vector<double> features;
  std::variant<Label, CostVector> payload;
  // Sample multiplicity. 1 for ordinary data; enumerated synthetic
  // distributions carry exact probabilities here.
  double weight = 1.0;

  bool is_multiclass() const { return std::holds_alternative<Label>(payload); }
  Label label() const { return std::get<Label>(payload); }
  const CostVector& costs() const { return std::get<CostVector>(payload); }
};

// Throws InvalidArgument unless every example is multiclass with a label in
// [0, k) (or, for cost-sensitive, carries exactly k costs), with finite
// features and a finite nonnegative weight.
void validate_multiclass(std::span<const Example> examples, int k);
void validate_cost_sensitive(std::span<const Example> examples, int k);

struct WeightedBinaryExample {
  std::vector<double> features;
  Side y = Side::Left;
  double w = 1.0;
};

// Per-example audit of a filter tree evaluated on one cost vector.
struct AuditCounters {
  double total_importance = 0.0;  // S_T: sum over nodes of |c_a - c_b|
  double upset_importance = 0.0;  // I_T: same sum over nodes where the costlier input advanced
  double winner_cost = 0.0;       // c_T
};

}  // namespace ect
