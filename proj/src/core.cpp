#include "ect/core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace ect {

namespace {

std::string label_str(Label y) { return std::to_string(y); }

}  // namespace

LabelTree::LabelTree(int k, std::vector<Node> nodes) : k_(k), nodes_(std::move(nodes)) {
  if (k < 2) throw InvalidArgument("label tree needs at least 2 labels, got " + std::to_string(k));
  if (static_cast<int>(nodes_.size()) != k - 1)
    throw InvalidArgument("label tree over " + std::to_string(k) + " labels needs " +
                          std::to_string(k - 1) + " internal nodes");

  std::vector<int> label_seen(static_cast<std::size_t>(k), 0);
  std::vector<int> node_seen(nodes_.size(), 0);
  for (std::size_t n = 0; n < nodes_.size(); ++n) {
    nodes_[n].parent = -1;
  }
  for (std::size_t n = 0; n < nodes_.size(); ++n) {
    for (const NodeRef& child : {nodes_[n].left, nodes_[n].right}) {
      if (child.leaf) {
        if (child.index < 0 || child.index >= k)
          throw InvalidArgument("leaf label out of range: " + label_str(child.index));
        ++label_seen[static_cast<std::size_t>(child.index)];
      } else {
        if (child.index < 0 || child.index >= static_cast<int>(n))
          throw InvalidArgument("internal child must be indexed below its parent");
        ++node_seen[static_cast<std::size_t>(child.index)];
        nodes_[static_cast<std::size_t>(child.index)].parent = static_cast<int>(n);
      }
    }
  }
  for (int y = 0; y < k; ++y)
    if (label_seen[static_cast<std::size_t>(y)] != 1)
      throw InvalidArgument("label " + label_str(y) + " must appear at exactly one leaf");
  for (std::size_t n = 0; n + 1 < nodes_.size(); ++n)
    if (node_seen[n] != 1) throw InvalidArgument("internal node " + std::to_string(n) + " is not reachable exactly once");

  leafsets_.resize(nodes_.size());
  heights_.resize(nodes_.size());
  for (std::size_t n = 0; n < nodes_.size(); ++n) {
    auto& set = leafsets_[n];
    int h = 0;
    for (const NodeRef& child : {nodes_[n].left, nodes_[n].right}) {
      if (child.leaf) {
        set.push_back(child.index);
      } else {
        const auto& sub = leafsets_[static_cast<std::size_t>(child.index)];
        set.insert(set.end(), sub.begin(), sub.end());
        h = std::max(h, heights_[static_cast<std::size_t>(child.index)]);
      }
    }
    std::sort(set.begin(), set.end());
    heights_[n] = h + 1;
  }

  paths_.resize(static_cast<std::size_t>(k));
  for (std::size_t n = 0; n < nodes_.size(); ++n) {
    for (const auto& [child, side] : {std::pair{nodes_[n].left, Side::Left}, std::pair{nodes_[n].right, Side::Right}}) {
      if (!child.leaf) continue;
      auto& path = paths_[static_cast<std::size_t>(child.index)];
      int cur = static_cast<int>(n);
      Side s = side;
      while (cur >= 0) {
        path.push_back({cur, s});
        const int parent = nodes_[static_cast<std::size_t>(cur)].parent;
        if (parent >= 0) s = nodes_[static_cast<std::size_t>(parent)].left == NodeRef::internal(cur) ? Side::Left : Side::Right;
        cur = parent;
      }
      depth_ = std::max(depth_, static_cast<int>(path.size()));
    }
  }

  levels_.resize(static_cast<std::size_t>(heights_.back()));
  for (std::size_t n = 0; n < nodes_.size(); ++n) levels_[static_cast<std::size_t>(heights_[n] - 1)].push_back(static_cast<int>(n));
}

LabelTree LabelTree::balanced(int k) {
  if (k < 2) throw InvalidArgument("balanced tree needs k >= 2, got " + std::to_string(k));
  std::vector<Node> nodes;
  nodes.reserve(static_cast<std::size_t>(k - 1));
  std::function<NodeRef(int, int)> build = [&](int lo, int hi) -> NodeRef {
    const int n = hi - lo;
    if (n == 1) return NodeRef::label(lo);
    const int left_size = (n + 1) / 2;
    const NodeRef left = build(lo, lo + left_size);
    const NodeRef right = build(lo + left_size, hi);
    nodes.push_back({left, right, -1});
    return NodeRef::internal(static_cast<int>(nodes.size()) - 1);
  };
  build(0, k);
  return LabelTree(k, std::move(nodes));
}

bool LabelTree::contains(int n, Label y) const {
  const auto set = leafset(n);
  return std::binary_search(set.begin(), set.end(), y);
}

Side LabelTree::side_of(int n, Label y) const {
  for (const PathStep& step : path(y))
    if (step.node == n) return step.side;
  throw InvalidArgument("label " + label_str(y) + " is not under node " + std::to_string(n));
}

int LabelTree::lca(Label a, Label b) const {
  if (a == b) throw InvalidArgument("lca of a label with itself");
  for (const PathStep& step : path(a))
    if (contains(step.node, b)) return step.node;
  return root();
}

bool LabelTree::check_invariants() const {
  if (num_internal() != k_ - 1) return false;
  std::vector<Label> all(leafset(root()).begin(), leafset(root()).end());
  std::vector<Label> expect(static_cast<std::size_t>(k_));
  std::iota(expect.begin(), expect.end(), 0);
  if (all != expect) return false;
  for (int n = 0; n < num_internal(); ++n) {
    std::vector<Label> left, right;
    for (const auto& [child, out] : {std::pair{node(n).left, &left}, std::pair{node(n).right, &right}}) {
      if (child.leaf) out->push_back(child.index);
      else out->assign(leafset(child.index).begin(), leafset(child.index).end());
    }
    std::vector<Label> both;
    std::set_intersection(left.begin(), left.end(), right.begin(), right.end(), std::back_inserter(both));
    if (!both.empty()) return false;
    std::vector<Label> merged;
    std::merge(left.begin(), left.end(), right.begin(), right.end(), std::back_inserter(merged));
    if (!std::equal(merged.begin(), merged.end(), leafset(n).begin(), leafset(n).end())) return false;
  }
  return true;
}

ConditionalDistribution::ConditionalDistribution(std::vector<double> p) : p_(std::move(p)) {
  if (p_.size() < 2) throw InvalidArgument("distribution needs at least 2 labels");
  double sum = 0.0;
  for (double v : p_) {
    if (!std::isfinite(v) || v < 0.0) throw InvalidArgument("probabilities must be finite and nonnegative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kProbabilityTolerance)
    throw InvalidArgument("probabilities sum to " + std::to_string(sum) + ", not 1");
}

double ConditionalDistribution::max_probability() const { return *std::max_element(p_.begin(), p_.end()); }

Label ConditionalDistribution::best() const {
  return static_cast<Label>(std::max_element(p_.begin(), p_.end()) - p_.begin());
}

std::vector<double> label_regrets(const ConditionalDistribution& dist) {
  const double top = dist.max_probability();
  std::vector<double> r;
  r.reserve(dist.probabilities().size());
  for (double p : dist.probabilities()) r.push_back(top - p);
  return r;
}

CostVector::CostVector(std::vector<double> c) : c_(std::move(c)) {
  for (double v : c_)
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("costs must lie in [0, 1]");
}

namespace {

void validate_common(const Example& e, std::size_t i) {
  for (double v : e.features)
    if (!std::isfinite(v)) throw InvalidArgument("example " + std::to_string(i) + " has a nonfinite feature");
  if (!std::isfinite(e.weight) || e.weight < 0.0)
    throw InvalidArgument("example " + std::to_string(i) + " has an invalid weight");
}

}  // namespace

void validate_multiclass(std::span<const Example> examples, int k) {
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const Example& e = examples[i];
    validate_common(e, i);
    if (!e.is_multiclass()) throw InvalidArgument("example " + std::to_string(i) + " is not multiclass");
    if (e.label() < 0 || e.label() >= k)
      throw InvalidArgument("example " + std::to_string(i) + " label " + label_str(e.label()) + " out of range");
  }
}

void validate_cost_sensitive(std::span<const Example> examples, int k) {
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const Example& e = examples[i];
    validate_common(e, i);
    if (e.is_multiclass()) throw InvalidArgument("example " + std::to_string(i) + " carries a label, not costs");
    if (e.costs().num_labels() != k)
      throw InvalidArgument("example " + std::to_string(i) + " has " + std::to_string(e.costs().num_labels()) +
                            " costs, expected " + std::to_string(k));
  }
}

}  // namespace ect
