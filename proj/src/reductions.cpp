#include "ect/reductions.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace ect {

std::string to_string(ReductionKind kind) {
  switch (kind) {
    case ReductionKind::Tree: return "tree";
    case ReductionKind::FilterTree: return "filter_tree";
    case ReductionKind::CsFilterTree: return "cs_filter_tree";
    case ReductionKind::AllPairs: return "all_pairs";
    case ReductionKind::Apft: return "apft";
  }
  return "?";
}

ReductionKind parse_reduction_kind(const std::string& name) {
  if (name == "tree") return ReductionKind::Tree;
  if (name == "filter_tree" || name == "ft") return ReductionKind::FilterTree;
  if (name == "cs_filter_tree" || name == "csft") return ReductionKind::CsFilterTree;
  if (name == "all_pairs" || name == "ap") return ReductionKind::AllPairs;
  if (name == "apft") return ReductionKind::Apft;
  throw InvalidArgument("unknown reduction kind: " + name);
}

std::vector<double> with_node_id(std::span<const double> x, int node, int num_nodes) {
  std::vector<double> out(x.begin(), x.end());
  out.resize(x.size() + static_cast<std::size_t>(num_nodes), 0.0);
  out[x.size() + static_cast<std::size_t>(node)] = 1.0;
  return out;
}

NodeClassifierSet::NodeClassifierSet(std::vector<Classifier> classifiers, bool shared, int num_nodes)
    : classifiers_(std::move(classifiers)), shared_(shared), num_nodes_(num_nodes) {}

Side NodeClassifierSet::decide(const LabelTree& tree, int node, std::span<const double> x) const {
  if (!shared_) return classifiers_.at(static_cast<std::size_t>(node)).predict(x);
  const auto& f = classifiers_.at(static_cast<std::size_t>(tree.height(node) - 1));
  return f.predict(with_node_id(x, node, num_nodes_));
}

int pair_index(int k, Label a, Label b) {
  if (a == b || a < 0 || b < 0 || a >= k || b >= k) throw InvalidArgument("bad label pair");
  if (a > b) std::swap(a, b);
  return a * k - a * (a + 1) / 2 + (b - a - 1);
}

namespace {

Label child_label(NodeRef child, const std::vector<std::vector<Label>>& win, std::size_t e) {
  return child.leaf ? child.index : win[static_cast<std::size_t>(child.index)][e];
}

// Per-level training shared by the tree-structured reductions. `emit` fills
// the binary examples of node n; afterwards `after` sees the trained set.
struct LevelTrainer {
  const LabelTree& tree;
  const NodeLearner& learner;
  const TrainOptions& opts;
  ReductionModel& model;
  std::vector<Classifier> classifiers;

  LevelTrainer(const LabelTree& t, const NodeLearner& l, const TrainOptions& o, ReductionModel& m)
      : tree(t), learner(l), opts(o), model(m) {
    classifiers.resize(static_cast<std::size_t>(opts.shared ? tree.levels().size() : tree.num_internal()),
                       Classifier{ConstantModel{}});
  }

  void train_level(std::size_t h, std::vector<std::vector<WeightedBinaryExample>>& per_node) {
    const auto& level = tree.levels()[h];
    if (opts.shared) {
      std::vector<WeightedBinaryExample> all;
      for (std::size_t i = 0; i < level.size(); ++i) {
        for (auto& ex : per_node[i]) {
          all.push_back({with_node_id(ex.features, level[i], tree.num_internal()), ex.y, ex.w});
        }
      }
      if (all.empty()) {
        model.warnings.push_back("level " + std::to_string(h + 1) + ": empty training set, constant-left classifier");
      } else {
        classifiers[h] = learner.train(all, 0x5000 + h);
        ++model.counters.oracle_calls;
      }
      return;
    }
    for (std::size_t i = 0; i < level.size(); ++i) {
      const int n = level[i];
      if (per_node[i].empty()) {
        model.warnings.push_back("node " + std::to_string(n) + ": empty training set, constant-left classifier");
        continue;
      }
      classifiers[static_cast<std::size_t>(n)] = learner.train(per_node[i], static_cast<std::uint64_t>(n));
      ++model.counters.oracle_calls;
    }
  }

  void finish() { model.nodes = NodeClassifierSet(std::move(classifiers), opts.shared, tree.num_internal()); }
};

TrainResult start(ReductionKind kind, const LabelTree& tree) {
  TrainResult r;
  r.model.kind = kind;
  r.model.tree = tree;
  r.model.counters.examples_per_node.assign(static_cast<std::size_t>(tree.num_internal()), 0);
  return r;
}

void require_nonempty(std::span<const Example> examples) {
  if (examples.empty()) throw TrainingDataError("no training examples");
}

}  // namespace

TrainResult train_tree(std::span<const Example> examples, const LabelTree& tree, const NodeLearner& learner,
                       const TrainOptions& opts) {
  require_nonempty(examples);
  validate_multiclass(examples, tree.num_labels());
  TrainResult r = start(ReductionKind::Tree, tree);
  if (opts.record_membership) r.membership.resize(static_cast<std::size_t>(tree.num_internal()));
  LevelTrainer trainer(tree, learner, opts, r.model);

  for (std::size_t h = 0; h < tree.levels().size(); ++h) {
    const auto& level = tree.levels()[h];
    std::vector<std::vector<WeightedBinaryExample>> per_node(level.size());
    for (std::size_t i = 0; i < level.size(); ++i) {
      const int n = level[i];
      for (std::size_t e = 0; e < examples.size(); ++e) {
        const Label y = examples[e].label();
        if (!tree.contains(n, y)) continue;
        per_node[i].push_back({examples[e].features, tree.side_of(n, y), examples[e].weight});
        if (opts.record_membership) r.membership[static_cast<std::size_t>(n)].push_back(e);
      }
      r.model.counters.examples_per_node[static_cast<std::size_t>(n)] = per_node[i].size();
    }
    trainer.train_level(h, per_node);
  }
  // Leaf paths cross each level at most once.
  r.model.counters.max_touches_per_level = 1;
  trainer.finish();
  return r;
}

TrainResult train_filter_tree(std::span<const Example> examples, const LabelTree& tree, const NodeLearner& learner,
                              const TrainOptions& opts) {
  require_nonempty(examples);
  validate_multiclass(examples, tree.num_labels());
  TrainResult r = start(ReductionKind::FilterTree, tree);
  if (opts.record_membership) r.membership.resize(static_cast<std::size_t>(tree.num_internal()));
  LevelTrainer trainer(tree, learner, opts, r.model);

  // cursor[e]: position on the label's path of the next node example e must win.
  std::vector<std::size_t> cursor(examples.size(), 0);
  std::vector<char> alive(examples.size(), 1);
  std::vector<int> slot(static_cast<std::size_t>(tree.num_internal()), -1);

  for (std::size_t h = 0; h < tree.levels().size(); ++h) {
    const auto& level = tree.levels()[h];
    for (std::size_t i = 0; i < level.size(); ++i) slot[static_cast<std::size_t>(level[i])] = static_cast<int>(i);
    std::vector<std::vector<WeightedBinaryExample>> per_node(level.size());
    std::vector<std::vector<std::size_t>> members(level.size());
    for (std::size_t e = 0; e < examples.size(); ++e) {
      if (!alive[e]) continue;
      const auto path = tree.path(examples[e].label());
      if (cursor[e] >= path.size()) continue;
      const auto step = path[cursor[e]];
      if (tree.height(step.node) != static_cast<int>(h) + 1) continue;
      const auto i = static_cast<std::size_t>(slot[static_cast<std::size_t>(step.node)]);
      per_node[i].push_back({examples[e].features, step.side, examples[e].weight});
      members[i].push_back(e);
    }
    std::vector<std::size_t> touches(examples.size(), 0);
    for (const auto& m : members)
      for (std::size_t e : m) ++touches[e];
    for (std::size_t t : touches) r.model.counters.max_touches_per_level = std::max(r.model.counters.max_touches_per_level, t);
    for (std::size_t i = 0; i < level.size(); ++i)
      r.model.counters.examples_per_node[static_cast<std::size_t>(level[i])] = per_node[i].size();
    trainer.train_level(h, per_node);

    // Filter: only examples whose node preferred their own side move up.
    const NodeClassifierSet view(trainer.classifiers, opts.shared, tree.num_internal());
    for (std::size_t i = 0; i < level.size(); ++i) {
      const int n = level[i];
      for (std::size_t e : members[i]) {
        const auto step = tree.path(examples[e].label())[cursor[e]];
        if (view.decide(tree, n, examples[e].features) == step.side) ++cursor[e];
        else alive[e] = 0;
      }
      if (opts.record_membership) r.membership[static_cast<std::size_t>(n)] = std::move(members[i]);
    }
  }
  trainer.finish();
  return r;
}

std::optional<WeightedBinaryExample> cs_node_example(const Example& e, Label a, Label b) {
  const double ca = e.costs()[a];
  const double cb = e.costs()[b];
  const double w = std::abs(ca - cb) * e.weight;
  if (w == 0.0) return std::nullopt;
  return WeightedBinaryExample{e.features, ca < cb ? Side::Left : Side::Right, w};
}

TrainResult train_cs_filter_tree(std::span<const Example> examples, const LabelTree& tree,
                                 const NodeLearner& learner, const TrainOptions& opts) {
  require_nonempty(examples);
  validate_cost_sensitive(examples, tree.num_labels());
  TrainResult r = start(ReductionKind::CsFilterTree, tree);
  if (opts.record_membership) r.membership.resize(static_cast<std::size_t>(tree.num_internal()));
  LevelTrainer trainer(tree, learner, opts, r.model);

  std::vector<std::vector<Label>> win(static_cast<std::size_t>(tree.num_internal()),
                                      std::vector<Label>(examples.size(), 0));
  std::size_t max_touch = 0;
  for (std::size_t h = 0; h < tree.levels().size(); ++h) {
    const auto& level = tree.levels()[h];
    std::vector<std::vector<WeightedBinaryExample>> per_node(level.size());
    std::vector<std::size_t> touches(examples.size(), 0);
    for (std::size_t i = 0; i < level.size(); ++i) {
      const int n = level[i];
      const auto& node = tree.node(n);
      for (std::size_t e = 0; e < examples.size(); ++e) {
        const Label a = child_label(node.left, win, e);
        const Label b = child_label(node.right, win, e);
        auto ex = cs_node_example(examples[e], a, b);
        if (!ex) continue;
        per_node[i].push_back(std::move(*ex));
        ++touches[e];
        if (opts.record_membership) r.membership[static_cast<std::size_t>(n)].push_back(e);
      }
      r.model.counters.examples_per_node[static_cast<std::size_t>(n)] = per_node[i].size();
    }
    for (std::size_t t : touches) max_touch = std::max(max_touch, t);
    trainer.train_level(h, per_node);

    const NodeClassifierSet view(trainer.classifiers, opts.shared, tree.num_internal());
    for (const int n : level) {
      const auto& node = tree.node(n);
      for (std::size_t e = 0; e < examples.size(); ++e) {
        const Side s = view.decide(tree, n, examples[e].features);
        win[static_cast<std::size_t>(n)][e] = child_label(s == Side::Left ? node.left : node.right, win, e);
      }
    }
  }
  r.model.counters.max_touches_per_level = max_touch;
  trainer.finish();
  return r;
}

TrainResult train_all_pairs(std::span<const Example> examples, int k, const NodeLearner& learner) {
  require_nonempty(examples);
  validate_multiclass(examples, k);
  TrainResult r = start(ReductionKind::AllPairs, LabelTree::balanced(k));
  r.model.counters.examples_per_node.assign(static_cast<std::size_t>(k * (k - 1) / 2), 0);
  r.model.pairs.assign(static_cast<std::size_t>(k * (k - 1) / 2), Classifier{ConstantModel{}});
  std::vector<std::vector<std::size_t>> by_label(static_cast<std::size_t>(k));
  for (std::size_t e = 0; e < examples.size(); ++e) by_label[static_cast<std::size_t>(examples[e].label())].push_back(e);
  for (Label a = 0; a < k; ++a) {
    for (Label b = a + 1; b < k; ++b) {
      const auto p = static_cast<std::size_t>(pair_index(k, a, b));
      std::vector<WeightedBinaryExample> set;
      for (std::size_t e : by_label[static_cast<std::size_t>(a)]) set.push_back({examples[e].features, Side::Left, examples[e].weight});
      for (std::size_t e : by_label[static_cast<std::size_t>(b)]) set.push_back({examples[e].features, Side::Right, examples[e].weight});
      r.model.counters.examples_per_node[p] = set.size();
      if (set.empty()) {
        r.model.warnings.push_back("pair " + std::to_string(a) + "," + std::to_string(b) +
                                   ": empty training set, constant classifier");
        continue;
      }
      r.model.pairs[p] = learner.train(set, static_cast<std::uint64_t>(p));
      ++r.model.counters.oracle_calls;
    }
  }
  // Every example feeds the k-1 pairs containing its label.
  r.model.counters.max_touches_per_level = static_cast<std::size_t>(k - 1);
  return r;
}

namespace {

Label play_pair(const std::vector<Classifier>& pairs, int k, Label a, Label b, std::span<const double> x) {
  const Side s = pairs[static_cast<std::size_t>(pair_index(k, a, b))].predict(x);
  return s == Side::Left ? std::min(a, b) : std::max(a, b);
}

}  // namespace

TrainResult train_apft(std::span<const Example> examples, const LabelTree& tree, const NodeLearner& learner) {
  require_nonempty(examples);
  const int k = tree.num_labels();
  validate_multiclass(examples, k);
  TrainResult r = start(ReductionKind::Apft, tree);
  r.model.counters.examples_per_node.assign(static_cast<std::size_t>(k * (k - 1) / 2), 0);
  r.model.pairs.assign(static_cast<std::size_t>(k * (k - 1) / 2), Classifier{ConstantModel{}});

  std::vector<std::vector<Label>> win(static_cast<std::size_t>(tree.num_internal()),
                                      std::vector<Label>(examples.size(), 0));
  for (const auto& level : tree.levels()) {
    for (const int n : level) {
      const auto& node = tree.node(n);
      std::map<int, std::vector<WeightedBinaryExample>> sets;
      for (std::size_t e = 0; e < examples.size(); ++e) {
        const Label y = examples[e].label();
        if (!tree.contains(n, y)) continue;
        const Side s = tree.side_of(n, y);
        const NodeRef own = s == Side::Left ? node.left : node.right;
        if (child_label(own, win, e) != y) continue;  // filtered below
        const NodeRef other = s == Side::Left ? node.right : node.left;
        const std::vector<Label> opponents =
            other.leaf ? std::vector<Label>{other.index}
                       : std::vector<Label>(tree.leafset(other.index).begin(), tree.leafset(other.index).end());
        for (Label b : opponents)
          sets[pair_index(k, y, b)].push_back({examples[e].features, y < b ? Side::Left : Side::Right, examples[e].weight});
      }
      int missing = 0, total = 0;
      const auto lhs = node.left.leaf ? std::vector<Label>{node.left.index}
                                      : std::vector<Label>(tree.leafset(node.left.index).begin(), tree.leafset(node.left.index).end());
      const auto rhs = node.right.leaf ? std::vector<Label>{node.right.index}
                                       : std::vector<Label>(tree.leafset(node.right.index).begin(), tree.leafset(node.right.index).end());
      for (Label a : lhs) {
        for (Label b : rhs) {
          ++total;
          const int p = pair_index(k, a, b);
          auto it = sets.find(p);
          if (it == sets.end()) {
            ++missing;
            continue;
          }
          r.model.counters.examples_per_node[static_cast<std::size_t>(p)] = it->second.size();
          r.model.pairs[static_cast<std::size_t>(p)] = learner.train(it->second, static_cast<std::uint64_t>(p));
          ++r.model.counters.oracle_calls;
        }
      }
      if (missing > 0)
        r.model.warnings.push_back("node " + std::to_string(n) + ": " + std::to_string(missing) + " of " +
                                   std::to_string(total) + " pair classifiers had no data, constant classifier");
      for (std::size_t e = 0; e < examples.size(); ++e) {
        const Label a = child_label(node.left, win, e);
        const Label b = child_label(node.right, win, e);
        win[static_cast<std::size_t>(n)][e] = play_pair(r.model.pairs, k, a, b, examples[e].features);
      }
    }
  }
  r.model.counters.max_touches_per_level = 1;
  return r;
}

TrainResult train(ReductionKind kind, std::span<const Example> examples, const LabelTree& tree,
                  const NodeLearner& learner, const TrainOptions& opts) {
  switch (kind) {
    case ReductionKind::Tree: return train_tree(examples, tree, learner, opts);
    case ReductionKind::FilterTree: return train_filter_tree(examples, tree, learner, opts);
    case ReductionKind::CsFilterTree: return train_cs_filter_tree(examples, tree, learner, opts);
    case ReductionKind::AllPairs: return train_all_pairs(examples, tree.num_labels(), learner);
    case ReductionKind::Apft: return train_apft(examples, tree, learner);
  }
  throw InvalidArgument("unknown reduction kind");
}

DecodeResult decode(const ReductionModel& model, std::span<const double> x) {
  const LabelTree& tree = model.tree;
  const int k = tree.num_labels();
  DecodeResult out;
  switch (model.kind) {
    case ReductionKind::Tree:
    case ReductionKind::FilterTree:
    case ReductionKind::CsFilterTree: {
      int n = tree.root();
      while (true) {
        out.path.push_back(n);
        const Side s = model.nodes.decide(tree, n, x);
        ++out.evaluations;
        const NodeRef child = s == Side::Left ? tree.node(n).left : tree.node(n).right;
        if (child.leaf) {
          out.label = child.index;
          return out;
        }
        n = child.index;
      }
    }
    case ReductionKind::AllPairs: {
      std::vector<int> votes(static_cast<std::size_t>(k), 0);
      for (Label a = 0; a < k; ++a)
        for (Label b = a + 1; b < k; ++b) {
          ++votes[static_cast<std::size_t>(play_pair(model.pairs, k, a, b, x))];
          ++out.evaluations;
        }
      out.label = static_cast<Label>(std::max_element(votes.begin(), votes.end()) - votes.begin());
      return out;
    }
    case ReductionKind::Apft: {
      std::vector<Label> win(static_cast<std::size_t>(tree.num_internal()));
      auto arriving = [&](NodeRef c) { return c.leaf ? c.index : win[static_cast<std::size_t>(c.index)]; };
      for (int n = 0; n < tree.num_internal(); ++n) {
        win[static_cast<std::size_t>(n)] = play_pair(model.pairs, k, arriving(tree.node(n).left), arriving(tree.node(n).right), x);
        ++out.evaluations;
      }
      out.label = win[static_cast<std::size_t>(tree.root())];
      for (auto it = tree.path(out.label).rbegin(); it != tree.path(out.label).rend(); ++it) out.path.push_back(it->node);
      return out;
    }
  }
  throw InvalidArgument("unknown reduction kind");
}

double error_rate(const ReductionModel& model, std::span<const Example> examples) {
  double total = 0.0, wrong = 0.0;
  for (const auto& e : examples) {
    total += e.weight;
    if (decode(model, e.features).label != e.label()) wrong += e.weight;
  }
  return total > 0.0 ? wrong / total : 0.0;
}

double mean_cost(const ReductionModel& model, std::span<const Example> examples) {
  double total = 0.0, cost = 0.0;
  for (const auto& e : examples) {
    total += e.weight;
    cost += e.weight * e.costs()[decode(model, e.features).label];
  }
  return total > 0.0 ? cost / total : 0.0;
}

}  // namespace ect
