#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "ect/reductions.hpp"
#include "ect/rng.hpp"

using namespace ect;

namespace {

NodeLearner oracle() {
  LearnerSpec s;
  s.kind = LearnerKind::BayesOracle;
  return NodeLearner{s};
}

NodeLearner constant(Side side) {
  LearnerSpec s;
  s.kind = LearnerKind::Constant;
  s.constant_side = side;
  return NodeLearner{s};
}

// Probability-weighted enumeration of one context.
std::vector<Example> enumerate(std::vector<double> x, const std::vector<double>& p) {
  std::vector<Example> out;
  for (Label y = 0; y < static_cast<Label>(p.size()); ++y)
    if (p[static_cast<std::size_t>(y)] > 0) out.push_back({x, y, p[static_cast<std::size_t>(y)]});
  return out;
}

std::vector<double> random_simplex(Rng& rng, int k) {
  std::vector<double> p(static_cast<std::size_t>(k));
  for (double& v : p) v = rng.uniform() + 1e-3;
  const double s = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= s;
  return p;
}

std::vector<Example> labeled_blobs(int k, int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Example> out;
  for (int i = 0; i < n; ++i) {
    const Label y = static_cast<Label>(rng.below(static_cast<std::uint64_t>(k)));
    out.push_back({{std::cos(y * 2.0) * 2 + rng.normal() * 0.6, std::sin(y * 2.0) * 2 + rng.normal() * 0.6}, y, 1.0});
  }
  return out;
}

}  // namespace

TEST_SUITE("reductions") {

TEST_CASE("tree on the three-label distribution misses the best label") {
  const LabelTree tree = LabelTree::balanced(3);  // {0,1} vs {2}
  const auto data = enumerate({1.0}, {0.3, 0.3, 0.4});
  const ReductionModel m = train_tree(data, tree, oracle()).model;
  CHECK(m.nodes.decide(tree, tree.root(), std::vector<double>{1.0}) == Side::Left);
  CHECK(error_rate(m, data) == doctest::Approx(0.70));
}

TEST_CASE("filter tree on the three-label distribution finds the best label") {
  const LabelTree tree = LabelTree::balanced(3);
  const auto data = enumerate({1.0}, {0.3, 0.3, 0.4});
  const ReductionModel m = train_filter_tree(data, tree, oracle()).model;
  const DecodeResult d = decode(m, std::vector<double>{1.0});
  CHECK(d.label == 2);
  CHECK(error_rate(m, data) == doctest::Approx(0.60));
}

TEST_CASE("k = 2: tree, filter tree, all-pairs and apft coincide") {
  const auto data = labeled_blobs(2, 300, 4);
  const LabelTree tree = LabelTree::balanced(2);
  LearnerSpec spec;
  const NodeLearner lr{spec};
  const auto t = train(ReductionKind::Tree, data, tree, lr).model;
  const auto f = train(ReductionKind::FilterTree, data, tree, lr).model;
  const auto a = train(ReductionKind::AllPairs, data, tree, lr).model;
  const auto p = train(ReductionKind::Apft, data, tree, lr).model;
  for (const auto& e : data) {
    const Label y = decode(t, e.features).label;
    CHECK(decode(f, e.features).label == y);
    CHECK(decode(a, e.features).label == y);
    CHECK(decode(p, e.features).label == y);
  }
}

TEST_CASE("deterministic labels give zero training error with the oracle") {
  const LabelTree tree = LabelTree::balanced(5);
  std::vector<Example> data;
  for (int c = 0; c < 25; ++c) data.push_back({{double(c)}, Label(c % 5), 1.0});
  for (ReductionKind kind : {ReductionKind::Tree, ReductionKind::FilterTree, ReductionKind::Apft})
    CHECK(error_rate(train(kind, data, tree, oracle()).model, data) == 0.0);
}

TEST_CASE("property: oracle filter tree decodes the argmax of every context") {
  Rng rng(5);
  for (int k : {3, 4, 6, 7}) {
    const LabelTree tree = LabelTree::balanced(k);
    std::vector<Example> data;
    std::vector<std::vector<double>> ps;
    for (int c = 0; c < 30; ++c) {
      ps.push_back(random_simplex(rng, k));
      const auto ex = enumerate({double(c)}, ps.back());
      data.insert(data.end(), ex.begin(), ex.end());
    }
    const auto ft = train_filter_tree(data, tree, oracle()).model;
    const auto ap = train_all_pairs(data, k, oracle()).model;
    const auto apft = train_apft(data, tree, oracle()).model;
    for (int c = 0; c < 30; ++c) {
      const std::vector<double> x{double(c)};
      const auto& p = ps[static_cast<std::size_t>(c)];
      const Label best = static_cast<Label>(std::max_element(p.begin(), p.end()) - p.begin());
      CHECK(decode(ft, x).label == best);
      CHECK(decode(ap, x).label == best);
      CHECK(decode(apft, x).label == best);
    }
  }
}

TEST_CASE("property: oracle cost-sensitive filter tree picks the cheapest expected cost") {
  Rng rng(6);
  const int k = 4;
  const LabelTree tree = LabelTree::balanced(k);
  std::vector<Example> data;
  std::vector<std::vector<double>> expected;
  for (int c = 0; c < 40; ++c) {
    std::vector<double> ec(k, 0.0);
    const int draws = 1 + static_cast<int>(rng.below(3));
    const auto mix = random_simplex(rng, draws);
    for (int d = 0; d < draws; ++d) {
      std::vector<double> cost(k);
      for (double& v : cost) v = rng.uniform();
      for (int y = 0; y < k; ++y) ec[static_cast<std::size_t>(y)] += mix[static_cast<std::size_t>(d)] * cost[static_cast<std::size_t>(y)];
      data.push_back({{double(c)}, CostVector(cost), mix[static_cast<std::size_t>(d)]});
    }
    expected.push_back(ec);
  }
  const auto m = train_cs_filter_tree(data, tree, oracle()).model;
  for (int c = 0; c < 40; ++c) {
    const auto& ec = expected[static_cast<std::size_t>(c)];
    const Label best = static_cast<Label>(std::min_element(ec.begin(), ec.end()) - ec.begin());
    CHECK(decode(m, std::vector<double>{double(c)}).label == best);
  }
}

TEST_CASE("cost-sensitive training skips ties and weights by the cost gap") {
  const LabelTree tree = LabelTree::balanced(2);
  const std::vector<Example> data{{{0.0}, CostVector({0.2, 0.9}), 1.0}, {{1.0}, CostVector({0.5, 0.5}), 1.0}};
  const auto r = train_cs_filter_tree(data, tree, oracle(), {false, true});
  CHECK(r.model.counters.examples_per_node[0] == 1);
  CHECK(r.membership[0] == std::vector<std::size_t>{0});
  CHECK(mean_cost(r.model, data) == doctest::Approx((0.2 + 0.5) / 2));
}

TEST_CASE("all-pairs: one classifier per pair, ties go to the lowest label") {
  const auto data = labeled_blobs(3, 200, 7);
  const auto m = train_all_pairs(data, 3, oracle()).model;
  CHECK(m.pairs.size() == 3);
  // Cyclic preferences 0 > 1, 1 > 2, 2 > 0: one vote each.
  ReductionModel cyc;
  cyc.kind = ReductionKind::AllPairs;
  cyc.tree = LabelTree::balanced(3);
  cyc.pairs.assign(3, Classifier{ConstantModel{Side::Left}});
  cyc.pairs[static_cast<std::size_t>(pair_index(3, 0, 2))] = Classifier{ConstantModel{Side::Right}};
  const DecodeResult d = decode(cyc, std::vector<double>{0.0});
  CHECK(d.label == 0);
  CHECK(d.evaluations == 3);
}

TEST_CASE("pair indices enumerate unordered pairs") {
  std::set<int> seen;
  for (Label a = 0; a < 7; ++a)
    for (Label b = 0; b < 7; ++b)
      if (a != b) {
        CHECK(pair_index(7, a, b) == pair_index(7, b, a));
        seen.insert(pair_index(7, a, b));
      }
  CHECK(seen.size() == 21);
  CHECK(*seen.begin() == 0);
  CHECK(*seen.rbegin() == 20);
}

TEST_CASE("apft pairs follow the tree") {
  const LabelTree tree = LabelTree::balanced(4);  // ((0,1),(2,3))
  std::vector<Example> data;
  for (int i = 0; i < 40; ++i) data.push_back({{double(i % 4)}, Label(i % 4), 1.0});
  const auto m = train_apft(data, tree, oracle()).model;
  const auto& c = m.counters.examples_per_node;
  // Bottom nodes see both of their labels, the root sees survivors against
  // the opposite side.
  CHECK(c[static_cast<std::size_t>(pair_index(4, 0, 1))] == 20);
  CHECK(c[static_cast<std::size_t>(pair_index(4, 2, 3))] == 20);
  for (auto [a, b] : {std::pair{0, 2}, std::pair{0, 3}, std::pair{1, 2}, std::pair{1, 3}})
    CHECK(c[static_cast<std::size_t>(pair_index(4, a, b))] == 20);
  CHECK(m.counters.oracle_calls == 6);
  CHECK(m.warnings.empty());
  CHECK(error_rate(m, data) == 0.0);
}

TEST_CASE("apft pairs without data become constant with a warning") {
  const LabelTree tree = LabelTree::balanced(4);
  std::vector<Example> data;
  for (int i = 0; i < 20; ++i) data.push_back({{double(i % 2)}, Label(i % 2), 1.0});
  const auto m = train_apft(data, tree, oracle()).model;
  CHECK_FALSE(m.warnings.empty());
}

TEST_CASE("empty filtered set gets constant left and a warning") {
  using N = LabelTree::Node;
  const LabelTree tree(3, {N{NodeRef::label(0), NodeRef::label(1)}, N{NodeRef::internal(0), NodeRef::label(2)}});
  std::vector<Example> data;
  for (int i = 0; i < 5; ++i) data.push_back({{double(i)}, Label{1}, 1.0});
  const auto r = train_filter_tree(data, tree, constant(Side::Left), {false, true});
  CHECK(r.membership[1].empty());
  CHECK(r.model.counters.examples_per_node[1] == 0);
  CHECK_FALSE(r.model.warnings.empty());
  CHECK(r.model.nodes.decide(tree, 1, std::vector<double>{0.0}) == Side::Left);
}

TEST_CASE("property: filtering reaches a node exactly through correct lower decisions") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const int k = 7;
    const LabelTree tree = LabelTree::balanced(k);
    const auto data = labeled_blobs(k, 400, seed);
    LearnerSpec spec;
    spec.epochs = 3;
    const auto r = train_filter_tree(data, tree, NodeLearner{spec}, {false, true});
    CHECK(r.model.counters.max_touches_per_level <= 1);
    for (int n = 0; n < tree.num_internal(); ++n) {
      const std::set<std::size_t> at(r.membership[static_cast<std::size_t>(n)].begin(),
                                     r.membership[static_cast<std::size_t>(n)].end());
      for (std::size_t e = 0; e < data.size(); ++e) {
        const Label y = data[e].label();
        if (!tree.contains(n, y)) {
          CHECK(at.count(e) == 0);
          continue;
        }
        bool expect = true;
        for (const auto& step : tree.path(y)) {
          if (step.node == n) break;
          expect = expect && r.model.nodes.decide(tree, step.node, data[e].features) == step.side;
        }
        CHECK(at.count(e) == static_cast<std::size_t>(expect));
      }
    }
  }
}

TEST_CASE("decode: path, evaluation counts and determinism") {
  ReductionModel c;
  c.kind = ReductionKind::FilterTree;
  c.tree = LabelTree::balanced(2);
  c.nodes = NodeClassifierSet({Classifier{ConstantModel{Side::Left}}}, false, 1);
  CHECK(decode(c, std::vector<double>{}).label == 0);

  const LabelTree tree = LabelTree::balanced(8);
  const auto data = labeled_blobs(8, 300, 9);
  const auto m = train_filter_tree(data, tree, NodeLearner{LearnerSpec{}}).model;
  const auto ap = train_apft(data, tree, NodeLearner{LearnerSpec{}}).model;
  for (const auto& e : data) {
    const DecodeResult d = decode(m, e.features);
    CHECK(d.evaluations == 3);
    CHECK(d.evaluations <= static_cast<std::size_t>(tree.depth()));
    CHECK(decode(m, e.features).label == d.label);
    // Every classifier on the returned path prefers the returned label.
    REQUIRE(d.path.size() == static_cast<std::size_t>(tree.leaf_depth(d.label)));
    for (int n : d.path) CHECK(m.nodes.decide(tree, n, e.features) == tree.side_of(n, d.label));
    const DecodeResult da = decode(ap, e.features);
    CHECK(da.evaluations == 7);
    for (std::size_t i = 0; i < da.path.size(); ++i) CHECK(tree.contains(da.path[i], da.label));
  }
}

TEST_CASE("shared classifiers per level") {
  const LabelTree tree = LabelTree::balanced(4);
  const auto data = labeled_blobs(4, 400, 10);
  LearnerSpec spec;
  const auto m = train_filter_tree(data, tree, NodeLearner{spec}, {true, false}).model;
  CHECK(m.nodes.shared());
  CHECK(m.nodes.classifiers().size() == tree.levels().size());
  CHECK(error_rate(m, data) < 0.5);
  const auto x = with_node_id(std::vector<double>{1.5, 2.5}, 1, 3);
  CHECK(x == std::vector<double>{1.5, 2.5, 0.0, 1.0, 0.0});
}

TEST_CASE("training input errors") {
  const LabelTree tree = LabelTree::balanced(3);
  CHECK_THROWS_AS(train_tree({}, tree, oracle()), TrainingDataError);
  CHECK_THROWS_AS(train_filter_tree({}, tree, oracle()), TrainingDataError);
  const std::vector<Example> mc{{{0.0}, Label{0}, 1.0}};
  CHECK_THROWS_AS(train_cs_filter_tree(mc, tree, oracle()), InvalidArgument);
  const std::vector<Example> out_of_range{{{0.0}, Label{5}, 1.0}};
  CHECK_THROWS_AS(train_filter_tree(out_of_range, tree, oracle()), InvalidArgument);
  CHECK(parse_reduction_kind("ft") == ReductionKind::FilterTree);
  CHECK(parse_reduction_kind(to_string(ReductionKind::Apft)) == ReductionKind::Apft);
  CHECK_THROWS_AS(parse_reduction_kind("ecoc"), InvalidArgument);
}

}  // TEST_SUITE
