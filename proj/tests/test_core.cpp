#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ect/core.hpp"
#include "ect/rng.hpp"

using namespace ect;

TEST_SUITE("core") {

TEST_CASE("balanced tree shapes") {
  const LabelTree t2 = LabelTree::balanced(2);
  CHECK(t2.num_internal() == 1);
  CHECK(t2.depth() == 1);

  const LabelTree t8 = LabelTree::balanced(8);
  CHECK(t8.num_internal() == 7);
  CHECK(t8.depth() == 3);

  const LabelTree t5 = LabelTree::balanced(5);
  CHECK(t5.num_internal() == 4);
  CHECK(t5.depth() == 3);
  int shallow = 0;
  for (Label y = 0; y < 5; ++y) shallow += t5.leaf_depth(y) == 2;
  CHECK(shallow > 0);
  // The odd split leaves the right-most subtree shallow.
  CHECK(t5.leaf_depth(4) == 2);
  CHECK(t5.leaf_depth(0) == 3);
}

TEST_CASE("balanced tree depth is ceil(log2 k) and invariants hold") {
  for (int k = 2; k <= 300; ++k) {
    const LabelTree t = LabelTree::balanced(k);
    CHECK(t.check_invariants());
    CHECK(t.depth() == static_cast<int>(std::ceil(std::log2(k))));
    CHECK(t.num_internal() == k - 1);
    // Leaves are labeled left to right.
    const auto all = t.leafset(t.root());
    CHECK(std::is_sorted(all.begin(), all.end()));
  }
}

TEST_CASE("tree rejects bad input") {
  CHECK_THROWS_AS(LabelTree::balanced(1), InvalidArgument);
  using N = LabelTree::Node;
  // Label 1 appears twice.
  CHECK_THROWS_AS(LabelTree(3, {N{NodeRef::label(0), NodeRef::label(1)}, N{NodeRef::internal(0), NodeRef::label(1)}}),
                  InvalidArgument);
  // Child indexed above its parent.
  CHECK_THROWS_AS(LabelTree(3, {N{NodeRef::internal(1), NodeRef::label(2)}, N{NodeRef::label(0), NodeRef::label(1)}}),
                  InvalidArgument);
  CHECK_THROWS_AS(LabelTree(3, {N{NodeRef::label(0), NodeRef::label(1)}}), InvalidArgument);
}

TEST_CASE("custom tree: paths, sides, lca and levels") {
  using N = LabelTree::Node;
  // ((0, 1), 2)
  const LabelTree t(3, {N{NodeRef::label(0), NodeRef::label(1)}, N{NodeRef::internal(0), NodeRef::label(2)}});
  CHECK(t.root() == 1);
  CHECK(t.side_of(1, 0) == Side::Left);
  CHECK(t.side_of(1, 2) == Side::Right);
  CHECK(t.side_of(0, 1) == Side::Right);
  CHECK_THROWS_AS(t.side_of(0, 2), InvalidArgument);
  CHECK(t.lca(0, 1) == 0);
  CHECK(t.lca(1, 2) == 1);
  CHECK(t.height(0) == 1);
  CHECK(t.height(1) == 2);
  REQUIRE(t.levels().size() == 2);
  CHECK(t.levels()[0] == std::vector<int>{0});
  const auto p = t.path(0);
  REQUIRE(p.size() == 2);
  CHECK(p[0].node == 0);
  CHECK(p[1].node == 1);
  CHECK(t.leaf_depth(2) == 1);
}

TEST_CASE("leaf sets partition at every node") {
  const LabelTree t = LabelTree::balanced(11);
  for (int n = 0; n < t.num_internal(); ++n) {
    std::vector<Label> merged;
    for (NodeRef c : {t.node(n).left, t.node(n).right}) {
      if (c.leaf) merged.push_back(c.index);
      else merged.insert(merged.end(), t.leafset(c.index).begin(), t.leafset(c.index).end());
    }
    std::sort(merged.begin(), merged.end());
    CHECK(std::adjacent_find(merged.begin(), merged.end()) == merged.end());
    CHECK(std::equal(merged.begin(), merged.end(), t.leafset(n).begin(), t.leafset(n).end()));
  }
}

TEST_CASE("label regrets") {
  CHECK(label_regrets(ConditionalDistribution({0.5, 0.5})) == std::vector<double>{0.0, 0.0});
  const auto r = label_regrets(ConditionalDistribution({0.3, 0.3, 0.4}));
  CHECK(r[0] == doctest::Approx(0.1));
  CHECK(r[1] == doctest::Approx(0.1));
  CHECK(r[2] == 0.0);
}

TEST_CASE("property: argmin regret is argmax probability") {
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> p(6);
    for (double& v : p) v = rng.uniform();
    const double s = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& v : p) v /= s;
    const ConditionalDistribution d(p);
    const auto r = label_regrets(d);
    CHECK(std::all_of(r.begin(), r.end(), [](double v) { return v >= 0.0; }));
    CHECK(std::min_element(r.begin(), r.end()) - r.begin() == d.best());
    CHECK(r[static_cast<std::size_t>(d.best())] == 0.0);
  }
}

TEST_CASE("distribution validation never renormalizes") {
  CHECK_THROWS_AS(ConditionalDistribution({0.5, 0.6}), InvalidArgument);
  CHECK_THROWS_AS(ConditionalDistribution({-0.1, 1.1}), InvalidArgument);
  CHECK_THROWS_AS(ConditionalDistribution({1.0}), InvalidArgument);
  CHECK_NOTHROW(ConditionalDistribution({0.5, 0.5 + 5e-10}));
  CHECK_THROWS_AS(ConditionalDistribution({0.5, 0.5 + 5e-9}), InvalidArgument);
  // Ties resolve to the lower label.
  CHECK(ConditionalDistribution({0.4, 0.4, 0.2}).best() == 0);
}

TEST_CASE("cost vectors and example validation") {
  CHECK_THROWS_AS(CostVector({0.0, 1.5}), InvalidArgument);
  CHECK_THROWS_AS(CostVector({-0.1, 0.5}), InvalidArgument);
  CHECK_THROWS_AS(CostVector({NAN, 0.5}), InvalidArgument);
  const std::vector<Example> ok{{{1.0}, Label{1}, 1.0}};
  CHECK_NOTHROW(validate_multiclass(ok, 2));
  CHECK_THROWS_AS(validate_multiclass(ok, 1), InvalidArgument);
  CHECK_THROWS_AS(validate_cost_sensitive(ok, 2), InvalidArgument);
  const std::vector<Example> bad_feature{{{INFINITY}, Label{0}, 1.0}};
  CHECK_THROWS_AS(validate_multiclass(bad_feature, 2), InvalidArgument);
  const std::vector<Example> bad_weight{{{1.0}, Label{0}, -1.0}};
  CHECK_THROWS_AS(validate_multiclass(bad_weight, 2), InvalidArgument);
  const std::vector<Example> cs{{{1.0}, CostVector({0.0, 1.0, 0.5}), 1.0}};
  CHECK_NOTHROW(validate_cost_sensitive(cs, 3));
  CHECK_THROWS_AS(validate_cost_sensitive(cs, 2), InvalidArgument);
}

TEST_CASE("seed derivation") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  Rng r(3);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(r.below(7) < 7);
  }
}

}  // TEST_SUITE
