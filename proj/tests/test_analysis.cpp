#include <cmath>

#include "doctest.h"

#include "ect/analysis.hpp"

using namespace ect;

namespace {

// Straight recomputation of the per-node quantities from the definitions,
// one cost vector at a time.
struct Oracle {
  double creg = 0.0, sum_W = 0.0, sum_r = 0.0;
};

Oracle oracle(const LabelTree& tree, const CostDistribution& dist, const std::vector<Side>& d) {
  const int k = tree.num_labels();
  std::vector<double> ec(static_cast<std::size_t>(k), 0.0);
  for (std::size_t j = 0; j < dist.outcomes.size(); ++j)
    for (Label y = 0; y < k; ++y) ec[static_cast<std::size_t>(y)] += dist.probs[j] * dist.outcomes[j][y];
  std::vector<Label> win(static_cast<std::size_t>(tree.num_internal()));
  Oracle o;
  for (int n = 0; n < tree.num_internal(); ++n) {
    const auto arrive = [&](NodeRef r) { return r.leaf ? r.index : win[static_cast<std::size_t>(r.index)]; };
    const Label a = arrive(tree.node(n).left), b = arrive(tree.node(n).right);
    const Label out = d[static_cast<std::size_t>(n)] == Side::Left ? a : b;
    const Label other = out == a ? b : a;
    for (std::size_t j = 0; j < dist.outcomes.size(); ++j)
      o.sum_W += dist.probs[j] * std::abs(dist.outcomes[j][a] - dist.outcomes[j][b]);
    const double gap = ec[static_cast<std::size_t>(out)] - ec[static_cast<std::size_t>(other)];
    if (gap > 0.0) o.sum_r += gap;
    win[static_cast<std::size_t>(n)] = out;
  }
  const Label w = win[static_cast<std::size_t>(tree.root())];
  o.creg = ec[static_cast<std::size_t>(w)] - *std::min_element(ec.begin(), ec.end());
  return o;
}

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("correct decisions carry no regret") {
    const ConditionalDistribution p({0.2, 0.5, 0.3});
    const auto dist = as_cost_distribution(p);
    const auto tree = LabelTree::balanced(3);
    // ((0, 1), 2): node 0 advances 1, root advances 1 over 2.
    const auto rep = check_filter_theorems(tree, dist, {Side::Right, Side::Left});
    CHECK(rep.prediction == 1);
    CHECK(rep.creg == 0.0);
    CHECK(rep.sum_r == 0.0);
  }

  TEST_CASE("three-label multiclass against the oracle") {
    const auto dist = as_cost_distribution(ConditionalDistribution({0.3, 0.3, 0.4}));
    const auto tree = LabelTree::balanced(3);
    for (std::uint64_t bits = 0; bits < 4; ++bits) {
      const auto d = decisions_from_bits(2, bits);
      const auto rep = check_filter_theorems(tree, dist, d);
      const auto o = oracle(tree, dist, d);
      CAPTURE(bits);
      CHECK(rep.creg == doctest::Approx(o.creg).epsilon(1e-12));
      CHECK(rep.sum_W == doctest::Approx(o.sum_W).epsilon(1e-12));
      CHECK(rep.sum_r == doctest::Approx(o.sum_r).epsilon(1e-12));
      CHECK(rep.main_bound == doctest::Approx(rep.sum_r).epsilon(1e-12));
      CHECK(rep.creg <= rep.sum_r + 1e-12);
      CHECK(rep.k_bound == doctest::Approx(3 * rep.avg_regret / 2).epsilon(1e-12));
    }
  }

  TEST_CASE("the k-bound fails on a single cost vector at k = 3") {
    // Node 0 correctly advances label 1, the root then advances label 2.
    CostDistribution dist{{CostVector({1.0, 0.0, 1.0})}, {1.0}};
    const auto rep = check_filter_theorems(LabelTree::balanced(3), dist, decisions_from_bits(2, 3));
    CHECK(rep.prediction == 2);
    CHECK(rep.creg == 1.0);
    CHECK(rep.avg_regret == 0.5);
    CHECK(rep.k_bound == 0.75);
    CHECK(rep.k_slack() < 0.0);
    CHECK(rep.main_slack() >= 0.0);
  }

  TEST_CASE("main bound holds across random instances") {
    for (int k : {2, 3, 4, 5, 6}) {
      const auto tree = LabelTree::balanced(k);
      for (int i = 0; i < 40; ++i) {
        const auto dist = random_cost_distribution(k, derive_seed(77, static_cast<std::uint64_t>(k * 1000 + i)));
        for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << (k - 1)); ++bits) {
          const auto d = decisions_from_bits(k - 1, bits);
          const auto rep = check_filter_theorems(tree, dist, d);
          const auto o = oracle(tree, dist, d);
          CHECK(rep.creg == doctest::Approx(o.creg).epsilon(1e-12));
          CHECK(rep.main_slack() >= -1e-9);
        }
      }
    }
  }

  TEST_CASE("sweep main check and counterexample replay") {
    SweepConfig cfg;
    cfg.ks = {3, 6};
    cfg.distributions = 200;
    const auto rep = filter_theorem_sweep(cfg);
    CHECK(rep.distributions == 400);
    CHECK(rep.instances == 200 * 4 + 200 * 32);
    CHECK(rep.main.violations == 0);
    CHECK(rep.bound.violations > 0);
    REQUIRE_FALSE(rep.counterexamples.empty());
    for (const auto& c : rep.counterexamples) {
      const auto back = counterexample_from_json(nlohmann::json::parse(to_json(c).dump()));
      const auto again = replay(back);
      CHECK(again.creg == c.lhs);
      CHECK((c.check == "main" ? again.main_bound : again.k_bound) == c.rhs);
    }
    CHECK_THROWS_AS(counterexample_from_json(nlohmann::json{{"k", 3}}), FormatError);

    SweepConfig par = cfg;
    par.jobs = 2;
    const auto rep2 = filter_theorem_sweep(par);
    CHECK(rep2.bound.violations == rep.bound.violations);
    CHECK(rep2.bound.worst_slack == rep.bound.worst_slack);
  }

  TEST_CASE("lemma examples") {
    // k = 2, the costlier label advances: both sides equal 2.
    const auto two = lemma1_check(CostVector({0.0, 1.0}), {Side::Right});
    CHECK(two.S + two.c_T == 2.0);
    CHECK(two.I + 1.0 == 2.0);
    CHECK(two.holds);

    // Alternating costs on eight labels with label 7 winning its path.
    const auto tree = LabelTree::balanced(8);
    std::vector<Side> d(7, Side::Left);
    for (const auto& step : tree.path(7)) d[static_cast<std::size_t>(step.node)] = step.side;
    const auto r = lemma1_check(CostVector({0, 1, 0, 1, 0, 1, 0, 1}), d);
    CHECK(r.winner == 7);
    CHECK(r.S == 6.0);
    CHECK(r.I == 3.0);
    CHECK(r.c_T == 1.0);
    CHECK(r.holds);

    const auto sweep = lemma1_sweep({2, 4, 8, 16}, 2000, 3);
    CHECK(sweep.checked == 8000);
    CHECK(sweep.violations == 0);
    CHECK(sweep.worst_slack >= 0.0);
  }

  TEST_CASE("tightness construction") {
    for (int k : {4, 8, 64}) {
      const auto t = tightness_example(k);
      const double lg = std::log2(k);
      CAPTURE(k);
      CHECK(t.reg_T == 1.0);
      CHECK(t.S_T == k / 2.0 + lg - 1.0);
      CHECK(t.I_T == lg);
      CHECK(t.ratio <= k / 2.0);
    }
    CHECK_THROWS_AS(tightness_example(2), InvalidArgument);
    CHECK_THROWS_AS(tightness_example(12), InvalidArgument);
  }

  TEST_CASE("inconsistency of the plain tree") {
    const auto r = inconsistency_demo(0.05, 0, LearnerKind::BayesOracle);
    CHECK(r.tree_regret == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(r.ft_regret == 0.0);
    CHECK(r.ft_prediction == 2);
    CHECK(r.tree_prediction != 2);
    CHECK_THROWS_AS(inconsistency_demo(0.0, 0, LearnerKind::BayesOracle), InvalidArgument);
    CHECK_THROWS_AS(inconsistency_demo(0.1, 0, LearnerKind::BayesOracle), InvalidArgument);
    CHECK_THROWS_AS(inconsistency_demo(0.05, 0, LearnerKind::LogisticSgd), InvalidArgument);
  }

  TEST_CASE("power-of-two helpers") {
    CHECK(ceil_log2(1) == 0);
    CHECK(ceil_log2(5) == 3);
    CHECK(ceil_log2(1024) == 10);
    CHECK(ceil_pow2(5) == 8);
    CHECK(ceil_pow2(8) == 8);
    CHECK(floor_pow2(5) == 4);
    CHECK(bracketed_final_rounds(4) == 6);
  }

  TEST_CASE("depth bound values") {
    const auto b = depth_bounds(8, 3);
    REQUIRE(b.case4);
    REQUIRE(b.first_phase.size() == 4);
    CHECK(b.first_phase[0] == 9.0);
    CHECK(b.first_phase[2] == 10.0);
    CHECK(b.importance[0] == 13.0);
    CHECK(b.importance[2] == 14.0);
    const double l8 = std::log(8.0);
    const double chern = 4.0 + l8 + std::sqrt(l8) * std::sqrt(l8 + 8.0);
    CHECK(b.chernoff_d == doctest::Approx(chern).epsilon(1e-12));
    CHECK(b.chernoff_d == doctest::Approx(10.658).epsilon(1e-4));
    CHECK(b.second_phase == 3);
    CHECK_FALSE(depth_bounds(4, 9).case4);
    CHECK_THROWS_AS(depth_bounds(1, 1), InvalidArgument);
  }

  TEST_CASE("level tracker") {
    const auto t = level_tracker(8, 1);
    CHECK(t.rounds == 3);
    REQUIRE(t.occupancy.size() == 4);
    const long long expect[] = {8, 4, 2, 1};
    for (int r = 0; r < 4; ++r) CHECK(t.occupancy[static_cast<std::size_t>(r)][0] == expect[r]);

    for (int m : {1, 2, 4, 8}) {
      const auto big = level_tracker(1LL << 16, m);
      CAPTURE(m);
      CHECK(big.rounds <= chernoff_depth(static_cast<double>(1LL << 16), m));
      long long total = 0;
      for (long long n : big.occupancy.back()) total += n;
      CHECK(total == m);
    }
  }

  TEST_CASE("measured depth stays within the bounds") {
    for (int k : {4, 8, 16, 32})
      for (int m = 1; m <= 4; ++m) {
        const auto meas = measure_depth(k, m, Semantics::Complete);
        const auto b = depth_bounds(k, m);
        CAPTURE(k);
        CAPTURE(m);
        CHECK(meas.first_phase_rounds <= b.min_first_phase());
        CHECK(meas.importance_depth <= b.min_importance());
      }
  }

  TEST_CASE("multi-elimination ratio bounds") {
    const int m = static_cast<int>(std::ceil(4.0 * std::log(16.0)));
    const double l16 = std::log(16.0);
    CHECK(multi_bound_2(16, m) == doctest::Approx(4.0 + 2.0 * l16 / m + 2.0 * std::sqrt(l16 / m)));
    CHECK(multi_bound_2(16, m) < 5.5);
    CHECK(multi_bound_1(8, 3) == doctest::Approx(2.0 + 4.0 / 3.0 + 8.0 / 6.0));

    const auto r = ratio_report(8, 1, Semantics::Complete);
    REQUIRE(r.corollary_bound.has_value());
    CHECK(*r.corollary_bound == 3.0);
    CHECK(r.dethroning_cost == 1.0);
    CHECK(r.worst_ratio > 0.0);
  }
}  // TEST_SUITE
