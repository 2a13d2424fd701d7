#include "doctest.h"

#include <cmath>
#include <vector>

#include "ect/learners.hpp"
#include "ect/reductions.hpp"
#include "ect/rng.hpp"

using namespace ect;

namespace {

WeightedBinaryExample wex(std::vector<double> x, Side y, double w = 1.0) { return {std::move(x), y, w}; }

}  // namespace

TEST_SUITE("learners") {

TEST_CASE("costing: zero weights never survive, equal weights always do") {
  std::vector<WeightedBinaryExample> s;
  for (int i = 0; i < 1000; ++i) s.push_back(wex({double(i)}, Side::Left, i % 2 ? 0.0 : 2.0));
  const CostingResult r = costing_resample(s, {CostingNormalization::MaxWeight, 3});
  CHECK(r.kept.size() == 500);
  for (const auto& e : r.kept) {
    CHECK(static_cast<int>(e.features[0]) % 2 == 0);
    CHECK(e.w == 1.0);
  }
  const CostingResult z = costing_resample(std::vector<WeightedBinaryExample>{wex({0}, Side::Left, 0.0)}, {});
  CHECK(z.all_zero);
  CHECK(z.kept.empty());
  CHECK(costing_resample(std::vector<WeightedBinaryExample>{}, {}).all_zero);
}

TEST_CASE("costing: acceptance follows w / w_max") {
  std::vector<WeightedBinaryExample> s;
  const int n = 10000;
  for (int i = 0; i < n; ++i)
    for (double w : {1.0, 0.5, 0.0}) s.push_back(wex({w, double(i)}, Side::Right, w));
  const CostingResult r = costing_resample(s, {CostingNormalization::MaxWeight, 17});
  int top = 0, mid = 0, zero = 0;
  for (const auto& e : r.kept) (e.features[0] == 1.0 ? top : e.features[0] == 0.5 ? mid : zero)++;
  CHECK(top == n);
  CHECK(zero == 0);
  const double sigma = std::sqrt(n * 0.25);
  CHECK(std::abs(mid - 0.5 * n) <= 3 * sigma);
}

TEST_CASE("costing: unit cap clips at one") {
  std::vector<WeightedBinaryExample> s;
  for (int i = 0; i < 4000; ++i) s.push_back(wex({double(i)}, Side::Left, i < 2000 ? 4.0 : 0.25));
  const CostingResult r = costing_resample(s, {CostingNormalization::UnitCap, 5});
  int heavy = 0, light = 0;
  for (const auto& e : r.kept) (e.features[0] < 2000 ? heavy : light)++;
  CHECK(heavy == 2000);
  CHECK(std::abs(light - 500) <= 3 * std::sqrt(2000 * 0.25 * 0.75));
}

TEST_CASE("costing: seeded determinism") {
  std::vector<WeightedBinaryExample> s;
  Rng rng(4);
  for (int i = 0; i < 500; ++i) s.push_back(wex({rng.uniform()}, Side::Left, rng.uniform()));
  const auto a = costing_resample(s, {CostingNormalization::MaxWeight, 9});
  const auto b = costing_resample(s, {CostingNormalization::MaxWeight, 9});
  REQUIRE(a.kept.size() == b.kept.size());
  for (std::size_t i = 0; i < a.kept.size(); ++i) CHECK(a.kept[i].features == b.kept[i].features);
}

TEST_CASE("property: weighted error equals mean weight times resampled error") {
  Rng rng(21);
  std::vector<WeightedBinaryExample> s;
  for (int i = 0; i < 1000; ++i) s.push_back(wex({rng.uniform() - 0.5}, rng.bernoulli(0.5) ? Side::Right : Side::Left, rng.uniform()));
  const Classifier f{LogisticModel{{1.0}, 0.0}};
  double mean_w = 0, werr = 0;
  for (const auto& e : s) {
    mean_w += e.w;
    werr += e.w * (f.predict(e.features) != e.y);
  }
  mean_w /= s.size();
  werr /= s.size();
  const int reps = 200;
  std::vector<double> est;
  for (int r = 0; r < reps; ++r) {
    const auto kept = costing_resample(s, {CostingNormalization::MaxWeight, derive_seed(99, r)}).kept;
    double wrong = 0;
    for (const auto& e : kept) wrong += f.predict(e.features) != e.y;
    est.push_back(mean_w * wrong / kept.size());
  }
  double m = 0, v = 0;
  for (double e : est) m += e;
  m /= reps;
  for (double e : est) v += (e - m) * (e - m);
  const double se = std::sqrt(v / (reps - 1) / reps);
  CHECK(std::abs(m - werr) <= 3 * se);
}

TEST_CASE("logistic separates a linearly separable set") {
  Rng rng(8);
  std::vector<WeightedBinaryExample> s;
  for (int i = 0; i < 400; ++i) {
    const double a = rng.uniform() * 4 - 2, b = rng.uniform() * 4 - 2;
    if (std::abs(a + 2 * b - 0.3) < 0.2) continue;  // margin
    s.push_back(wex({a, b}, a + 2 * b > 0.3 ? Side::Right : Side::Left));
  }
  LearnerSpec spec;
  spec.epochs = 50;
  const Classifier f = learn(spec, s);
  CHECK(*weighted_error(f, s) == 0.0);
}

TEST_CASE("logistic is seeded and deterministic") {
  Rng rng(12);
  std::vector<WeightedBinaryExample> s;
  for (int i = 0; i < 300; ++i) s.push_back(wex({rng.normal(), rng.normal()}, rng.bernoulli(0.4) ? Side::Right : Side::Left, rng.uniform()));
  LearnerSpec spec;
  const auto a = std::get<LogisticModel>(learn(spec, s).model);
  const auto b = std::get<LogisticModel>(learn(spec, s).model);
  CHECK(a.w == b.w);
  CHECK(a.b == b.b);
  spec.seed = 43;
  const auto c = std::get<LogisticModel>(learn(spec, s).model);
  CHECK((c.w != a.w || c.b != a.b));
}

TEST_CASE("weights shift the logistic decision") {
  // Same context, conflicting labels: the heavier side must win.
  std::vector<WeightedBinaryExample> s{wex({1.0}, Side::Left, 1.0), wex({1.0}, Side::Right, 3.0)};
  LearnerSpec spec;
  spec.epochs = 200;
  CHECK(learn(spec, s).predict(std::vector<double>{1.0}) == Side::Right);
  s[0].w = 5.0;
  CHECK(learn(spec, s).predict(std::vector<double>{1.0}) == Side::Left);
}

TEST_CASE("stump recovers a threshold") {
  Rng rng(3);
  std::vector<WeightedBinaryExample> s;
  for (int i = 0; i < 200; ++i) {
    const double x = rng.uniform();
    s.push_back(wex({rng.uniform(), x}, x > 0.5 ? Side::Right : Side::Left));
  }
  LearnerSpec spec;
  spec.kind = LearnerKind::DecisionStump;
  const auto m = std::get<StumpModel>(learn(spec, s).model);
  CHECK(m.feature == 1);
  CHECK(m.below == Side::Left);
  // Within one grid step of the sample spacing.
  CHECK(std::abs(m.threshold - 0.5) < 0.02);
}

TEST_CASE("bayes oracle predicts the argmax") {
  auto table = std::make_shared<OracleTable>();
  (*table)[{1.0}] = 0.7;
  (*table)[{2.0}] = 0.3;
  LearnerSpec spec;
  spec.kind = LearnerKind::BayesOracle;
  spec.oracle = table;
  const Classifier f = learn(spec, {});
  CHECK(f.predict(std::vector<double>{1.0}) == Side::Right);
  CHECK(f.predict(std::vector<double>{2.0}) == Side::Left);
  CHECK(f.predict(std::vector<double>{3.0}) == Side::Left);

  // Without a table the oracle reads the conditionals off the weights.
  spec.oracle.reset();
  const std::vector<WeightedBinaryExample> s{wex({1.0}, Side::Right, 0.7), wex({1.0}, Side::Left, 0.3)};
  CHECK(learn(spec, s).predict(std::vector<double>{1.0}) == Side::Right);
}

TEST_CASE("constant learner") {
  LearnerSpec spec;
  spec.kind = LearnerKind::Constant;
  spec.constant_side = Side::Right;
  CHECK(learn(spec, {}).predict(std::vector<double>{}) == Side::Right);
}

TEST_CASE("learner input errors") {
  LearnerSpec spec;
  CHECK_THROWS_AS(learn(spec, {}), TrainingDataError);
  const std::vector<WeightedBinaryExample> bad{wex({NAN}, Side::Left)};
  CHECK_THROWS_AS(learn(spec, bad), InvalidArgument);
  const std::vector<WeightedBinaryExample> neg{wex({1.0}, Side::Left, -1.0)};
  CHECK_THROWS_AS(learn(spec, neg), InvalidArgument);
  spec.lr = 0;
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
  spec.lr = 0.1;
  spec.epochs = 0;
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
  CHECK(parse_learner_kind("stump") == LearnerKind::DecisionStump);
  CHECK(parse_learner_kind(to_string(LearnerKind::LogisticSgd)) == LearnerKind::LogisticSgd);
  CHECK_THROWS_AS(parse_learner_kind("svm"), InvalidArgument);
}

TEST_CASE("weighted error and regret") {
  const Classifier left{ConstantModel{Side::Left}};
  const Classifier right{ConstantModel{Side::Right}};
  const std::vector<WeightedBinaryExample> perfect{wex({0}, Side::Left, 2.0), wex({1}, Side::Left, 1.0)};
  CHECK(*weighted_error(left, perfect) == 0.0);
  CHECK(*weighted_regret(left, perfect) == 0.0);

  // Always wrong with weights (1, 3) on distinct contexts: the truth-table
  // optimum is 0.
  const std::vector<WeightedBinaryExample> two{wex({0}, Side::Left, 1.0), wex({1}, Side::Right, 3.0)};
  const Classifier wrong{StumpModel{0, 0.5, Side::Right}};
  CHECK(*weighted_error(wrong, two) == 1.0);
  CHECK(*truth_table_min_error(two) == 0.0);
  CHECK(*weighted_regret(wrong, two) == 1.0);

  // Same context: the optimum is 1/4.
  const std::vector<WeightedBinaryExample> same{wex({0}, Side::Left, 1.0), wex({0}, Side::Right, 3.0)};
  CHECK(*weighted_error(left, same) == 0.75);
  CHECK(*truth_table_min_error(same) == 0.25);
  CHECK(*weighted_regret(left, same) == doctest::Approx(0.5));
  CHECK(*weighted_regret(right, same) == 0.0);

  const std::vector<WeightedBinaryExample> zero{wex({0}, Side::Left, 0.0)};
  CHECK_FALSE(weighted_error(left, zero).has_value());
  CHECK_FALSE(weighted_regret(left, zero).has_value());
}

TEST_CASE("property: regret against the truth-table optimum is never negative") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<WeightedBinaryExample> s;
    for (int c = 0; c < 20; ++c)
      for (int j = 0; j < 3; ++j) s.push_back(wex({double(c)}, rng.bernoulli(0.5) ? Side::Right : Side::Left, rng.uniform()));
    OracleTable t;
    for (int c = 0; c < 20; ++c) t[{double(c)}] = rng.uniform();
    const Classifier f{TruthTableModel{t}};
    CHECK(*weighted_regret(f, s) >= -1e-12);
  }
}

TEST_CASE("cost-sensitive node weights") {
  const Example e{{0.0}, CostVector({0.2, 0.9}), 1.0};
  const auto ex = cs_node_example(e, 0, 1);
  REQUIRE(ex);
  CHECK(ex->y == Side::Left);
  CHECK(ex->w == doctest::Approx(0.7));
  CHECK_FALSE(cs_node_example(Example{{0.0}, CostVector({0.4, 0.4}), 1.0}, 0, 1));
}

TEST_CASE("property: node weights are shift-invariant") {
  Rng rng(2);
  for (int trial = 0; trial < 1000; ++trial) {
    // Dyadic costs keep the arithmetic exact.
    const double a = rng.below(512) / 1024.0, b = rng.below(512) / 1024.0, d = rng.below(512) / 1024.0;
    const auto e1 = cs_node_example(Example{{0.0}, CostVector({a, b}), 1.0}, 0, 1);
    const auto e2 = cs_node_example(Example{{0.0}, CostVector({a + d, b + d}), 1.0}, 0, 1);
    REQUIRE(e1.has_value() == e2.has_value());
    if (e1) {
      CHECK(e1->w == e2->w);
      CHECK(e1->y == e2->y);
    }
  }
}

}  // TEST_SUITE
