#include "doctest.h"

#include <sstream>

#include "ect/model_io.hpp"
#include "ect/rng.hpp"

using namespace ect;

namespace {

std::vector<Example> blobs(int k, int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Example> out;
  for (int i = 0; i < n; ++i) {
    const Label y = static_cast<Label>(rng.below(static_cast<std::uint64_t>(k)));
    out.push_back({{y + rng.normal() * 0.7, rng.normal() / 3.0, 1e-7 * rng.normal()}, y, 1.0});
  }
  return out;
}

void check_roundtrip(const ReductionModel& m, const std::vector<Example>& data) {
  std::ostringstream first;
  save_model(m, first);
  std::istringstream in(first.str());
  const ReductionModel back = load_model(in);
  std::ostringstream second;
  save_model(back, second);
  CHECK(first.str() == second.str());
  CHECK(back.kind == m.kind);
  CHECK(back.num_labels() == m.num_labels());
  CHECK(back.label_names == m.label_names);
  for (const auto& e : data) CHECK(decode(back, e.features).label == decode(m, e.features).label);
}

}  // namespace

TEST_SUITE("model_io") {

TEST_CASE("round trip is exact for every reduction and learner") {
  const auto data = blobs(5, 200, 3);
  const LabelTree tree = LabelTree::balanced(5);
  for (LearnerKind lk : {LearnerKind::LogisticSgd, LearnerKind::DecisionStump, LearnerKind::BayesOracle}) {
    LearnerSpec spec;
    spec.kind = lk;
    for (ReductionKind kind : {ReductionKind::Tree, ReductionKind::FilterTree, ReductionKind::AllPairs, ReductionKind::Apft}) {
      ReductionModel m = train(kind, data, tree, NodeLearner{spec}).model;
      m.label_names = {"a", "b", "c", "d", "e"};
      check_roundtrip(m, data);
    }
  }
}

TEST_CASE("round trip for cost-sensitive and shared models") {
  Rng rng(4);
  std::vector<Example> cs;
  for (int i = 0; i < 100; ++i) cs.push_back({{rng.uniform(), rng.uniform()}, CostVector({rng.uniform(), rng.uniform(), rng.uniform()}), 1.0});
  const LabelTree tree = LabelTree::balanced(3);
  check_roundtrip(train_cs_filter_tree(cs, tree, NodeLearner{LearnerSpec{}}).model, cs);
  const auto data = blobs(6, 200, 5);
  check_roundtrip(train_filter_tree(data, LabelTree::balanced(6), NodeLearner{LearnerSpec{}}, {true, false}).model, data);
}

TEST_CASE("custom trees survive the round trip") {
  using N = LabelTree::Node;
  const LabelTree tree(3, {N{NodeRef::label(2), NodeRef::label(0)}, N{NodeRef::label(1), NodeRef::internal(0)}});
  const auto data = blobs(3, 100, 6);
  const ReductionModel m = train_filter_tree(data, tree, NodeLearner{LearnerSpec{}}).model;
  std::stringstream io;
  save_model(m, io);
  const ReductionModel back = load_model(io);
  CHECK(back.tree.node(1).left == NodeRef::label(1));
  CHECK(back.tree.node(0).left == NodeRef::label(2));
}

TEST_CASE("malformed model files are rejected") {
  std::istringstream empty("");
  CHECK_THROWS_AS(load_model(empty), FormatError);
  std::istringstream wrong("not-a-model 1\n");
  CHECK_THROWS_AS(load_model(wrong), FormatError);
  std::istringstream version("ect-model 99\n");
  CHECK_THROWS_AS(load_model(version), FormatError);

  const auto data = blobs(3, 50, 7);
  std::ostringstream out;
  save_model(train_filter_tree(data, LabelTree::balanced(3), NodeLearner{LearnerSpec{}}).model, out);
  const std::string text = out.str();
  std::istringstream truncated(text.substr(0, text.size() / 2));
  CHECK_THROWS_AS(load_model(truncated), FormatError);
  CHECK_THROWS_AS(load_model_file("/nonexistent/model.txt"), InvalidArgument);
}

}  // TEST_SUITE
