#include "ect/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ect/kernels.hpp"
#include "ect/rng.hpp"

namespace ect {

std::string to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::LogisticSgd: return "logistic_sgd";
    case LearnerKind::DecisionStump: return "decision_stump";
    case LearnerKind::Constant: return "constant";
    case LearnerKind::BayesOracle: return "bayes_oracle";
  }
  return "?";
}

LearnerKind parse_learner_kind(const std::string& name) {
  if (name == "logistic_sgd" || name == "logistic") return LearnerKind::LogisticSgd;
  if (name == "decision_stump" || name == "stump") return LearnerKind::DecisionStump;
  if (name == "constant") return LearnerKind::Constant;
  if (name == "bayes_oracle" || name == "oracle") return LearnerKind::BayesOracle;
  throw InvalidArgument("unknown learner kind: " + name);
}

void LearnerSpec::validate() const {
  if (!(lr > 0.0) || !std::isfinite(lr)) throw InvalidArgument("learner.lr must be positive");
  if (epochs <= 0) throw InvalidArgument("learner.epochs must be positive");
}

Side Classifier::predict(std::span<const double> x) const {
  struct Visitor {
    std::span<const double> x;
    Side operator()(const ConstantModel& m) const { return m.side; }
    Side operator()(const LogisticModel& m) const {
      if (m.w.size() != x.size()) throw InvalidArgument("feature count does not match the model");
      return kernels::dot(m.w.data(), x.data(), x.size()) + m.b > 0.0 ? Side::Right : Side::Left;
    }
    Side operator()(const StumpModel& m) const {
      if (m.feature >= static_cast<int>(x.size())) throw InvalidArgument("feature count does not match the model");
      return x[static_cast<std::size_t>(m.feature)] <= m.threshold ? m.below : opposite(m.below);
    }
    Side operator()(const TruthTableModel& m) const {
      const auto it = m.p_right.find(std::vector<double>(x.begin(), x.end()));
      return it != m.p_right.end() && it->second > 0.5 ? Side::Right : Side::Left;
    }
  };
  return std::visit(Visitor{x}, model);
}

namespace {

void check_examples(std::span<const WeightedBinaryExample> examples) {
  const std::size_t d = examples.empty() ? 0 : examples.front().features.size();
  for (const auto& e : examples) {
    if (e.features.size() != d) throw InvalidArgument("examples have inconsistent feature counts");
    for (double v : e.features)
      if (!std::isfinite(v)) throw InvalidArgument("nonfinite feature value");
    if (!std::isfinite(e.w) || e.w < 0.0) throw InvalidArgument("importance weight must be finite and >= 0");
  }
}

LogisticModel train_logistic(const LearnerSpec& spec, std::span<const WeightedBinaryExample> examples) {
  const std::size_t n = examples.size();
  const std::size_t d = examples.front().features.size();

  // Standardize internally; the returned weights live in the raw feature space.
  std::vector<double> mean(d, 0.0), scale(d, 1.0);
  for (const auto& e : examples) kernels::axpy(1.0, e.features.data(), mean.data(), d);
  for (double& m : mean) m /= static_cast<double>(n);
  std::vector<double> var(d, 0.0);
  for (const auto& e : examples)
    for (std::size_t j = 0; j < d; ++j) var[j] += (e.features[j] - mean[j]) * (e.features[j] - mean[j]);
  for (std::size_t j = 0; j < d; ++j) {
    const double sd = std::sqrt(var[j] / static_cast<double>(n));
    scale[j] = sd > 1e-12 ? sd : 1.0;
  }
  std::vector<std::vector<double>> z(n, std::vector<double>(d));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) z[i][j] = (examples[i].features[j] - mean[j]) / scale[j];

  std::vector<double> w(d, 0.0);
  double b = 0.0;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(spec.seed);
  for (int epoch = 0; epoch < spec.epochs; ++epoch) {
    rng.shuffle(order);
    const double step = spec.lr / (1.0 + epoch);
    for (std::size_t i : order) {
      const auto& e = examples[i];
      if (e.w == 0.0) continue;
      const double margin = kernels::dot(w.data(), z[i].data(), d) + b;
      const double target = e.y == Side::Right ? 1.0 : 0.0;
      const double p = 1.0 / (1.0 + std::exp(-margin));
      const double g = step * e.w * (target - p);
      kernels::axpy(g, z[i].data(), w.data(), d);
      b += g;
    }
  }

  LogisticModel out;
  out.w.resize(d);
  out.b = b;
  for (std::size_t j = 0; j < d; ++j) {
    out.w[j] = w[j] / scale[j];
    out.b -= w[j] * mean[j] / scale[j];
  }
  return out;
}

StumpModel train_stump(std::span<const WeightedBinaryExample> examples) {
  const std::size_t d = examples.front().features.size();
  double total_right = 0.0, total = 0.0;
  for (const auto& e : examples) {
    total += e.w;
    if (e.y == Side::Right) total_right += e.w;
  }
  // Threshold below every value: the stump is a constant.
  StumpModel best{0, -INFINITY, total_right > total - total_right ? Side::Right : Side::Left};
  double best_err = std::min(total_right, total - total_right);
  if (d == 0) return best;

  std::vector<std::size_t> order(examples.size());
  for (std::size_t f = 0; f < d; ++f) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return examples[a].features[f] < examples[b].features[f]; });
    double right_below = 0.0, left_below = 0.0;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      const auto& e = examples[order[i]];
      (e.y == Side::Right ? right_below : left_below) += e.w;
      const double here = e.features[f];
      const double next = examples[order[i + 1]].features[f];
      if (next == here) continue;
      const double threshold = here + (next - here) / 2.0;
      const double left_above = total - total_right - left_below;
      const double right_above = total_right - right_below;
      // below=Left errs on rights below and lefts above; below=Right the reverse.
      const double err_left = right_below + left_above;
      const double err_right = left_below + right_above;
      if (err_left < best_err) {
        best_err = err_left;
        best = {static_cast<int>(f), threshold, Side::Left};
      }
      if (err_right < best_err) {
        best_err = err_right;
        best = {static_cast<int>(f), threshold, Side::Right};
      }
    }
  }
  return best;
}

TruthTableModel train_truth_table(std::span<const WeightedBinaryExample> examples) {
  std::map<std::vector<double>, std::pair<double, double>> mass;  // (left, right)
  for (const auto& e : examples) {
    auto& [l, r] = mass[e.features];
    (e.y == Side::Right ? r : l) += e.w;
  }
  TruthTableModel out;
  for (const auto& [x, lr] : mass) {
    const double t = lr.first + lr.second;
    out.p_right[x] = t > 0.0 ? lr.second / t : 0.0;
  }
  return out;
}

}  // namespace

Classifier learn(const LearnerSpec& spec, std::span<const WeightedBinaryExample> examples) {
  spec.validate();
  check_examples(examples);
  switch (spec.kind) {
    case LearnerKind::Constant:
      return {ConstantModel{spec.constant_side}};
    case LearnerKind::BayesOracle:
      if (spec.oracle) return {TruthTableModel{*spec.oracle}};
      if (examples.empty()) throw TrainingDataError("bayes_oracle without a table needs training data");
      return {train_truth_table(examples)};
    case LearnerKind::LogisticSgd:
      if (examples.empty()) throw TrainingDataError("logistic_sgd needs training data");
      return {train_logistic(spec, examples)};
    case LearnerKind::DecisionStump:
      if (examples.empty()) throw TrainingDataError("decision_stump needs training data");
      return {train_stump(examples)};
  }
  throw InvalidArgument("unknown learner kind");
}

CostingResult costing_resample(std::span<const WeightedBinaryExample> examples, const CostingConfig& cfg) {
  check_examples(examples);
  CostingResult out;
  double w_max = 0.0;
  for (const auto& e : examples) w_max = std::max(w_max, e.w);
  if (w_max == 0.0) {
    out.all_zero = true;
    return out;
  }
  Rng rng(cfg.seed);
  for (const auto& e : examples) {
    const double keep = cfg.normalization == CostingNormalization::MaxWeight ? e.w / w_max : std::min(e.w, 1.0);
    // One draw per example regardless of outcome keeps streams aligned.
    const double u = rng.uniform();
    if (u < keep) out.kept.push_back({e.features, e.y, 1.0});
  }
  return out;
}

Classifier NodeLearner::train(std::span<const WeightedBinaryExample> examples, std::uint64_t stream) const {
  LearnerSpec s = spec;
  s.seed = derive_seed(spec.seed, stream);
  if (costing && spec.kind == LearnerKind::LogisticSgd) {
    CostingResult sample = costing_resample(examples, {normalization, derive_seed(s.seed, 0xC057)});
    if (sample.kept.empty()) return {ConstantModel{Side::Left}};
    return learn(s, sample.kept);
  }
  return learn(s, examples);
}

std::optional<double> weighted_error(const Classifier& f, std::span<const WeightedBinaryExample> examples) {
  double total = 0.0, wrong = 0.0;
  for (const auto& e : examples) {
    total += e.w;
    if (f.predict(e.features) != e.y) wrong += e.w;
  }
  if (total <= 0.0) return std::nullopt;
  return wrong / total;
}

std::optional<double> truth_table_min_error(std::span<const WeightedBinaryExample> examples) {
  std::map<std::vector<double>, std::pair<double, double>> mass;
  double total = 0.0;
  for (const auto& e : examples) {
    auto& [l, r] = mass[e.features];
    (e.y == Side::Right ? r : l) += e.w;
    total += e.w;
  }
  if (total <= 0.0) return std::nullopt;
  double best = 0.0;
  for (const auto& [x, lr] : mass) best += std::min(lr.first, lr.second);
  return best / total;
}

std::optional<double> weighted_regret(const Classifier& f, std::span<const WeightedBinaryExample> examples) {
  const auto err = weighted_error(f, examples);
  const auto opt = truth_table_min_error(examples);
  if (!err || !opt) return std::nullopt;
  return *err - *opt;
}

}  // namespace ect
