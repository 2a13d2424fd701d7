#include "ect/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "ect/reductions.hpp"
#include "ect/rng.hpp"

namespace ect {

std::vector<double> CostDistribution::expected_costs() const {
  const int k = num_labels();
  std::vector<double> e(static_cast<std::size_t>(k), 0.0);
  for (std::size_t j = 0; j < outcomes.size(); ++j)
    for (Label y = 0; y < k; ++y) e[static_cast<std::size_t>(y)] += probs[j] * outcomes[j][y];
  return e;
}

void CostDistribution::validate() const {
  if (outcomes.empty() || outcomes.size() != probs.size()) throw InvalidArgument("cost distribution needs one probability per outcome");
  const int k = num_labels();
  if (k < 2) throw InvalidArgument("cost distribution needs k >= 2");
  double sum = 0.0;
  for (std::size_t j = 0; j < outcomes.size(); ++j) {
    if (outcomes[j].num_labels() != k) throw InvalidArgument("cost vectors of different lengths");
    if (!(probs[j] >= 0.0)) throw InvalidArgument("negative outcome probability");
    sum += probs[j];
  }
  if (std::abs(sum - 1.0) > kProbabilityTolerance) throw InvalidArgument("outcome probabilities do not sum to 1");
}

CostDistribution as_cost_distribution(const ConditionalDistribution& dist) {
  CostDistribution out;
  const int k = dist.num_labels();
  for (Label y = 0; y < k; ++y) {
    std::vector<double> c(static_cast<std::size_t>(k), 1.0);
    c[static_cast<std::size_t>(y)] = 0.0;
    out.outcomes.emplace_back(std::move(c));
    out.probs.push_back(dist[y]);
  }
  return out;
}

RegretReport check_filter_theorems(const LabelTree& tree, const CostDistribution& dist,
                                   const std::vector<Side>& decisions) {
  dist.validate();
  if (dist.num_labels() != tree.num_labels()) throw InvalidArgument("distribution and tree disagree on k");
  if (static_cast<int>(decisions.size()) != tree.num_internal()) throw InvalidArgument("one decision per node is required");
  const std::vector<double> expected = dist.expected_costs();
  RegretReport rep;
  rep.k = tree.num_labels();
  std::vector<Label> win(static_cast<std::size_t>(tree.num_internal()));
  auto arriving = [&](NodeRef c) { return c.leaf ? c.index : win[static_cast<std::size_t>(c.index)]; };
  for (int n = 0; n < tree.num_internal(); ++n) {
    NodeRegret nr;
    nr.node = n;
    nr.a = arriving(tree.node(n).left);
    nr.b = arriving(tree.node(n).right);
    nr.output = decisions[static_cast<std::size_t>(n)] == Side::Left ? nr.a : nr.b;
    const Label other = nr.output == nr.a ? nr.b : nr.a;
    for (std::size_t j = 0; j < dist.outcomes.size(); ++j)
      nr.W += dist.probs[j] * std::abs(dist.outcomes[j][nr.a] - dist.outcomes[j][nr.b]);
    nr.r = std::max(0.0, expected[static_cast<std::size_t>(nr.output)] - expected[static_cast<std::size_t>(other)]);
    nr.reg = nr.W > 0.0 ? nr.r / nr.W : 0.0;
    win[static_cast<std::size_t>(n)] = nr.output;
    rep.sum_W += nr.W;
    rep.sum_r += nr.reg * nr.W;
    rep.nodes.push_back(nr);
  }
  rep.prediction = win[static_cast<std::size_t>(tree.root())];
  rep.creg = expected[static_cast<std::size_t>(rep.prediction)] - *std::min_element(expected.begin(), expected.end());
  rep.avg_regret = rep.sum_W > 0.0 ? rep.sum_r / rep.sum_W : 0.0;
  rep.main_bound = rep.avg_regret * rep.sum_W;
  rep.k_bound = rep.k * rep.avg_regret / 2.0;
  return rep;
}

std::vector<Side> decisions_from_bits(int num_nodes, std::uint64_t bits) {
  std::vector<Side> d(static_cast<std::size_t>(num_nodes));
  for (int n = 0; n < num_nodes; ++n) d[static_cast<std::size_t>(n)] = from_bit(static_cast<int>((bits >> n) & 1u));
  return d;
}

namespace {

// Uniform, binary, or multiclass-style (one free label) costs.
std::vector<double> random_costs(Rng& rng, int k) {
  std::vector<double> c(static_cast<std::size_t>(k));
  switch (rng.below(3)) {
    case 0:
      for (double& v : c) v = rng.uniform();
      break;
    case 1:
      for (double& v : c) v = rng.bernoulli(0.5) ? 1.0 : 0.0;
      break;
    default:
      std::fill(c.begin(), c.end(), 1.0);
      c[rng.below(static_cast<std::uint64_t>(k))] = 0.0;
      break;
  }
  return c;
}

}  // namespace

CostDistribution random_cost_distribution(int k, std::uint64_t seed) {
  Rng rng(seed);
  const int J = 1 + static_cast<int>(rng.below(3));
  CostDistribution d;
  double total = 0.0;
  for (int j = 0; j < J; ++j) {
    d.outcomes.emplace_back(random_costs(rng, k));
    d.probs.push_back(rng.uniform() + 1e-3);
    total += d.probs.back();
  }
  for (double& p : d.probs) p /= total;
  // Absorb rounding so the probabilities sum to one within tolerance.
  double s = 0.0;
  for (std::size_t j = 0; j + 1 < d.probs.size(); ++j) s += d.probs[j];
  d.probs.back() = 1.0 - s;
  return d;
}

SweepReport filter_theorem_sweep(const SweepConfig& cfg) {
  struct Job {
    int k;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (int k : cfg.ks) {
    if (k < 2 || k > 16) throw InvalidArgument("filter sweep supports 2 <= k <= 16");
    for (int d = 0; d < cfg.distributions; ++d)
      jobs.push_back({k, derive_seed(derive_seed(cfg.seed, static_cast<std::uint64_t>(k)), static_cast<std::uint64_t>(d))});
  }
  struct Shard {
    std::size_t instances = 0;
    SweepCheck main, bound;
    std::vector<Counterexample> dumps;
  };
  std::vector<Shard> shards(jobs.size());
  auto work = [&](std::size_t i) {
    const Job& job = jobs[i];
    Shard& sh = shards[i];
    const LabelTree tree = LabelTree::balanced(job.k);
    const CostDistribution dist = random_cost_distribution(job.k, job.seed);
    const std::uint64_t assignments = std::uint64_t{1} << (job.k - 1);
    for (std::uint64_t bits = 0; bits < assignments; ++bits) {
      const RegretReport rep = check_filter_theorems(tree, dist, decisions_from_bits(tree.num_internal(), bits));
      ++sh.instances;
      for (auto [check, slack, rhs, name] : {std::tuple{&sh.main, rep.main_slack(), rep.main_bound, "main"},
                                             std::tuple{&sh.bound, rep.k_slack(), rep.k_bound, "bound"}}) {
        check->worst_slack = std::min(check->worst_slack, slack);
        if (slack < -cfg.tolerance) {
          ++check->violations;
          if (sh.dumps.size() < cfg.max_dumps) sh.dumps.push_back({name, job.k, job.seed, bits, dist, rep.creg, rhs});
        }
      }
    }
  };
  const int workers = std::max(1, cfg.jobs);
  if (workers == 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t i = static_cast<std::size_t>(t); i < jobs.size(); i += static_cast<std::size_t>(workers)) work(i);
      });
    for (auto& th : pool) th.join();
  }
  // Merge in job order so the report does not depend on scheduling.
  SweepReport rep;
  rep.distributions = jobs.size();
  for (const Shard& sh : shards) {
    rep.instances += sh.instances;
    for (auto [dst, src] : {std::pair{&rep.main, &sh.main}, std::pair{&rep.bound, &sh.bound}}) {
      dst->violations += src->violations;
      dst->worst_slack = std::min(dst->worst_slack, src->worst_slack);
    }
    for (const auto& c : sh.dumps)
      if (rep.counterexamples.size() < cfg.max_dumps) rep.counterexamples.push_back(c);
  }
  return rep;
}

nlohmann::ordered_json to_json(const Counterexample& c) {
  nlohmann::ordered_json j;
  j["check"] = c.check;
  j["k"] = c.k;
  j["instance_seed"] = c.instance_seed;
  j["assignment"] = c.assignment;
  nlohmann::ordered_json outcomes = nlohmann::ordered_json::array();
  for (const auto& o : c.dist.outcomes) outcomes.push_back(o.values());
  j["outcomes"] = outcomes;
  j["probs"] = c.dist.probs;
  j["creg"] = c.lhs;
  j["bound"] = c.rhs;
  return j;
}

Counterexample counterexample_from_json(const nlohmann::json& j) {
  try {
    Counterexample c;
    c.check = j.at("check").get<std::string>();
    c.k = j.at("k").get<int>();
    c.instance_seed = j.at("instance_seed").get<std::uint64_t>();
    c.assignment = j.at("assignment").get<std::uint64_t>();
    for (const auto& o : j.at("outcomes")) c.dist.outcomes.emplace_back(o.get<std::vector<double>>());
    c.dist.probs = j.at("probs").get<std::vector<double>>();
    c.lhs = j.at("creg").get<double>();
    c.rhs = j.at("bound").get<double>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad counterexample: ") + e.what());
  }
}

RegretReport replay(const Counterexample& c) {
  const LabelTree tree = LabelTree::balanced(c.k);
  return check_filter_theorems(tree, c.dist, decisions_from_bits(tree.num_internal(), c.assignment));
}

AuditCounters audit(const LabelTree& tree, const CostVector& costs, const std::vector<Side>& decisions, Label* winner) {
  if (costs.num_labels() != tree.num_labels()) throw InvalidArgument("cost vector and tree disagree on k");
  if (static_cast<int>(decisions.size()) != tree.num_internal()) throw InvalidArgument("one decision per node is required");
  AuditCounters out;
  std::vector<Label> win(static_cast<std::size_t>(tree.num_internal()));
  auto arriving = [&](NodeRef c) { return c.leaf ? c.index : win[static_cast<std::size_t>(c.index)]; };
  for (int n = 0; n < tree.num_internal(); ++n) {
    const Label a = arriving(tree.node(n).left);
    const Label b = arriving(tree.node(n).right);
    const Label o = decisions[static_cast<std::size_t>(n)] == Side::Left ? a : b;
    const Label other = o == a ? b : a;
    const double gap = std::abs(costs[a] - costs[b]);
    out.total_importance += gap;
    if (costs[o] > costs[other]) out.upset_importance += gap;
    win[static_cast<std::size_t>(n)] = o;
  }
  const Label w = win[static_cast<std::size_t>(tree.root())];
  out.winner_cost = costs[w];
  if (winner) *winner = w;
  return out;
}

Lemma1Result lemma1_check(const CostVector& costs, const std::vector<Side>& decisions) {
  const int k = costs.num_labels();
  const LabelTree tree = LabelTree::balanced(k);
  Lemma1Result r;
  const AuditCounters a = audit(tree, costs, decisions, &r.winner);
  r.S = a.total_importance;
  r.I = a.upset_importance;
  r.c_T = a.winner_cost;
  r.holds = r.S + r.c_T <= r.I + k / 2.0 + 1e-12;
  return r;
}

Lemma1Sweep lemma1_sweep(const std::vector<int>& ks, int per_k, std::uint64_t seed) {
  Lemma1Sweep out;
  for (int k : ks) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
    for (int i = 0; i < per_k; ++i) {
      const CostVector c(random_costs(rng, k));
      std::vector<Side> d(static_cast<std::size_t>(k - 1));
      for (Side& s : d) s = from_bit(static_cast<int>(rng.below(2)));
      const Lemma1Result r = lemma1_check(c, d);
      ++out.checked;
      out.worst_slack = std::min(out.worst_slack, r.I + k / 2.0 - r.S - r.c_T);
      if (!r.holds) ++out.violations;
    }
  }
  return out;
}

Tightness tightness_example(int k) {
  if (k < 4 || (k & (k - 1)) != 0) throw InvalidArgument("tightness example needs k = 2^j with j >= 2");
  std::vector<double> c(static_cast<std::size_t>(k));
  for (Label y = 0; y < k; ++y) c[static_cast<std::size_t>(y)] = y % 2;
  const CostVector costs(c);
  const LabelTree tree = LabelTree::balanced(k);
  const Label loud = k - 1;
  // Every node picks the cheaper input (left on ties) except those on the
  // last label's path, which it wins.
  std::vector<Side> d(static_cast<std::size_t>(tree.num_internal()));
  std::vector<Label> win(static_cast<std::size_t>(tree.num_internal()));
  auto arriving = [&](NodeRef ref) { return ref.leaf ? ref.index : win[static_cast<std::size_t>(ref.index)]; };
  for (int n = 0; n < tree.num_internal(); ++n) {
    const Label a = arriving(tree.node(n).left), b = arriving(tree.node(n).right);
    Side s = costs[b] < costs[a] ? Side::Right : Side::Left;
    if (a == loud) s = Side::Left;
    if (b == loud) s = Side::Right;
    d[static_cast<std::size_t>(n)] = s;
    win[static_cast<std::size_t>(n)] = s == Side::Left ? a : b;
  }
  const AuditCounters a = audit(tree, costs, d);
  Tightness t;
  t.reg_T = a.winner_cost - *std::min_element(c.begin(), c.end());
  t.S_T = a.total_importance;
  t.I_T = a.upset_importance;
  t.ratio = t.reg_T * t.S_T / t.I_T;
  return t;
}

InconsistencyResult inconsistency_demo(double eps, int n_samples, LearnerKind learner, std::uint64_t seed) {
  if (!(eps > 0.0 && eps < 1.0 / 12.0)) throw InvalidArgument("eps must lie in (0, 1/12)");
  const std::vector<double> p{0.25 + eps, 0.25 + eps, 0.5 - 2.0 * eps};
  const std::vector<double> x{1.0};
  std::vector<Example> data;
  if (learner == LearnerKind::BayesOracle) {
    for (Label y = 0; y < 3; ++y) data.push_back({x, y, p[static_cast<std::size_t>(y)]});
  } else {
    if (n_samples <= 0) throw InvalidArgument("n_samples must be positive");
    Rng rng(seed);
    for (int i = 0; i < n_samples; ++i) {
      const double u = rng.uniform();
      const Label y = u < p[0] ? 0 : (u < p[0] + p[1] ? 1 : 2);
      data.push_back({x, y, 1.0});
    }
  }
  NodeLearner nl;
  nl.spec.kind = learner;
  nl.spec.seed = derive_seed(seed, 7);
  const LabelTree tree = LabelTree::balanced(3);
  const ReductionModel tree_model = train_tree(data, tree, nl).model;
  const ReductionModel ft_model = train_filter_tree(data, tree, nl).model;
  InconsistencyResult r;
  r.tree_prediction = decode(tree_model, x).label;
  r.ft_prediction = decode(ft_model, x).label;
  const double top = *std::max_element(p.begin(), p.end());
  r.tree_regret = top - p[static_cast<std::size_t>(r.tree_prediction)];
  r.ft_regret = top - p[static_cast<std::size_t>(r.ft_prediction)];
  return r;
}

}  // namespace ect
