#include "ect/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "ect/analysis.hpp"
#include "ect/error.hpp"
#include "ect/rng.hpp"
#include "ect/tournaments.hpp"

namespace ect {

namespace {

using ojson = nlohmann::ordered_json;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Infinite slacks and ratios have no JSON number; they become strings.
ojson num(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : "-inf";
}

// Collects checks; asserted failures fail the suite.
class Checks {
 public:
  explicit Checks(SuiteReport& rep) : rep_(rep) { rep_.data["checks"] = ojson::array(); }

  ojson& add(const std::string& name, bool asserted, bool ok) {
    ojson c;
    c["name"] = name;
    c["status"] = asserted ? (ok ? "pass" : "fail") : "reported";
    if (asserted && !ok) rep_.passed = false;
    rep_.data["checks"].push_back(c);
    rep_.text += (asserted ? (ok ? "[pass] " : "[FAIL] ") : "[info] ") + name + "\n";
    return rep_.data["checks"].back();
  }

  void line(const std::string& s) { rep_.text += "       " + s + "\n"; }

 private:
  SuiteReport& rep_;
};

void filter_suite(SuiteReport& rep, const VerifyOptions& opts) {
  Checks checks(rep);
  SweepConfig cfg;
  cfg.seed = opts.seed;
  cfg.jobs = opts.jobs;
  const SweepReport sw = filter_theorem_sweep(cfg);
  rep.data["ks"] = cfg.ks;
  rep.data["distributions_per_k"] = cfg.distributions;
  rep.data["seed"] = cfg.seed;
  rep.data["instances"] = sw.instances;
  for (auto [name, chk, what] : {std::tuple{"regret bound: creg <= avg regret * sum W", &sw.main, "main"},
                                 std::tuple{"regret bound: creg <= k * avg regret / 2", &sw.bound, "bound"}}) {
    ojson& c = checks.add(name, true, chk->violations == 0);
    c["instances"] = sw.instances;
    c["violations"] = chk->violations;
    c["worst_slack"] = num(chk->worst_slack);
    ojson dumps = ojson::array();
    for (const auto& ce : sw.counterexamples)
      if (ce.check == what) dumps.push_back(to_json(ce));
    c["counterexamples"] = dumps;
    checks.line(std::to_string(sw.instances) + " instances, " + std::to_string(chk->violations) +
                " violations, worst slack " + fmt("%.6g", chk->worst_slack));
  }
}

void lemma1_suite(SuiteReport& rep, const VerifyOptions& opts) {
  Checks checks(rep);
  const std::vector<int> ks{2, 4, 8, 16};
  const int per_k = 10000;
  const Lemma1Sweep sw = lemma1_sweep(ks, per_k, opts.seed);
  ojson& c = checks.add("S_T + c_T <= I_T + k/2 on random costs and decisions", true, sw.violations == 0);
  c["ks"] = ks;
  c["per_k"] = per_k;
  c["checked"] = sw.checked;
  c["violations"] = sw.violations;
  c["worst_slack"] = num(sw.worst_slack);
  checks.line(std::to_string(sw.checked) + " checked, worst slack " + fmt("%.6g", sw.worst_slack));
}

void tightness_suite(SuiteReport& rep, const VerifyOptions&) {
  Checks checks(rep);
  ojson rows = ojson::array();
  bool ok = true;
  for (int k : {4, 8, 16, 32, 64}) {
    const Tightness t = tightness_example(k);
    const double lg = std::log2(static_cast<double>(k));
    const double S = k / 2.0 + lg - 1.0;
    const bool exact = t.reg_T == 1.0 && t.S_T == S && t.I_T == lg && t.ratio == S / lg && t.ratio <= k / 2.0;
    ok = ok && exact;
    rows.push_back({{"k", k}, {"reg_T", t.reg_T}, {"S_T", t.S_T}, {"I_T", t.I_T}, {"ratio", t.ratio}, {"half_k", k / 2.0}});
  }
  ojson& c = checks.add("alternating costs: reg_T = 1, S_T = k/2 + log k - 1, I_T = log k, ratio <= k/2", true, ok);
  c["rows"] = rows;
  for (const auto& r : rows)
    checks.line("k=" + std::to_string(r["k"].get<int>()) + ": (reg_T, S_T, I_T) = (" + fmt("%g", r["reg_T"].get<double>()) +
                ", " + fmt("%g", r["S_T"].get<double>()) + ", " + fmt("%g", r["I_T"].get<double>()) + "), ratio " +
                fmt("%.4g", r["ratio"].get<double>()) + " <= " + fmt("%g", r["half_k"].get<double>()));
}

void inconsistency_suite(SuiteReport& rep, const VerifyOptions& opts) {
  Checks checks(rep);
  const double eps = 0.05;
  const InconsistencyResult oracle = inconsistency_demo(eps, 0, LearnerKind::BayesOracle, opts.seed);
  {
    const bool ok = std::abs(oracle.tree_regret - 0.1) < 1e-12 && oracle.ft_regret == 0.0;
    ojson& c = checks.add("Bayes oracle, eps = 0.05: tree regret 0.1, filter tree regret 0", true, ok);
    c["tree_regret"] = oracle.tree_regret;
    c["ft_regret"] = oracle.ft_regret;
    c["tree_prediction"] = oracle.tree_prediction;
    c["ft_prediction"] = oracle.ft_prediction;
    checks.line("tree " + fmt("%.4f", oracle.tree_regret) + ", filter tree " + fmt("%.4f", oracle.ft_regret));
  }
  {
    const int n = 50000;
    const InconsistencyResult lr = inconsistency_demo(eps, n, LearnerKind::LogisticSgd, opts.seed);
    const bool ok = std::abs(lr.tree_regret - 0.1) <= 0.02 && lr.ft_regret <= 0.01;
    ojson& c = checks.add("logistic, 50000 samples: tree regret 0.10 +- 0.02, filter tree regret <= 0.01", true, ok);
    c["samples"] = n;
    c["tree_regret"] = lr.tree_regret;
    c["ft_regret"] = lr.ft_regret;
    checks.line("tree " + fmt("%.4f", lr.tree_regret) + ", filter tree " + fmt("%.4f", lr.ft_regret));
  }
  {
    ojson rows = ojson::array();
    for (double e : {0.01, 0.05, 0.08, 0.083}) {
      const InconsistencyResult r = inconsistency_demo(e, 0, LearnerKind::BayesOracle, opts.seed);
      rows.push_back({{"eps", e}, {"tree_regret", r.tree_regret}, {"ft_regret", r.ft_regret}});
    }
    ojson& c = checks.add("tree regret 1/4 - 3 eps shrinks toward eps = 1/12", false, true);
    c["rows"] = rows;
  }
}

std::vector<int> grid_ks() {
  std::vector<int> ks;
  for (int k = 4; k <= 1024; k *= 2) ks.push_back(k);
  return ks;
}

void depth_suite(SuiteReport& rep, const VerifyOptions& opts) {
  Checks checks(rep);
  std::ostringstream table;
  table << "    k   m  sem       phase1  bound1  impdepth  bound_imp\n";
  ojson rows = ojson::array();
  bool complete_ok = true, pool_ok = true;
  for (int k : grid_ks())
    for (int m = 1; m <= 10; ++m) {
      const DepthBounds b = depth_bounds(k, m);
      for (Semantics sem : {Semantics::Complete, Semantics::Pool}) {
        const MeasuredDepth md = measure_depth(k, m, sem, 3, opts.seed);
        const bool ok = md.first_phase_rounds <= b.min_first_phase() + 1e-9 && md.importance_depth <= b.min_importance() + 1e-9;
        (sem == Semantics::Complete ? complete_ok : pool_ok) &= ok;
        rows.push_back({{"k", k}, {"m", m}, {"semantics", to_string(sem)}, {"first_phase_rounds", md.first_phase_rounds},
                        {"min_first_phase_bound", b.min_first_phase()}, {"final_depth", md.final_depth},
                        {"importance_depth", md.importance_depth}, {"min_importance_bound", b.min_importance()},
                        {"within", ok}});
        char buf[128];
        std::snprintf(buf, sizeof buf, "%5d %3d  %-8s  %6d  %6.2f  %8d  %9.2f%s\n", k, m, to_string(sem).c_str(),
                      md.first_phase_rounds, b.min_first_phase(), md.importance_depth, b.min_importance(), ok ? "" : "  !");
        table << buf;
      }
    }
  {
    ojson& c = checks.add("complete schedules: measured depths <= every applicable closed form", true, complete_ok);
    c["grid"] = rows;
  }
  checks.add("pool schedules: measured depths <= every applicable closed form", false, pool_ok)["within"] = pool_ok;

  ojson trows = ojson::array();
  bool tracker_ok = true;
  std::size_t checked = 0;
  for (int l = 2; l <= 20; ++l) {
    const long long k = 1LL << l;
    for (int m = 1; m <= 4 * l; ++m) {
      const LevelTracker t = level_tracker(k, m);
      const double d = chernoff_depth(static_cast<double>(k), m);
      ++checked;
      if (t.rounds > d) {
        tracker_ok = false;
        trows.push_back({{"k", k}, {"m", m}, {"rounds", t.rounds}, {"chernoff_d", d}});
      }
    }
  }
  ojson& c = checks.add("level tracker rounds <= chernoff depth, k = 2^2..2^20, m <= 4 log2 k", true, tracker_ok);
  c["checked"] = checked;
  c["violations"] = trows;
  checks.line(std::to_string(checked) + " (k, m) pairs checked");
  rep.text += table.str();
}

void tournament_suite(SuiteReport& rep, const VerifyOptions& opts) {
  Checks checks(rep);

  // Legality over truthful and random outcome patterns.
  std::vector<int> ks;
  for (int k = 2; k <= 20; ++k) ks.push_back(k);
  for (int k = 32; k <= 1024; k *= 2) ks.push_back(k);
  std::size_t schedules = 0, double_plays = 0, loss_violations = 0, bracket_violations = 0;
  ojson bad = ojson::array();
  for (int k : ks)
    for (int m = 1; m <= 10; ++m)
      for (Semantics sem : {Semantics::Complete, Semantics::Pool})
        for (int pattern = 0; pattern < 2; ++pattern) {
          TournamentSchedule s;
          if (pattern == 0) {
            s = build_schedule(k, m, sem);
          } else {
            std::vector<double> skill(static_cast<std::size_t>(k));
            for (Label y = 0; y < k; ++y) skill[static_cast<std::size_t>(y)] = -static_cast<double>(y);
            AdversarySpec adv;
            adv.kind = AdversaryKind::RateRandom;
            adv.rate = 0.5;
            adv.seed = derive_seed(opts.seed, static_cast<std::uint64_t>(schedules));
            s = run_tournament({k, m, sem, false}, skill, adv).schedule;
          }
          const LegalityReport lr = check_schedule(s);
          ++schedules;
          double_plays += lr.double_plays;
          loss_violations += lr.loss_violations;
          bracket_violations += lr.bracket_violations;
          if (!lr.ok && bad.size() < 20)
            bad.push_back({{"k", k}, {"m", m}, {"semantics", to_string(sem)}, {"pattern", pattern}, {"detail", lr.detail}});
        }
  {
    ojson& c = checks.add("no label plays twice in a round", true, double_plays == 0);
    c["schedules"] = schedules;
    c["double_plays"] = double_plays;
    ojson& c2 = checks.add("pool semantics eliminates exactly at m losses; complete brackets are full", true,
                           loss_violations == 0 && bracket_violations == 0);
    c2["loss_violations"] = loss_violations;
    c2["bracket_violations"] = bracket_violations;
    c2["failures"] = bad;
    checks.line(std::to_string(schedules) + " schedules checked");
  }

  // Pool occupancy follows the halving tracker when k is a power of two.
  {
    bool ok = true;
    std::size_t checked = 0;
    for (int k = 4; k <= 1024; k *= 2)
      for (int m = 1; m <= 10; ++m) {
        const TournamentSchedule s = build_schedule(k, m, Semantics::Pool);
        const LevelTracker t = level_tracker(k, m);
        ++checked;
        bool same = s.occupancy.size() == t.occupancy.size();
        for (std::size_t r = 0; same && r < s.occupancy.size(); ++r)
          for (std::size_t p = 0; p < s.occupancy[r].size(); ++p)
            same = same && static_cast<long long>(s.occupancy[r][p]) == t.occupancy[r][p];
        ok = ok && same;
      }
    checks.add("pool occupancy matches the halving tracker (k a power of two)", true, ok)["checked"] = checked;
  }

  // Zero-error runs: every tournament and the final pick the best label.
  {
    bool ok = true;
    std::size_t runs = 0;
    for (int k : {2, 3, 5, 8, 13, 16, 31, 64})
      for (int m = 1; m <= 6; ++m)
        for (int trial = 0; trial < 3; ++trial) {
          Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(1000 * k + 10 * m + trial)));
          std::vector<double> skill(static_cast<std::size_t>(k));
          for (double& v : skill) v = rng.uniform();
          const Label best = true_best(skill);
          const TournamentResult r = run_tournament({k, m, Semantics::Complete, false}, skill, {});
          ++runs;
          ok = ok && r.winner == best && r.contradictions == 0 &&
               std::all_of(r.schedule.winners.begin(), r.schedule.winners.end(), [&](Label w) { return w == best; });
        }
    checks.add("without errors every first-phase winner and the champion are the best label", true, ok)["runs"] = runs;
  }

  // m = 1 is the filter tree: the tournament winner equals the tree's
  // prediction under the same node decisions.
  {
    bool ok = true;
    std::size_t runs = 0;
    for (int k = 2; k <= 16; ++k)
      for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> skill(static_cast<std::size_t>(k));
        for (Label y = 0; y < k; ++y) skill[static_cast<std::size_t>(y)] = -static_cast<double>(y);
        AdversarySpec adv;
        adv.kind = AdversaryKind::RateRandom;
        adv.rate = 0.5;
        adv.seed = derive_seed(opts.seed, static_cast<std::uint64_t>(100 * k + trial));
        const TournamentResult r = run_tournament({k, 1, Semantics::Complete, false}, skill, adv);
        const LabelTree tree = LabelTree::balanced(k);
        std::vector<Side> dec(static_cast<std::size_t>(tree.num_internal()), Side::Left);
        for (const auto& rec : r.transcript) {
          const Side arrived = tree.side_of(rec.match.node, rec.winner);
          dec[static_cast<std::size_t>(rec.match.node)] = arrived;
        }
        int node = tree.root();
        Label tree_winner = kNoLabel;
        while (tree_winner == kNoLabel) {
          const NodeRef child = dec[static_cast<std::size_t>(node)] == Side::Left ? tree.node(node).left : tree.node(node).right;
          if (child.leaf) tree_winner = child.index;
          else node = child.index;
        }
        ++runs;
        ok = ok && tree_winner == r.winner;
      }
    checks.add("m = 1 reproduces the filter tree decision", true, ok)["runs"] = runs;
  }

  // Error correction: the cheapest way to dethrone the best label.
  {
    ojson rows = ojson::array();
    bool ok = true;
    bool pool_below = false;
    for (Semantics sem : {Semantics::Complete, Semantics::Pool})
      for (int k : {4, 8})
        for (int m = 1; m <= 3; ++m) {
          DethroningOptions d;
          d.jobs = opts.jobs;
          d.seed = opts.seed;
          const DethroningResult r = min_dethroning_cost({k, m, sem, false}, d);
          if (sem == Semantics::Complete) ok = ok && r.exact && r.cost >= m;
          else pool_below = pool_below || r.cost < m;
          rows.push_back({{"semantics", to_string(sem)}, {"k", k}, {"m", m}, {"min_cost", num(r.cost)}, {"exact", r.exact},
                          {"winner", r.winner}, {"search_nodes", r.nodes}});
          checks.line(to_string(sem) + " k=" + std::to_string(k) + " m=" + std::to_string(m) + ": min dethroning cost " +
                      fmt("%g", r.cost));
        }
    ojson& c = checks.add("complete semantics: dethroning the best label costs at least m", true, ok);
    c["rows"] = rows;
    checks.add("pool semantics: some dethroning cost falls below m", false, pool_below)["below_m"] = pool_below;
  }

  // Budgeted liars below m cannot change the winner.
  {
    bool ok = true;
    ojson rows = ojson::array();
    for (auto kind : {AdversaryKind::BudgetFullLie, AdversaryKind::BudgetHalfLie})
      for (int k : {4, 8, 16})
        for (int m = 2; m <= 4; ++m) {
          std::vector<double> skill(static_cast<std::size_t>(k));
          for (Label y = 0; y < k; ++y) skill[static_cast<std::size_t>(y)] = -static_cast<double>(y);
          AdversarySpec adv;
          adv.kind = kind;
          adv.budget = m - 1;
          const TournamentResult r = run_tournament({k, m, Semantics::Complete, false}, skill, adv);
          ok = ok && r.winner == 0;
          rows.push_back({{"adversary", to_string(kind)}, {"k", k}, {"m", m}, {"budget", m - 1}, {"winner", r.winner},
                          {"weighted_error", r.weighted_error}});
        }
    checks.add("complete semantics: liars with budget m - 1 leave the best label on top", true, ok)["rows"] = rows;
  }

  // Lower bound: parity against the filter tree.
  {
    const ParityRun p = parity_adversary_run({3, 1, Semantics::Complete, false});
    ojson& c = checks.add("parity adversary at k = 3 forces regret ratio >= 2", true, p.ratio >= 2.0);
    c["pair"] = {p.i, p.j};
    c["ratio"] = num(p.ratio);
    c["depth"] = p.depth;
    c["multiclass_regret"] = p.multiclass_regret;
    c["adversary_regret"] = p.adversary_regret;
    checks.line("ratio " + fmt("%.4g", p.ratio));
  }

  // Regret ratios against the multi-elimination bounds: reported only.
  {
    ojson rows = ojson::array();
    for (auto [k, m] : {std::pair{8, 3}, std::pair{4, 2}, std::pair{8, 1}}) {
      DethroningOptions d;
      d.jobs = opts.jobs;
      d.seed = opts.seed;
      const RatioReport r = ratio_report(k, m, Semantics::Complete, d);
      ojson row{{"k", k}, {"m", m}, {"worst_ratio", num(r.worst_ratio)}, {"source", r.worst_source},
                {"dethroning_cost", num(r.dethroning_cost)}, {"bound_1", r.bound_1}, {"bound_1_applies", r.bound_1_applies},
                {"bound_2", r.bound_2}, {"bound_2_applies", r.bound_2_applies}};
      if (r.corollary_bound) row["corollary_bound"] = *r.corollary_bound;
      rows.push_back(row);
      checks.line("k=" + std::to_string(k) + " m=" + std::to_string(m) + ": worst ratio " + fmt("%.4g", r.worst_ratio) +
                  " (" + r.worst_source + "), bound_1 " + fmt("%.4g", r.bound_1) + ", bound_2 " + fmt("%.4g", r.bound_2));
    }
    const int m16 = static_cast<int>(std::ceil(4.0 * std::log(16.0)));
    ojson& c = checks.add("measured regret ratios against the multi-elimination bounds", false, true);
    c["rows"] = rows;
    c["k16_m"] = m16;
    c["k16_bound_2"] = multi_bound_2(16, m16);
  }
}

}  // namespace

std::vector<std::string> suite_names() { return {"filter", "lemma1", "tightness", "inconsistency", "depth", "tournament"}; }

SuiteReport run_suite(const std::string& name, const VerifyOptions& opts) {
  SuiteReport rep;
  rep.suite = name;
  rep.data["suite"] = name;
  rep.data["seed"] = opts.seed;
  if (name == "filter") filter_suite(rep, opts);
  else if (name == "lemma1") lemma1_suite(rep, opts);
  else if (name == "tightness") tightness_suite(rep, opts);
  else if (name == "inconsistency") inconsistency_suite(rep, opts);
  else if (name == "depth") depth_suite(rep, opts);
  else if (name == "tournament") tournament_suite(rep, opts);
  else throw InvalidArgument("unknown suite: " + name);
  rep.data["passed"] = rep.passed;
  return rep;
}

}  // namespace ect
