// Command-line front end: benchmarks, tournament simulation, verification
// suites, depth tables, and model training/prediction.
//
// Exit codes: 0 success, 1 check failure, 2 usage, 3 resource refusal.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "ect/analysis.hpp"
#include "ect/bench.hpp"
#include "ect/dataset.hpp"
#include "ect/kernels.hpp"
#include "ect/model_io.hpp"
#include "ect/reductions.hpp"
#include "ect/rng.hpp"
#include "ect/tournaments.hpp"
#include "ect/verify.hpp"

namespace {

using ojson = nlohmann::ordered_json;
using namespace ect;

constexpr int kExitOk = 0;
constexpr int kExitCheck = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRefused = 3;

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << content;
}

// Reports keep deterministic content under "data" and run details under
// "meta", so two runs can be compared by their data sections.
std::string with_meta(const ojson& data, double elapsed) {
  ojson doc;
  doc["data"] = data;
  doc["meta"] = {{"generated_at", utc_now()}, {"elapsed_seconds", elapsed}, {"isa", std::string(kernels::isa_name(kernels::active_isa()))}};
  return doc.dump(2) + "\n";
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Common {
  std::uint64_t seed = 1;
  int jobs = 1;
};

struct LearnerOpts {
  std::string kind = "logistic";
  double lr = 0.1;
  int epochs = 10;
  std::uint64_t seed = 42;

  void add(CLI::App* app) {
    app->add_option("--learner", kind, "Binary learner: logistic, stump, constant, oracle")->capture_default_str();
    app->add_option("--lr", lr, "Logistic learning rate")->capture_default_str();
    app->add_option("--epochs", epochs, "Logistic epochs")->capture_default_str();
    app->add_option("--learner-seed", seed, "Learner seed")->capture_default_str();
  }

  LearnerSpec spec() const {
    LearnerSpec s;
    s.kind = parse_learner_kind(kind);
    s.lr = lr;
    s.epochs = epochs;
    s.seed = seed;
    s.validate();
    return s;
  }
};

// ---- bench

struct BenchOpts {
  std::vector<std::string> datasets{"data/iris.csv", "data/wine.csv", "data/digits.csv", "synthetic:noise3",
                                    "synthetic:blobs8"};
  std::string label_column = "label";
  std::vector<std::string> methods{"tree", "ft", "ap", "apft"};
  int splits = 10;
  double train_fraction = 2.0 / 3.0;
  std::string out_dir;
  LearnerOpts learner;
};

int cmd_bench(const Common& c, const BenchOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  BenchConfig cfg;
  cfg.datasets = o.datasets;
  cfg.label_column = o.label_column;
  cfg.learner = o.learner.spec();
  cfg.methods.clear();
  for (const auto& m : o.methods) cfg.methods.push_back(parse_reduction_kind(m));
  cfg.splits = o.splits;
  cfg.train_fraction = o.train_fraction;
  cfg.seed = c.seed;
  cfg.jobs = c.jobs;
  const BenchReport rep = run_bench(cfg);
  const std::string md = bench_markdown(rep);
  std::cout << md;
  for (const auto& row : rep.rows)
    if (row.ok() && row.dropped_rows > 0) std::cout << row.dataset << ": dropped " << row.dropped_rows << " rows with missing cells\n";
  if (!o.out_dir.empty()) {
    std::filesystem::create_directories(o.out_dir);
    write_file(o.out_dir + "/bench.md", md);
    write_file(o.out_dir + "/bench.csv", bench_csv(rep));
    write_file(o.out_dir + "/bench.json", with_meta(bench_json(rep), seconds_since(t0)));
  }
  return rep.failed() == rep.rows.size() ? kExitCheck : kExitOk;
}

// ---- simulate

struct SimulateOpts {
  int k = 8;
  int m = 3;
  std::string semantics = "complete";
  std::string adversary = "none";
  double budget = 0.0;
  double rate = 0.0;
  std::vector<int> pair;
  int q = 0;
  bool repeated = false;
  std::string skills = "random";
  std::string transcript;
  std::string summary;
  bool dethrone = false;
  std::uint64_t node_cap = std::uint64_t{1} << 24;
};

int cmd_simulate(const Common& c, const SimulateOpts& o) {
  const TournamentConfig cfg{o.k, o.m, parse_semantics(o.semantics), o.repeated};
  cfg.validate();
  std::vector<double> skill(static_cast<std::size_t>(o.k));
  if (o.skills == "ordered") {
    for (Label y = 0; y < o.k; ++y) skill[static_cast<std::size_t>(y)] = -static_cast<double>(y);
  } else if (o.skills == "random") {
    Rng rng(derive_seed(c.seed, 0));
    for (double& v : skill) v = rng.uniform();
  } else {
    throw InvalidArgument("--skills must be random or ordered");
  }
  AdversarySpec adv;
  adv.kind = parse_adversary_kind(o.adversary);
  adv.budget = o.budget;
  adv.rate = o.rate;
  adv.seed = derive_seed(c.seed, 1);
  adv.q = o.q;
  if (!o.pair.empty()) {
    if (o.pair.size() != 2) throw InvalidArgument("--pair takes two labels");
    adv.i = o.pair[0];
    adv.j = o.pair[1];
  }
  const TournamentResult r = run_tournament(cfg, skill, adv);

  ojson s;
  s["k"] = o.k;
  s["m"] = o.m;
  s["semantics"] = to_string(cfg.semantics);
  s["adversary"] = to_string(adv.kind);
  s["seed"] = c.seed;
  s["best"] = true_best(skill);
  s["winner"] = r.winner;
  s["winner_is_best"] = r.winner == true_best(skill);
  s["weighted_error"] = r.weighted_error;
  s["contradictions"] = r.contradictions;
  s["rounds"] = r.rounds;
  s["first_phase_rounds"] = r.first_phase_rounds;
  s["importance_depth"] = r.importance_depth;
  s["first_phase_winners"] = r.schedule.winners;
  if (adv.kind == AdversaryKind::Parity) {
    std::optional<std::pair<Label, Label>> pair;
    if (!o.pair.empty()) pair = std::pair{o.pair[0], o.pair[1]};
    const ParityRun p = parity_adversary_run(cfg, pair);
    s["parity"] = {{"pair", {p.i, p.j}},
                   {"winner", p.winner},
                   {"depth", p.depth},
                   {"multiclass_regret", p.multiclass_regret},
                   {"adversary_regret", p.adversary_regret},
                   {"ratio", std::isfinite(p.ratio) ? ojson(p.ratio) : ojson("inf")},
                   {"ij_comparisons", p.ij_comparisons}};
  }
  if (o.dethrone) {
    DethroningOptions d;
    d.node_cap = o.node_cap;
    d.jobs = c.jobs;
    d.seed = c.seed;
    const DethroningResult dr = min_dethroning_cost(cfg, d);  // may refuse
    s["min_dethroning_cost"] = std::isfinite(dr.cost) ? ojson(dr.cost) : ojson("inf");
    s["dethroning_winner"] = dr.winner;
    s["search_nodes"] = dr.nodes;
  }

  if (!o.transcript.empty()) {
    std::ofstream out(o.transcript);
    if (!out) throw InvalidArgument("cannot write " + o.transcript);
    write_transcript(r.transcript, o.m, out);
  }
  const std::string text = s.dump(2) + "\n";
  if (!o.summary.empty()) write_file(o.summary, text);
  std::cout << text;
  return kExitOk;
}

// ---- verify

struct VerifyCliOpts {
  std::vector<std::string> suites{"all"};
  std::string json;
};

int cmd_verify(const Common& c, const VerifyCliOpts& o) {
  std::vector<std::string> suites;
  for (const auto& s : o.suites) {
    if (s == "all") {
      const auto all = suite_names();
      suites.insert(suites.end(), all.begin(), all.end());
    } else {
      const auto names = suite_names();
      if (std::find(names.begin(), names.end(), s) == names.end())
        throw CLI::ValidationError("suite", "unknown suite '" + s + "'");
      suites.push_back(s);
    }
  }
  const auto t0 = std::chrono::steady_clock::now();
  VerifyOptions vo{c.seed, c.jobs};
  ojson data;
  bool ok = true;
  for (const auto& name : suites) {
    const SuiteReport rep = run_suite(name, vo);
    std::cout << "== " << name << ": " << (rep.passed ? "pass" : "FAIL") << "\n" << rep.text;
    data[name] = rep.data;
    ok = ok && rep.passed;
  }
  if (!o.json.empty()) write_file(o.json, with_meta(data, seconds_since(t0)));
  return ok ? kExitOk : kExitCheck;
}

// ---- depth

struct DepthOpts {
  int k = 8;
  int m = 3;
};

int cmd_depth(const Common& c, const DepthOpts& o) {
  const DepthBounds b = depth_bounds(o.k, o.m);
  auto row = [](const std::string& name, double v) { std::printf("  %-56s %10.3f\n", name.c_str(), v); };
  std::printf("k = %d, m = %d (ceil_2(m) = %lld)\n", o.k, o.m, b.ceil_m2);
  std::printf("first-phase depth bounds\n");
  row("case 1: log k + m log(log k + 1)", b.first_phase[0]);
  row("case 2: 1.5 log k + 3m + 1", b.first_phase[1]);
  row("case 3: ceil(k/2) + 2m", b.first_phase[2]);
  if (b.case4) row("case 4: 2(m-1) + ln k + sqrt(ln k (ln k + 4(m-1)))", b.first_phase[3]);
  else std::printf("  case 4: not applicable (m > 4 log2 k)\n");
  std::printf("importance-depth bounds\n");
  row("case 1 + ceil_2(m)", b.importance[0]);
  row("case 2 + ceil_2(m)", b.importance[1]);
  row("case 3 + ceil_2(m)", b.importance[2]);
  if (b.case4) row("case 4: 2m + ceil_2(m) + 2 ln k + 2 sqrt(m ln k)", b.importance[3]);
  std::printf("chernoff depth\n");
  row("d = 2(m-1) + ln k + sqrt(4(m-1) ln k + ln^2 k)", b.chernoff_d);
  row("second-phase depth", b.second_phase);
  row("d + second phase", b.chernoff_d + b.second_phase);
  row("bracketed m-elimination final rounds", bracketed_final_rounds(o.m));
  const LevelTracker t = level_tracker(o.k, o.m);
  row("level tracker rounds", t.rounds);
  std::printf("measured (truthful, reversed, random outcomes)\n");
  for (Semantics sem : {Semantics::Complete, Semantics::Pool}) {
    const MeasuredDepth md = measure_depth(o.k, o.m, sem, 3, c.seed);
    std::printf("  %-8s first phase %d rounds, final %d, importance depth %d\n", to_string(sem).c_str(),
                md.first_phase_rounds, md.final_depth, md.importance_depth);
  }
  return kExitOk;
}

// ---- train / predict

struct TrainOpts {
  std::string data;
  std::string label_column = "label";
  std::string reduction = "ft";
  bool shared = false;
  std::string model;
  LearnerOpts learner;
};

int cmd_train(const Common&, const TrainOpts& o) {
  const Dataset ds = load_dataset(o.data, o.label_column);
  const ReductionKind kind = parse_reduction_kind(o.reduction);
  std::vector<Example> examples = ds.examples;
  if (kind == ReductionKind::CsFilterTree) {
    // Multiclass rows become 0/1 cost vectors.
    for (Example& e : examples) {
      std::vector<double> c(static_cast<std::size_t>(ds.num_labels()), 1.0);
      c[static_cast<std::size_t>(e.label())] = 0.0;
      e.payload = CostVector(std::move(c));
    }
  }
  const LabelTree tree = LabelTree::balanced(ds.num_labels());
  TrainResult res = train(kind, examples, tree, NodeLearner{o.learner.spec()}, {o.shared, false});
  res.model.label_names = ds.label_names;
  save_model_file(res.model, o.model);
  const double err = kind == ReductionKind::CsFilterTree ? mean_cost(res.model, examples) : error_rate(res.model, examples);
  std::printf("trained %s on %s: k = %d, %zu rows, training error %.4f\n", to_string(kind).c_str(), ds.name.c_str(),
              ds.num_labels(), examples.size(), err);
  if (ds.dropped_rows > 0) std::printf("dropped %zu rows with missing cells\n", ds.dropped_rows);
  for (const auto& w : res.model.warnings) std::printf("warning: %s\n", w.c_str());
  return kExitOk;
}

struct PredictOpts {
  std::string model;
  std::string data;
  std::string label_column = "label";
  std::string out;
};

int cmd_predict(const Common&, const PredictOpts& o) {
  const ReductionModel model = load_model_file(o.model);
  std::vector<std::string> names = model.label_names;
  if (names.empty())
    for (Label y = 0; y < model.num_labels(); ++y) names.push_back(std::to_string(y));
  const Dataset ds = load_csv(o.data, o.label_column, names);
  std::ostringstream preds;
  preds << "prediction\n";
  for (const Example& e : ds.examples) preds << names[static_cast<std::size_t>(decode(model, e.features).label)] << '\n';
  if (o.out.empty()) std::cout << preds.str();
  else write_file(o.out, preds.str());
  if (ds.labeled) std::fprintf(stderr, "error rate %.4f over %zu rows\n", error_rate(model, ds.examples), ds.examples.size());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Error-correcting tournaments and filter-tree reductions"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value configuration file");
  Common common;
  app.add_option("--seed", common.seed, "Master seed (env ECT_SEED)")->envname("ECT_SEED")->capture_default_str();
  app.add_option("--jobs", common.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();

  BenchOpts bench;
  auto* b = app.add_subcommand("bench", "Compare Tree, FT, AP and APFT error rates over seeded splits");
  b->add_option("--dataset", bench.datasets, "CSV path or synthetic:<noise3|blobs8|blobs2>")->capture_default_str();
  b->add_option("--label-column", bench.label_column)->capture_default_str();
  b->add_option("--methods", bench.methods, "Reductions: tree, ft, ap, apft")->capture_default_str();
  b->add_option("--splits", bench.splits)->check(CLI::PositiveNumber)->capture_default_str();
  b->add_option("--train-fraction", bench.train_fraction)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  b->add_option("--out-dir", bench.out_dir, "Write bench.md, bench.csv and bench.json here");
  bench.learner.add(b);

  SimulateOpts sim;
  auto* s = app.add_subcommand("simulate", "Run one m-elimination tournament against an adversary");
  s->add_option("-k", sim.k, "Number of labels")->capture_default_str();
  s->add_option("-m", sim.m, "Number of first-phase tournaments")->capture_default_str();
  s->add_option("--semantics", sim.semantics, "complete or pool")->capture_default_str();
  s->add_option("--adversary", sim.adversary,
                "none, budget_full_lie, budget_half_lie, rate_random, parity, staged")->capture_default_str();
  s->add_option("--budget", sim.budget)->capture_default_str();
  s->add_option("--rate", sim.rate)->capture_default_str();
  s->add_option("--pair", sim.pair, "Parity pair i j")->expected(2);
  s->add_option("--q", sim.q, "Staged adversary rounds (0 = measured)")->capture_default_str();
  s->add_flag("--repeated", sim.repeated, "Play final-phase importance as repeated games");
  s->add_option("--skills", sim.skills, "random (seeded) or ordered (label 0 best)")->capture_default_str();
  s->add_option("--transcript", sim.transcript, "JSON-lines transcript output");
  s->add_option("--summary", sim.summary, "JSON summary output");
  s->add_flag("--dethrone", sim.dethrone, "Also run the exhaustive dethroning search");
  s->add_option("--node-cap", sim.node_cap, "Search node cap")->capture_default_str();

  VerifyCliOpts ver;
  auto* v = app.add_subcommand("verify", "Run verification suites");
  v->add_option("suite", ver.suites, "filter, lemma1, tightness, inconsistency, depth, tournament or all")
      ->capture_default_str();
  v->add_option("--json", ver.json, "JSON report output");

  DepthOpts dep;
  auto* d = app.add_subcommand("depth", "Print depth bounds and measured depths");
  d->add_option("-k", dep.k)->check(CLI::Range(2, 1 << 20))->capture_default_str();
  d->add_option("-m", dep.m)->check(CLI::PositiveNumber)->capture_default_str();

  TrainOpts tr;
  auto* t = app.add_subcommand("train", "Train a reduction and save the model");
  t->add_option("--data", tr.data, "CSV path or synthetic:<name>")->required();
  t->add_option("--label-column", tr.label_column)->capture_default_str();
  t->add_option("--reduction", tr.reduction, "tree, ft, csft, ap, apft")->capture_default_str();
  t->add_flag("--shared", tr.shared, "One classifier per tree level with node ids as features");
  t->add_option("--model", tr.model, "Model output path")->required();
  tr.learner.add(t);

  PredictOpts pr;
  auto* p = app.add_subcommand("predict", "Predict labels with a saved model");
  p->add_option("--model", pr.model)->required();
  p->add_option("--data", pr.data, "CSV path; the label column is optional")->required();
  p->add_option("--label-column", pr.label_column)->capture_default_str();
  p->add_option("--out", pr.out, "Prediction CSV output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (b->parsed()) return cmd_bench(common, bench);
    if (s->parsed()) return cmd_simulate(common, sim);
    if (v->parsed()) return cmd_verify(common, ver);
    if (d->parsed()) return cmd_depth(common, dep);
    if (t->parsed()) return cmd_train(common, tr);
    if (p->parsed()) return cmd_predict(common, pr);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ResourceRefusal& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kExitRefused;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheck;
  }
  return kExitUsage;
}
