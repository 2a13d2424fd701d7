#include "ect/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "ect/dataset.hpp"
#include "ect/rng.hpp"

namespace ect {

std::size_t BenchReport::failed() const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const BenchRow& r) { return !r.ok(); }));
}

std::vector<std::uint64_t> split_seeds(std::uint64_t master, int splits) {
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < splits; ++i) seeds.push_back(derive_seed(master, static_cast<std::uint64_t>(i)));
  return seeds;
}

namespace {

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

BenchReport run_bench(const BenchConfig& cfg) {
  if (cfg.splits < 1) throw InvalidArgument("need at least one split");
  if (cfg.methods.empty()) throw InvalidArgument("no methods selected");
  cfg.learner.validate();
  BenchReport rep;
  rep.config = cfg;
  rep.split_seeds = split_seeds(cfg.seed, cfg.splits);

  std::vector<Dataset> data(cfg.datasets.size());
  rep.rows.resize(cfg.datasets.size());
  for (std::size_t d = 0; d < cfg.datasets.size(); ++d) {
    BenchRow& row = rep.rows[d];
    row.dataset = cfg.datasets[d];
    try {
      data[d] = load_dataset(cfg.datasets[d], cfg.label_column);
      row.dataset = data[d].name;
      row.k = data[d].num_labels();
      row.rows = data[d].examples.size();
      row.dropped_rows = data[d].dropped_rows;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  }

  // One job per (dataset, split); each fills its own slot.
  struct Job {
    std::size_t dataset;
    int split;
  };
  std::vector<Job> jobs;
  for (std::size_t d = 0; d < data.size(); ++d)
    if (rep.rows[d].ok())
      for (int s = 0; s < cfg.splits; ++s) jobs.push_back({d, s});
  std::vector<std::vector<double>> errors(jobs.size());
  std::vector<std::string> failures(jobs.size());
  NodeLearner learner{cfg.learner};
  auto work = [&](std::size_t i) {
    const Job& job = jobs[i];
    const Dataset& ds = data[job.dataset];
    try {
      const Split split = split_dataset(ds, cfg.train_fraction, rep.split_seeds[static_cast<std::size_t>(job.split)]);
      const LabelTree tree = LabelTree::balanced(ds.num_labels());
      for (ReductionKind kind : cfg.methods) {
        const TrainResult res = train(kind, split.train, tree, learner);
        errors[i].push_back(100.0 * error_rate(res.model, split.test));
      }
    } catch (const std::exception& e) {
      failures[i] = e.what();
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

  const std::size_t nm = cfg.methods.size();
  for (std::size_t d = 0; d < rep.rows.size(); ++d) {
    BenchRow& row = rep.rows[d];
    if (!row.ok()) continue;
    std::vector<std::vector<double>> per_method(nm);
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      if (jobs[i].dataset != d) continue;
      if (!failures[i].empty()) {
        row.error = failures[i];
        break;
      }
      for (std::size_t m = 0; m < nm; ++m) per_method[m].push_back(errors[i][m]);
    }
    if (!row.ok()) continue;
    for (const auto& errs : per_method) {
      double mean = 0.0;
      for (double e : errs) mean += e;
      mean /= static_cast<double>(errs.size());
      double var = 0.0;
      for (double e : errs) var += (e - mean) * (e - mean);
      row.mean_error.push_back(mean);
      row.std_error.push_back(errs.size() > 1 ? std::sqrt(var / static_cast<double>(errs.size() - 1)) : 0.0);
    }
    row.best = static_cast<std::size_t>(std::min_element(row.mean_error.begin(), row.mean_error.end()) - row.mean_error.begin());
  }
  return rep;
}

std::string bench_markdown(const BenchReport& r) {
  std::ostringstream out;
  out << "| dataset (k) |";
  for (ReductionKind m : r.config.methods) out << ' ' << to_string(m) << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < r.config.methods.size(); ++i) out << "---:|";
  out << '\n';
  for (const BenchRow& row : r.rows) {
    out << "| " << row.dataset << " (" << row.k << ") |";
    if (!row.ok()) {
      out << " error: " << row.error << " |";
      for (std::size_t i = 1; i < r.config.methods.size(); ++i) out << " |";
    } else {
      for (std::size_t i = 0; i < row.mean_error.size(); ++i) {
        // Bold marks the lowest error in the row.
        const std::string cell = fixed2(row.mean_error[i]);
        out << ' ' << (i == row.best ? "**" + cell + "**" : cell) << " |";
      }
    }
    out << '\n';
  }
  out << "\nMean test error (%) over " << r.config.splits << " splits, "
      << fixed2(100.0 * r.config.train_fraction) << "% train, learner " << to_string(r.config.learner.kind)
      << ", seed " << r.config.seed << ".\n";
  return out.str();
}

std::string bench_csv(const BenchReport& r) {
  std::ostringstream out;
  out << "dataset,k,rows,dropped_rows";
  for (ReductionKind m : r.config.methods) out << ',' << to_string(m) << ',' << to_string(m) << "_std";
  out << ",best,error\n";
  for (const BenchRow& row : r.rows) {
    out << row.dataset << ',' << row.k << ',' << row.rows << ',' << row.dropped_rows;
    for (std::size_t i = 0; i < r.config.methods.size(); ++i) {
      if (row.ok()) out << ',' << fixed2(row.mean_error[i]) << ',' << fixed2(row.std_error[i]);
      else out << ",,";
    }
    out << ',' << (row.ok() ? to_string(r.config.methods[row.best]) : "");
    std::string err = row.error;
    std::replace(err.begin(), err.end(), ',', ';');
    out << ',' << err << '\n';
  }
  return out.str();
}

nlohmann::ordered_json bench_json(const BenchReport& r) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json cfg;
  cfg["seed"] = r.config.seed;
  cfg["splits"] = r.config.splits;
  cfg["train_fraction"] = r.config.train_fraction;
  cfg["learner"] = to_string(r.config.learner.kind);
  cfg["learner_seed"] = r.config.learner.seed;
  cfg["lr"] = r.config.learner.lr;
  cfg["epochs"] = r.config.learner.epochs;
  cfg["split_seeds"] = r.split_seeds;
  nlohmann::ordered_json methods = nlohmann::ordered_json::array();
  for (ReductionKind m : r.config.methods) methods.push_back(to_string(m));
  cfg["methods"] = methods;
  j["config"] = cfg;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const BenchRow& row : r.rows) {
    nlohmann::ordered_json o;
    o["dataset"] = row.dataset;
    o["k"] = row.k;
    o["rows"] = row.rows;
    o["dropped_rows"] = row.dropped_rows;
    if (row.ok()) {
      nlohmann::ordered_json errs;
      for (std::size_t i = 0; i < row.mean_error.size(); ++i)
        errs[to_string(r.config.methods[i])] = {{"mean", row.mean_error[i]}, {"std", row.std_error[i]}};
      o["error_percent"] = errs;
      o["best"] = to_string(r.config.methods[row.best]);
    } else {
      o["error"] = row.error;
    }
    rows.push_back(o);
  }
  j["rows"] = rows;
  return j;
}

}  // namespace ect
