#pragma once

// Benchmark harness: mean test error of each reduction over seeded
// train/test splits, rendered as markdown, CSV and JSON.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "ect/learners.hpp"
#include "ect/reductions.hpp"

namespace ect {

struct BenchConfig {
  std::vector<std::string> datasets;  // CSV paths or "synthetic:<name>"
  std::string label_column = "label";
  LearnerSpec learner;
  std::vector<ReductionKind> methods{ReductionKind::Tree, ReductionKind::FilterTree, ReductionKind::AllPairs,
                                     ReductionKind::Apft};
  int splits = 10;
  double train_fraction = 2.0 / 3.0;
  std::uint64_t seed = 1;
  int jobs = 1;
};

struct BenchRow {
  std::string dataset;
  int k = 0;
  std::size_t rows = 0;
  std::size_t dropped_rows = 0;
  std::vector<double> mean_error;  // percent, one per method
  std::vector<double> std_error;   // percent, across splits
  std::size_t best = 0;            // index of the lowest mean error
  std::string error;               // non-empty when the dataset failed to load or train
  bool ok() const { return error.empty(); }
};

struct BenchReport {
  BenchConfig config;
  std::vector<std::uint64_t> split_seeds;
  std::vector<BenchRow> rows;
  std::size_t failed() const;
};

// Split i uses seed derive_seed(config.seed, i); every method sees the same
// splits.
std::vector<std::uint64_t> split_seeds(std::uint64_t master, int splits);

BenchReport run_bench(const BenchConfig& cfg);

std::string bench_markdown(const BenchReport& r);
std::string bench_csv(const BenchReport& r);
// Deterministic content only; callers add run metadata next to it.
nlohmann::ordered_json bench_json(const BenchReport& r);

}  // namespace ect
