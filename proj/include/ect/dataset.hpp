#pragma once

// CSV ingestion, label dictionaries, bundled synthetic generators and
// seeded train/test splits.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ect/core.hpp"

namespace ect {

struct Dataset {
  std::string name;
  std::vector<Example> examples;
  std::vector<std::string> label_names;  // id -> original label string
  std::vector<std::string> feature_names;
  std::size_t dropped_rows = 0;          // rows with missing cells
  bool labeled = true;                   // false: no label column, every label is 0

  int num_labels() const { return static_cast<int>(label_names.size()); }
};

// Header row required. Empty, "?" and "NA" cells count as missing and drop
// the row. Without a dictionary, labels are mapped to ids in sorted order
// (numerically when every label is a number), so the mapping is stable
// across runs. With one, labels must come from it and the label column may
// be absent.
Dataset parse_csv(std::istream& in, const std::string& name, const std::string& label_column = "label",
                  const std::vector<std::string>& dictionary = {});
Dataset load_csv(const std::string& path, const std::string& label_column = "label",
                 const std::vector<std::string>& dictionary = {});

// Generators: "noise3" (3 classes whose Bayes decision needs the filter
// tree), "blobs8" (8 overlapping Gaussian classes over 7 features, unequal
// sizes), "blobs2" (two classes).
Dataset synthetic(const std::string& name, std::uint64_t seed = 7);
std::vector<std::string> synthetic_names();

// "synthetic:<name>" or a CSV path.
Dataset load_dataset(const std::string& spec, const std::string& label_column = "label");

struct Split {
  std::vector<Example> train;
  std::vector<Example> test;
};

// Shuffles with the seed and puts round(fraction * n) rows in train.
Split split_dataset(const Dataset& data, double train_fraction, std::uint64_t seed);

}  // namespace ect
