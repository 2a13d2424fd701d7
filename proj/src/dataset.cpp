#include "ect/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <sstream>

#include "ect/rng.hpp"

namespace ect {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  cells.push_back(cell);
  return cells;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool missing(const std::string& s) { return s.empty() || s == "?" || s == "NA" || s == "nan" || s == "NaN"; }

bool parse_number(const std::string& s, double& out) {
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end != s.c_str() && *end == '\0' && std::isfinite(out);
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ' ' || c == '\t' || c == '\n') c = '_';
  return s;
}

}  // namespace

Dataset parse_csv(std::istream& in, const std::string& name, const std::string& label_column,
                  const std::vector<std::string>& dictionary) {
  Dataset ds;
  ds.name = name;
  std::string line;
  if (!std::getline(in, line)) throw FormatError(name + ": empty file");
  const auto header = split_line(line);
  std::size_t label_at = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (trim(header[i]) == label_column) label_at = i;
    else ds.feature_names.push_back(trim(header[i]));
  }
  ds.labeled = label_at != header.size();
  if (!ds.labeled && dictionary.empty()) throw FormatError(name + ": no '" + label_column + "' column");

  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != header.size())
      throw FormatError(name + ":" + std::to_string(line_no) + ": expected " + std::to_string(header.size()) + " cells");
    std::vector<double> x;
    bool drop = false;
    for (std::size_t i = 0; i < cells.size() && !drop; ++i) {
      const std::string cell = trim(cells[i]);
      if (missing(cell)) {
        drop = true;
        break;
      }
      if (i == label_at) continue;
      double v = 0.0;
      if (!parse_number(cell, v))
        throw FormatError(name + ":" + std::to_string(line_no) + ": non-numeric feature '" + cell + "'");
      x.push_back(v);
    }
    if (drop) {
      ++ds.dropped_rows;
      continue;
    }
    rows.push_back(std::move(x));
    labels.push_back(ds.labeled ? sanitize(trim(cells[label_at])) : std::string());
  }

  if (!dictionary.empty()) {
    std::map<std::string, Label> id;
    for (std::size_t i = 0; i < dictionary.size(); ++i) id[dictionary[i]] = static_cast<Label>(i);
    ds.label_names = dictionary;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      Label y = 0;
      if (ds.labeled) {
        const auto it = id.find(labels[i]);
        if (it == id.end()) throw FormatError(name + ": label '" + labels[i] + "' is not known to the model");
        y = it->second;
      }
      ds.examples.push_back({std::move(rows[i]), y, 1.0});
    }
    return ds;
  }

  std::vector<std::string> names = labels;
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  const bool numeric = std::all_of(names.begin(), names.end(), [](const std::string& s) {
    double v;
    return parse_number(s, v);
  });
  if (numeric)
    std::sort(names.begin(), names.end(), [](const std::string& a, const std::string& b) { return std::stod(a) < std::stod(b); });
  if (names.size() < 2) throw FormatError(name + ": need at least 2 distinct labels");
  std::map<std::string, Label> id;
  for (std::size_t i = 0; i < names.size(); ++i) id[names[i]] = static_cast<Label>(i);
  ds.label_names = names;
  for (std::size_t i = 0; i < rows.size(); ++i) ds.examples.push_back({std::move(rows[i]), id.at(labels[i]), 1.0});
  return ds;
}

Dataset load_csv(const std::string& path, const std::string& label_column, const std::vector<std::string>& dictionary) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read dataset: " + path);
  std::string name = path;
  if (const auto slash = name.find_last_of('/'); slash != std::string::npos) name = name.substr(slash + 1);
  if (const auto dot = name.rfind(".csv"); dot != std::string::npos) name = name.substr(0, dot);
  return parse_csv(in, name, label_column, dictionary);
}

namespace {

Dataset make_noise3(std::uint64_t seed) {
  Dataset ds;
  ds.name = "noise3";
  ds.feature_names = {"x1", "x2"};
  ds.label_names = {"0", "1", "2"};
  Rng rng(seed);
  for (int i = 0; i < 1500; ++i) {
    const double x1 = rng.uniform(), x2 = rng.uniform();
    // Left half: the two small classes together outweigh class 2, but each
    // alone does not.
    const double p0 = x1 < 0.5 ? 0.3 : 0.1;
    const double u = rng.uniform();
    const Label y = u < p0 ? 0 : (u < 2 * p0 ? 1 : 2);
    ds.examples.push_back({{x1, x2}, y, 1.0});
  }
  return ds;
}

Dataset make_blobs(const std::string& name, int k, int d, const std::vector<int>& sizes, double spread,
                   std::uint64_t seed) {
  Dataset ds;
  ds.name = name;
  for (int j = 0; j < d; ++j) ds.feature_names.push_back("f" + std::to_string(j + 1));
  for (int y = 0; y < k; ++y) ds.label_names.push_back(std::to_string(y));
  Rng rng(seed);
  std::vector<std::vector<double>> centers(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(d)));
  for (auto& c : centers)
    for (double& v : c) v = rng.uniform();
  for (int y = 0; y < k; ++y)
    for (int i = 0; i < sizes[static_cast<std::size_t>(y)]; ++i) {
      std::vector<double> x(static_cast<std::size_t>(d));
      for (int j = 0; j < d; ++j) x[static_cast<std::size_t>(j)] = centers[static_cast<std::size_t>(y)][static_cast<std::size_t>(j)] + spread * rng.normal();
      ds.examples.push_back({std::move(x), y, 1.0});
    }
  return ds;
}

}  // namespace

std::vector<std::string> synthetic_names() { return {"noise3", "blobs8", "blobs2"}; }

Dataset synthetic(const std::string& name, std::uint64_t seed) {
  if (name == "noise3") return make_noise3(seed);
  // Class sizes follow the skewed profile of the ecoli data (336 rows).
  if (name == "blobs8") return make_blobs("blobs8", 8, 7, {143, 77, 52, 35, 20, 5, 2, 2}, 0.18, seed);
  if (name == "blobs2") return make_blobs("blobs2", 2, 4, {200, 200}, 0.35, seed);
  throw InvalidArgument("unknown synthetic dataset: " + name);
}

Dataset load_dataset(const std::string& spec, const std::string& label_column) {
  const std::string prefix = "synthetic:";
  if (spec.rfind(prefix, 0) == 0) return synthetic(spec.substr(prefix.size()));
  return load_csv(spec, label_column);
}

Split split_dataset(const Dataset& data, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw InvalidArgument("train fraction must lie in (0, 1)");
  std::vector<std::size_t> order(data.examples.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(order.size())));
  Split s;
  for (std::size_t i = 0; i < order.size(); ++i) (i < n_train ? s.train : s.test).push_back(data.examples[order[i]]);
  return s;
}

}  // namespace ect
