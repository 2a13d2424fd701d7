#include "ect/model_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace ect {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_classifier(const Classifier& c, std::ostream& out) {
  struct Writer {
    std::ostream& out;
    void operator()(const ConstantModel& m) const { out << "constant " << to_bit(m.side) << '\n'; }
    void operator()(const LogisticModel& m) const {
      out << "logistic " << m.w.size();
      for (double v : m.w) out << ' ' << fmt(v);
      out << ' ' << fmt(m.b) << '\n';
    }
    void operator()(const StumpModel& m) const {
      out << "stump " << m.feature << ' ' << fmt(m.threshold) << ' ' << to_bit(m.below) << '\n';
    }
    void operator()(const TruthTableModel& m) const {
      out << "table " << m.p_right.size() << '\n';
      for (const auto& [x, p] : m.p_right) {
        out << x.size();
        for (double v : x) out << ' ' << fmt(v);
        out << ' ' << fmt(p) << '\n';
      }
    }
  };
  std::visit(Writer{out}, c.model);
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) throw FormatError("model file truncated");
    return w;
  }
  void expect(const std::string& w) {
    const std::string got = word();
    if (got != w) throw FormatError("model file: expected '" + w + "', got '" + got + "'");
  }
  long integer() {
    const std::string w = word();
    char* end = nullptr;
    const long v = std::strtol(w.c_str(), &end, 10);
    if (end == w.c_str() || *end != '\0') throw FormatError("model file: bad integer '" + w + "'");
    return v;
  }
  std::size_t count(std::size_t limit) {
    const long v = integer();
    if (v < 0 || static_cast<std::size_t>(v) > limit) throw FormatError("model file: count out of range");
    return static_cast<std::size_t>(v);
  }
  double real() {
    const std::string w = word();
    char* end = nullptr;
    const double v = std::strtod(w.c_str(), &end);
    if (end == w.c_str() || *end != '\0') throw FormatError("model file: bad number '" + w + "'");
    return v;
  }
  Side side() {
    const long v = integer();
    if (v != 0 && v != 1) throw FormatError("model file: bad side");
    return from_bit(static_cast<int>(v));
  }

 private:
  std::istream& in_;
};

constexpr std::size_t kLimit = 1u << 26;

Classifier read_classifier(Reader& r) {
  const std::string tag = r.word();
  if (tag == "constant") return {ConstantModel{r.side()}};
  if (tag == "logistic") {
    LogisticModel m;
    m.w.resize(r.count(kLimit));
    for (double& v : m.w) v = r.real();
    m.b = r.real();
    return {m};
  }
  if (tag == "stump") {
    StumpModel m;
    m.feature = static_cast<int>(r.count(kLimit));
    m.threshold = r.real();
    m.below = r.side();
    return {m};
  }
  if (tag == "table") {
    TruthTableModel m;
    const std::size_t rows = r.count(kLimit);
    for (std::size_t i = 0; i < rows; ++i) {
      std::vector<double> x(r.count(kLimit));
      for (double& v : x) v = r.real();
      m.p_right[x] = r.real();
    }
    return {m};
  }
  throw FormatError("model file: unknown classifier tag '" + tag + "'");
}

}  // namespace

void save_model(const ReductionModel& model, std::ostream& out) {
  const LabelTree& tree = model.tree;
  out << "ect-model " << kModelFormatVersion << '\n';
  out << "kind " << to_string(model.kind) << '\n';
  out << "labels " << tree.num_labels() << '\n';
  out << "names " << model.label_names.size();
  for (const auto& name : model.label_names) out << ' ' << name;
  out << '\n';
  out << "tree " << tree.num_internal() << '\n';
  for (const auto& node : tree.nodes()) {
    out << (node.left.leaf ? 'L' : 'N') << node.left.index << ' ' << (node.right.leaf ? 'L' : 'N') << node.right.index
        << '\n';
  }
  const auto& set = model.nodes.classifiers();
  out << "nodes " << (model.nodes.shared() ? 1 : 0) << ' ' << set.size() << '\n';
  for (const auto& c : set) write_classifier(c, out);
  out << "pairs " << model.pairs.size() << '\n';
  for (const auto& c : model.pairs) write_classifier(c, out);
  out << "end\n";
}

ReductionModel load_model(std::istream& in) {
  Reader r(in);
  r.expect("ect-model");
  if (r.integer() != kModelFormatVersion) throw FormatError("unsupported model format version");
  ReductionModel model;
  r.expect("kind");
  try {
    model.kind = parse_reduction_kind(r.word());
  } catch (const InvalidArgument& e) {
    throw FormatError(e.what());
  }
  r.expect("labels");
  const auto k = static_cast<int>(r.count(kLimit));
  r.expect("names");
  model.label_names.resize(r.count(kLimit));
  for (auto& name : model.label_names) name = r.word();
  r.expect("tree");
  std::vector<LabelTree::Node> nodes(r.count(kLimit));
  for (auto& node : nodes) {
    for (NodeRef* ref : {&node.left, &node.right}) {
      const std::string w = r.word();
      if (w.size() < 2 || (w[0] != 'L' && w[0] != 'N')) throw FormatError("model file: bad tree child '" + w + "'");
      ref->leaf = w[0] == 'L';
      ref->index = std::atoi(w.c_str() + 1);
    }
  }
  try {
    model.tree = LabelTree(k, std::move(nodes));
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("model file: ") + e.what());
  }
  r.expect("nodes");
  const bool shared = r.integer() != 0;
  std::vector<Classifier> set(r.count(kLimit));
  for (auto& c : set) c = read_classifier(r);
  model.nodes = NodeClassifierSet(std::move(set), shared, model.tree.num_internal());
  r.expect("pairs");
  model.pairs.resize(r.count(kLimit));
  for (auto& c : model.pairs) c = read_classifier(r);
  r.expect("end");
  return model;
}

void save_model_file(const ReductionModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write model file: " + path);
  save_model(model, out);
}

ReductionModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read model file: " + path);
  return load_model(in);
}

}  // namespace ect
