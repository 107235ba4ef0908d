#include "qnil/cli/scenario.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "qnil/cli/serialize.hpp"
#include "qnil/error.hpp"

namespace qnil::cli {
namespace {

using nlohmann::json;

[[noreturn]] void fail(ErrorCode code, const std::string& path, const std::string& msg) {
  throw Error(code, (path.empty() ? std::string("/") : path) + ": " + msg);
}

// Object view that rejects unknown keys and reports type errors by JSON path.
class Fields {
 public:
  Fields(const json& j, std::string path, std::initializer_list<const char*> allowed)
      : j_(j), path_(std::move(path)) {
    if (!j.is_object()) fail(ErrorCode::ParseError, path_, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items()) {
      if (!ok.count(key)) fail(ErrorCode::ParseError, path_ + "/" + key, "unknown field");
    }
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string sub(const std::string& key) const { return path_ + "/" + key; }

  const json& at(const std::string& key) const {
    if (!has(key)) fail(ErrorCode::ParseError, sub(key), "missing required field");
    return j_.at(key);
  }

  std::string str(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_string()) fail(ErrorCode::ParseError, sub(key), "expected a string");
    return v.get<std::string>();
  }

  double num(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_number()) fail(ErrorCode::ParseError, sub(key), "expected a number");
    return v.get<double>();
  }

  std::uint64_t uint(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_number_unsigned()) fail(ErrorCode::ParseError, sub(key), "expected a nonnegative integer");
    return v.get<std::uint64_t>();
  }

  Scalar scalar(const std::string& key) const { return scalar_at(at(key), sub(key)); }

  static Scalar scalar_at(const json& v, const std::string& path) {
    try {
      return scalar_from_json(v);
    } catch (const Error& e) {
      fail(ErrorCode::ParseError, path, e.what());
    }
  }

  const json& array(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_array()) fail(ErrorCode::ParseError, sub(key), "expected an array");
    return v;
  }

  std::vector<std::string> names(const std::string& key) const {
    std::vector<std::string> out;
    const json& arr = array(key);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_string()) fail(ErrorCode::ParseError, sub(key) + "/" + std::to_string(i), "expected a name");
      out.push_back(arr[i].get<std::string>());
    }
    return out;
  }

 private:
  const json& j_;
  std::string path_;
};

WeightSpec parse_weight(const json& j, const std::string& path) {
  const Fields f(j, path, {"type", "ratio", "value", "values"});
  const std::string type = f.str("type");
  if (type == "reciprocal") return WeightSpec::reciprocal();
  if (type == "reciprocal_factorial") return WeightSpec::reciprocal_factorial();
  if (type == "geometric") return WeightSpec::geometric(f.num("ratio"));
  if (type == "constant") return WeightSpec::constant(f.scalar("value"));
  if (type == "explicit") {
    std::vector<Scalar> values;
    const json& arr = f.array("values");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      values.push_back(Fields::scalar_at(arr[i], f.sub("values") + "/" + std::to_string(i)));
    }
    return WeightSpec::explicit_list(std::move(values));
  }
  fail(ErrorCode::ParseError, f.sub("type"), "unknown weight type '" + type + "'");
}

std::vector<Scalar> parse_entries(const Fields& f, std::size_t expected) {
  const json& arr = f.array("entries");
  if (arr.size() != expected) {
    fail(ErrorCode::ParseError, f.sub("entries"),
         "expected " + std::to_string(expected) + " entries, got " + std::to_string(arr.size()));
  }
  std::vector<Scalar> out;
  out.reserve(expected);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(Fields::scalar_at(arr[i], f.sub("entries") + "/" + std::to_string(i)));
  }
  return out;
}

Operator lookup(const Scenario& s, const std::string& name, const std::string& path) {
  for (std::size_t i = 0; i < s.operator_names.size(); ++i) {
    if (s.operator_names[i] == name) return s.operators[i];
  }
  fail(ErrorCode::DanglingReference, path, "undeclared operator '" + name + "'");
}

Operator parse_operator(const json& j, const std::string& path, const Scenario& s) {
  const Fields f(j, path, {"name", "kind", "weight", "dim", "entries", "factor", "of"});
  const std::string kind = f.str("kind");
  const std::string name = f.str("name");

  if (kind == "forward_shift") return make_forward_shift(parse_weight(f.at("weight"), f.sub("weight")));
  if (kind == "backward_shift") return make_backward_shift(parse_weight(f.at("weight"), f.sub("weight")));
  if (kind == "paper_t1") return paper_pair().member(1);
  if (kind == "paper_t2") return paper_pair().member(2);
  if (kind == "identity") return Operator::identity();
  if (kind == "zero") return Operator::zero();
  if (kind == "matrix") {
    const std::uint64_t dim = f.uint("dim");
    if (dim == 0) fail(ErrorCode::ParseError, f.sub("dim"), "dimension must be positive");
    return Operator::matrix(DenseMatrix::from_row_major(dim, dim, parse_entries(f, dim * dim)), name);
  }
  if (kind == "scaled") {
    if (!f.at("of").is_string()) fail(ErrorCode::ParseError, f.sub("of"), "expected an operator name");
    return Operator::scaled(f.scalar("factor"), lookup(s, f.str("of"), f.sub("of")));
  }
  if (kind == "sum" || kind == "compose") {
    std::vector<Operator> parts;
    const auto refs = f.names("of");
    if (refs.empty()) fail(ErrorCode::ParseError, f.sub("of"), "needs at least one operator");
    for (std::size_t i = 0; i < refs.size(); ++i) {
      parts.push_back(lookup(s, refs[i], f.sub("of") + "/" + std::to_string(i)));
    }
    return kind == "sum" ? Operator::sum(std::move(parts)) : Operator::compose(std::move(parts));
  }
  fail(ErrorCode::UnknownOperatorKind, f.sub("kind"), "unknown operator kind '" + kind + "'");
}

ScenarioParams parse_params(const json& j, const std::string& path, ScenarioParams p) {
  const Fields f(j, path,
                 {"depth", "dim", "tol", "budget", "strategy", "beam_width", "seed", "n_max",
                  "threshold", "mode", "samples", "workers", "jsr_depth", "seed_vector"});
  if (f.has("depth")) p.depth = static_cast<int>(f.uint("depth"));
  if (f.has("dim")) p.dim = f.uint("dim");
  if (f.has("tol")) p.tol = f.num("tol");
  if (f.has("budget")) p.budget = f.uint("budget");
  if (f.has("strategy")) p.strategy = f.str("strategy");
  if (f.has("beam_width")) p.beam_width = f.uint("beam_width");
  if (f.has("seed")) p.seed = f.uint("seed");
  if (f.has("n_max")) p.n_max = static_cast<int>(f.uint("n_max"));
  if (f.has("threshold")) p.threshold = f.num("threshold");
  if (f.has("mode")) p.mode = f.str("mode");
  if (f.has("samples")) p.samples = f.uint("samples");
  if (f.has("workers")) p.workers = static_cast<unsigned>(f.uint("workers"));
  if (f.has("jsr_depth")) p.jsr_depth = static_cast<int>(f.uint("jsr_depth"));
  if (f.has("seed_vector")) p.seed_vector = f.str("seed_vector");
  if (p.strategy != "exact" && p.strategy != "pruned" && p.strategy != "beam") {
    fail(ErrorCode::ParseError, f.sub("strategy"), "expected exact, pruned or beam");
  }
  if (p.mode != "uniform" && p.mode != "per-word") {
    fail(ErrorCode::ParseError, f.sub("mode"), "expected uniform or per-word");
  }
  return p;
}

WeightMatrixSpec parse_weight_matrix(const json& j, const std::string& path, std::size_t dim) {
  const Fields f(j, path, {"kind", "seed", "entries"});
  const std::string kind = f.str("kind");
  WeightMatrixSpec w;
  if (kind == "ones") {
    w.kind = WeightMatrixSpec::Kind::ones;
  } else if (kind == "random_unit_disc") {
    w.kind = WeightMatrixSpec::Kind::random_unit_disc;
    w.seed = f.uint("seed");
  } else if (kind == "dense") {
    w.kind = WeightMatrixSpec::Kind::dense;
    w.entries = parse_entries(f, dim * dim);
  } else {
    fail(ErrorCode::ParseError, f.sub("kind"), "unknown weight matrix kind '" + kind + "'");
  }
  return w;
}

std::string locate(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

std::string unit_vector(const std::string& name, int k) {
  return R"({"name": ")" + name + R"(", "entries": [{"index": )" + std::to_string(k) +
         R"(, "re": 1.0, "im": 0.0}]})";
}

}  // namespace

std::uint64_t default_budget() {
  const char* env = std::getenv("QNIL_BUDGET");
  if (env == nullptr || *env == '\0') return kDefaultBudget;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0' || v == 0) throw Error(ErrorCode::ParseError, "QNIL_BUDGET must be a positive integer");
  return v;
}

json ScenarioParams::to_json() const {
  json j = {{"depth", depth},         {"dim", dim},         {"tol", tol},
            {"budget", budget},       {"strategy", strategy}, {"beam_width", beam_width},
            {"seed", seed},           {"n_max", n_max},     {"threshold", threshold},
            {"mode", mode},           {"samples", samples}, {"workers", workers},
            {"jsr_depth", jsr_depth}};
  j["seed_vector"] = seed_vector ? json(*seed_vector) : json(nullptr);
  return j;
}

DenseMatrix WeightMatrixSpec::build(std::size_t d) const {
  switch (kind) {
    case Kind::ones: return DenseMatrix(d, d, Scalar{1.0});
    case Kind::random_unit_disc: return random_unit_disc_weights(d, seed);
    case Kind::dense: break;
  }
  if (entries.size() != d * d) {
    throw Error(ErrorCode::DimensionMismatch, "dense weight matrix does not match the truncation dimension");
  }
  return DenseMatrix::from_row_major(d, d, entries);
}

DenseMatrix random_unit_disc_weights(std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  DenseMatrix w(d, d);
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      const double radius = std::sqrt(unit());
      const double theta = 2.0 * std::numbers::pi * unit();
      w(r, c) = std::polar(radius, theta);
    }
  }
  return w;
}

const Operator& Scenario::op(const std::string& name) const {
  for (std::size_t i = 0; i < operator_names.size(); ++i) {
    if (operator_names[i] == name) return operators[i];
  }
  throw Error(ErrorCode::DanglingReference, "undeclared operator '" + name + "'");
}

const CoordVector& Scenario::vec(const std::string& name) const {
  for (std::size_t i = 0; i < vector_names.size(); ++i) {
    if (vector_names[i] == name) return vectors[i];
  }
  throw Error(ErrorCode::DanglingReference, "undeclared vector '" + name + "'");
}

OperatorTuple Scenario::tuple_operators() const {
  std::vector<Operator> members;
  for (const auto& name : tuple) members.push_back(op(name));
  return OperatorTuple(std::move(members));
}

std::optional<OperatorTuple> Scenario::corollary_operators() const {
  if (!corollary_tuple) return std::nullopt;
  std::vector<Operator> members;
  for (const auto& name : *corollary_tuple) members.push_back(op(name));
  return OperatorTuple(std::move(members));
}

Scenario parse_scenario_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, locate(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
  }

  const Fields f(root, "", {"name", "operators", "tuple", "vectors", "params", "weights", "corollary_tuple"});
  Scenario s;
  s.source = text;
  s.name = f.str("name");

  const json& ops = f.array("operators");
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const std::string path = "/operators/" + std::to_string(i);
    Operator op = parse_operator(ops[i], path, s);
    const std::string name = ops[i].at("name").get<std::string>();
    for (const auto& existing : s.operator_names) {
      if (existing == name) fail(ErrorCode::ParseError, path + "/name", "duplicate operator '" + name + "'");
    }
    s.operator_names.push_back(name);
    s.operators.push_back(op.relabeled(name));
  }

  s.tuple = f.names("tuple");
  if (s.tuple.empty()) fail(ErrorCode::ParseError, "/tuple", "tuple must name at least one operator");
  for (std::size_t i = 0; i < s.tuple.size(); ++i) lookup(s, s.tuple[i], "/tuple/" + std::to_string(i));

  if (f.has("vectors")) {
    const json& vecs = f.array("vectors");
    for (std::size_t i = 0; i < vecs.size(); ++i) {
      const std::string path = "/vectors/" + std::to_string(i);
      const Fields vf(vecs[i], path, {"name", "entries"});
      try {
        s.vectors.push_back(coord_vector_from_json(vf.array("entries")));
      } catch (const Error& e) {
        fail(ErrorCode::ParseError, vf.sub("entries"), e.what());
      }
      s.vector_names.push_back(vf.str("name"));
    }
  }

  s.params.budget = default_budget();
  if (f.has("params")) s.params = parse_params(f.at("params"), "/params", s.params);
  if (s.params.seed_vector) {
    bool found = false;
    for (const auto& n : s.vector_names) found = found || n == *s.params.seed_vector;
    if (!found) {
      fail(ErrorCode::DanglingReference, "/params/seed_vector", "undeclared vector '" + *s.params.seed_vector + "'");
    }
  }

  if (f.has("weights")) {
    const json& ws = f.array("weights");
    if (ws.size() != s.tuple.size()) {
      fail(ErrorCode::ParseError, "/weights", "need one weight matrix per tuple member");
    }
    std::vector<WeightMatrixSpec> specs;
    for (std::size_t i = 0; i < ws.size(); ++i) {
      specs.push_back(parse_weight_matrix(ws[i], "/weights/" + std::to_string(i), s.params.dim));
    }
    s.weights = std::move(specs);
  }

  if (f.has("corollary_tuple")) {
    auto names = f.names("corollary_tuple");
    if (names.size() != s.tuple.size()) {
      fail(ErrorCode::ParseError, "/corollary_tuple", "must have as many members as the tuple");
    }
    for (std::size_t i = 0; i < names.size(); ++i) lookup(s, names[i], "/corollary_tuple/" + std::to_string(i));
    s.corollary_tuple = std::move(names);
  }
  return s;
}

Scenario parse_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

Scenario load_scenario(const std::string& ref) {
  constexpr std::string_view prefix = "builtin:";
  if (ref.rfind(prefix, 0) == 0) {
    const std::string name = ref.substr(prefix.size());
    const auto text = builtin_scenario_text(name);
    if (!text) throw Error(ErrorCode::ParseError, "unknown built-in scenario '" + name + "'");
    return parse_scenario_text(*text);
  }
  return parse_scenario_file(ref);
}

std::vector<std::string> builtin_scenario_names() {
  return {"paper-example", "geometric-shifts", "backward-pair"};
}

std::optional<std::string> builtin_scenario_text(const std::string& name) {
  if (name == "paper-example") {
    std::string vecs;
    for (int k = 2; k <= 6; ++k) {
      if (!vecs.empty()) vecs += ",\n    ";
      vecs += unit_vector("e" + std::to_string(k), k);
    }
    return R"({
  "name": "paper-example",
  "operators": [
    {"name": "T1", "kind": "paper_t1"},
    {"name": "T2", "kind": "paper_t2"}
  ],
  "tuple": ["T1", "T2"],
  "vectors": [
    )" + vecs + R"(
  ],
  "params": {"depth": 16, "n_max": 50, "threshold": 0.3, "strategy": "exact", "dim": 32, "jsr_depth": 6}
}
)";
  }
  if (name == "geometric-shifts") {
    return R"({
  "name": "geometric-shifts",
  "operators": [
    {"name": "F2", "kind": "forward_shift", "weight": {"type": "geometric", "ratio": 0.5}},
    {"name": "F3", "kind": "forward_shift", "weight": {"type": "geometric", "ratio": 0.3333333333333333}}
  ],
  "tuple": ["F2", "F3"],
  "vectors": [
    )" + unit_vector("e1", 1) + R"(
  ],
  "params": {"depth": 12, "dim": 16, "tol": 1e-10, "n_max": 40, "threshold": 0.05, "strategy": "pruned"}
}
)";
  }
  if (name == "backward-pair") {
    return R"({
  "name": "backward-pair",
  "operators": [
    {"name": "B1", "kind": "backward_shift", "weight": {"type": "constant", "value": 1.0}},
    {"name": "B2", "kind": "backward_shift", "weight": {"type": "constant", "value": 0.5}}
  ],
  "tuple": ["B1", "B2"],
  "vectors": [
    )" + unit_vector("e1", 1) + R"(
  ],
  "params": {"depth": 12, "dim": 16, "tol": 1e-10, "n_max": 40, "threshold": 0.05, "strategy": "exact"}
}
)";
  }
  return std::nullopt;
}

}  // namespace qnil::cli
