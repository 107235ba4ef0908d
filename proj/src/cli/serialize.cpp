#include "qnil/cli/serialize.hpp"

#include "qnil/error.hpp"

namespace qnil::cli {

json scalar_to_json(Scalar z) { return json::array({z.real(), z.imag()}); }

Scalar scalar_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw Error(ErrorCode::ParseError, "expected a number or an [re, im] pair, got " + j.dump());
}

json to_json(const CoordVector& x) {
  json out = json::array();
  for (std::size_t p = 0; p < x.nnz(); ++p) {
    out.push_back({{"index", x.indices()[p]}, {"re", x.values()[p].real()}, {"im", x.values()[p].imag()}});
  }
  return out;
}

CoordVector coord_vector_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::ParseError, "coordinate vector must be an array");
  std::vector<std::pair<Index, Scalar>> entries;
  for (const json& e : j) {
    if (!e.is_object()) throw Error(ErrorCode::ParseError, "vector entry must be an object");
    for (const auto& [key, _] : e.items()) {
      if (key != "index" && key != "re" && key != "im") {
        throw Error(ErrorCode::ParseError, "unknown vector entry field '" + key + "'");
      }
    }
    if (!e.contains("index") || !e["index"].is_number_integer() || e["index"].get<long long>() < 1) {
      throw Error(ErrorCode::ParseError, "vector entry needs a positive integer 'index'");
    }
    const double re = e.value("re", 0.0);
    const double im = e.value("im", 0.0);
    entries.emplace_back(e["index"].get<Index>(), Scalar(re, im));
  }
  return CoordVector(std::move(entries));
}

json to_json(const RadiusSequence& s) {
  json points = json::array();
  for (const RadiusPoint& p : s.points) {
    json jp = {{"n", p.n}, {"exact_zero", p.exact_zero}, {"root", p.root}};
    jp["log_norm"] = p.exact_zero ? json(nullptr) : json(p.log_norm);
    points.push_back(std::move(jp));
  }
  json out = {{"kind", to_string(s.kind)},
              {"strategy", s.strategy},
              {"lower_bound_only", s.lower_bound_only},
              {"applications", s.applications},
              {"points", std::move(points)},
              {"words", s.words}};
  out["seed"] = s.seed ? json(*s.seed) : json(nullptr);
  return out;
}

RadiusSequence radius_sequence_from_json(const json& j) {
  RadiusSequence s;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "single-operator") s.kind = SequenceKind::single_operator;
  else if (kind == "fixed-word") s.kind = SequenceKind::fixed_word;
  else if (kind == "uniform-max") s.kind = SequenceKind::uniform_max;
  else throw Error(ErrorCode::ParseError, "unknown sequence kind '" + kind + "'");
  s.strategy = j.at("strategy").get<std::string>();
  s.lower_bound_only = j.at("lower_bound_only").get<bool>();
  s.applications = j.at("applications").get<std::uint64_t>();
  for (const json& jp : j.at("points")) {
    RadiusPoint p;
    p.n = jp.at("n").get<int>();
    p.exact_zero = jp.at("exact_zero").get<bool>();
    p.root = jp.at("root").get<double>();
    p.log_norm = jp.at("log_norm").is_null() ? 0.0 : jp.at("log_norm").get<double>();
    s.points.push_back(p);
  }
  s.words = j.at("words").get<std::vector<Word>>();
  if (!j.at("seed").is_null()) s.seed = j.at("seed").get<std::uint64_t>();
  return s;
}

json to_json(const QnilVerdict& v) {
  json out = {{"status", to_string(v.status)},
              {"final_root", v.final_root},
              {"depth", v.depth},
              {"strategy", v.strategy},
              {"mode", v.mode}};
  out["witness"] = v.witness ? json(*v.witness) : json(nullptr);
  return out;
}

json to_json(const SubspaceResult& r) {
  const std::size_t d = r.checks.truncation_dim;
  json basis = json::array();
  for (const CoordVector& q : r.basis) {
    json col = json::array();
    for (const Scalar& z : q.to_dense(d)) col.push_back(scalar_to_json(z));
    basis.push_back(std::move(col));
  }
  const SubspaceChecks& c = r.checks;
  json checks = {{"fk_vanishing_max", c.fk_vanishing_max},
                 {"invariance_residuals", c.invariance_residuals},
                 {"kernel_residuals", c.kernel_residuals},
                 {"dimension", c.dimension},
                 {"interior_dimension", c.interior_dimension},
                 {"truncation_dim", c.truncation_dim},
                 {"nontrivial", c.nontrivial},
                 {"saturated", c.saturated},
                 {"degenerate_orbit", c.degenerate_orbit},
                 {"budget_exhausted", c.budget_exhausted}};
  json out = {{"kind", to_string(r.kind)}, {"basis", std::move(basis)}, {"checks", std::move(checks)}};
  out["anchor_index"] = r.anchor_index ? json(*r.anchor_index) : json(nullptr);
  out["ideal_support"] = r.ideal_support ? json(*r.ideal_support) : json(nullptr);
  return out;
}

json to_json(const WeightedSubspaceResult& r) {
  return {{"subspace", to_json(r.subspace)}, {"b_residuals", r.b_residuals}};
}

json to_json(const JsrEstimate& e) {
  return {{"lower", e.lower},
          {"upper", e.upper},
          {"depth", e.depth},
          {"truncation_dim", e.truncation_dim},
          {"lower_by_depth", e.lower_by_depth},
          {"upper_by_depth", e.upper_by_depth}};
}

json to_json(const IdealSupport& s) { return {{"support", s.support}, {"is_ideal", s.is_ideal}}; }

std::string render_periodic_word(const Word& w, std::size_t repeats) {
  std::string out;
  for (std::size_t r = 0; r < repeats; ++r) {
    for (const auto letter : w) {
      if (!out.empty()) out += ' ';
      out += std::to_string(letter);
    }
  }
  return out + " …";
}

}  // namespace qnil::cli
