#include "qnil/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "qnil/cli/serialize.hpp"
#include "qnil/error.hpp"
#include "qnil/subspace.hpp"

namespace qnil::cli {
namespace {

using nlohmann::json;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Context {
  const Scenario& scenario;
  ScenarioParams params;
  Report& report;

  OperatorTuple tuple() const { return scenario.tuple_operators(); }

  UniformOptions uniform() const {
    UniformOptions u;
    u.strategy = params.strategy == "exact"  ? Strategy::exact
                 : params.strategy == "beam" ? Strategy::beam
                                             : Strategy::exact_pruned;
    u.beam_width = params.beam_width;
    u.budget = params.budget;
    u.workers = params.workers;
    return u;
  }

  CertifyOptions certify() const {
    CertifyOptions c;
    c.mode = params.mode == "per-word" ? CertifyOptions::Mode::per_word_sampled : CertifyOptions::Mode::uniform;
    c.sample_count = params.samples;
    c.seed = params.seed;
    c.uniform = uniform();
    return c;
  }

  OrbitGenParams orbit() const {
    OrbitGenParams o;
    o.depth = params.depth;
    o.rank_tol = params.tol;
    o.truncation_dim = params.dim;
    o.budget = params.budget;
    o.workers = params.workers;
    return o;
  }

  int certify_depth() const { return std::max(params.depth, 4); }

  /// Runs fn, recording a module error as a failure. Returns success.
  bool guarded(const std::string& context, const std::function<void()>& fn) {
    try {
      fn();
      return true;
    } catch (const Error& e) {
      report.failures.push_back({context, to_string(e.code()), e.what(), e.completed_depth});
      return false;
    }
  }

  std::string seed_vector_name() const {
    if (params.seed_vector) return *params.seed_vector;
    if (scenario.vector_names.empty()) {
      throw Error(ErrorCode::InvalidArgument, "command needs at least one declared vector");
    }
    return scenario.vector_names.front();
  }

  /// Verdict for y0; a budget overrun degrades to an inconclusive verdict.
  QnilVerdict verdict_for(const CoordVector& y0) {
    try {
      return certify_joint(tuple(), y0, certify_depth(), params.threshold, certify());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BudgetExceeded) throw;
      report.warnings.push_back(std::string("certification stopped early, verdict treated as inconclusive: ") +
                                e.what());
      QnilVerdict v;
      v.depth = e.completed_depth;
      v.mode = "uniform";
      return v;
    }
  }
};

json exact_zero_from(const RadiusSequence& s) {
  for (const auto& p : s.points) {
    if (p.exact_zero) return p.n;
  }
  return nullptr;
}

void cmd_analyze(Context& c) {
  json rows = json::array();
  for (const auto& op_name : c.scenario.tuple) {
    for (std::size_t v = 0; v < c.scenario.vectors.size(); ++v) {
      const std::string& vec_name = c.scenario.vector_names[v];
      const std::string label = op_name + "@" + vec_name;
      c.guarded(label, [&] {
        auto seq = local_radius_sequence(c.scenario.op(op_name), c.scenario.vectors[v], c.params.n_max);
        rows.push_back({{"operator", op_name},
                        {"vector", vec_name},
                        {"final_root", seq.points.back().root},
                        {"exact_zero_from", exact_zero_from(seq)}});
        c.report.sequences.push_back({label, std::move(seq)});
      });
    }
  }
  c.report.results["local"] = std::move(rows);
}

void cmd_joint(Context& c) {
  json rows = json::array();
  const OperatorTuple tuple = c.tuple();
  for (std::size_t v = 0; v < c.scenario.vectors.size(); ++v) {
    const std::string& name = c.scenario.vector_names[v];
    const CoordVector& x = c.scenario.vectors[v];
    json row = {{"vector", name}};
    c.guarded("beta@" + name, [&] {
      auto seq = uniform_joint_sequence(tuple, x, c.params.depth, c.uniform());
      row["beta_final"] = seq.points.back().root;
      row["strategy"] = seq.strategy;
      row["lower_bound_only"] = seq.lower_bound_only;
      c.report.sequences.push_back({"beta@" + name, std::move(seq)});
    });
    c.guarded("verdict@" + name, [&] {
      row["verdict"] = to_json(certify_joint(tuple, x, c.certify_depth(), c.params.threshold, c.certify()));
    });
    rows.push_back(std::move(row));
  }
  c.report.results["joint"] = std::move(rows);
}

void cmd_subspace(Context& c) {
  c.guarded("subspace", [&] {
    const std::string name = c.seed_vector_name();
    const CoordVector& y0 = c.scenario.vec(name);
    const QnilVerdict verdict = c.verdict_for(y0);
    json out = {{"vector", name}, {"verdict", to_json(verdict)}};
    const SubspaceResult result = common_invariant_subspace(c.tuple(), y0, c.orbit(), verdict);
    out["subspace"] = to_json(result);
    out["ideal"] = to_json(ideal_support(result, c.params.tol));
    if (result.checks.degenerate_orbit) c.report.warnings.push_back("members annihilate the anchor; kernel fallback used");
    if (result.checks.budget_exhausted) c.report.warnings.push_back("orbit generation stopped at the application budget");
    c.report.results["subspace"] = std::move(out);
  });
}

void cmd_weighted(Context& c) {
  c.guarded("weighted", [&] {
    const std::string name = c.seed_vector_name();
    const CoordVector& y0 = c.scenario.vec(name);
    const QnilVerdict verdict = c.verdict_for(y0);
    const OperatorTuple tuple = c.tuple();
    json out = {{"vector", name}, {"verdict", to_json(verdict)}};
    WeightedSubspaceResult result;
    if (const auto t_tuple = c.scenario.corollary_operators()) {
      out["mode"] = "derived-weights";
      result = corollary_subspace(tuple, *t_tuple, y0, c.orbit(), verdict);
    } else {
      std::vector<DenseMatrix> weights;
      if (c.scenario.weights) {
        for (const auto& w : *c.scenario.weights) weights.push_back(w.build(c.params.dim));
      } else {
        c.report.warnings.push_back("no weights declared; using all-ones weights");
        weights.assign(tuple.size(), DenseMatrix(c.params.dim, c.params.dim, Scalar{1.0}));
      }
      out["mode"] = "explicit-weights";
      result = weighted_invariant_subspace(tuple, weights, y0, c.orbit(), verdict);
    }
    out["weighted"] = to_json(result);
    c.report.results["weighted"] = std::move(out);
  });
}

void cmd_jsr(Context& c) {
  c.guarded("jsr", [&] {
    JsrOptions opts;
    opts.budget = std::min<std::uint64_t>(c.params.budget, opts.budget);
    c.report.results["jsr"] = to_json(jsr_estimate(c.tuple(), c.params.dim, c.params.jsr_depth, opts));
  });
}

// Reproduction of the worked example: eigen-identities of the two products,
// nilpotence of T1 on e_k, decay of T2, and non-decay of the alternating word.
void cmd_paper_example(Context& c) {
  auto& asserts = c.report.assertions;
  const auto check = [&](const std::string& name, const std::function<std::string(bool&)>& body) {
    bool ok = false;
    std::string detail;
    try {
      detail = body(ok);
    } catch (const Error& e) {
      ok = false;
      detail = std::string(to_string(e.code())) + ": " + e.what();
    }
    asserts.push_back({name, ok, detail});
  };

  if (c.scenario.tuple.size() != 2) {
    asserts.push_back({"tuple is a pair", false, "tuple has " + std::to_string(c.scenario.tuple.size()) + " members"});
    return;
  }
  const OperatorTuple tuple = c.tuple();
  const Operator& t1 = tuple.member(1);
  const Operator& t2 = tuple.member(2);
  constexpr Index kColumns = 256;

  check("T1 e_j = e_{j-1}, T1 e_1 = 0 for j <= 256", [&](bool& ok) {
    ok = t1.column(1).is_zero();
    for (Index j = 2; j <= kColumns && ok; ++j) {
      ok = t1.column(j) == CoordVector::basis(j - 1);
      if (!ok) return "mismatch at column " + std::to_string(j);
    }
    return std::string(ok ? "" : "T1 e_1 is nonzero");
  });

  check("T2 e_j = e_{j+1} / j for j <= 256", [&](bool& ok) {
    ok = true;
    for (Index j = 1; j <= kColumns; ++j) {
      const CoordVector col = t2.column(j);
      const double want = 1.0 / static_cast<double>(j);
      if (col.nnz() != 1 || col.indices()[0] != j + 1 || std::abs(col.values()[0] - want) > 1e-15 * want) {
        ok = false;
        return "mismatch at column " + std::to_string(j);
      }
    }
    return std::string();
  });

  std::vector<Index> ks;
  for (std::size_t v = 0; v < c.scenario.vectors.size(); ++v) {
    const CoordVector& x = c.scenario.vectors[v];
    if (x.nnz() == 1 && x.values()[0] == Scalar{1.0} && x.indices()[0] >= 2) {
      ks.push_back(x.indices()[0]);
    } else {
      c.report.warnings.push_back("vector '" + c.scenario.vector_names[v] + "' is not a unit vector e_k, k >= 2; skipped");
    }
  }
  if (ks.empty()) asserts.push_back({"unit vectors e_k declared", false, "no e_k with k >= 2"});

  const Operator t12 = compose(t1, t2);
  const Operator t21 = compose(t2, t1);
  const int n_max = c.params.n_max;
  for (const Index k : ks) {
    const std::string ek = "e_" + std::to_string(k);
    const auto eigen_check = [&](const Operator& prod, double want) {
      return [&, want, prod](bool& ok) {
        const auto seq = local_radius_sequence(prod, CoordVector::basis(k), n_max);
        double worst = 0.0;
        for (const auto& p : seq.points) worst = std::max(worst, std::abs(p.root - want));
        ok = worst <= 1e-12;
        return "max |r_n - " + num(want) + "| = " + num(worst);
      };
    };
    c.report.sequences.push_back({"T1T2@" + ek, local_radius_sequence(t12, CoordVector::basis(k), n_max)});
    check("r_n(T1T2, " + ek + ") = 1/" + std::to_string(k) + " for n <= " + std::to_string(n_max),
          eigen_check(t12, 1.0 / static_cast<double>(k)));
    check("r_n(T2T1, " + ek + ") = 1/" + std::to_string(k - 1) + " for n <= " + std::to_string(n_max),
          eigen_check(t21, 1.0 / static_cast<double>(k - 1)));
    check("T1^n " + ek + " = 0 exactly iff n >= " + std::to_string(k), [&](bool& ok) {
      const auto seq = local_radius_sequence(t1, CoordVector::basis(k), n_max);
      ok = true;
      for (const auto& p : seq.points) ok = ok && (p.exact_zero == (static_cast<Index>(p.n) >= k));
      return std::string();
    });
  }

  check("r_n(T2, e_2) decreasing for n >= 5 with r_200 <= 0.02", [&](bool& ok) {
    const auto seq = local_radius_sequence(t2, CoordVector::basis(2), 200);
    bool decreasing = true;
    for (int n = 6; n <= 200; ++n) decreasing = decreasing && seq.root(n) < seq.root(n - 1);
    const double oracle = std::exp((std::lgamma(2.0) - std::lgamma(202.0)) / 200.0);
    const double r200 = seq.root(200);
    ok = decreasing && r200 <= 0.02 && std::abs(r200 - oracle) <= 1e-9 * oracle;
    c.report.sequences.push_back({"T2@e_2", seq});
    return "r_200 = " + num(r200) + ", Gamma-ratio value " + num(oracle);
  });

  check("uniform joint radius at e_3 stays >= 3^(-1/2) on even depths", [&](bool& ok) {
    UniformOptions u = c.uniform();
    u.strategy = Strategy::exact;
    const auto seq = uniform_joint_sequence(tuple, CoordVector::basis(3), c.params.depth, u);
    const double floor = 1.0 / std::sqrt(3.0) - 1e-10;
    ok = true;
    for (int n = 2; n <= seq.depth(); n += 2) ok = ok && seq.root(n) >= floor;
    c.report.sequences.push_back({"beta@e_3", seq});
    return "beta_" + std::to_string(seq.depth()) + " = " + num(seq.points.back().root);
  });

  check("certify_joint at e_3 is refuted by an alternating word", [&](bool& ok) {
    const QnilVerdict v = certify_joint(tuple, CoordVector::basis(3), c.certify_depth(), c.params.threshold, c.certify());
    c.report.results["verdict_e3"] = to_json(v);
    ok = v.status == QnilStatus::refuted && v.witness && v.witness->size() == 2 &&
         (*v.witness)[0] != (*v.witness)[1];
    return std::string("status ") + to_string(v.status) +
           (v.witness ? ", witness " + render_periodic_word(*v.witness) : std::string());
  });
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"analyze", "joint", "subspace", "weighted", "jsr", "paper-example"};
  return names;
}

ScenarioParams effective_params(const ScenarioParams& base, const Overrides& o) {
  ScenarioParams p = base;
  if (o.depth) p.depth = *o.depth;
  if (o.dim) p.dim = *o.dim;
  if (o.tol) p.tol = *o.tol;
  if (o.budget) p.budget = *o.budget;
  if (o.strategy) {
    if (*o.strategy != "exact" && *o.strategy != "pruned" && *o.strategy != "beam") {
      throw Error(ErrorCode::InvalidArgument, "strategy must be exact, pruned or beam");
    }
    p.strategy = *o.strategy;
  }
  if (o.seed) p.seed = *o.seed;
  if (o.workers) p.workers = *o.workers;
  if (o.n_max) p.n_max = *o.n_max;
  if (o.threshold) p.threshold = *o.threshold;
  return p;
}

Report run_command(const std::string& command, const Scenario& scenario, const Overrides& overrides) {
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), command) == names.end()) {
    throw Error(ErrorCode::InvalidArgument, "unknown command '" + command + "'");
  }
  Report report;
  report.scenario = scenario.name;
  report.command = command;
  report.timestamp = utc_timestamp();
  report.input_digest = content_digest(scenario.source);
  Context c{scenario, effective_params(scenario.params, overrides), report};
  report.params = c.params.to_json();

  if (command == "analyze") cmd_analyze(c);
  else if (command == "joint") cmd_joint(c);
  else if (command == "subspace") cmd_subspace(c);
  else if (command == "weighted") cmd_weighted(c);
  else if (command == "jsr") cmd_jsr(c);
  else cmd_paper_example(c);
  return report;
}

int exit_code(const Report& report) {
  bool budget = false;
  bool input = false;
  for (const auto& f : report.failures) {
    budget = budget || f.code == "BudgetExceeded";
    input = input || f.code == "ParseError" || f.code == "DanglingReference" ||
            f.code == "UnknownOperatorKind" || f.code == "InvalidArgument" || f.code == "IoError";
  }
  if (input) return 2;
  if (budget) return 3;
  if (!report.failures.empty() || !report.all_assertions_passed()) return 1;
  return 0;
}

}  // namespace qnil::cli
