#include <doctest.h>

#include <cmath>

#include "qnil/error.hpp"
#include "qnil/quasinil.hpp"

using namespace qnil;

namespace {

OperatorTuple geometric_pair() {
  return OperatorTuple({make_forward_shift(WeightSpec::geometric(0.5)),
                        make_forward_shift(WeightSpec::geometric(1.0 / 3.0))});
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("local sequence of the reciprocal shift") {
  const auto s = local_radius_sequence(make_forward_shift(WeightSpec::reciprocal()), CoordVector::basis(1), 60);
  REQUIRE(s.depth() == 60);
  CHECK(s.kind == SequenceKind::single_operator);
  CHECK(s.applications == 60);
  for (int n = 1; n <= 60; ++n) {
    const double want = std::exp(-std::lgamma(n + 1.0) / n);
    CHECK(s.root(n) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("exact zeros persist") {
  const auto s = local_radius_sequence(make_backward_shift(WeightSpec::constant(1.0)), CoordVector::basis(3), 10);
  for (int n = 1; n <= 10; ++n) {
    CAPTURE(n);
    CHECK(s.at(n).exact_zero == (n >= 3));
    if (n >= 3) CHECK(s.root(n) == 0.0);
  }
  CHECK(s.applications == 3);
}

TEST_CASE("argument checks") {
  const Operator i = Operator::identity();
  CHECK(code_of([&] { local_radius_sequence(i, CoordVector(), 5); }) == ErrorCode::InvalidSeed);
  CHECK(code_of([&] { local_radius_sequence(i, CoordVector::basis(1), 0); }) == ErrorCode::InvalidArgument);
  const auto s = local_radius_sequence(i, CoordVector::basis(1), 3);
  CHECK(code_of([&] { (void)s.at(4); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("periodic words grow on the left") {
  const Word w = WordSpec::periodic({1, 2}).materialize(5, 2);
  CHECK(w == Word{2, 1, 2, 1, 2});
  const Word p = WordSpec::prefix({1, 1, 2, 2, 1}).materialize(3, 2);
  CHECK(p == Word{2, 2, 1});
  CHECK(code_of([] { WordSpec::prefix({1}).materialize(3, 2); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("alternating word on the example pair decays like k^(-1/2)") {
  const OperatorTuple t = paper_pair();
  for (Index k = 2; k <= 6; ++k) {
    const auto s = word_radius_sequence(t, WordSpec::periodic({1, 2}), CoordVector::basis(k), 20);
    CHECK(s.kind == SequenceKind::fixed_word);
    for (int n = 2; n <= 20; n += 2) {
      CHECK(s.root(n) == doctest::Approx(1.0 / std::sqrt(static_cast<double>(k))).epsilon(1e-13));
    }
  }
}

TEST_CASE("random words are reproducible and record their seed") {
  const OperatorTuple t = geometric_pair();
  const auto a = word_radius_sequence(t, WordSpec::random(11), CoordVector::basis(1), 25);
  const auto b = word_radius_sequence(t, WordSpec::random(11), CoordVector::basis(1), 25);
  const auto c = word_radius_sequence(t, WordSpec::random(12), CoordVector::basis(1), 25);
  CHECK(a == b);
  REQUIRE(a.seed);
  CHECK(*a.seed == 11);
  CHECK(a.words != c.words);
  CHECK(code_of([&] { word_radius_sequence(t, WordSpec::prefix(Word(25, 3)), CoordVector::basis(1), 25); }) ==
        ErrorCode::BadWordIndex);
}

TEST_CASE("uniform joint radius of the geometric pair") {
  const OperatorTuple t = geometric_pair();
  for (const Strategy s : {Strategy::exact, Strategy::exact_pruned}) {
    UniformOptions o;
    o.strategy = s;
    const auto beta = uniform_joint_sequence(t, CoordVector::basis(1), 12, o);
    CHECK(beta.kind == SequenceKind::uniform_max);
    for (int n = 1; n <= 12; ++n) {
      CHECK(beta.at(n).log_norm == doctest::Approx(-0.5 * n * (n + 1) * std::log(2.0)).epsilon(1e-12));
    }
    CHECK(beta.words.back() == Word(12, 1));
  }
  UniformOptions pruned;
  pruned.strategy = Strategy::exact_pruned;
  CHECK(uniform_joint_sequence(t, CoordVector::basis(1), 12, pruned).strategy == "exact-with-dominance-pruning");
}

TEST_CASE("beam search is flagged as a lower bound") {
  UniformOptions o;
  o.strategy = Strategy::beam;
  o.beam_width = 4;
  const auto beta = uniform_joint_sequence(paper_pair(), CoordVector::basis(3), 10, o);
  CHECK(beta.lower_bound_only);
  CHECK(beta.strategy == "beam(4)");
  o.beam_width = 0;
  CHECK(code_of([&] { uniform_joint_sequence(paper_pair(), CoordVector::basis(3), 10, o); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("pruning is skipped when it would be unsound") {
  const OperatorTuple t({make_forward_shift(WeightSpec::constant(1.0)), make_forward_shift(WeightSpec::constant(-1.0))});
  CHECK_FALSE(dominance_pruning_sound(t, CoordVector::basis(1), 8));
  CHECK(dominance_pruning_sound(geometric_pair(), CoordVector::basis(1), 8));
  CHECK_FALSE(dominance_pruning_sound(geometric_pair(), CoordVector{{1, Scalar(1.0, 1.0)}}, 8));
  UniformOptions o;
  o.strategy = Strategy::exact_pruned;
  CHECK(uniform_joint_sequence(t, CoordVector::basis(1), 6, o).strategy == "exact");
}

TEST_CASE("budget overrun reports the completed depth") {
  UniformOptions o;
  o.strategy = Strategy::exact;
  o.budget = 100;
  try {
    uniform_joint_sequence(geometric_pair(), CoordVector::basis(1), 12, o);
    FAIL("expected BudgetExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BudgetExceeded);
    CHECK(e.completed_depth == 5);
  }
}

TEST_CASE("periodic candidates are primitive") {
  const auto c = periodic_candidates(2, 3);
  CHECK(c.size() == 10);
  CHECK(c.front() == Word{1});
  CHECK(c[2] == Word{1, 2});
  for (const auto& w : c) CHECK_FALSE((w.size() == 2 && w[0] == w[1]));
}

TEST_CASE("verdicts") {
  const auto geo = certify_joint(geometric_pair(), CoordVector::basis(1), 12, 0.05);
  CHECK(geo.status == QnilStatus::certified_decaying);
  CHECK_FALSE(geo.witness);

  const auto ex = certify_joint(paper_pair(), CoordVector::basis(3), 16, 0.3);
  CHECK(ex.status == QnilStatus::refuted);
  REQUIRE(ex.witness);
  CHECK(ex.witness->size() == 2);

  const auto tight = certify_joint(geometric_pair(), CoordVector::basis(1), 12, 1e-6);
  CHECK(tight.status == QnilStatus::inconclusive);

  CertifyOptions per_word;
  per_word.mode = CertifyOptions::Mode::per_word_sampled;
  per_word.sample_count = 8;
  per_word.seed = 5;
  const auto sampled = certify_joint(geometric_pair(), CoordVector::basis(1), 20, 0.05, per_word);
  CHECK(sampled.status == QnilStatus::certified_decaying);
  CHECK(sampled.strategy == "sampled(8)");

  CertifyOptions beam;
  beam.uniform.strategy = Strategy::beam;
  beam.uniform.beam_width = 2;
  CHECK(certify_joint(geometric_pair(), CoordVector::basis(1), 12, 0.05, beam).status != QnilStatus::certified_decaying);

  CHECK(code_of([] { certify_joint(paper_pair(), CoordVector::basis(3), 3, 0.3); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { certify_joint(paper_pair(), CoordVector(), 8, 0.3); }) == ErrorCode::InvalidSeed);
}

TEST_CASE("polynomials without constant term") {
  const OperatorTuple t = geometric_pair();
  const Polynomial p{{1.0, {1, 2}}};
  CHECK(polynomial_operator(t, p).apply(CoordVector::basis(1)) ==
        t.word_operator({1, 2}).apply(CoordVector::basis(1)));
  CHECK(code_of([&] { polynomial_operator(t, {{1.0, {}}, {1.0, {1}}}); }) == ErrorCode::ConstantTermPresent);
  const auto r = polynomial_radius(t, {{1.0, {1}}, {1.0, {2}}}, CoordVector::basis(1), 10);
  const auto bound = polynomial_log_bound(t, {{1.0, {1}}, {1.0, {2}}}, CoordVector::basis(1), 10);
  for (int n = 1; n <= 10; ++n) {
    REQUIRE(bound[static_cast<std::size_t>(n - 1)]);
    CHECK(r.at(n).log_norm <= *bound[static_cast<std::size_t>(n - 1)] + 1e-12);
  }
}

TEST_CASE("joint spectral radius brackets") {
  const auto id = jsr_estimate(OperatorTuple({Operator::identity()}), 8, 4);
  CHECK(id.lower == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(id.upper == doctest::Approx(1.0).epsilon(1e-9));

  const auto ex = jsr_estimate(paper_pair(), 32, 6);
  CHECK(ex.lower <= ex.upper + 1e-9);
  CHECK(ex.lower == doctest::Approx(1.0).epsilon(1e-6));

  const auto m = Operator::matrix(DenseMatrix::from_row_major(2, 2, std::vector<Scalar>{0.0, 2.0, 0.0, 0.0}));
  const auto nil = jsr_estimate(OperatorTuple({m}), 2, 4);
  CHECK(nil.lower == 0.0);
  CHECK(nil.upper <= 2.0 + 1e-12);
}
