#include <doctest.h>

#include <cmath>

#include "qnil/error.hpp"
#include "qnil/operators.hpp"

using namespace qnil;

TEST_CASE("weight sequences") {
  CHECK(WeightSpec::reciprocal()(4) == Scalar(0.25));
  CHECK(WeightSpec::reciprocal_factorial()(4) == Scalar(1.0 / 24.0));
  CHECK(WeightSpec::reciprocal_factorial()(200) == Scalar(0.0));
  CHECK(std::abs(WeightSpec::geometric(0.5)(3) - Scalar(0.125)) < 1e-17);
  CHECK(WeightSpec::constant(Scalar(0.0, 2.0))(9) == Scalar(0.0, 2.0));
  const auto w = WeightSpec::explicit_list({1.0, 2.0});
  CHECK(w(2) == Scalar(2.0));
  CHECK(w(3) == Scalar(0.0));
}

TEST_CASE("forward shift with factorial weights") {
  const Operator f = make_forward_shift(WeightSpec::reciprocal_factorial());
  CHECK(f.apply(CoordVector::basis(2)) == CoordVector{{3, 0.5}});
  CHECK(f.entry(3, 2) == Scalar(0.5));
  CHECK(f.entry(2, 3) == Scalar(0.0));
  CHECK(f.label() == "F");
}

TEST_CASE("backward shift annihilates e_1") {
  const Operator b = make_backward_shift(WeightSpec::constant(2.0));
  CHECK(b.apply(CoordVector::basis(1)).is_zero());
  CHECK(b.apply(CoordVector::basis(4)) == CoordVector{{3, 2.0}});
}

TEST_CASE("example pair") {
  const OperatorTuple t = paper_pair();
  REQUIRE(t.size() == 2);
  CHECK(t.member(1).label() == "T1");
  CHECK(t.member(1).apply(CoordVector::basis(5)) == CoordVector::basis(4));
  CHECK(t.member(1).apply(CoordVector::basis(1)).is_zero());
  CHECK(t.member(2).apply(CoordVector::basis(4)) == CoordVector{{5, 0.25}});
  // T1 T2 e_k = e_k / k and T2 T1 e_k = e_k / (k - 1).
  for (Index k = 2; k <= 8; ++k) {
    const Scalar inv_k(1.0 / static_cast<double>(k));
    CHECK(compose(t.member(1), t.member(2)).apply(CoordVector::basis(k)) == CoordVector::basis(k, inv_k));
    const Scalar inv_km1(1.0 / static_cast<double>(k - 1));
    CHECK(compose(t.member(2), t.member(1)).apply(CoordVector::basis(k)) == CoordVector::basis(k, inv_km1));
  }
}

TEST_CASE("structural combinations") {
  const Operator f = make_forward_shift(WeightSpec::constant(1.0));
  const Operator i = Operator::identity();
  const Operator s = i + f;
  CHECK(s.kind() == Operator::Kind::sum);
  CHECK(s.apply(CoordVector::basis(1)) == CoordVector{{1, 1.0}, {2, 1.0}});
  CHECK((Scalar(3.0) * f).apply(CoordVector::basis(1)) == CoordVector{{2, 3.0}});
  CHECK(Operator::compose({f, f}).apply(CoordVector::basis(1)) == CoordVector::basis(3));
  CHECK(Operator::zero().apply(CoordVector::basis(2)).is_zero());
  CHECK(Operator::rank_one(1, 3, 2.0).apply(CoordVector{{3, 1.0}, {4, 1.0}}) == CoordVector{{1, 2.0}});
  CHECK(s.reach_bound(5) == 6);
}

TEST_CASE("truncation holds the true entries") {
  const Operator f = make_forward_shift(WeightSpec::reciprocal());
  const DenseMatrix m = f.truncate(4);
  CHECK(m(1, 0) == Scalar(1.0));
  CHECK(m(3, 2) == Scalar(1.0 / 3.0));
  CHECK(m(0, 3) == Scalar(0.0));
}

TEST_CASE("finite matrices") {
  const Operator m = Operator::matrix(DenseMatrix::from_row_major(2, 2, std::vector<Scalar>{0.0, 1.0, 1.0, 0.0}));
  CHECK(m.apply(CoordVector::basis(1)) == CoordVector::basis(2));
  CHECK(m.dimension() == std::optional<std::size_t>(2));
  try {
    m.apply(CoordVector::basis(3));
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
  const Operator three = Operator::matrix(DenseMatrix::identity(3));
  CHECK_THROWS_AS(OperatorTuple({m, three}), Error);
}

TEST_CASE("support overflow past the index cap") {
  const Operator f = Operator::banded(
      [](Index r, Index c) { return r == c + 1 ? Scalar(1.0) : Scalar(); }, 1, 0, "capped", 10);
  CHECK_NOTHROW(f.apply(CoordVector::basis(9)));
  try {
    f.apply(CoordVector::basis(10));
    FAIL("expected SupportOverflow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SupportOverflow);
  }
}

TEST_CASE("tuple words") {
  const OperatorTuple t = paper_pair();
  CHECK(t.word_operator({1, 2}).apply(CoordVector::basis(3)) == CoordVector::basis(3, 1.0 / 3.0));
  CHECK(t.word_operator({2, 1}).apply(CoordVector::basis(3)) == CoordVector::basis(3, 0.5));
  try {
    t.check_word({1, 3});
    FAIL("expected BadWordIndex");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadWordIndex);
  }
  CHECK_THROWS_AS(t.member(0), Error);
  CHECK_THROWS_AS(OperatorTuple({}), Error);
  CHECK(t.reach_bound(3, 4) == 7);
}

TEST_CASE("positivity reports the first violation") {
  CHECK(is_positive(make_forward_shift(WeightSpec::geometric(0.5)), 16).positive);
  const auto m = Operator::matrix(DenseMatrix::from_row_major(2, 2, std::vector<Scalar>{1.0, -2.0, 0.0, 1.0}));
  const auto v = is_positive(m, 2);
  CHECK_FALSE(v.positive);
  REQUIRE(v.witness);
  CHECK(v.witness->row == 1);
  CHECK(v.witness->col == 2);
  CHECK(v.witness->entry == Scalar(-2.0));
  CHECK_FALSE(is_positive(make_forward_shift(WeightSpec::constant(Scalar(0.0, 1.0))), 4).positive);
}

TEST_CASE("rank-one pieces") {
  const Operator f = make_forward_shift(WeightSpec::reciprocal());
  const Operator p = rank_one_piece(f, 3, 2, 8);
  CHECK(p.apply(CoordVector::basis(2)) == CoordVector{{3, 0.5}});
  CHECK(p.apply(CoordVector::basis(3)).is_zero());
}

TEST_CASE("weighted operators and derived weights") {
  const Operator a = make_forward_shift(WeightSpec::constant(1.0));
  DenseMatrix w(4, 4, Scalar(1.0));
  w(2, 1) = Scalar(0.0, 3.0);
  const Operator b = weighted_operator(a, w, 4);
  CHECK(b.apply(CoordVector::basis(2)) == CoordVector{{3, Scalar(0.0, 3.0)}});
  CHECK(b.apply(CoordVector::basis(1)) == CoordVector::basis(2));
  CHECK_THROWS_AS(weighted_operator(a, DenseMatrix(3, 3), 4), Error);

  const DenseMatrix derived = derive_weights(a, Scalar(2.0) * a, 4, 1e-12);
  CHECK(derived(1, 0) == Scalar(2.0));

  const Operator bad = Scalar(2.0) * a + Operator::rank_one(1, 3, 0.5);
  try {
    derive_weights(a, bad, 4, 1e-12);
    FAIL("expected ZeroPatternViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroPatternViolation);
    REQUIRE(e.position);
    CHECK(e.position->first == 1);
    CHECK(e.position->second == 3);
  }
}
