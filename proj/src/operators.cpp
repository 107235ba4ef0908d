#include "qnil/operators.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <variant>

#include "qnil/error.hpp"
#include "qnil/kernels.hpp"

namespace qnil {

namespace {

// 1/n! for n <= 170; smaller values are below the normal double range and
// are treated as zero.
const std::vector<double>& reciprocal_factorials() {
  static const std::vector<double> table = [] {
    std::vector<double> t(171);
    t[0] = 1.0;
    for (std::size_t n = 1; n < t.size(); ++n) t[n] = t[n - 1] / static_cast<double>(n);
    return t;
  }();
  return table;
}

}  // namespace

Scalar WeightSpec::operator()(Index n) const {
  switch (kind) {
    case Kind::reciprocal:
      return 1.0 / static_cast<double>(n);
    case Kind::reciprocal_factorial: {
      const auto& t = reciprocal_factorials();
      return n < t.size() ? t[n] : 0.0;
    }
    case Kind::geometric:
      return std::pow(ratio, static_cast<double>(n));
    case Kind::explicit_list:
      return n >= 1 && n <= values.size() ? values[n - 1] : Scalar{};
    case Kind::constant:
      return value;
  }
  return {};
}

struct BandedNode {
  Operator::EntryFn entry;
  Index lower;
  Index upper;
  Index max_index;
};
struct MatrixNode {
  DenseMatrix m;
};
struct SumNode {
  std::vector<Operator> terms;
};
struct ScaledNode {
  Scalar c;
  Operator op;
};
struct CompositionNode {
  std::vector<Operator> factors;  // leftmost-first
};
struct RankOneNode {
  Index row;
  Index col;
  Scalar value;
};

struct Operator::Node {
  std::string label;
  std::variant<BandedNode, MatrixNode, SumNode, ScaledNode, CompositionNode, RankOneNode> body;
};

Operator Operator::banded(EntryFn entry, Index lower, Index upper, std::string label,
                          Index max_index) {
  return Operator(std::make_shared<const Node>(
      Node{std::move(label), BandedNode{std::move(entry), lower, upper, max_index}}));
}

Operator Operator::matrix(DenseMatrix m, std::string label) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "finite-matrix operators must be square with d >= 1");
  }
  return Operator(std::make_shared<const Node>(Node{std::move(label), MatrixNode{std::move(m)}}));
}

Operator Operator::identity() {
  return banded([](Index r, Index c) { return r == c ? Scalar{1.0} : Scalar{}; }, 0, 0, "I");
}

Operator Operator::zero() {
  return banded([](Index, Index) { return Scalar{}; }, 0, 0, "0");
}

Operator Operator::sum(std::vector<Operator> terms) {
  if (terms.empty()) return zero();
  std::string label = "(";
  for (std::size_t i = 0; i < terms.size(); ++i) label += (i ? " + " : "") + terms[i].label();
  label += ")";
  return Operator(std::make_shared<const Node>(Node{std::move(label), SumNode{std::move(terms)}}));
}

Operator Operator::scaled(Scalar c, Operator op) {
  std::string label = "c*" + op.label();
  return Operator(std::make_shared<const Node>(Node{std::move(label), ScaledNode{c, std::move(op)}}));
}

Operator Operator::compose(std::vector<Operator> factors) {
  if (factors.empty()) return identity();
  if (factors.size() == 1) return factors.front();
  std::string label;
  for (std::size_t i = 0; i < factors.size(); ++i) label += (i ? "*" : "") + factors[i].label();
  return Operator(
      std::make_shared<const Node>(Node{std::move(label), CompositionNode{std::move(factors)}}));
}

Operator Operator::rank_one(Index row, Index col, Scalar value) {
  if (row == 0 || col == 0) throw Error(ErrorCode::InvalidArgument, "basis indices are 1-based");
  std::string label = "A[" + std::to_string(row) + "," + std::to_string(col) + "]";
  return Operator(std::make_shared<const Node>(Node{std::move(label), RankOneNode{row, col, value}}));
}

Operator::Kind Operator::kind() const {
  return static_cast<Kind>(node_->body.index());
}

const std::string& Operator::label() const { return node_->label; }

Operator Operator::relabeled(std::string label) const {
  return Operator(std::make_shared<const Node>(Node{std::move(label), node_->body}));
}

namespace {

struct ApplyVisitor {
  const CoordVector& x;

  CoordVector operator()(const BandedNode& b) const {
    CoordAccumulator acc;
    acc.reserve(x.nnz() * static_cast<std::size_t>(b.lower + b.upper + 1));
    for (std::size_t p = 0; p < x.nnz(); ++p) {
      const Index j = x.indices()[p];
      const Scalar xj = x.values()[p];
      const Index first = j > b.upper ? j - b.upper : 1;
      const Index last = j + b.lower;
      for (Index i = first; i <= last; ++i) {
        const Scalar a = b.entry(i, j);
        if (a == Scalar{}) continue;
        if (i > b.max_index) {
          throw Error(ErrorCode::SupportOverflow,
                      "banded action reached index " + std::to_string(i) + " beyond the cap " +
                          std::to_string(b.max_index));
        }
        acc.add(i, a * xj);
      }
    }
    return acc.finish();
  }

  CoordVector operator()(const MatrixNode& m) const {
    const std::size_t d = m.m.rows();
    if (x.max_index() > d) {
      throw Error(ErrorCode::DimensionMismatch,
                  "vector support exceeds matrix dimension " + std::to_string(d));
    }
    DenseVector y(d);
    const auto& k = kernels::active();
    for (std::size_t p = 0; p < x.nnz(); ++p) {
      k.axpy(x.values()[p], m.m.col(x.indices()[p] - 1).data(), y.data(), d);
    }
    return CoordVector::from_dense(y);
  }

  CoordVector operator()(const SumNode& s) const {
    CoordAccumulator acc;
    for (const Operator& t : s.terms) {
      const CoordVector y = t.apply(x);
      for (std::size_t p = 0; p < y.nnz(); ++p) acc.add(y.indices()[p], y.values()[p]);
    }
    return acc.finish();
  }

  CoordVector operator()(const ScaledNode& s) const { return s.op.apply(x).scaled(s.c); }

  CoordVector operator()(const CompositionNode& c) const {
    CoordVector y = x;
    for (auto it = c.factors.rbegin(); it != c.factors.rend(); ++it) {
      if (y.is_zero()) break;
      y = it->apply(y);
    }
    return y;
  }

  CoordVector operator()(const RankOneNode& r) const {
    const Scalar xj = x.coeff(r.col);
    if (xj == Scalar{} || r.value == Scalar{}) return {};
    return CoordVector::basis(r.row, r.value * xj);
  }
};

}  // namespace

CoordVector Operator::apply(const CoordVector& x) const {
  return std::visit(ApplyVisitor{x}, node_->body);
}

Scalar Operator::entry(Index row, Index col) const {
  if (row == 0 || col == 0) throw Error(ErrorCode::InvalidArgument, "basis indices are 1-based");
  if (const auto* b = std::get_if<BandedNode>(&node_->body)) {
    if (row > col && row - col > b->lower) return {};
    if (col > row && col - row > b->upper) return {};
    return b->entry(row, col);
  }
  if (const auto* m = std::get_if<MatrixNode>(&node_->body)) {
    if (row > m->m.rows() || col > m->m.cols()) return {};
    return m->m(row - 1, col - 1);
  }
  if (const auto d = dimension(); d && col > *d) return {};
  return column(col).coeff(row);
}

std::optional<std::size_t> Operator::dimension() const {
  struct Visitor {
    std::optional<std::size_t> operator()(const BandedNode&) const { return std::nullopt; }
    std::optional<std::size_t> operator()(const MatrixNode& m) const { return m.m.rows(); }
    std::optional<std::size_t> operator()(const SumNode& s) const { return first(s.terms); }
    std::optional<std::size_t> operator()(const ScaledNode& s) const { return s.op.dimension(); }
    std::optional<std::size_t> operator()(const CompositionNode& c) const { return first(c.factors); }
    std::optional<std::size_t> operator()(const RankOneNode&) const { return std::nullopt; }
    static std::optional<std::size_t> first(const std::vector<Operator>& ops) {
      for (const Operator& op : ops)
        if (auto d = op.dimension()) return d;
      return std::nullopt;
    }
  };
  return std::visit(Visitor{}, node_->body);
}

Index Operator::reach_bound(Index max_in) const {
  struct Visitor {
    Index max_in;
    Index operator()(const BandedNode& b) const { return max_in + b.lower; }
    Index operator()(const MatrixNode& m) const { return m.m.rows(); }
    Index operator()(const SumNode& s) const {
      Index r = 0;
      for (const Operator& t : s.terms) r = std::max(r, t.reach_bound(max_in));
      return r;
    }
    Index operator()(const ScaledNode& s) const { return s.op.reach_bound(max_in); }
    Index operator()(const CompositionNode& c) const {
      Index r = max_in;
      for (auto it = c.factors.rbegin(); it != c.factors.rend(); ++it) r = it->reach_bound(r);
      return r;
    }
    Index operator()(const RankOneNode& r) const { return std::max(max_in, r.row); }
  };
  return std::visit(Visitor{max_in}, node_->body);
}

DenseMatrix Operator::truncate(std::size_t d) const {
  DenseMatrix out(d, d);
  const std::size_t cols = std::min(d, dimension().value_or(d));
  for (std::size_t j = 1; j <= cols; ++j) {
    const CoordVector c = column(j);
    for (std::size_t p = 0; p < c.nnz() && c.indices()[p] <= d; ++p) {
      out(c.indices()[p] - 1, j - 1) = c.values()[p];
    }
  }
  return out;
}

Operator compose(const Operator& s, const Operator& t) { return Operator::compose({s, t}); }
Operator operator+(const Operator& a, const Operator& b) { return Operator::sum({a, b}); }
Operator operator*(Scalar c, const Operator& a) { return Operator::scaled(c, a); }

OperatorTuple::OperatorTuple(std::vector<Operator> members) : members_(std::move(members)) {
  if (members_.empty()) throw Error(ErrorCode::InvalidArgument, "an operator tuple needs N >= 1 members");
  std::optional<std::size_t> dim;
  for (const Operator& m : members_) {
    if (const auto d = m.dimension()) {
      if (dim && *dim != *d) {
        throw Error(ErrorCode::DimensionMismatch, "finite-matrix members must share one dimension");
      }
      dim = d;
    }
  }
}

const Operator& OperatorTuple::member(std::size_t i) const {
  if (i == 0 || i > members_.size()) {
    throw Error(ErrorCode::BadWordIndex, "member index " + std::to_string(i) + " outside [1, " +
                                             std::to_string(members_.size()) + "]");
  }
  return members_[i - 1];
}

void OperatorTuple::check_word(const Word& w) const {
  for (const auto i : w) (void)member(i);
}

Operator OperatorTuple::word_operator(const Word& w) const {
  std::vector<Operator> factors;
  factors.reserve(w.size());
  for (const auto i : w) factors.push_back(member(i));
  return Operator::compose(std::move(factors));
}

Index OperatorTuple::reach_bound(Index max_in, std::size_t steps) const {
  Index r = max_in;
  for (std::size_t s = 0; s < steps; ++s) {
    Index next = r;
    for (const Operator& m : members_) next = std::max(next, m.reach_bound(r));
    if (next == r) break;
    r = next;
  }
  return r;
}

Operator make_forward_shift(const WeightSpec& weight) {
  return Operator::banded(
      [weight](Index row, Index col) { return row == col + 1 ? weight(col) : Scalar{}; }, 1, 0,
      "F");
}

Operator make_backward_shift(const WeightSpec& weight) {
  return Operator::banded(
      [weight](Index row, Index col) {
        return col >= 2 && row + 1 == col ? weight(col) : Scalar{};
      },
      0, 1, "B");
}

OperatorTuple paper_pair() {
  auto t1 = Operator::banded(
      [](Index row, Index col) { return col >= 2 && row + 1 == col ? Scalar{1.0} : Scalar{}; }, 0,
      1, "T1");
  auto t2 = Operator::banded(
      [](Index row, Index col) {
        return row == col + 1 ? Scalar{1.0 / static_cast<double>(col)} : Scalar{};
      },
      1, 0, "T2");
  return OperatorTuple({std::move(t1), std::move(t2)});
}

PositivityVerdict is_positive(const Operator& t, std::size_t probe_dim, double tol) {
  if (probe_dim == 0) throw Error(ErrorCode::InvalidArgument, "probe dimension must be >= 1");
  PositivityVerdict verdict;
  verdict.probe_dimension = probe_dim;
  const std::size_t cols = std::min(probe_dim, t.dimension().value_or(probe_dim));
  for (std::size_t j = 1; j <= cols; ++j) {
    const CoordVector c = t.column(j);
    for (std::size_t p = 0; p < c.nnz(); ++p) {
      const Scalar v = c.values()[p];
      if (v.real() < -tol || std::fabs(v.imag()) > tol) {
        verdict.positive = false;
        verdict.witness = PositivityVerdict::Witness{c.indices()[p], j, v};
        return verdict;
      }
    }
  }
  return verdict;
}

Operator rank_one_piece(const Operator& a, Index i, Index j, std::size_t probe_dim) {
  if (i == 0 || j == 0 || i > probe_dim || j > probe_dim) {
    throw Error(ErrorCode::InvalidArgument, "rank-one piece indices must lie in [1, probe_dim]");
  }
  return Operator::rank_one(i, j, a.entry(i, j));
}

Operator weighted_operator(const Operator& a, const DenseMatrix& weights, std::size_t d) {
  if (weights.rows() != d || weights.cols() != d) {
    throw Error(ErrorCode::DimensionMismatch, "weight matrix must be " + std::to_string(d) + "x" +
                                                  std::to_string(d));
  }
  DenseMatrix b = a.truncate(d);
  for (std::size_t c = 0; c < d; ++c)
    for (std::size_t r = 0; r < d; ++r) b(r, c) *= weights(r, c);
  return Operator::matrix(std::move(b), "W.*" + a.label());
}

DenseMatrix derive_weights(const Operator& a, const Operator& t, std::size_t d, double tol) {
  const DenseMatrix am = a.truncate(d);
  const DenseMatrix tm = t.truncate(d);
  DenseMatrix w(d, d);
  for (std::size_t c = 0; c < d; ++c) {
    for (std::size_t r = 0; r < d; ++r) {
      const Scalar av = am(r, c);
      const Scalar tv = tm(r, c);
      if (std::abs(av) > tol) {
        w(r, c) = tv / av;
      } else if (std::abs(tv) > tol) {
        Error e(ErrorCode::ZeroPatternViolation,
                "t(" + std::to_string(r + 1) + "," + std::to_string(c + 1) +
                    ") is nonzero where a vanishes");
        e.position = {r + 1, c + 1};
        throw e;
      }
    }
  }
  return w;
}

}  // namespace qnil
