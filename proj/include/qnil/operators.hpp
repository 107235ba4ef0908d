#pragma once

// Continuous linear operators in Schauder-basis coordinates.
//
// Two evaluation regimes coexist. Banded oracles act exactly on finitely
// supported vectors, so shift-type operators on l2 never see truncation
// error. Finite matrices are d x d truncations whose dimension is explicit.
// Sums, scalings and compositions are structural: products of operators are
// never materialized unless a caller asks for a truncation.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qnil/coordspace.hpp"
#include "qnil/dense.hpp"
#include "qnil/types.hpp"

namespace qnil {

/// Weight sequence w(n), n >= 1, for weighted shifts.
struct WeightSpec {
  enum class Kind { reciprocal, reciprocal_factorial, geometric, explicit_list, constant };

  Kind kind = Kind::constant;
  double ratio = 0.0;             // geometric: w(n) = ratio^n
  Scalar value{1.0};              // constant
  std::vector<Scalar> values;     // explicit_list: w(n) = values[n-1], 0 beyond

  static WeightSpec reciprocal() { return with_kind(Kind::reciprocal); }
  static WeightSpec reciprocal_factorial() { return with_kind(Kind::reciprocal_factorial); }
  static WeightSpec geometric(double r) {
    WeightSpec w = with_kind(Kind::geometric);
    w.ratio = r;
    return w;
  }
  static WeightSpec constant(Scalar c) {
    WeightSpec w = with_kind(Kind::constant);
    w.value = c;
    return w;
  }
  static WeightSpec explicit_list(std::vector<Scalar> v) {
    WeightSpec w = with_kind(Kind::explicit_list);
    w.values = std::move(v);
    return w;
  }

  Scalar operator()(Index n) const;

 private:
  static WeightSpec with_kind(Kind k) {
    WeightSpec w;
    w.kind = k;
    return w;
  }
};

class Operator {
 public:
  enum class Kind { banded_oracle, finite_matrix, sum, scaled, composition, rank_one_piece };

  /// entry(row, col), both 1-based.
  using EntryFn = std::function<Scalar(Index, Index)>;

  /// entry must vanish whenever row - col > lower or col - row > upper.
  static Operator banded(EntryFn entry, Index lower, Index upper, std::string label,
                         Index max_index = kDefaultMaxIndex);
  static Operator matrix(DenseMatrix m, std::string label = "matrix");
  static Operator identity();
  static Operator zero();
  static Operator sum(std::vector<Operator> terms);
  static Operator scaled(Scalar c, Operator op);
  /// factors are leftmost-first: {A, B} is A*B, B acts first.
  static Operator compose(std::vector<Operator> factors);
  /// e_col -> value * e_row, every other basis vector -> 0.
  static Operator rank_one(Index row, Index col, Scalar value);

  Kind kind() const;
  const std::string& label() const;
  Operator relabeled(std::string label) const;

  /// Exact action on a finitely supported vector. Throws SupportOverflow
  /// (banded growth past max_index) or DimensionMismatch (finite matrix).
  CoordVector apply(const CoordVector& x) const;
  CoordVector column(Index j) const { return apply(CoordVector::basis(j)); }
  Scalar entry(Index row, Index col) const;

  /// Dimension of the finite-matrix members involved, if any.
  std::optional<std::size_t> dimension() const;
  /// Upper bound on the largest output index given inputs supported in [1, max_in].
  Index reach_bound(Index max_in) const;

  /// True entries of the infinite matrix on the window [1, d]^2.
  DenseMatrix truncate(std::size_t d) const;

  struct Node;

 private:
  explicit Operator(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

Operator compose(const Operator& s, const Operator& t);
Operator operator+(const Operator& a, const Operator& b);
Operator operator*(Scalar c, const Operator& a);

/// Ordered N-tuple (T_1, ..., T_N), N >= 1. Member access is 1-based.
class OperatorTuple {
 public:
  explicit OperatorTuple(std::vector<Operator> members);

  std::size_t size() const noexcept { return members_.size(); }
  const Operator& member(std::size_t i) const;  // 1-based
  const std::vector<Operator>& members() const noexcept { return members_; }

  /// T_{w_1} ... T_{w_n} as a structural composition. Throws BadWordIndex.
  Operator word_operator(const Word& w) const;
  void check_word(const Word& w) const;

  /// Largest output index reachable after `steps` applications from inputs in [1, max_in].
  Index reach_bound(Index max_in, std::size_t steps) const;

 private:
  std::vector<Operator> members_;
};

Operator make_forward_shift(const WeightSpec& weight);
Operator make_backward_shift(const WeightSpec& weight);

/// T_1 e_n = e_{n-1} (n >= 2), T_1 e_1 = 0; T_2 e_n = (1/n) e_{n+1}.
OperatorTuple paper_pair();

struct PositivityVerdict {
  struct Witness {
    Index row;
    Index col;
    Scalar entry;
  };
  bool positive = true;
  std::optional<Witness> witness;
  std::size_t probe_dimension = 0;
};

/// Entrywise check over columns 1..probe_dim (all rows each column reaches).
PositivityVerdict is_positive(const Operator& t, std::size_t probe_dim, double tol = 0.0);

Operator rank_one_piece(const Operator& a, Index i, Index j, std::size_t probe_dim);

/// b_ij = w_ij * a_ij on [1, d]^2.
Operator weighted_operator(const Operator& a, const DenseMatrix& weights, std::size_t d);

/// w_ij = t_ij / a_ij on the support of A; throws ZeroPatternViolation when
/// |a_ij| <= tol < |t_ij|.
DenseMatrix derive_weights(const Operator& a, const Operator& t, std::size_t d, double tol);

}  // namespace qnil
