#pragma once

// Coordinates relative to a fixed Schauder basis (e_1, e_2, ...), the
// positive cone they span, and the coefficient functionals f_k.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include "qnil/dense.hpp"
#include "qnil/types.hpp"

namespace qnil {

/// Finitely supported coordinate sequence. Indices are kept sorted and
/// unique; exact zeros are never stored. Indices and values live in
/// separate arrays so that norms run on the contiguous value block.
class CoordVector {
 public:
  CoordVector() = default;
  /// Accepts unsorted input with repeated indices (summed). Index 0 is rejected.
  explicit CoordVector(std::vector<std::pair<Index, Scalar>> entries);
  CoordVector(std::initializer_list<std::pair<Index, Scalar>> entries);

  static CoordVector basis(Index k, Scalar value = 1.0);
  /// Entry i of `dense` becomes coordinate i+1.
  static CoordVector from_dense(std::span<const Scalar> dense);

  bool is_zero() const noexcept { return indices_.empty(); }
  std::size_t nnz() const noexcept { return indices_.size(); }
  std::span<const Index> indices() const noexcept { return indices_; }
  std::span<const Scalar> values() const noexcept { return values_; }
  /// Largest index in the support, 0 for the zero vector.
  Index max_index() const noexcept { return indices_.empty() ? 0 : indices_.back(); }
  Index min_index() const noexcept { return indices_.empty() ? 0 : indices_.front(); }

  Scalar coeff(Index k) const;

  /// Dense coordinates on [1, d]; entries beyond d are dropped.
  DenseVector to_dense(std::size_t d) const;
  /// Restriction to indices <= d.
  CoordVector truncated(Index d) const;

  CoordVector scaled(Scalar alpha) const;
  /// Divides every value by a positive real.
  CoordVector divided(double s) const;

  friend CoordVector operator+(const CoordVector& a, const CoordVector& b);
  friend CoordVector operator-(const CoordVector& a, const CoordVector& b);
  friend bool operator==(const CoordVector&, const CoordVector&) = default;

 private:
  struct Sorted {};
  CoordVector(Sorted, std::vector<Index> idx, std::vector<Scalar> val)
      : indices_(std::move(idx)), values_(std::move(val)) {}
  friend class CoordAccumulator;

  std::vector<Index> indices_;
  std::vector<Scalar> values_;
};

/// Collects (index, value) contributions and produces a normalized vector.
/// Contributions to the same index are summed in insertion order.
class CoordAccumulator {
 public:
  void reserve(std::size_t n) { entries_.reserve(n); }
  void add(Index i, Scalar v) { entries_.emplace_back(i, v); }
  CoordVector finish();

 private:
  std::vector<std::pair<Index, Scalar>> entries_;
};

enum class NormKind { one, two, sup };

double vec_norm(const CoordVector& x, NormKind p = NormKind::two);

/// f_k(x): the k-th expansion coefficient.
Scalar coord_functional(Index k, const CoordVector& x);

struct ConeVerdict {
  bool in_cone = true;
  double worst_violation = 0.0;
};

/// Membership in C = {sum t_j e_j : t_j >= 0} up to `tol`.
ConeVerdict in_cone(const CoordVector& x, double tol = 0.0);

/// Smallest k with Re f_k(y0) > tol. Throws NoPositiveCoordinate.
Index dominating_coordinate(const CoordVector& y0, double tol = 0.0);

/// u <= v in the cone order, for vectors with exact nonnegative real entries.
/// Each side is multiplied by exp(its log scale) before comparing.
bool dominated_by(const CoordVector& u, double u_log_scale, const CoordVector& v,
                  double v_log_scale);

}  // namespace qnil
