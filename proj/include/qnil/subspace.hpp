#pragma once

// Constructive common invariant subspaces for positive N-tuples that are
// joint locally quasinilpotent at a cone vector.
//
// Closures are modeled by spans on the truncation window [1, d]; every
// result records d. An orbit generated to word length `depth` is only known
// to satisfy T_j(Y_{depth-1}) in Y_depth, so invariance residuals are taken
// over the interior Y_{depth-1}. When the orbit saturates before `depth`
// the interior is all of Y.

#include <cstdint>
#include <optional>
#include <vector>

#include "qnil/coordspace.hpp"
#include "qnil/dense.hpp"
#include "qnil/operators.hpp"
#include "qnil/quasinil.hpp"

namespace qnil {

struct OrbitGenParams {
  int depth = 12;
  double rank_tol = 1e-10;
  std::size_t truncation_dim = 16;
  std::uint64_t budget = kDefaultBudget;  // word applications
  unsigned workers = 1;

  void validate() const;
};

struct OrbitVectors {
  std::vector<CoordVector> vectors;  // in generation order
  std::vector<int> depths;           // word length that produced each vector
  std::size_t interior_count = 0;    // leading vectors spanning Y_{depth-1}
  bool saturated = false;            // a level added nothing new
  bool budget_exhausted = false;
  std::uint64_t applications = 0;
};

/// Breadth-first images T_w seed, |w| = 1..depth, on the window. A vector is
/// kept only if its component orthogonal to the kept span exceeds
/// rank_tol * its norm; only kept vectors are expanded further.
OrbitVectors orbit_vectors(const OperatorTuple& tuple, const CoordVector& seed,
                           const OrbitGenParams& params);

/// Modified Gram-Schmidt with one full reorthogonalization pass.
std::vector<CoordVector> span_basis(const std::vector<CoordVector>& vectors, double rank_tol,
                                    std::size_t truncation_dim);

/// max over words w with 1 <= |w| <= depth of |f_k(T_w e_k)|.
double projection_vanishing_check(const OperatorTuple& tuple, Index k, int depth,
                                  std::uint64_t budget = kDefaultBudget, unsigned workers = 1);

enum class SubspaceKind { orbit, kernel };

const char* to_string(SubspaceKind kind);

struct SubspaceChecks {
  double fk_vanishing_max = 0.0;
  std::vector<double> invariance_residuals;  // per member, over the interior
  std::vector<double> kernel_residuals;      // kernel kind: max ||T_i q||
  std::size_t dimension = 0;
  std::size_t interior_dimension = 0;
  std::size_t truncation_dim = 0;
  bool nontrivial = false;
  bool saturated = false;
  bool degenerate_orbit = false;
  bool budget_exhausted = false;

  friend bool operator==(const SubspaceChecks&, const SubspaceChecks&) = default;
};

struct SubspaceResult {
  SubspaceKind kind = SubspaceKind::orbit;
  std::vector<CoordVector> basis;  // orthonormal, supported on [1, d]
  std::optional<Index> anchor_index;
  SubspaceChecks checks;
  std::optional<std::vector<Index>> ideal_support;

  friend bool operator==(const SubspaceResult&, const SubspaceResult&) = default;
};

/// Common numerical null space of the d x d truncations.
SubspaceResult kernel_intersection(const OperatorTuple& tuple, std::size_t truncation_dim,
                                   double rank_tol);

/// Orbit construction anchored at the dominating coordinate of y0, with the
/// kernel fallback when every member annihilates y0. A refuted verdict is
/// rejected with HypothesisRefuted; other verdicts are trusted.
SubspaceResult common_invariant_subspace(const OperatorTuple& tuple, const CoordVector& y0,
                                         const OrbitGenParams& params, const QnilVerdict& verdict);

struct IdealSupport {
  std::vector<Index> support;
  bool is_ideal = false;
};

IdealSupport ideal_support(const SubspaceResult& result, double tol);

struct CommutantCheck {
  double commute_residual = 0.0;
  bool positive = false;
  double invariance_residual = 0.0;
};

CommutantCheck commutant_invariance(const SubspaceResult& result, const Operator& a,
                                    const OperatorTuple& tuple, double tol);

struct WeightedSubspaceResult {
  SubspaceResult subspace;
  std::vector<double> b_residuals;  // per member, max ||(I-Q) B_k e_j|| over the interior
};

/// Coordinate ideal generated from the anchor under the support pattern of
/// A, checked for invariance under B_k = (w_ij a_ij).
WeightedSubspaceResult weighted_invariant_subspace(const OperatorTuple& a_tuple,
                                                   const std::vector<DenseMatrix>& weights,
                                                   const CoordVector& y0,
                                                   const OrbitGenParams& params,
                                                   const QnilVerdict& verdict);

/// Derives weights from a zero-pattern-compatible T_tuple and delegates.
WeightedSubspaceResult corollary_subspace(const OperatorTuple& a_tuple,
                                          const OperatorTuple& t_tuple, const CoordVector& y0,
                                          const OrbitGenParams& params,
                                          const QnilVerdict& verdict);

}  // namespace qnil
