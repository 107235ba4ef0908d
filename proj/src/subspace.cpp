#include "qnil/subspace.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "qnil/error.hpp"
#include "qnil/kernels.hpp"
#include "qnil/parallel.hpp"

namespace qnil {

const char* to_string(SubspaceKind kind) {
  return kind == SubspaceKind::orbit ? "orbit" : "kernel";
}

void OrbitGenParams::validate() const {
  if (depth < 1) throw Error(ErrorCode::InvalidArgument, "orbit depth must be >= 1");
  if (!(rank_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "rank tolerance must be > 0");
  if (truncation_dim < 2) throw Error(ErrorCode::InvalidArgument, "truncation dimension must be >= 2");
}

namespace {

/// Orthonormal columns on the window, grown by MGS with reorthogonalization.
class OrthoBasis {
 public:
  explicit OrthoBasis(std::size_t d) : d_(d) {}

  /// Returns false (and leaves the basis unchanged) if v is numerically in the span.
  bool try_add(const DenseVector& v, double rank_tol) {
    const double vn = nrm2(v);
    if (vn == 0.0) return false;
    DenseVector w = v;
    orthogonalize(w);
    const double wn = nrm2(w);
    if (wn <= rank_tol * vn) return false;
    kernels::active().div_real(w.data(), wn, w.size());
    q_.push_back(std::move(w));
    return true;
  }

  /// ||(I - Q) v|| against the first `count` basis vectors.
  double residual(DenseVector v, std::size_t count) const {
    orthogonalize(v, count);
    return nrm2(v);
  }
  double residual(DenseVector v) const { return residual(std::move(v), q_.size()); }

  std::size_t size() const { return q_.size(); }
  const std::vector<DenseVector>& vectors() const { return q_; }
  std::size_t dim() const { return d_; }

 private:
  void orthogonalize(DenseVector& w, std::size_t count) const {
    const auto& k = kernels::active();
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < count; ++i) {
        const Scalar c = k.dotc(q_[i].data(), w.data(), d_);
        k.axpy(-c, q_[i].data(), w.data(), d_);
      }
    }
  }
  void orthogonalize(DenseVector& w) const { orthogonalize(w, q_.size()); }

  std::size_t d_;
  std::vector<DenseVector> q_;
};

void require_window(const CoordVector& v, std::size_t d) {
  if (v.max_index() > d) {
    throw Error(ErrorCode::DimensionMismatch, "vector support leaves the truncation window [1, " +
                                                  std::to_string(d) + "]");
  }
}

OrthoBasis basis_from(const std::vector<CoordVector>& basis, std::size_t d) {
  OrthoBasis ob(d);
  for (const CoordVector& q : basis) ob.try_add(q.to_dense(d), 1e-14);
  return ob;
}

/// max over the first `interior` basis vectors q of ||(I - Q) P_d T q||.
double invariance_residual(const Operator& t, const std::vector<CoordVector>& basis,
                           std::size_t interior, const OrthoBasis& ob, std::size_t d) {
  double worst = 0.0;
  for (std::size_t i = 0; i < interior && i < basis.size(); ++i) {
    const CoordVector image = t.apply(basis[i]).truncated(d);
    worst = std::max(worst, ob.residual(image.to_dense(d)));
  }
  return worst;
}

void require_positive_members(const OperatorTuple& tuple, std::size_t d) {
  for (std::size_t i = 1; i <= tuple.size(); ++i) {
    const PositivityVerdict v = is_positive(tuple.member(i), d, 0.0);
    if (!v.positive) {
      Error e(ErrorCode::NotPositive, "member " + std::to_string(i) +
                                          " has a negative or complex entry at (" +
                                          std::to_string(v.witness->row) + "," +
                                          std::to_string(v.witness->col) + ")");
      e.member = i;
      e.position = {v.witness->row, v.witness->col};
      throw e;
    }
  }
}

void require_cone_seed(const CoordVector& y0, double tol) {
  if (y0.is_zero()) throw Error(ErrorCode::InvalidSeed, "the seed vector is zero");
  if (!in_cone(y0, tol).in_cone) throw Error(ErrorCode::InvalidSeed, "the seed vector is not in the cone");
}

void require_not_refuted(const QnilVerdict& verdict) {
  if (verdict.status == QnilStatus::refuted) {
    throw Error(ErrorCode::HypothesisRefuted,
                "joint local quasinilpotence at the seed was refuted; no construction attempted");
  }
}

Index anchor_coordinate(const CoordVector& y0, double rank_tol, std::size_t d) {
  const Index k = dominating_coordinate(y0, rank_tol * vec_norm(y0, NormKind::sup));
  if (k > d) {
    throw Error(ErrorCode::InvalidArgument, "anchor coordinate " + std::to_string(k) +
                                                " lies outside the truncation window");
  }
  return k;
}

bool annihilates(const OperatorTuple& tuple, const CoordVector& v, double tol) {
  const double vn = vec_norm(v);
  for (const Operator& m : tuple.members()) {
    if (vec_norm(m.apply(v)) > tol * vn) return false;
  }
  return true;
}

}  // namespace

OrbitVectors orbit_vectors(const OperatorTuple& tuple, const CoordVector& seed,
                           const OrbitGenParams& params) {
  params.validate();
  if (seed.is_zero()) throw Error(ErrorCode::InvalidSeed, "orbit seed is zero");
  const std::size_t d = params.truncation_dim;
  const std::size_t n_members = tuple.size();

  OrbitVectors out;
  OrthoBasis ob(d);
  std::vector<CoordVector> parents{seed.truncated(d)};
  int completed = 0;
  for (int level = 1; level <= params.depth; ++level) {
    const std::uint64_t needed = static_cast<std::uint64_t>(parents.size()) * n_members;
    if (out.applications + needed > params.budget) {
      out.budget_exhausted = true;
      break;
    }
    out.applications += needed;

    const std::size_t chunks = detail::chunk_count(parents.size(), params.workers);
    std::vector<std::vector<CoordVector>> parts(chunks);
    detail::for_each_chunk(parents.size(), params.workers,
                           [&](std::size_t c, std::size_t begin, std::size_t end) {
                             for (std::size_t p = begin; p < end; ++p)
                               for (std::size_t m = 1; m <= n_members; ++m)
                                 parts[c].push_back(tuple.member(m).apply(parents[p]).truncated(d));
                           });

    std::vector<CoordVector> kept;
    for (auto& part : parts) {
      for (CoordVector& child : part) {
        if (child.is_zero()) continue;
        if (!ob.try_add(child.to_dense(d), params.rank_tol)) continue;
        out.vectors.push_back(child);
        out.depths.push_back(level);
        kept.push_back(std::move(child));
      }
    }
    completed = level;
    if (kept.empty()) {
      out.saturated = true;
      break;
    }
    parents = std::move(kept);
  }

  if (out.saturated) {
    out.interior_count = out.vectors.size();
  } else {
    // Only vectors whose children were all generated count as interior.
    const int last_expanded = out.budget_exhausted ? completed - 1 : params.depth - 1;
    out.interior_count = static_cast<std::size_t>(
        std::count_if(out.depths.begin(), out.depths.end(), [&](int dep) { return dep <= last_expanded; }));
  }
  return out;
}

std::vector<CoordVector> span_basis(const std::vector<CoordVector>& vectors, double rank_tol,
                                    std::size_t truncation_dim) {
  OrthoBasis ob(truncation_dim);
  for (const CoordVector& v : vectors) {
    require_window(v, truncation_dim);
    ob.try_add(v.to_dense(truncation_dim), rank_tol);
  }
  std::vector<CoordVector> out;
  out.reserve(ob.size());
  for (const DenseVector& q : ob.vectors()) out.push_back(CoordVector::from_dense(q));
  return out;
}

double projection_vanishing_check(const OperatorTuple& tuple, Index k, int depth,
                                  std::uint64_t budget, unsigned workers) {
  if (depth < 1) throw Error(ErrorCode::InvalidArgument, "depth must be >= 1");
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "basis indices are 1-based");
  std::vector<CoordVector> frontier{CoordVector::basis(k)};
  double worst = 0.0;
  std::uint64_t used = 0;
  for (int level = 1; level <= depth && !frontier.empty(); ++level) {
    const std::uint64_t needed = static_cast<std::uint64_t>(frontier.size()) * tuple.size();
    if (used + needed > budget) {
      Error e(ErrorCode::BudgetExceeded, "word budget exhausted after depth " + std::to_string(level - 1));
      e.completed_depth = level - 1;
      throw e;
    }
    used += needed;
    const std::size_t chunks = detail::chunk_count(frontier.size(), workers);
    std::vector<std::vector<CoordVector>> parts(chunks);
    std::vector<double> part_max(chunks, 0.0);
    detail::for_each_chunk(frontier.size(), workers, [&](std::size_t c, std::size_t begin, std::size_t end) {
      for (std::size_t f = begin; f < end; ++f) {
        for (std::size_t m = 1; m <= tuple.size(); ++m) {
          CoordVector child = tuple.member(m).apply(frontier[f]);
          if (child.is_zero()) continue;
          part_max[c] = std::max(part_max[c], std::abs(child.coeff(k)));
          parts[c].push_back(std::move(child));
        }
      }
    });
    std::vector<CoordVector> next;
    for (std::size_t c = 0; c < chunks; ++c) {
      worst = std::max(worst, part_max[c]);
      std::move(parts[c].begin(), parts[c].end(), std::back_inserter(next));
    }
    frontier = std::move(next);
  }
  return worst;
}

namespace {

/// Rotates v so that its largest-magnitude entry is real and positive.
void fix_phase(DenseVector& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  if (v.empty() || v[best] == Scalar{}) return;
  const Scalar phase = std::conj(v[best]) / std::abs(v[best]);
  kernels::active().scal(phase, v.data(), v.size());
  v[best] = std::abs(v[best]);
}

}  // namespace

SubspaceResult kernel_intersection(const OperatorTuple& tuple, std::size_t truncation_dim,
                                   double rank_tol) {
  const std::size_t d = truncation_dim;
  if (d == 0) throw Error(ErrorCode::InvalidArgument, "truncation dimension must be >= 1");
  const std::size_t n = tuple.size();

  std::vector<DenseMatrix> blocks;
  Eigen::MatrixXcd stacked(static_cast<Eigen::Index>(n * d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    blocks.push_back(tuple.members()[i].truncate(d));
    for (std::size_t c = 0; c < d; ++c)
      for (std::size_t r = 0; r < d; ++r)
        stacked(static_cast<Eigen::Index>(i * d + r), static_cast<Eigen::Index>(c)) = blocks.back()(r, c);
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(stacked, Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;

  SubspaceResult result;
  result.kind = SubspaceKind::kernel;
  OrthoBasis ob(d);
  for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(d); ++c) {
    const double s = c < sigma.size() ? sigma(c) : 0.0;
    if (s > rank_tol * sigma_max) continue;
    DenseVector v(d);
    for (std::size_t r = 0; r < d; ++r) v[r] = svd.matrixV()(static_cast<Eigen::Index>(r), c);
    fix_phase(v);
    if (ob.try_add(v, rank_tol)) result.basis.push_back(CoordVector::from_dense(ob.vectors().back()));
  }

  auto& checks = result.checks;
  checks.truncation_dim = d;
  checks.dimension = result.basis.size();
  checks.interior_dimension = checks.dimension;
  checks.saturated = true;
  checks.nontrivial = checks.dimension >= 1 && checks.dimension < d;
  for (std::size_t i = 0; i < n; ++i) {
    double kernel_res = 0.0;
    for (const DenseVector& q : ob.vectors()) kernel_res = std::max(kernel_res, nrm2(matvec(blocks[i], q)));
    checks.kernel_residuals.push_back(kernel_res);
    checks.invariance_residuals.push_back(
        invariance_residual(tuple.members()[i], result.basis, result.basis.size(), ob, d));
  }
  return result;
}

IdealSupport ideal_support(const SubspaceResult& result, double tol) {
  if (result.basis.empty()) throw Error(ErrorCode::InvalidArgument, "ideal support of an empty basis");
  const std::size_t d = result.checks.truncation_dim;
  std::set<Index> j;
  for (const CoordVector& q : result.basis)
    for (std::size_t p = 0; p < q.nnz(); ++p)
      if (std::abs(q.values()[p]) > tol) j.insert(q.indices()[p]);
  IdealSupport out;
  out.support.assign(j.begin(), j.end());
  const OrthoBasis ob = basis_from(result.basis, std::max<std::size_t>(d, j.empty() ? 1 : *j.rbegin()));
  out.is_ideal = true;
  for (const Index idx : out.support) {
    if (ob.residual(CoordVector::basis(idx).to_dense(ob.dim())) > tol) {
      out.is_ideal = false;
      break;
    }
  }
  return out;
}

SubspaceResult common_invariant_subspace(const OperatorTuple& tuple, const CoordVector& y0,
                                         const OrbitGenParams& params, const QnilVerdict& verdict) {
  params.validate();
  require_not_refuted(verdict);
  const std::size_t d = params.truncation_dim;
  require_positive_members(tuple, d);
  require_cone_seed(y0, params.rank_tol);

  if (annihilates(tuple, y0, params.rank_tol)) {
    return kernel_intersection(tuple, d, params.rank_tol);
  }
  const Index k = anchor_coordinate(y0, params.rank_tol, d);
  const CoordVector anchor = CoordVector::basis(k);
  if (annihilates(tuple, anchor, params.rank_tol)) {
    SubspaceResult flagged = kernel_intersection(tuple, d, params.rank_tol);
    flagged.checks.degenerate_orbit = true;
    return flagged;
  }

  const OrbitVectors orbit = orbit_vectors(tuple, anchor, params);
  SubspaceResult result;
  result.kind = SubspaceKind::orbit;
  result.anchor_index = k;
  result.basis = span_basis(orbit.vectors, params.rank_tol, d);
  const std::vector<CoordVector> interior(orbit.vectors.begin(),
                                          orbit.vectors.begin() + static_cast<std::ptrdiff_t>(orbit.interior_count));
  const std::size_t interior_dim = span_basis(interior, params.rank_tol, d).size();

  auto& checks = result.checks;
  checks.truncation_dim = d;
  checks.dimension = result.basis.size();
  checks.interior_dimension = interior_dim;
  checks.saturated = orbit.saturated;
  checks.budget_exhausted = orbit.budget_exhausted;
  checks.nontrivial = checks.dimension >= 1 && checks.dimension < d;
  for (const CoordVector& q : result.basis)
    checks.fk_vanishing_max = std::max(checks.fk_vanishing_max, std::abs(q.coeff(k)));
  const OrthoBasis ob = basis_from(result.basis, d);
  for (const Operator& m : tuple.members())
    checks.invariance_residuals.push_back(invariance_residual(m, result.basis, interior_dim, ob, d));
  if (!result.basis.empty()) result.ideal_support = ideal_support(result, params.rank_tol).support;
  return result;
}

CommutantCheck commutant_invariance(const SubspaceResult& result, const Operator& a,
                                    const OperatorTuple& tuple, double tol) {
  const std::size_t d = result.checks.truncation_dim;
  if (d == 0) throw Error(ErrorCode::InvalidArgument, "result has no truncation window");
  CommutantCheck out;
  const DenseMatrix ad = a.truncate(d);
  for (const Operator& t : tuple.members()) {
    const DenseMatrix td = t.truncate(d);
    out.commute_residual = std::max(out.commute_residual, max_column_norm(matmul(ad, td) - matmul(td, ad)));
  }
  out.positive = is_positive(a, d, tol).positive;
  const OrthoBasis ob = basis_from(result.basis, d);
  for (std::size_t i = 0; i < result.checks.interior_dimension && i < result.basis.size(); ++i) {
    out.invariance_residual =
        std::max(out.invariance_residual, ob.residual(matvec(ad, result.basis[i].to_dense(d))));
  }
  return out;
}

WeightedSubspaceResult weighted_invariant_subspace(const OperatorTuple& a_tuple,
                                                   const std::vector<DenseMatrix>& weights,
                                                   const CoordVector& y0,
                                                   const OrbitGenParams& params,
                                                   const QnilVerdict& verdict) {
  params.validate();
  require_not_refuted(verdict);
  const std::size_t d = params.truncation_dim;
  if (weights.size() != a_tuple.size()) {
    throw Error(ErrorCode::DimensionMismatch, "one weight matrix per tuple member is required");
  }
  std::vector<Operator> b_members;
  for (std::size_t i = 0; i < a_tuple.size(); ++i)
    b_members.push_back(weighted_operator(a_tuple.members()[i], weights[i], d));
  const OperatorTuple b_tuple(std::move(b_members));

  require_positive_members(a_tuple, d);
  require_cone_seed(y0, params.rank_tol);
  const Index l = anchor_coordinate(y0, params.rank_tol, d);
  const CoordVector anchor = CoordVector::basis(l);

  WeightedSubspaceResult out;
  if (annihilates(a_tuple, anchor, params.rank_tol)) {
    out.subspace = kernel_intersection(b_tuple, d, params.rank_tol);
    out.b_residuals = out.subspace.checks.invariance_residuals;
    return out;
  }

  // Supports of A_w e_l: positive entries never cancel, so they follow the
  // directed graph j -> i whenever some a^k_ij != 0.
  std::vector<int> first_reached(d + 1, 0);
  std::vector<Index> frontier{l};
  bool saturated = false;
  for (int level = 1; level <= params.depth; ++level) {
    std::vector<Index> next;
    for (const Index j : frontier) {
      for (const Operator& m : a_tuple.members()) {
        const CoordVector col = m.column(j).truncated(d);
        for (const Index i : col.indices()) {
          if (first_reached[i] == 0) {
            first_reached[i] = level;
            next.push_back(i);
          }
        }
      }
    }
    if (next.empty()) {
      saturated = true;
      break;
    }
    std::sort(next.begin(), next.end());
    frontier = std::move(next);
  }

  std::vector<Index> support, interior_support;
  for (Index i = 1; i <= d; ++i) {
    if (first_reached[i] == 0) continue;
    support.push_back(i);
    if (saturated || first_reached[i] < params.depth) interior_support.push_back(i);
  }

  SubspaceResult& result = out.subspace;
  result.kind = SubspaceKind::orbit;
  result.anchor_index = l;
  // Interior indices first so that the interior is a leading block of the basis.
  std::vector<Index> ordered = interior_support;
  for (const Index i : support)
    if (!std::binary_search(interior_support.begin(), interior_support.end(), i)) ordered.push_back(i);
  for (const Index i : ordered) result.basis.push_back(CoordVector::basis(i));

  auto& checks = result.checks;
  checks.truncation_dim = d;
  checks.dimension = support.size();
  checks.interior_dimension = interior_support.size();
  checks.saturated = saturated;
  checks.nontrivial = checks.dimension >= 1 && checks.dimension < d;
  checks.fk_vanishing_max = first_reached[l] != 0 ? 1.0 : 0.0;
  result.ideal_support = support;

  std::vector<CoordVector> interior_basis;
  for (const Index i : interior_support) interior_basis.push_back(CoordVector::basis(i));
  const OrthoBasis ob = basis_from(result.basis, d);
  for (const Operator& m : a_tuple.members())
    checks.invariance_residuals.push_back(
        invariance_residual(m, interior_basis, interior_basis.size(), ob, d));
  for (const Operator& b : b_tuple.members())
    out.b_residuals.push_back(invariance_residual(b, interior_basis, interior_basis.size(), ob, d));
  return out;
}

WeightedSubspaceResult corollary_subspace(const OperatorTuple& a_tuple,
                                          const OperatorTuple& t_tuple, const CoordVector& y0,
                                          const OrbitGenParams& params,
                                          const QnilVerdict& verdict) {
  params.validate();
  if (a_tuple.size() != t_tuple.size()) {
    throw Error(ErrorCode::DimensionMismatch, "A and T tuples must have the same length");
  }
  std::vector<DenseMatrix> weights;
  for (std::size_t i = 0; i < a_tuple.size(); ++i) {
    weights.push_back(derive_weights(a_tuple.members()[i], t_tuple.members()[i],
                                     params.truncation_dim, params.rank_tol));
  }
  return weighted_invariant_subspace(a_tuple, weights, y0, params, verdict);
}

}  // namespace qnil
