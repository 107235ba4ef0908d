#include "qnil/coordspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qnil/error.hpp"
#include "qnil/kernels.hpp"

namespace qnil {

CoordVector CoordAccumulator::finish() {
  std::stable_sort(entries_.begin(), entries_.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Index> idx;
  std::vector<Scalar> val;
  idx.reserve(entries_.size());
  val.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size();) {
    const Index k = entries_[i].first;
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "basis indices are 1-based");
    Scalar sum = entries_[i].second;
    std::size_t j = i + 1;
    for (; j < entries_.size() && entries_[j].first == k; ++j) sum += entries_[j].second;
    if (sum != Scalar{}) {
      idx.push_back(k);
      val.push_back(sum);
    }
    i = j;
  }
  entries_.clear();
  return CoordVector(CoordVector::Sorted{}, std::move(idx), std::move(val));
}

CoordVector::CoordVector(std::vector<std::pair<Index, Scalar>> entries) {
  CoordAccumulator acc;
  acc.reserve(entries.size());
  for (const auto& [i, v] : entries) acc.add(i, v);
  *this = acc.finish();
}

CoordVector::CoordVector(std::initializer_list<std::pair<Index, Scalar>> entries)
    : CoordVector(std::vector<std::pair<Index, Scalar>>(entries)) {}

CoordVector CoordVector::basis(Index k, Scalar value) { return CoordVector({{k, value}}); }

CoordVector CoordVector::from_dense(std::span<const Scalar> dense) {
  std::vector<Index> idx;
  std::vector<Scalar> val;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != Scalar{}) {
      idx.push_back(i + 1);
      val.push_back(dense[i]);
    }
  }
  return CoordVector(Sorted{}, std::move(idx), std::move(val));
}

Scalar CoordVector::coeff(Index k) const {
  const auto it = std::lower_bound(indices_.begin(), indices_.end(), k);
  if (it == indices_.end() || *it != k) return {};
  return values_[static_cast<std::size_t>(it - indices_.begin())];
}

DenseVector CoordVector::to_dense(std::size_t d) const {
  DenseVector out(d);
  for (std::size_t i = 0; i < indices_.size() && indices_[i] <= d; ++i) out[indices_[i] - 1] = values_[i];
  return out;
}

CoordVector CoordVector::truncated(Index d) const {
  const auto end = std::upper_bound(indices_.begin(), indices_.end(), d);
  const auto n = static_cast<std::size_t>(end - indices_.begin());
  return CoordVector(Sorted{}, std::vector<Index>(indices_.begin(), end),
                     std::vector<Scalar>(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(n)));
}

CoordVector CoordVector::scaled(Scalar alpha) const {
  if (alpha == Scalar{}) return {};
  std::vector<Scalar> val = values_;
  kernels::active().scal(alpha, val.data(), val.size());
  // Products may underflow to exact zero; keep the representation normalized.
  std::vector<Index> idx;
  std::vector<Scalar> kept;
  idx.reserve(val.size());
  kept.reserve(val.size());
  for (std::size_t i = 0; i < val.size(); ++i) {
    if (val[i] != Scalar{}) {
      idx.push_back(indices_[i]);
      kept.push_back(val[i]);
    }
  }
  return CoordVector(Sorted{}, std::move(idx), std::move(kept));
}

CoordVector CoordVector::divided(double s) const {
  std::vector<Scalar> val = values_;
  kernels::active().div_real(val.data(), s, val.size());
  std::vector<Index> idx;
  std::vector<Scalar> kept;
  idx.reserve(val.size());
  kept.reserve(val.size());
  for (std::size_t i = 0; i < val.size(); ++i) {
    if (val[i] != Scalar{}) {
      idx.push_back(indices_[i]);
      kept.push_back(val[i]);
    }
  }
  return CoordVector(Sorted{}, std::move(idx), std::move(kept));
}

namespace {

template <class Op>
CoordVector merge(const CoordVector& a, const CoordVector& b, Op op) {
  CoordAccumulator acc;
  acc.reserve(a.nnz() + b.nnz());
  for (std::size_t i = 0; i < a.nnz(); ++i) acc.add(a.indices()[i], a.values()[i]);
  for (std::size_t i = 0; i < b.nnz(); ++i) acc.add(b.indices()[i], op(b.values()[i]));
  return acc.finish();
}

}  // namespace

CoordVector operator+(const CoordVector& a, const CoordVector& b) {
  return merge(a, b, [](Scalar v) { return v; });
}

CoordVector operator-(const CoordVector& a, const CoordVector& b) {
  return merge(a, b, [](Scalar v) { return -v; });
}

double vec_norm(const CoordVector& x, NormKind p) {
  const auto vals = x.values();
  switch (p) {
    case NormKind::two:
      return kernels::nrm2(vals.data(), vals.size());
    case NormKind::one: {
      double s = 0.0;
      for (const Scalar& v : vals) s += std::abs(v);
      return s;
    }
    case NormKind::sup: {
      double m = 0.0;
      for (const Scalar& v : vals) m = std::max(m, std::abs(v));
      return m;
    }
  }
  return 0.0;
}

Scalar coord_functional(Index k, const CoordVector& x) {
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "coefficient functionals are 1-based");
  return x.coeff(k);
}

ConeVerdict in_cone(const CoordVector& x, double tol) {
  ConeVerdict verdict;
  for (const Scalar& v : x.values()) {
    verdict.worst_violation = std::max(verdict.worst_violation, std::fabs(v.imag()));
    if (v.real() < 0.0) verdict.worst_violation = std::max(verdict.worst_violation, -v.real());
  }
  verdict.in_cone = verdict.worst_violation <= tol;
  return verdict;
}

Index dominating_coordinate(const CoordVector& y0, double tol) {
  for (std::size_t i = 0; i < y0.nnz(); ++i) {
    if (y0.values()[i].real() > tol) return y0.indices()[i];
  }
  throw Error(ErrorCode::NoPositiveCoordinate,
              "no coordinate exceeds the tolerance; the seed is zero or outside the cone");
}

bool dominated_by(const CoordVector& u, double u_log_scale, const CoordVector& v,
                  double v_log_scale) {
  // Compare u * exp(u_log_scale - v_log_scale) <= v entrywise.
  const double shift = u_log_scale - v_log_scale;
  const double factor = std::exp(shift);
  auto ui = u.indices();
  auto vi = v.indices();
  std::size_t j = 0;
  for (std::size_t i = 0; i < ui.size(); ++i) {
    while (j < vi.size() && vi[j] < ui[i]) ++j;
    if (j == vi.size() || vi[j] != ui[i]) return false;
    const double lhs = u.values()[i].real();
    const double rhs = v.values()[j].real();
    if (std::isinf(factor)) return false;
    if (lhs * factor > rhs) return false;
  }
  return true;
}

}  // namespace qnil
