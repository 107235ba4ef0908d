#include "qnil/dense.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qnil/error.hpp"
#include "qnil/kernels.hpp"

namespace qnil {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, Scalar fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix DenseMatrix::identity(std::size_t d) {
  DenseMatrix m(d, d);
  for (std::size_t i = 0; i < d; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::from_row_major(std::size_t rows, std::size_t cols,
                                        std::span<const Scalar> entries) {
  if (entries.size() != rows * cols) {
    throw Error(ErrorCode::DimensionMismatch, "row-major entry count does not match shape");
  }
  DenseMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = entries[r * cols + c];
  return m;
}

DenseVector matvec(const DenseMatrix& a, std::span<const Scalar> x) {
  if (x.size() != a.cols()) throw Error(ErrorCode::DimensionMismatch, "matvec: size mismatch");
  const auto& k = kernels::active();
  DenseVector y(a.rows());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    if (x[j] == Scalar{}) continue;
    k.axpy(x[j], a.col(j).data(), y.data(), a.rows());
  }
  return y;
}

DenseVector adjoint_matvec(const DenseMatrix& a, std::span<const Scalar> x) {
  if (x.size() != a.rows()) throw Error(ErrorCode::DimensionMismatch, "adjoint_matvec: size mismatch");
  const auto& k = kernels::active();
  DenseVector y(a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) y[j] = k.dotc(a.col(j).data(), x.data(), a.rows());
  return y;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::DimensionMismatch, "matmul: inner dimensions differ");
  const auto& k = kernels::active();
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    auto cj = c.col(j);
    for (std::size_t m = 0; m < a.cols(); ++m) {
      const Scalar bmj = b(m, j);
      if (bmj == Scalar{}) continue;
      k.axpy(bmj, a.col(m).data(), cj.data(), a.rows());
    }
  }
  return c;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorCode::DimensionMismatch, "matrix difference: shapes differ");
  DenseMatrix c = a;
  const auto& k = kernels::active();
  for (std::size_t j = 0; j < a.cols(); ++j) k.axpy(Scalar{-1.0}, b.col(j).data(), c.col(j).data(), a.rows());
  return c;
}

double nrm2(std::span<const Scalar> x) { return kernels::nrm2(x.data(), x.size()); }

Scalar dotc(std::span<const Scalar> a, std::span<const Scalar> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "dotc: size mismatch");
  return kernels::active().dotc(a.data(), b.data(), a.size());
}

double max_column_norm(const DenseMatrix& a) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, nrm2(a.col(j)));
  return m;
}

namespace {

DenseVector start_vector(std::size_t n) {
  // Deterministic start with distinct entries so that it is unlikely to be
  // orthogonal to a dominant eigenvector of a structured matrix.
  DenseVector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = Scalar(1.0 + 1.0 / static_cast<double>(i + 2), 0.0);
  const double s = nrm2(v);
  kernels::active().div_real(v.data(), s, n);
  return v;
}

}  // namespace

double spectral_norm(const DenseMatrix& a, const PowerIterationOptions& opts) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  const auto& k = kernels::active();
  DenseVector v = start_vector(a.cols());
  double lambda = 0.0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    DenseVector w = adjoint_matvec(a, matvec(a, v));
    const double s = nrm2(w);
    if (s == 0.0) {
      // v is in the null space; the norm is still attained elsewhere unless a == 0.
      if (max_column_norm(a) == 0.0) return 0.0;
      // Restart from the column with the largest norm.
      std::size_t best = 0;
      double bn = -1.0;
      for (std::size_t j = 0; j < a.cols(); ++j) {
        const double cn = nrm2(a.col(j));
        if (cn > bn) { bn = cn; best = j; }
      }
      std::fill(v.begin(), v.end(), Scalar{});
      v[best] = 1.0;
      continue;
    }
    // Rayleigh quotient v^H A^H A v with ||v|| = 1.
    const double rq = std::real(k.dotc(v.data(), w.data(), v.size()));
    k.div_real(w.data(), s, w.size());
    v = std::move(w);
    const double prev = lambda;
    lambda = std::max(rq, 0.0);
    if (it > 0 && std::fabs(lambda - prev) <= opts.tolerance * std::max(lambda, 1e-300)) break;
  }
  // One last Rayleigh quotient on the converged direction.
  const double final_norm = nrm2(matvec(a, v));
  return std::max(std::sqrt(lambda), final_norm);
}

double spectral_radius_estimate(const DenseMatrix& a, const PowerIterationOptions& opts) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::DimensionMismatch, "spectral radius needs a square matrix");
  if (a.rows() == 0) return 0.0;
  DenseVector v = start_vector(a.cols());
  std::vector<double> log_growth;
  log_growth.reserve(static_cast<std::size_t>(opts.max_iterations));
  double previous_estimate = -1.0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    DenseVector w = matvec(a, v);
    const double s = nrm2(w);
    if (s == 0.0) return 0.0;
    kernels::active().div_real(w.data(), s, w.size());
    v = std::move(w);
    log_growth.push_back(std::log(s));
    // Geometric mean of the step growth over the second half of the history
    // averages out rotation between eigenvalues of equal modulus.
    const std::size_t half = log_growth.size() / 2;
    double acc = 0.0;
    for (std::size_t i = half; i < log_growth.size(); ++i) acc += log_growth[i];
    const double estimate = std::exp(acc / static_cast<double>(log_growth.size() - half));
    if (it >= 20 && std::fabs(estimate - previous_estimate) <= opts.tolerance * estimate) {
      return estimate;
    }
    previous_estimate = estimate;
  }
  return previous_estimate;
}

}  // namespace qnil
