#pragma once

// Dense complex vectors/matrices on a finite truncation window. Storage is
// column-major so column operations map onto the contiguous kernels.

#include <cstddef>
#include <span>
#include <vector>

#include "qnil/types.hpp"

namespace qnil {

using DenseVector = std::vector<Scalar>;

class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, Scalar fill = Scalar{});

  static DenseMatrix identity(std::size_t d);
  /// Builds from row-major entries (the order humans write matrices in).
  static DenseMatrix from_row_major(std::size_t rows, std::size_t cols,
                                    std::span<const Scalar> entries);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  /// 0-based access.
  Scalar& operator()(std::size_t r, std::size_t c) { return data_[c * rows_ + r]; }
  const Scalar& operator()(std::size_t r, std::size_t c) const { return data_[c * rows_ + r]; }

  std::span<Scalar> col(std::size_t c) { return {data_.data() + c * rows_, rows_}; }
  std::span<const Scalar> col(std::size_t c) const { return {data_.data() + c * rows_, rows_}; }

  const std::vector<Scalar>& data() const noexcept { return data_; }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Scalar> data_;
};

DenseVector matvec(const DenseMatrix& a, std::span<const Scalar> x);
/// a^H x
DenseVector adjoint_matvec(const DenseMatrix& a, std::span<const Scalar> x);
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);

double nrm2(std::span<const Scalar> x);
Scalar dotc(std::span<const Scalar> a, std::span<const Scalar> b);

/// max_j ||a e_j||_2: the "operator sup over unit basis vectors" measure.
double max_column_norm(const DenseMatrix& a);

struct PowerIterationOptions {
  int max_iterations = 200;
  double tolerance = 1e-10;
};

/// ||a||_2 by power iteration on a^H a.
double spectral_norm(const DenseMatrix& a, const PowerIterationOptions& opts = {});

/// Spectral-radius estimate by renormalized power iteration: the geometric
/// mean growth rate over the second half of the iterations. Returns 0 when
/// the iterate becomes exactly zero.
double spectral_radius_estimate(const DenseMatrix& a, const PowerIterationOptions& opts = {});

}  // namespace qnil
