#include <algorithm>
#include <cmath>

#include "qnil/kernels.hpp"

namespace qnil::kernels {
namespace {

// Reference implementations work on the interleaved (re, im) layout that
// std::complex<double> guarantees.

Scalar dotc_ref(const Scalar* a, const Scalar* b, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = pa[2 * i], ai = pa[2 * i + 1];
    const double br = pb[2 * i], bi = pb[2 * i + 1];
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  return {re, im};
}

void axpy_ref(Scalar alpha, const Scalar* x, Scalar* y, std::size_t n) {
  const double p = alpha.real(), q = alpha.imag();
  const double* px = reinterpret_cast<const double*>(x);
  double* py = reinterpret_cast<double*>(y);
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = px[2 * i], xi = px[2 * i + 1];
    py[2 * i] += p * xr - q * xi;
    py[2 * i + 1] += p * xi + q * xr;
  }
}

void scal_ref(Scalar alpha, Scalar* x, std::size_t n) {
  const double p = alpha.real(), q = alpha.imag();
  double* px = reinterpret_cast<double*>(x);
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = px[2 * i], xi = px[2 * i + 1];
    px[2 * i] = p * xr - q * xi;
    px[2 * i + 1] = p * xi + q * xr;
  }
}

void div_real_ref(Scalar* x, double s, std::size_t n) {
  double* px = reinterpret_cast<double*>(x);
  for (std::size_t i = 0; i < 2 * n; ++i) px[i] /= s;
}

double amax_ref(const Scalar* x, std::size_t n) {
  const double* px = reinterpret_cast<const double*>(x);
  double m = 0.0;
  for (std::size_t i = 0; i < 2 * n; ++i) m = std::max(m, std::fabs(px[i]));
  return m;
}

double sumsq_ref(const Scalar* x, std::size_t n, double s) {
  const double* px = reinterpret_cast<const double*>(x);
  double acc = 0.0;
  for (std::size_t i = 0; i < 2 * n; ++i) {
    const double v = px[i] / s;
    acc += v * v;
  }
  return acc;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable t{Isa::scalar, dotc_ref, axpy_ref, scal_ref,
                             div_real_ref, amax_ref, sumsq_ref};
  return t;
}

double nrm2(const KernelTable& k, const Scalar* x, std::size_t n) {
  const double scale = k.amax(x, n);
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  return scale * std::sqrt(k.sumsq(x, n, scale));
}

}  // namespace qnil::kernels
