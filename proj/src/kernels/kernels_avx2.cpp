// AVX2 + FMA variants. This translation unit is compiled with -mavx2 -mfma;
// nothing here may run unless dispatch confirmed CPU support.

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "qnil/kernels.hpp"

namespace qnil::kernels::detail {
namespace {

// Each __m256d holds two complex values: [re0, im0, re1, im1].

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

Scalar dotc_avx2(const Scalar* a, const Scalar* b, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  // direct = [ar*br, ai*bi, ...], cross = [ar*bi, ai*br, ...]
  __m256d direct0 = _mm256_setzero_pd(), direct1 = _mm256_setzero_pd();
  __m256d cross0 = _mm256_setzero_pd(), cross1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va0 = _mm256_loadu_pd(pa + 2 * i);
    const __m256d vb0 = _mm256_loadu_pd(pb + 2 * i);
    const __m256d va1 = _mm256_loadu_pd(pa + 2 * i + 4);
    const __m256d vb1 = _mm256_loadu_pd(pb + 2 * i + 4);
    direct0 = _mm256_fmadd_pd(va0, vb0, direct0);
    direct1 = _mm256_fmadd_pd(va1, vb1, direct1);
    cross0 = _mm256_fmadd_pd(va0, _mm256_permute_pd(vb0, 0b0101), cross0);
    cross1 = _mm256_fmadd_pd(va1, _mm256_permute_pd(vb1, 0b0101), cross1);
  }
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(pa + 2 * i);
    const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
    direct0 = _mm256_fmadd_pd(va, vb, direct0);
    cross0 = _mm256_fmadd_pd(va, _mm256_permute_pd(vb, 0b0101), cross0);
  }
  const __m256d direct = _mm256_add_pd(direct0, direct1);
  const __m256d cross = _mm256_add_pd(cross0, cross1);
  // im = sum(ar*bi) - sum(ai*br): flip the sign of odd lanes before summing.
  const __m256d sign = _mm256_set_pd(-1.0, 1.0, -1.0, 1.0);
  double re = hsum(direct);
  double im = hsum(_mm256_mul_pd(cross, sign));
  for (; i < n; ++i) {
    const double ar = pa[2 * i], ai = pa[2 * i + 1];
    const double br = pb[2 * i], bi = pb[2 * i + 1];
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  return {re, im};
}

void axpy_avx2(Scalar alpha, const Scalar* x, Scalar* y, std::size_t n) {
  const double p = alpha.real(), q = alpha.imag();
  const double* px = reinterpret_cast<const double*>(x);
  double* py = reinterpret_cast<double*>(y);
  const __m256d vp = _mm256_set1_pd(p);
  const __m256d vq = _mm256_set_pd(q, -q, q, -q);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d vx = _mm256_loadu_pd(px + 2 * i);
    __m256d vy = _mm256_loadu_pd(py + 2 * i);
    vy = _mm256_fmadd_pd(vp, vx, vy);
    vy = _mm256_fmadd_pd(vq, _mm256_permute_pd(vx, 0b0101), vy);
    _mm256_storeu_pd(py + 2 * i, vy);
  }
  for (; i < n; ++i) {
    const double xr = px[2 * i], xi = px[2 * i + 1];
    py[2 * i] += p * xr - q * xi;
    py[2 * i + 1] += p * xi + q * xr;
  }
}

void scal_avx2(Scalar alpha, Scalar* x, std::size_t n) {
  const double p = alpha.real(), q = alpha.imag();
  double* px = reinterpret_cast<double*>(x);
  const __m256d vp = _mm256_set1_pd(p);
  const __m256d vq = _mm256_set_pd(q, -q, q, -q);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d vx = _mm256_loadu_pd(px + 2 * i);
    const __m256d r =
        _mm256_fmadd_pd(vq, _mm256_permute_pd(vx, 0b0101), _mm256_mul_pd(vp, vx));
    _mm256_storeu_pd(px + 2 * i, r);
  }
  for (; i < n; ++i) {
    const double xr = px[2 * i], xi = px[2 * i + 1];
    px[2 * i] = p * xr - q * xi;
    px[2 * i + 1] = p * xi + q * xr;
  }
}

void div_real_avx2(Scalar* x, double s, std::size_t n) {
  double* px = reinterpret_cast<double*>(x);
  const __m256d vs = _mm256_set1_pd(s);
  const std::size_t m = 2 * n;
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) {
    _mm256_storeu_pd(px + i, _mm256_div_pd(_mm256_loadu_pd(px + i), vs));
  }
  for (; i < m; ++i) px[i] /= s;
}

double amax_avx2(const Scalar* x, std::size_t n) {
  const double* px = reinterpret_cast<const double*>(x);
  const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  __m256d m0 = _mm256_setzero_pd(), m1 = _mm256_setzero_pd();
  const std::size_t len = 2 * n;
  std::size_t i = 0;
  for (; i + 8 <= len; i += 8) {
    m0 = _mm256_max_pd(m0, _mm256_and_pd(mask, _mm256_loadu_pd(px + i)));
    m1 = _mm256_max_pd(m1, _mm256_and_pd(mask, _mm256_loadu_pd(px + i + 4)));
  }
  for (; i + 4 <= len; i += 4) {
    m0 = _mm256_max_pd(m0, _mm256_and_pd(mask, _mm256_loadu_pd(px + i)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, _mm256_max_pd(m0, m1));
  double m = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < len; ++i) m = std::max(m, std::fabs(px[i]));
  return m;
}

double sumsq_avx2(const Scalar* x, std::size_t n, double s) {
  const double* px = reinterpret_cast<const double*>(x);
  const __m256d vs = _mm256_set1_pd(s);
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  const std::size_t len = 2 * n;
  std::size_t i = 0;
  for (; i + 8 <= len; i += 8) {
    const __m256d v0 = _mm256_div_pd(_mm256_loadu_pd(px + i), vs);
    const __m256d v1 = _mm256_div_pd(_mm256_loadu_pd(px + i + 4), vs);
    acc0 = _mm256_fmadd_pd(v0, v0, acc0);
    acc1 = _mm256_fmadd_pd(v1, v1, acc1);
  }
  for (; i + 4 <= len; i += 4) {
    const __m256d v = _mm256_div_pd(_mm256_loadu_pd(px + i), vs);
    acc0 = _mm256_fmadd_pd(v, v, acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < len; ++i) {
    const double v = px[i] / s;
    acc += v * v;
  }
  return acc;
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable t{Isa::avx2, dotc_avx2, axpy_avx2, scal_avx2,
                             div_real_avx2, amax_avx2, sumsq_avx2};
  return t;
}

}  // namespace qnil::kernels::detail
