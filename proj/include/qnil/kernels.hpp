#pragma once

// Dense complex inner-loop kernels. Every routine has a scalar reference
// implementation; on x86-64 an AVX2/FMA variant is selected at runtime when
// the CPU supports it. QNIL_ISA=scalar in the environment forces the
// reference path.

#include <cstddef>

#include "qnil/types.hpp"

namespace qnil::kernels {

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  /// sum_i conj(a_i) * b_i
  Scalar (*dotc)(const Scalar* a, const Scalar* b, std::size_t n);
  /// y += alpha * x
  void (*axpy)(Scalar alpha, const Scalar* x, Scalar* y, std::size_t n);
  /// x *= alpha
  void (*scal)(Scalar alpha, Scalar* x, std::size_t n);
  /// x /= s for real s
  void (*div_real)(Scalar* x, double s, std::size_t n);
  /// max over i of max(|re x_i|, |im x_i|)
  double (*amax)(const Scalar* x, std::size_t n);
  /// sum_i |x_i / s|^2, s > 0
  double (*sumsq)(const Scalar* x, std::size_t n, double s);
};

const KernelTable& scalar_table();
bool isa_available(Isa isa);
/// Throws std::invalid_argument if the ISA is not available on this CPU.
const KernelTable& table(Isa isa);
/// Table picked once at startup (best available unless QNIL_ISA overrides).
const KernelTable& active();
const char* isa_name(Isa isa);

/// Overflow-safe Euclidean norm built on amax + sumsq.
double nrm2(const KernelTable& k, const Scalar* x, std::size_t n);
inline double nrm2(const Scalar* x, std::size_t n) { return nrm2(active(), x, n); }

namespace detail {
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_table();
#endif
}  // namespace detail

}  // namespace qnil::kernels
