#include <cstdlib>
#include <stdexcept>
#include <string_view>

#include "qnil/kernels.hpp"

namespace qnil::kernels {

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!isa_available(isa)) {
    throw std::invalid_argument(std::string("kernel ISA not available: ") + isa_name(isa));
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (isa == Isa::avx2) return detail::avx2_table();
#endif
  return scalar_table();
}

namespace {

const KernelTable& select() {
  if (const char* env = std::getenv("QNIL_ISA")) {
    const std::string_view want(env);
    if (want == "scalar") return scalar_table();
    if (want == "avx2" && isa_available(Isa::avx2)) return table(Isa::avx2);
  }
  if (isa_available(Isa::avx2)) return table(Isa::avx2);
  return scalar_table();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& chosen = select();
  return chosen;
}

}  // namespace qnil::kernels
