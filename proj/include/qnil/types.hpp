#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace qnil {

using Scalar = std::complex<double>;

/// 1-based index into the Schauder basis (e_1, e_2, ...).
using Index = std::uint64_t;

/// A word of tuple member indices, stored leftmost-first: {i1, ..., in}
/// denotes the product T_{i1} T_{i2} ... T_{in}, so i_n acts first.
using Word = std::vector<std::uint32_t>;

inline constexpr Index kDefaultMaxIndex = 1'000'000;
inline constexpr std::uint64_t kDefaultBudget = std::uint64_t{1} << 24;

}  // namespace qnil
