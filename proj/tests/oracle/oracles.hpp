#pragma once

// Independent reference computations in exact rational or 50-digit decimal
// arithmetic. Nothing here calls into the library.

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <functional>
#include <vector>

namespace qnil::oracle {

using Rational = boost::multiprecision::cpp_rational;
using Decimal = boost::multiprecision::cpp_dec_float_50;

/// A weighted shift acting on a single basis vector: e_m -> weight(m) e_{m + step}
/// with step in {-1, +1}; a zero weight (or m + step < 1) kills the vector.
struct ShiftLetter {
  int step;
  std::function<Rational(std::uint64_t)> weight;
};

/// max over all words of length n of |coefficient of T_w e_k|, for every
/// n = 1..n_max, by full enumeration of the word tree. Products of shifts map
/// a basis vector to a multiple of a basis vector, so the norm is that |coefficient|.
inline std::vector<Rational> shift_word_maxima(const std::vector<ShiftLetter>& letters, std::uint64_t k, int n_max) {
  std::vector<Rational> best(static_cast<std::size_t>(n_max), Rational(0));
  std::function<void(std::uint64_t, const Rational&, int)> visit = [&](std::uint64_t m, const Rational& c, int depth) {
    if (depth == n_max) return;
    for (const ShiftLetter& l : letters) {
      if (l.step < 0 && m == 1) continue;
      const Rational w = l.weight(m);
      if (w == 0) continue;
      const Rational next = c * w;
      const Rational mag = abs(next);
      if (mag > best[static_cast<std::size_t>(depth)]) best[static_cast<std::size_t>(depth)] = mag;
      visit(l.step < 0 ? m - 1 : m + 1, next, depth + 1);
    }
  };
  visit(k, Rational(1), 0);
  return best;
}

inline ShiftLetter example_t1() {
  return {-1, [](std::uint64_t) { return Rational(1); }};
}

inline ShiftLetter example_t2() {
  return {+1, [](std::uint64_t m) { return Rational(1, m); }};
}

/// e_m -> (1/denom)^m e_{m+1}
inline ShiftLetter geometric_shift(std::uint64_t denom) {
  return {+1, [denom](std::uint64_t m) {
            return Rational(1, boost::multiprecision::pow(boost::multiprecision::cpp_int(denom), static_cast<unsigned>(m)));
          }};
}

/// (Gamma(k) / Gamma(k + n))^(1/n) from the product 1/(k (k+1) ... (k+n-1)).
inline Decimal reciprocal_shift_root(std::uint64_t k, int n) {
  Decimal p = 1;
  for (int j = 0; j < n; ++j) p /= Decimal(k + static_cast<std::uint64_t>(j));
  return boost::multiprecision::pow(p, Decimal(1) / n);
}

/// ||(I + F)^n e_1|| with F e_m = (1/m!) e_{m+1}, for n = 1..n_max.
inline std::vector<Decimal> identity_plus_factorial_shift_norms(int n_max) {
  std::vector<Decimal> x(static_cast<std::size_t>(n_max) + 2, Decimal(0));
  x[1] = 1;
  std::vector<Decimal> inv_fact(static_cast<std::size_t>(n_max) + 2, Decimal(1));
  for (std::size_t m = 1; m < inv_fact.size(); ++m) inv_fact[m] = inv_fact[m - 1] / Decimal(m);
  std::vector<Decimal> out;
  for (int n = 1; n <= n_max; ++n) {
    for (std::size_t m = static_cast<std::size_t>(n) + 1; m >= 2; --m) x[m] += inv_fact[m - 1] * x[m - 1];
    Decimal s = 0;
    for (const Decimal& v : x) s += v * v;
    out.push_back(boost::multiprecision::sqrt(s));
  }
  return out;
}

}  // namespace qnil::oracle
