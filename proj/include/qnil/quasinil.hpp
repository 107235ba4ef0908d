#pragma once

// Diagnostic sequences for local, joint local and uniform joint local
// quasinilpotence, finite-depth verdicts built on them, and a joint spectral
// radius bracket.
//
// All norms are tracked in the log domain: each step renormalizes the
// propagated vector and accumulates log of the scale, so factorial-type
// decay never underflows. An exactly zero vector is a distinguished marker,
// never a -inf float.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qnil/coordspace.hpp"
#include "qnil/operators.hpp"
#include "qnil/types.hpp"

namespace qnil {

struct RadiusPoint {
  int n = 0;
  bool exact_zero = false;
  double log_norm = 0.0;  // log ||S_n x||; meaningless when exact_zero
  double root = 0.0;      // exp(log_norm / n), 0 when exact_zero

  friend bool operator==(const RadiusPoint&, const RadiusPoint&) = default;
};

enum class SequenceKind { single_operator, fixed_word, uniform_max };

const char* to_string(SequenceKind kind);

struct RadiusSequence {
  SequenceKind kind = SequenceKind::single_operator;
  /// Enumeration strategy for uniform_max ("exact", "exact-with-dominance-pruning", "beam(w)").
  std::string strategy;
  /// Beam results only bound the true maximum from below.
  bool lower_bound_only = false;
  std::vector<RadiusPoint> points;  // n = 1, 2, ...
  /// uniform_max: maximizing word at each depth (empty once exact-zero).
  /// fixed_word: one entry, the full leftmost-first word of the last depth.
  std::vector<Word> words;
  std::optional<std::uint64_t> seed;
  std::uint64_t applications = 0;

  const RadiusPoint& at(int n) const;
  double root(int n) const { return at(n).root; }
  int depth() const { return static_cast<int>(points.size()); }

  friend bool operator==(const RadiusSequence&, const RadiusSequence&) = default;
};

/// r_n = ||T^n x||^{1/n}, n = 1..n_max.
RadiusSequence local_radius_sequence(const Operator& t, const CoordVector& x, int n_max);

/// A word stream. Every kind materializes a leftmost-first word W of length
/// n_max; the depth-n product uses the rightmost n letters of W, so words
/// grow on the left and the letter at the right end acts first.
///   periodic(p): W is the tail of ...ppp ending on a full period, so the
///                depth-(m|p|) product is exactly p^m.
///   prefix(w):   W is the rightmost n_max letters of w.
///   random(s):   application-order letters drawn from a seeded stream.
struct WordSpec {
  enum class Kind { periodic, prefix, random };
  Kind kind = Kind::periodic;
  Word letters;
  std::uint64_t seed = 0;

  static WordSpec periodic(Word p) { return {Kind::periodic, std::move(p), 0}; }
  static WordSpec prefix(Word w) { return {Kind::prefix, std::move(w), 0}; }
  static WordSpec random(std::uint64_t seed) { return {Kind::random, {}, seed}; }

  Word materialize(std::size_t n_max, std::size_t members) const;
};

RadiusSequence word_radius_sequence(const OperatorTuple& tuple, const WordSpec& word,
                                    const CoordVector& x, int n_max);

enum class Strategy { exact, exact_pruned, beam };

struct UniformOptions {
  Strategy strategy = Strategy::exact;
  std::size_t beam_width = 0;
  std::uint64_t budget = kDefaultBudget;  // total operator applications
  unsigned workers = 1;
  /// Largest probe window used to certify positivity before pruning.
  std::size_t max_probe = std::size_t{1} << 16;
};

/// beta_n = max over S in T^n of ||S x||^{1/n} by breadth-first vector
/// propagation. Dominance pruning is used only when every member is
/// certified positive on every column the search can reach and x lies in
/// the cone with exact nonnegative coordinates; otherwise it is skipped and
/// the strategy string records "exact".
RadiusSequence uniform_joint_sequence(const OperatorTuple& tuple, const CoordVector& x, int n_max,
                                      const UniformOptions& opts = {});

/// Whether dominance pruning is sound for (tuple, x) up to depth n_max.
bool dominance_pruning_sound(const OperatorTuple& tuple, const CoordVector& x, int n_max,
                             std::size_t max_probe = std::size_t{1} << 16);

enum class QnilStatus { certified_decaying, refuted, inconclusive };

const char* to_string(QnilStatus status);

struct QnilVerdict {
  QnilStatus status = QnilStatus::inconclusive;
  /// Periodic pattern (leftmost-first) whose sequence does not decay.
  std::optional<Word> witness;
  double final_root = 0.0;
  int depth = 0;
  std::string strategy;
  std::string mode;
};

struct CertifyOptions {
  enum class Mode { uniform, per_word_sampled };
  Mode mode = Mode::uniform;
  std::size_t sample_count = 32;
  std::uint64_t seed = 0;
  /// exact_pruned falls back to plain exact enumeration when pruning is unsound.
  UniformOptions uniform{Strategy::exact_pruned};
};

/// Finite-depth evidence for joint (per-word) or uniform joint local
/// quasinilpotence at x. Throws InvalidSeed for x = 0.
QnilVerdict certify_joint(const OperatorTuple& tuple, const CoordVector& x, int depth,
                          double decay_threshold, const CertifyOptions& opts = {});

/// Periodic candidate patterns of period <= max_period, excluding powers of
/// shorter patterns, ordered by period then lexicographically.
std::vector<Word> periodic_candidates(std::size_t members, std::size_t max_period);

struct Monomial {
  Scalar coefficient;
  Word word;  // leftmost-first product of tuple members
};
using Polynomial = std::vector<Monomial>;

/// The structural operator p(T). Throws ConstantTermPresent.
Operator polynomial_operator(const OperatorTuple& tuple, const Polynomial& poly);

/// Local radius sequence of p(T) at x.
RadiusSequence polynomial_radius(const OperatorTuple& tuple, const Polynomial& poly,
                                 const CoordVector& x, int n_max);

/// log of k^n c^n max_S ||S x|| for n = 1..n_max, where k is the number of
/// monomials, c the largest |coefficient| and S ranges over all words whose
/// length can occur in the expansion of p(T)^n (n*min_degree..n*max_degree).
/// Entry is nullopt when every such product annihilates x.
std::vector<std::optional<double>> polynomial_log_bound(const OperatorTuple& tuple,
                                                        const Polynomial& poly,
                                                        const CoordVector& x, int n_max,
                                                        const UniformOptions& opts = {});

struct JsrEstimate {
  double lower = 0.0;
  double upper = 0.0;
  int depth = 0;
  std::size_t truncation_dim = 0;
  std::vector<double> lower_by_depth;
  std::vector<double> upper_by_depth;
};

struct JsrOptions {
  std::uint64_t budget = std::uint64_t{1} << 14;  // materialized products
  int power_iterations = 200;
  double power_tolerance = 1e-10;
};

/// Bracket on the joint spectral radius of the d x d truncations.
JsrEstimate jsr_estimate(const OperatorTuple& tuple, std::size_t truncation_dim, int n_max,
                         const JsrOptions& opts = {});

}  // namespace qnil
