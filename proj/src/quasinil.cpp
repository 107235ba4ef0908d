#include "qnil/quasinil.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "qnil/error.hpp"
#include "qnil/parallel.hpp"

namespace qnil {

const char* to_string(SequenceKind kind) {
  switch (kind) {
    case SequenceKind::single_operator: return "single-operator";
    case SequenceKind::fixed_word: return "fixed-word";
    case SequenceKind::uniform_max: return "uniform-max";
  }
  return "unknown";
}

const char* to_string(QnilStatus status) {
  switch (status) {
    case QnilStatus::certified_decaying: return "certified-decaying";
    case QnilStatus::refuted: return "refuted";
    case QnilStatus::inconclusive: return "inconclusive";
  }
  return "unknown";
}

const RadiusPoint& RadiusSequence::at(int n) const {
  if (n < 1 || n > depth()) {
    throw Error(ErrorCode::InvalidArgument, "radius sequence has no term n=" + std::to_string(n));
  }
  return points[static_cast<std::size_t>(n - 1)];
}

namespace {

/// vector = unit * exp(log_scale), with ||unit|| = 1.
struct ScaledVector {
  CoordVector unit;
  double log_scale = 0.0;
};

std::optional<ScaledVector> normalize(const CoordVector& v, double base_log) {
  const double s = vec_norm(v);
  if (s == 0.0) return std::nullopt;
  if (!std::isfinite(s)) throw Error(ErrorCode::InvalidArgument, "non-finite norm during propagation");
  return ScaledVector{v.divided(s), base_log + std::log(s)};
}

RadiusPoint make_point(int n, double log_norm) {
  return {n, false, log_norm, std::exp(log_norm / n)};
}

RadiusPoint zero_point(int n) { return {n, true, 0.0, 0.0}; }

void require_seed(const CoordVector& x) {
  if (x.is_zero()) throw Error(ErrorCode::InvalidSeed, "the zero vector is not a meaningful seed");
}

void require_depth(int n_max) {
  if (n_max < 1) throw Error(ErrorCode::InvalidArgument, "n_max must be >= 1");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

RadiusSequence local_radius_sequence(const Operator& t, const CoordVector& x, int n_max) {
  require_seed(x);
  require_depth(n_max);
  RadiusSequence seq;
  seq.kind = SequenceKind::single_operator;
  seq.points.reserve(static_cast<std::size_t>(n_max));
  std::optional<ScaledVector> cur = normalize(x, 0.0);
  for (int n = 1; n <= n_max; ++n) {
    if (cur) {
      cur = normalize(t.apply(cur->unit), cur->log_scale);
      ++seq.applications;
    }
    seq.points.push_back(cur ? make_point(n, cur->log_scale) : zero_point(n));
  }
  return seq;
}

Word WordSpec::materialize(std::size_t n_max, std::size_t members) const {
  Word w(n_max);
  switch (kind) {
    case Kind::periodic: {
      if (letters.empty()) throw Error(ErrorCode::InvalidArgument, "periodic word needs a nonempty pattern");
      const std::size_t p = letters.size();
      for (std::size_t t = 0; t < n_max; ++t) w[n_max - 1 - t] = letters[p - 1 - (t % p)];
      break;
    }
    case Kind::prefix:
      if (letters.size() < n_max) {
        throw Error(ErrorCode::InvalidArgument, "explicit word shorter than the requested depth");
      }
      std::copy(letters.end() - static_cast<std::ptrdiff_t>(n_max), letters.end(), w.begin());
      break;
    case Kind::random: {
      if (members == 0) throw Error(ErrorCode::InvalidArgument, "random word over an empty tuple");
      std::mt19937_64 rng(seed);
      for (std::size_t s = 1; s <= n_max; ++s) {
        w[n_max - s] = static_cast<std::uint32_t>(1 + rng() % members);
      }
      break;
    }
  }
  return w;
}

RadiusSequence word_radius_sequence(const OperatorTuple& tuple, const WordSpec& word,
                                    const CoordVector& x, int n_max) {
  require_depth(n_max);
  const Word w = word.materialize(static_cast<std::size_t>(n_max), tuple.size());
  tuple.check_word(w);
  require_seed(x);
  RadiusSequence seq;
  seq.kind = SequenceKind::fixed_word;
  if (word.kind == WordSpec::Kind::random) seq.seed = word.seed;
  seq.points.reserve(static_cast<std::size_t>(n_max));
  std::optional<ScaledVector> cur = normalize(x, 0.0);
  for (int n = 1; n <= n_max; ++n) {
    if (cur) {
      const auto letter = w[static_cast<std::size_t>(n_max - n)];
      cur = normalize(tuple.member(letter).apply(cur->unit), cur->log_scale);
      ++seq.applications;
    }
    seq.points.push_back(cur ? make_point(n, cur->log_scale) : zero_point(n));
  }
  seq.words.push_back(w);
  return seq;
}

bool dominance_pruning_sound(const OperatorTuple& tuple, const CoordVector& x, int n_max,
                             std::size_t max_probe) {
  for (const Scalar& v : x.values()) {
    if (v.imag() != 0.0 || v.real() < 0.0) return false;
  }
  const Index reach = tuple.reach_bound(std::max<Index>(x.max_index(), 1),
                                        static_cast<std::size_t>(std::max(n_max, 0)));
  if (reach > max_probe) return false;
  for (const Operator& m : tuple.members()) {
    if (!is_positive(m, static_cast<std::size_t>(reach), 0.0).positive) return false;
  }
  return true;
}

namespace {

struct FrontierItem {
  ScaledVector v;
  Word word;  // leftmost-first
};

std::vector<FrontierItem> expand(const OperatorTuple& tuple, const std::vector<FrontierItem>& frontier,
                                 unsigned workers) {
  const std::size_t chunks = detail::chunk_count(frontier.size(), workers);
  std::vector<std::vector<FrontierItem>> parts(chunks);
  detail::for_each_chunk(frontier.size(), workers, [&](std::size_t c, std::size_t begin, std::size_t end) {
    auto& out = parts[c];
    out.reserve((end - begin) * tuple.size());
    for (std::size_t f = begin; f < end; ++f) {
      const FrontierItem& item = frontier[f];
      for (std::size_t m = 1; m <= tuple.size(); ++m) {
        auto child = normalize(tuple.member(m).apply(item.v.unit), item.v.log_scale);
        if (!child) continue;
        Word w;
        w.reserve(item.word.size() + 1);
        w.push_back(static_cast<std::uint32_t>(m));
        w.insert(w.end(), item.word.begin(), item.word.end());
        out.push_back({std::move(*child), std::move(w)});
      }
    }
  });
  std::vector<FrontierItem> all;
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  all.reserve(total);
  for (auto& p : parts) std::move(p.begin(), p.end(), std::back_inserter(all));
  return all;
}

std::vector<FrontierItem> prune_dominated(std::vector<FrontierItem> items, unsigned workers) {
  // u is dropped when some other v has u <= v, keeping the earliest of a
  // mutually dominating group. Flags are computed against the unpruned set.
  std::vector<char> drop(items.size(), 0);
  detail::for_each_chunk(items.size(), workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto& u = items[i].v;
      for (std::size_t j = 0; j < items.size(); ++j) {
        if (j == i) continue;
        const auto& v = items[j].v;
        if (!dominated_by(u.unit, u.log_scale, v.unit, v.log_scale)) continue;
        if (j < i || !dominated_by(v.unit, v.log_scale, u.unit, u.log_scale)) {
          drop[i] = 1;
          break;
        }
      }
    }
  });
  std::vector<FrontierItem> kept;
  kept.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i)
    if (!drop[i]) kept.push_back(std::move(items[i]));
  return kept;
}

std::vector<FrontierItem> keep_beam(std::vector<FrontierItem> items, std::size_t width) {
  if (items.size() <= width) return items;
  std::vector<std::size_t> order(items.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return items[a].v.log_scale > items[b].v.log_scale;
  });
  order.resize(width);
  std::sort(order.begin(), order.end());
  std::vector<FrontierItem> kept;
  kept.reserve(width);
  for (const std::size_t i : order) kept.push_back(std::move(items[i]));
  return kept;
}

}  // namespace

RadiusSequence uniform_joint_sequence(const OperatorTuple& tuple, const CoordVector& x, int n_max,
                                      const UniformOptions& opts) {
  require_seed(x);
  require_depth(n_max);
  if (opts.strategy == Strategy::beam && opts.beam_width == 0) {
    throw Error(ErrorCode::InvalidArgument, "beam search needs width >= 1");
  }
  const unsigned workers = std::max(1u, opts.workers);
  bool prune = false;
  RadiusSequence seq;
  seq.kind = SequenceKind::uniform_max;
  switch (opts.strategy) {
    case Strategy::exact:
      seq.strategy = "exact";
      break;
    case Strategy::exact_pruned:
      prune = dominance_pruning_sound(tuple, x, n_max, opts.max_probe);
      seq.strategy = prune ? "exact-with-dominance-pruning" : "exact";
      break;
    case Strategy::beam:
      seq.strategy = "beam(" + std::to_string(opts.beam_width) + ")";
      seq.lower_bound_only = true;
      break;
  }

  std::vector<FrontierItem> frontier;
  frontier.push_back({*normalize(x, 0.0), {}});
  for (int n = 1; n <= n_max; ++n) {
    if (frontier.empty()) {
      seq.points.push_back(zero_point(n));
      seq.words.emplace_back();
      continue;
    }
    const std::uint64_t needed = static_cast<std::uint64_t>(frontier.size()) * tuple.size();
    if (seq.applications + needed > opts.budget) {
      Error e(ErrorCode::BudgetExceeded,
              "application budget " + std::to_string(opts.budget) + " exhausted after depth " +
                  std::to_string(n - 1));
      e.completed_depth = n - 1;
      throw e;
    }
    seq.applications += needed;
    frontier = expand(tuple, frontier, workers);
    if (prune) frontier = prune_dominated(std::move(frontier), workers);
    if (opts.strategy == Strategy::beam) frontier = keep_beam(std::move(frontier), opts.beam_width);

    if (frontier.empty()) {
      seq.points.push_back(zero_point(n));
      seq.words.emplace_back();
      continue;
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < frontier.size(); ++i) {
      if (frontier[i].v.log_scale > frontier[best].v.log_scale) best = i;
    }
    seq.points.push_back(make_point(n, frontier[best].v.log_scale));
    seq.words.push_back(frontier[best].word);
  }
  return seq;
}

std::vector<Word> periodic_candidates(std::size_t members, std::size_t max_period) {
  std::vector<Word> out;
  for (std::size_t p = 1; p <= max_period; ++p) {
    Word w(p, 1);
    while (true) {
      bool primitive = true;
      for (std::size_t q = 1; q < p && primitive; ++q) {
        if (p % q != 0) continue;
        bool repeats = true;
        for (std::size_t i = q; i < p && repeats; ++i) repeats = w[i] == w[i - q];
        if (repeats) primitive = false;
      }
      if (primitive) out.push_back(w);
      // Odometer increment over [1, members]^p.
      std::size_t pos = p;
      while (pos > 0 && w[pos - 1] == members) {
        w[pos - 1] = 1;
        --pos;
      }
      if (pos == 0) break;
      ++w[pos - 1];
    }
  }
  return out;
}

namespace {

constexpr double kRefuteMargin = 1.05;
constexpr double kStableRatio = 0.95;
constexpr double kMonotoneSlack = 1e-12;

bool non_increasing_tail(const std::vector<double>& roots, int depth) {
  const int h = depth / 2;
  for (int n = depth - h; n < depth; ++n) {
    const double prev = roots[static_cast<std::size_t>(n - 1)];
    const double next = roots[static_cast<std::size_t>(n)];
    if (next > prev * (1.0 + kMonotoneSlack)) return false;
  }
  return true;
}

/// All of the last depth/2 roots are >= margin * threshold and the later
/// half of that tail has not shrunk relative to the earlier half.
bool non_decaying_tail(const RadiusSequence& s, int depth, double threshold) {
  const int h = depth / 2;
  const int first = depth - h + 1;
  for (int n = first; n <= depth; ++n) {
    const auto& p = s.at(n);
    if (p.exact_zero || p.root < kRefuteMargin * threshold) return false;
  }
  const int q = h / 2;
  double early = 0.0, late = 0.0;
  for (int n = first; n < first + (h - q); ++n) early += std::log(s.root(n));
  for (int n = first + (h - q); n <= depth; ++n) late += std::log(s.root(n));
  early /= (h - q);
  late /= q;
  return late >= early + std::log(kStableRatio);
}

std::vector<double> roots_of(const RadiusSequence& s) {
  std::vector<double> r;
  r.reserve(s.points.size());
  for (const auto& p : s.points) r.push_back(p.root);
  return r;
}

}  // namespace

QnilVerdict certify_joint(const OperatorTuple& tuple, const CoordVector& x, int depth,
                          double decay_threshold, const CertifyOptions& opts) {
  require_seed(x);
  if (depth < 4) throw Error(ErrorCode::InvalidArgument, "certification depth must be >= 4");
  if (!(decay_threshold >= 0.0)) throw Error(ErrorCode::InvalidArgument, "threshold must be >= 0");

  QnilVerdict verdict;
  verdict.depth = depth;

  struct Candidate {
    Word word;
    bool periodic;
    RadiusSequence seq;
  };
  std::vector<Candidate> candidates;
  for (Word& p : periodic_candidates(tuple.size(), 3)) {
    auto seq = word_radius_sequence(tuple, WordSpec::periodic(p), x, depth);
    candidates.push_back({std::move(p), true, std::move(seq)});
  }

  std::vector<double> evidence_roots;
  bool may_certify = true;
  if (opts.mode == CertifyOptions::Mode::uniform) {
    verdict.mode = "uniform";
    const RadiusSequence beta = uniform_joint_sequence(tuple, x, depth, opts.uniform);
    verdict.strategy = beta.strategy;
    may_certify = !beta.lower_bound_only;
    evidence_roots = roots_of(beta);
  } else {
    verdict.mode = "per-word-sampled";
    verdict.strategy = "sampled(" + std::to_string(opts.sample_count) + ")";
    for (std::size_t i = 0; i < opts.sample_count; ++i) {
      const std::uint64_t s = splitmix64(opts.seed + i);
      auto seq = word_radius_sequence(tuple, WordSpec::random(s), x, depth);
      Word w = seq.words.front();
      candidates.push_back({std::move(w), false, std::move(seq)});
    }
    evidence_roots.assign(static_cast<std::size_t>(depth), 0.0);
    for (const auto& c : candidates) {
      for (int n = 1; n <= depth; ++n) {
        auto& r = evidence_roots[static_cast<std::size_t>(n - 1)];
        r = std::max(r, c.seq.root(n));
      }
    }
  }
  verdict.final_root = evidence_roots.back();

  if (may_certify && verdict.final_root <= decay_threshold && non_increasing_tail(evidence_roots, depth)) {
    verdict.status = QnilStatus::certified_decaying;
    return verdict;
  }
  for (const auto& c : candidates) {
    if (non_decaying_tail(c.seq, depth, decay_threshold)) {
      verdict.status = QnilStatus::refuted;
      verdict.witness = c.word;
      return verdict;
    }
  }
  verdict.status = QnilStatus::inconclusive;
  return verdict;
}

Operator polynomial_operator(const OperatorTuple& tuple, const Polynomial& poly) {
  std::vector<Operator> terms;
  terms.reserve(poly.size());
  for (const Monomial& m : poly) {
    if (m.word.empty()) {
      throw Error(ErrorCode::ConstantTermPresent,
                  "polynomial has a constant term; p(0) must vanish");
    }
    if (!std::isfinite(m.coefficient.real()) || !std::isfinite(m.coefficient.imag())) {
      throw Error(ErrorCode::InvalidArgument, "polynomial coefficients must be finite");
    }
    terms.push_back(Operator::scaled(m.coefficient, tuple.word_operator(m.word)));
  }
  return Operator::sum(std::move(terms));
}

RadiusSequence polynomial_radius(const OperatorTuple& tuple, const Polynomial& poly,
                                 const CoordVector& x, int n_max) {
  return local_radius_sequence(polynomial_operator(tuple, poly), x, n_max);
}

std::vector<std::optional<double>> polynomial_log_bound(const OperatorTuple& tuple,
                                                        const Polynomial& poly,
                                                        const CoordVector& x, int n_max,
                                                        const UniformOptions& opts) {
  (void)polynomial_operator(tuple, poly);  // validates
  require_depth(n_max);
  std::vector<std::optional<double>> out(static_cast<std::size_t>(n_max));
  if (poly.empty()) return out;
  double c = 0.0;
  std::size_t dmin = std::numeric_limits<std::size_t>::max(), dmax = 0;
  for (const Monomial& m : poly) {
    c = std::max(c, std::abs(m.coefficient));
    dmin = std::min(dmin, m.word.size());
    dmax = std::max(dmax, m.word.size());
  }
  if (c == 0.0) return out;
  const double log_kc = std::log(static_cast<double>(poly.size()) * c);
  const RadiusSequence beta =
      uniform_joint_sequence(tuple, x, static_cast<int>(dmax) * n_max, opts);
  for (int n = 1; n <= n_max; ++n) {
    std::optional<double> best;
    for (std::size_t len = dmin * static_cast<std::size_t>(n); len <= dmax * static_cast<std::size_t>(n); ++len) {
      const auto& p = beta.at(static_cast<int>(len));
      if (p.exact_zero) continue;
      best = best ? std::max(*best, p.log_norm) : p.log_norm;
    }
    if (best) out[static_cast<std::size_t>(n - 1)] = n * log_kc + *best;
  }
  return out;
}

JsrEstimate jsr_estimate(const OperatorTuple& tuple, std::size_t truncation_dim, int n_max,
                         const JsrOptions& opts) {
  require_depth(n_max);
  if (truncation_dim == 0) throw Error(ErrorCode::InvalidArgument, "truncation dimension must be >= 1");
  std::vector<DenseMatrix> members;
  for (const Operator& m : tuple.members()) members.push_back(m.truncate(truncation_dim));

  const PowerIterationOptions power{opts.power_iterations, opts.power_tolerance};
  JsrEstimate est;
  est.truncation_dim = truncation_dim;
  est.upper = std::numeric_limits<double>::infinity();
  std::uint64_t used = 0;
  std::vector<DenseMatrix> level = members;
  for (int n = 1; n <= n_max; ++n) {
    if (n > 1) {
      const std::uint64_t needed = static_cast<std::uint64_t>(level.size()) * members.size();
      if (used + needed > opts.budget) {
        Error e(ErrorCode::BudgetExceeded,
                "product budget " + std::to_string(opts.budget) + " exhausted after depth " +
                    std::to_string(n - 1));
        e.completed_depth = n - 1;
        throw e;
      }
      std::vector<DenseMatrix> next;
      next.reserve(needed);
      for (const DenseMatrix& s : level)
        for (const DenseMatrix& m : members) next.push_back(matmul(m, s));
      level = std::move(next);
    }
    used += level.size();
    double max_norm = 0.0, max_rho = 0.0;
    for (const DenseMatrix& s : level) {
      max_norm = std::max(max_norm, spectral_norm(s, power));
      max_rho = std::max(max_rho, spectral_radius_estimate(s, power));
    }
    const double inv_n = 1.0 / n;
    est.upper_by_depth.push_back(std::pow(max_norm, inv_n));
    est.lower_by_depth.push_back(std::pow(max_rho, inv_n));
    est.upper = std::min(est.upper, est.upper_by_depth.back());
    est.lower = std::max(est.lower, est.lower_by_depth.back());
    est.depth = n;
  }
  return est;
}

}  // namespace qnil
