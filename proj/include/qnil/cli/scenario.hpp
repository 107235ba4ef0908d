#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qnil/coordspace.hpp"
#include "qnil/dense.hpp"
#include "qnil/operators.hpp"
#include "qnil/types.hpp"

namespace qnil::cli {

struct ScenarioParams {
  int depth = 12;
  std::size_t dim = 16;
  double tol = 1e-10;
  std::uint64_t budget = kDefaultBudget;
  std::string strategy = "pruned";  // exact | pruned | beam
  std::size_t beam_width = 16;
  std::uint64_t seed = 0;
  int n_max = 50;
  double threshold = 1e-3;
  std::string mode = "uniform";  // uniform | per-word
  std::size_t samples = 32;
  unsigned workers = 1;
  int jsr_depth = 6;
  std::optional<std::string> seed_vector;

  nlohmann::json to_json() const;
};

/// Per-member weight matrix for the weighted command.
struct WeightMatrixSpec {
  enum class Kind { ones, random_unit_disc, dense };
  Kind kind = Kind::ones;
  std::uint64_t seed = 0;
  std::vector<Scalar> entries;  // dense, row-major d x d

  DenseMatrix build(std::size_t d) const;
};

struct Scenario {
  std::string name;
  std::vector<std::string> operator_names;
  std::vector<Operator> operators;  // parallel to operator_names
  std::vector<std::string> tuple;
  std::vector<std::string> vector_names;
  std::vector<CoordVector> vectors;  // parallel to vector_names
  ScenarioParams params;
  std::optional<std::vector<WeightMatrixSpec>> weights;
  std::optional<std::vector<std::string>> corollary_tuple;
  std::string source;  // bytes the digest is computed from

  const Operator& op(const std::string& name) const;
  const CoordVector& vec(const std::string& name) const;
  OperatorTuple tuple_operators() const;
  std::optional<OperatorTuple> corollary_operators() const;
};

/// kDefaultBudget unless QNIL_BUDGET is set.
std::uint64_t default_budget();

/// Entries r e^{i theta}, uniformly distributed in the closed unit disc.
DenseMatrix random_unit_disc_weights(std::size_t d, std::uint64_t seed);

Scenario parse_scenario_text(const std::string& text);
Scenario parse_scenario_file(const std::string& path);
/// "builtin:NAME" or a file path.
Scenario load_scenario(const std::string& ref);

std::optional<std::string> builtin_scenario_text(const std::string& name);
std::vector<std::string> builtin_scenario_names();

}  // namespace qnil::cli
