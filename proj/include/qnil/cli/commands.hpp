#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qnil/cli/report.hpp"
#include "qnil/cli/scenario.hpp"

namespace qnil::cli {

/// Command-line values that take precedence over scenario params.
struct Overrides {
  std::optional<int> depth;
  std::optional<std::size_t> dim;
  std::optional<double> tol;
  std::optional<std::uint64_t> budget;
  std::optional<std::string> strategy;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<int> n_max;
  std::optional<double> threshold;
};

const std::vector<std::string>& command_names();

ScenarioParams effective_params(const ScenarioParams& base, const Overrides& o);

/// Module errors are caught and recorded in the report; an unknown command
/// throws InvalidArgument.
Report run_command(const std::string& command, const Scenario& scenario, const Overrides& overrides = {});

/// 0 success, 1 assertion or module failure, 2 input error, 3 budget exceeded.
int exit_code(const Report& report);

}  // namespace qnil::cli
