// qnil: run quasinilpotence and invariant-subspace analyses on a scenario.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "qnil/cli/commands.hpp"
#include "qnil/cli/report.hpp"
#include "qnil/cli/scenario.hpp"
#include "qnil/error.hpp"

namespace {

template <typename T>
void add_override(CLI::App& app, const std::string& flag, std::optional<T>& target, const std::string& help) {
  app.add_option_function<T>(flag, [&target](const T& v) { target = v; }, help);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace qnil::cli;

  CLI::App app{"Local and joint quasinilpotence analysis with invariant-subspace construction"};
  app.set_version_flag("--version", kToolVersion);

  std::string command;
  std::string scenario_ref;
  std::string out = "-";
  std::string format = "json";
  Overrides o;

  app.add_option("command", command, "analyze | joint | subspace | weighted | jsr | paper-example")
      ->required()
      ->check(CLI::IsMember(command_names()));
  app.add_option("--scenario", scenario_ref, "Scenario JSON file or builtin:NAME")->required();
  add_override(app, "--depth", o.depth, "Word depth for joint sequences and orbits");
  add_override(app, "--dim", o.dim, "Truncation dimension");
  add_override(app, "--tol", o.tol, "Rank tolerance");
  add_override(app, "--budget", o.budget, "Operator application budget");
  add_override(app, "--strategy", o.strategy, "exact | pruned | beam");
  add_override(app, "--seed", o.seed, "Seed for sampled words");
  add_override(app, "--workers", o.workers, "Worker threads");
  add_override(app, "--n-max", o.n_max, "Length of single-operator sequences");
  add_override(app, "--threshold", o.threshold, "Decay threshold for verdicts");
  app.add_option("--out", out, "Output file, '-' for stdout; a directory for csv");
  app.add_option("--format", format, "json | csv | text")->check(CLI::IsMember({"json", "csv", "text"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const Scenario scenario = load_scenario(scenario_ref);
    const ReportFormat fmt = parse_format(format);
    if (fmt == ReportFormat::csv && out == "-") {
      std::cerr << "qnil: csv output needs --out DIRECTORY\n";
      return 2;
    }
    const Report report = run_command(command, scenario, o);
    write_report(report, fmt, out);
    for (const auto& f : report.failures) std::cerr << "qnil: " << f.context << ": " << f.message << '\n';
    for (const auto& a : report.assertions) {
      if (!a.passed) std::cerr << "qnil: assertion failed: " << a.name << '\n';
    }
    return exit_code(report);
  } catch (const qnil::Error& e) {
    std::cerr << "qnil: " << qnil::to_string(e.code()) << ": " << e.what() << '\n';
    return e.code() == qnil::ErrorCode::BudgetExceeded ? 3 : 2;
  }
}
