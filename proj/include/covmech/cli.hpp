#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "covmech/catalog.hpp"
#include "covmech/report.hpp"

namespace covmech::cli {

enum ExitCode : int { kPass = 0, kCheckFailure = 1, kConfigError = 2, kNumericalFailure = 3 };

struct InitialSpec {
  std::optional<Eigen::VectorXd> x, pi, v, t;
};

// One JSON document describes one run.
struct RunConfig {
  std::string system;
  ParamMap params;
  InitialSpec initial;
  IntegratorConfig integrator;
  std::optional<double> tau0, tau1;
  std::vector<std::string> monitors;     // empty: all registered constants
  std::vector<std::string> observables;  // bracket-table entries; empty: all registered constants
  std::uint64_t seed = 42;
  std::size_t points = 100;
  std::string output_dir = ".";
  bool write_csv = true;
  std::size_t csv_stride = 1;
  bool negative_controls = false;

  // Throws ConfigError naming the offending field.
  static RunConfig from_json(const Json& j);
  // Throws ConfigError with line and column for malformed documents.
  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::filesystem::path& path);
  // Resolved config: every field explicit, re-loadable with from_json.
  Json to_json() const;
};

struct Overrides {
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> points;
  bool negative_controls = false;

  void apply(RunConfig& cfg) const;
};

struct CommandResult {
  int exit_code = kPass;
  Json report;
  std::string report_name;                 // file name inside the output directory
  std::optional<std::string> csv;          // trajectory rows (simulate only)
  std::vector<std::string> messages;       // human-readable summary lines
};

CommandResult cmd_simulate(const RunConfig& cfg);
CommandResult cmd_verify(const RunConfig& cfg);
CommandResult cmd_bracket_table(const RunConfig& cfg);

// Full command: load, override, dispatch, write files, map exceptions to exit codes.
int run(const std::string& command, const std::filesystem::path& config_path, const Overrides& overrides,
        std::ostream& out, std::ostream& err);

}  // namespace covmech::cli
