#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "cprdyn/integrator.hpp"
#include "cprdyn/model.hpp"
#include "cprdyn/stochastic.hpp"
#include "cprdyn/sweep.hpp"

namespace cprdyn {

enum class ExitCode : int { Ok = 0, Validation = 1, Numerical = 2, Io = 3 };

enum class OutputFormat { Csv, Json };

struct RunDescription {
  std::string command;  // simulate | equilibria | sweep | ensemble | rules
  UpdateRule rule = UpdateRule::Replicator;
  ModelParams params;
  SystemState initial{0.8, 0.9};
  IntegratorConfig integrator;
  GridSpec grid;
  EnsembleConfig ensemble;
  std::filesystem::path output_dir = ".";
  OutputFormat format = OutputFormat::Csv;
  unsigned threads = 0;
};

// Integrator defaults differ by command: a single trajectory uses dt = 1e-3,
// basin sweeps dt = 0.1 over a longer horizon.
IntegratorConfig default_integrator(const std::string& command);

// Thrown for --help; what() holds the help text.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flags override values read from --config FILE (flat `key = value` lines,
// keys spelled like the long flag names).  Throws ValidationError.
RunDescription parse_and_validate(const std::vector<std::string>& args);

// Command line (without program name or --output) that reproduces `run`.
std::vector<std::string> canonical_args(const RunDescription& run);

// Runs the command, writing data files plus a manifest into run.output_dir.
// Returns the written paths.  Throws ValidationError, NumericalError,
// DomainError or IoError.
std::vector<std::filesystem::path> dispatch(const RunDescription& run, std::ostream& out);

// parse_and_validate + dispatch with errors mapped to exit codes.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cprdyn
