#pragma once

// Subcommands of lifespan_cli. Each writes its CSV reports into the output
// directory and returns a process exit code.

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"
#include "lifespan/density.hpp"

namespace lifespan::app {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerifyFailed = 1,
  kExitConfigError = 2,
  kExitNumericalFailure = 3,
};

struct Console {
  bool quiet = false;
  std::ostream* out;
  std::ostream* err;

  void info(const std::string& line) const;
  void error(const std::string& line) const;
};

struct VerifyRow {
  std::string check;
  double value = 0.0;
  double threshold = 0.0;
  std::string status;  // pass | fail | skip
  std::string detail;
};

int cmd_density(const RunConfig& cfg, const Console& console);
int cmd_bounds(const RunConfig& cfg, const Console& console);
int cmd_simulate(const RunConfig& cfg, const Console& console);
int cmd_verify(const RunConfig& cfg, const Console& console);
int cmd_kernel_check(const RunConfig& cfg, const Console& console);

/// density.csv: alpha,r,center_0..center_{n-1},density,estimator,
/// samples_or_resolution,kind,config_hash where kind is origin or
/// center_sup for grid cells and D_origin or D_bar for the limsup proxies.
void write_density_csv(const std::string& path, const DensityReport& report, const std::string& hash);
DensityReport read_density_csv(const std::string& path);

/// Parses argv and dispatches; never throws.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace lifespan::app
