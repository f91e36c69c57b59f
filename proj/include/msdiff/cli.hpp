#pragma once

#include "msdiff/errors.hpp"
#include "msdiff/solver.hpp"
#include "msdiff/verify.hpp"

#include <cstdint>
#include <ostream>

namespace msdiff::cli {

/// Process exit codes of the msdiff tool.
enum class ExitCode : int {
  Ok = 0,
  Failure = 1,  ///< failed property check or internal numerical error
  ConfigError = 2,
  PositivityViolation = 3,
  ConvexityFailure = 4,
  StepLimit = 5,
};

ExitCode exit_code_for(ErrorCode code);

/// Columns: time, cell_index, cell_center, species_name, concentration.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, std::uint64_t seed);

/// Columns: time, V, W, cumulative_W, min_concentration, mass_<species>...
void write_ledger_csv(std::ostream& out, const std::vector<LedgerRow>& rows, const std::vector<std::string>& names,
                      std::uint64_t seed);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace msdiff::cli
