#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mpolar {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Precondition or internal-contract violation (mismatched grids, bad axis, ...).
struct ContractError : Error {
    using Error::Error;
};

/// Invalid run configuration; message names the offending key.
struct ConfigError : Error {
    using Error::Error;
};

/// Malformed checkpoint or CSV input; carries the byte offset of the problem.
struct FormatError : Error {
    std::size_t byte_offset;
    FormatError(const std::string& msg, std::size_t offset)
        : Error(msg + " (byte offset " + std::to_string(offset) + ")"), byte_offset(offset) {}
};

/// Non-finite value detected while stepping; names the stage that produced it.
struct BlowupError : Error {
    std::string stage;
    double time;
    BlowupError(const std::string& stage_name, double t)
        : Error("non-finite value in stage '" + stage_name + "' at t = " + std::to_string(t)),
          stage(stage_name), time(t) {}
};

/// Requested quantity is undefined outside the dissipative regime gamma > 4 kappa.
struct RegimeError : Error {
    using Error::Error;
};

/// API misuse that is not a numerical failure (wrong variant, too few records, ...).
struct UsageError : Error {
    using Error::Error;
};

/// Iterative solver did not reach its tolerance; carries the final residual.
struct SolverError : Error {
    double residual;
    int iterations;
    SolverError(const std::string& msg, double final_residual, int iters)
        : Error(msg + " (relative residual " + std::to_string(final_residual) + " after " +
                std::to_string(iters) + " iterations)"),
          residual(final_residual), iterations(iters) {}
};

}  // namespace mpolar
