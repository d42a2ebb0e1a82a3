#pragma once

#include <iosfwd>

#include "nozzleflow/config.hpp"

namespace nozzleflow {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitFailure = 1;      ///< solver failure, invalid config, I/O error
inline constexpr int kExitUncertified = 2;  ///< converged, but the truncation was active

/// Executes one configured run, writing its files into
/// config.output_directory and a human-readable log to `log`.
///
/// Files by mode:
///   solve, far-field    solution.txt, flux.csv, convergence.csv, solution.vtk,
///                       continuation.csv (with domain.L_schedule),
///                       far_field.csv (far-field only)
///   validate-cylinder   the solve files plus validation.csv
///   sweep               q_vs_m0.csv
///   critical-flux       critical.csv, q_vs_m0.csv (evaluations of the last delta0)
///   uniqueness          uniqueness.csv
int run(const RunConfig& config, std::ostream& log);

}  // namespace nozzleflow
