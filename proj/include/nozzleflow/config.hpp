#pragma once

// Run configuration: one `key = value` per line, dotted keys, `#` starts a
// comment. Lists are comma separated.
//
//   mode                    solve | sweep | critical-flux | uniqueness |
//                           validate-cylinder | far-field      (solve)
//   gas.gamma               required
//   gas.delta0              0.05
//   nozzle.kind             cylinder | tanh | gaussian_throat (cylinder)
//   nozzle.dimension        2 | 3                              (2)
//   nozzle.r0               cylinder / throat far radius       (0.5)
//   nozzle.r_minus          tanh inlet half-width              (0.5)
//   nozzle.r_plus           tanh outlet half-width             (1.0)
//   nozzle.length           tanh transition length             (1.0)
//   nozzle.depth            throat depth                       (0.2)
//   nozzle.width            throat width                       (1.0)
//   domain.L                half length                        (4)
//   domain.L_schedule       increasing half lengths (continuation)
//   mesh.N_t, mesh.N_a      cells across / along               (16, 128)
//   flux.m0                 incoming mass flux
//   flux.q_star             validate-cylinder: target speed    (0.5)
//   flux.sweep              increasing fluxes for mode=sweep
//   solver.relative_tolerance, solver.absolute_tolerance, solver.max_iterations,
//   solver.linear_solver (auto | cg | direct), solver.cg_tolerance,
//   solver.direct_threshold, solver.flux_ramp (true | false)
//   output.directory        (.)
//   output.vtk              write solution.vtk                 (true)
//   far_field.offsets       probe offsets from each end        (L/8, L/4)
//   critical.delta0_schedule                                   (0.10, 0.05, 0.025)
//   critical.bisection_steps                                   (12)

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "nozzleflow/solver.hpp"

namespace nozzleflow {

enum class RunMode { Solve, Sweep, CriticalFlux, Uniqueness, ValidateCylinder, FarField };

std::string to_string(RunMode mode);

struct NozzleSpec {
  std::string kind = "cylinder";
  int dimension = 2;
  double r0 = 0.5;
  double r_minus = 0.5;
  double r_plus = 1.0;
  double length = 1.0;
  double depth = 0.2;
  double width = 1.0;
};

struct RunConfig {
  RunMode mode = RunMode::Solve;
  double gamma = 0;
  double delta0 = 0.05;
  NozzleSpec nozzle;
  double half_length = 4;
  std::vector<double> L_schedule;
  int transverse_cells = 16;
  int axial_cells = 128;
  double m0 = 0;
  bool has_m0 = false;
  double q_star = 0.5;
  std::vector<double> sweep;
  NewtonConfig solver;
  std::string output_directory = ".";
  bool write_vtk = true;
  std::vector<double> probe_offsets;  ///< empty: L/8 and L/4
  std::vector<double> delta_schedule{0.10, 0.05, 0.025};
  int bisection_steps = 12;

  /// Every entry after overrides, as written, with its source line (0 for
  /// overrides).
  std::map<std::string, std::pair<std::string, int>> entries;

  /// FNV-1a of the sorted entries, output.directory excluded.
  std::uint64_t hash() const;
};

/// Parses config text; `overrides` are `key=value` strings applied last.
/// Throws ConfigError naming the key and line.
RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {});

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

std::uint64_t fnv1a(std::string_view bytes);

}  // namespace nozzleflow
