#pragma once

// Text output formats. Every number is written with 17 significant digits.
//
// Snapshot layout:
//   # nozzleflow snapshot 1
//   config_hash <16 hex digits>
//   dimension <n>
//   mesh <L> <N_t> <N_a>
//   nodes <count>
//   <x_1> ... <x_n> <phi>        one line per node, mesh node order
//
// CSV headers:
//   flux.csv          station,measure,flux,deviation
//   convergence.csv   iteration,residual,energy,step_length
//   q_vs_m0.csv       m0,Q,converged,certified,flux_error
//   critical.csv      delta0,q_limit,m_lo,m_hi,evaluations
//   far_field.csv     end,offset,station,reference,mean_axial,max_transverse,deviation,relative_deviation
//   continuation.csv  L,N_a,iterations,Q,certified,interior_change

#include <cstdint>
#include <string>
#include <vector>

#include "nozzleflow/analysis.hpp"

namespace nozzleflow {

std::string format_number(double v);

/// Writes to `path` through a temporary file in the same directory and a
/// rename. Throws IoError with the path.
void write_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

struct Snapshot {
  std::uint64_t config_hash = 0;
  int dimension = 0;
  double half_length = 0;
  int transverse_cells = 0;
  int axial_cells = 0;
  Eigen::MatrixXd coordinates;  ///< dimension x nodes, physical
  Eigen::VectorXd values;
};

template <int Dim>
std::string snapshot_text(const Mesh<Dim>& mesh, const NozzleMap<Dim>& nozzle, const DiscreteField& field,
                          std::uint64_t config_hash);

/// Throws DomainError on malformed text.
Snapshot parse_snapshot(const std::string& text);

/// Field on `mesh` from a snapshot taken on a mesh of the same shape.
template <int Dim>
DiscreteField field_from_snapshot(const Mesh<Dim>& mesh, const Snapshot& snapshot);

template <int Dim>
std::string flux_csv(const std::vector<SectionSample<Dim>>& sections, double m0);
std::string convergence_csv(const SolverReport& report);
std::string sweep_csv(const std::vector<SweepPoint>& points);
std::string critical_csv(const std::vector<CriticalBracket>& brackets);
std::string far_field_csv(const FarFieldReport& report);
template <int Dim>
std::string continuation_csv(const ContinuationResult<Dim>& result);

/// Legacy ASCII VTK structured grid with point data phi, velocity and Mach
/// (Mach is -1 where the speed exceeds the vacuum bound). In 2D the grid is
/// (N_t+1) x 1 x (N_a+1) with the axial coordinate as z.
template <int Dim>
std::string vtk_text(const Mesh<Dim>& mesh, const NozzleMap<Dim>& nozzle, const DiscreteField& field,
                     const GasModel<>& gas);

}  // namespace nozzleflow
