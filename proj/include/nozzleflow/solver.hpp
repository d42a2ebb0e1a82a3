#pragma once

#include <string>
#include <vector>

#include "nozzleflow/fem.hpp"
#include "nozzleflow/gas.hpp"
#include "nozzleflow/mesh.hpp"
#include "nozzleflow/nozzle.hpp"

namespace nozzleflow {

enum class LinearSolverKind { Automatic, ConjugateGradient, Direct };

struct NewtonConfig {
  double relative_tolerance = 1e-10;  ///< on ||R|| relative to the initial residual
  double absolute_tolerance = 1e-12;
  int max_iterations = 50;
  double armijo_slope = 1e-4;
  double backtrack_factor = 0.5;
  double min_step = 1e-8;
  LinearSolverKind linear_solver = LinearSolverKind::Automatic;
  double cg_tolerance = 1e-12;
  /// Automatic uses the direct solver below this many unknowns.
  int direct_threshold = 2000;
  /// On failure, retry through m0/4, m0/2, 3m0/4, m0.
  bool flux_ramp = true;

  void validate() const;
};

struct SolverReport {
  bool converged = false;
  int iterations = 0;
  std::vector<double> residual_history;  ///< entry 0 is the initial residual
  std::vector<double> energy_history;    ///< J_h before each step, then the final value
  std::vector<double> step_lengths;
  int linear_iterations = 0;
  double min_ritz = 0;                   ///< smallest Ritz value / pivot seen in any linear solve
  double energy = 0;
  double max_speed = 0;                  ///< Q = max quadrature-point |grad phi|
  bool truncation_certified = false;     ///< Q^2 <= 1 - 2 delta0
  double flux_error = 0;                 ///< max |flux - m0| over axial cell midplanes
  double relative_flux_error = 0;
  double wall_seconds = 0;
  bool used_flux_ramp = false;
  std::string message;
};

class NewtonFailure : public ConvergenceError {
 public:
  NewtonFailure(const std::string& what, SolverReport report)
      : ConvergenceError(what), report_(std::move(report)) {}
  const SolverReport& report() const { return report_; }

 private:
  SolverReport report_;
};

struct Solution {
  DiscreteField field;
  SolverReport report;
};

/// Damped Newton minimisation of J_h from `init`. Every accepted step passes
/// an Armijo test on J_h (full steps whose predicted decrease is below
/// round-off are accepted outright). Throws NewtonFailure.
template <int Dim>
Solution newton_solve(const Mesh<Dim>& mesh, const GasModel<>& gas, const NozzleMap<Dim>& nozzle, double m0,
                      const DiscreteField& init, const NewtonConfig& config = {});

struct Certification {
  bool certified = false;
  double max_speed_squared = 0;
  double limit = 0;                     ///< 1 - 2 delta0
  double margin = 0;                    ///< limit - max_speed_squared
  bool coefficients_untruncated = false;///< Theta == rho at every quadrature point
};

template <int Dim>
Certification certify_subsonic(const Mesh<Dim>& mesh, const DiscreteField& field, const GasModel<>& gas,
                               const NozzleMap<Dim>& nozzle);

/// A truncated flow problem: nozzle, gas, incoming flux and discretization.
template <int Dim>
struct FlowProblem {
  NozzleMap<Dim> nozzle;
  GasModel<> gas;
  double m0;
  double half_length;
  int transverse_cells;
  int axial_cells;

  Mesh<Dim> mesh() const { return build_mesh(nozzle, half_length, transverse_cells, axial_cells); }
  double axial_spacing() const { return 2 * half_length / axial_cells; }
};

template <int Dim>
struct ContinuationStage {
  double half_length;
  Mesh<Dim> mesh;
  DiscreteField field;
  SolverReport report;
  /// sup |grad phi_k - grad phi_{k-1}| on |x_n| <= window (NaN for k = 0).
  double interior_change;
};

template <int Dim>
struct ContinuationResult {
  double window;
  std::vector<ContinuationStage<Dim>> stages;
};

/// Solves on each half length in `schedule` at the axial spacing of
/// `problem`, seeding each solve by extending the previous potential with
/// constant axial gradients at both ends.
template <int Dim>
ContinuationResult<Dim> continue_in_L(const FlowProblem<Dim>& problem, const std::vector<double>& schedule,
                                      const NewtonConfig& config = {});

/// Initial guess on `target` from a solution on the shorter, axially aligned
/// `source` mesh.
template <int Dim>
DiscreteField extend_field(const Mesh<Dim>& source, const DiscreteField& field, const Mesh<Dim>& target);

/// Quadrature-point gradients of the cells lying in |x_n| <= window, in
/// axial-then-transverse order (aligned meshes give matching sequences).
template <int Dim>
std::vector<Point<Dim>> window_gradients(const Mesh<Dim>& mesh, const DiscreteField& field,
                                         const NozzleMap<Dim>& nozzle, double window);

}  // namespace nozzleflow
