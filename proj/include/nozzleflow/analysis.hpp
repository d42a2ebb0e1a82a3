#pragma once

#include <vector>

#include "nozzleflow/solver.hpp"

namespace nozzleflow {

template <int Dim>
struct SpeedSummary {
  double max_speed = 0;    ///< Q
  double max_mach = 0;
  Point<Dim> argmax = Point<Dim>::Zero();  ///< physical location of Q
  bool subsonic = true;    ///< Q < 1
};

/// Q = max quadrature-point |grad phi| and the Mach number there, using the
/// untruncated density (Mach is reported as +inf beyond the vacuum bound).
template <int Dim>
SpeedSummary<Dim> max_speed_and_mach(const Mesh<Dim>& mesh, const DiscreteField& field, const GasModel<>& gas,
                                     const NozzleMap<Dim>& nozzle);

struct FarFieldProbe {
  double offset;          ///< distance from the domain end
  double station;         ///< axial midplane actually sampled
  double reference;       ///< q- or q+
  double mean_axial;      ///< section-averaged axial velocity
  double max_transverse;  ///< sup transverse speed on the section
  double deviation;       ///< |mean_axial - reference|
  double relative_deviation;
};

struct FarFieldReport {
  double q_minus = 0;
  double q_plus = 0;
  std::vector<FarFieldProbe> inlet;   ///< probes at x_n = -(L - offset)
  std::vector<FarFieldProbe> outlet;  ///< probes at x_n = +(L - offset)
  double max_relative_deviation = 0;
  double max_relative_transverse = 0;  ///< max_transverse / reference
};

/// Compares section averages near both ends with the uniform far-field
/// speeds q+- solving rho(q^2) q = m0 / |S+-|. Throws DomainError for probes
/// outside the domain.
template <int Dim>
FarFieldReport far_field_check(const Mesh<Dim>& mesh, const DiscreteField& field, const GasModel<>& gas,
                               const NozzleMap<Dim>& nozzle, double m0, const std::vector<double>& offsets);

struct UniquenessResult {
  double discrepancy = 0;  ///< sup |grad phi_1 - grad phi_2| over quadrature points
  SolverReport from_zero;
  SolverReport from_ramp;
  bool both_certified = false;
};

/// Solves from the zero field and from the ramp (m0 / |S+|)(x_n + L) and
/// compares the gradients.
template <int Dim>
UniquenessResult uniqueness_check(const FlowProblem<Dim>& problem, const NewtonConfig& config = {});

struct SweepPoint {
  double m0;
  double max_speed;  ///< Q(m0); NaN when the solve failed
  bool converged;
  bool certified;
  double flux_error;
};

struct CriticalBracket {
  double delta0;
  double q_limit;   ///< sqrt(1 - 2 delta0)
  double m_lo;      ///< largest flux found to converge and certify
  double m_hi;      ///< smallest flux found to fail either
  std::vector<SweepPoint> evaluations;
};

struct SweepResult {
  std::vector<SweepPoint> points;        ///< Q(m0) sweep, increasing m0
  std::vector<CriticalBracket> brackets; ///< one per delta0, in schedule order
  /// Estimate of the critical flux (last m_lo) and its bracket width.
  double critical_estimate() const { return brackets.empty() ? 0.0 : brackets.back().m_lo; }
  double critical_uncertainty() const { return brackets.empty() ? 0.0 : brackets.back().m_hi - brackets.back().m_lo; }
};

/// Q(m0) for each flux in `fluxes` (strictly increasing), each solved from
/// the zero field.
template <int Dim>
std::vector<SweepPoint> flux_sweep(const FlowProblem<Dim>& problem, const std::vector<double>& fluxes,
                                   const NewtonConfig& config = {});

/// For each truncation parameter, bisects on m0 for the largest flux whose
/// solve converges and certifies. The initial upper bound is the choking
/// flux of the narrowest sampled section (times 1.001).
template <int Dim>
SweepResult critical_flux_search(const FlowProblem<Dim>& problem, const std::vector<double>& delta_schedule,
                                 int bisection_steps = 12, const NewtonConfig& config = {});

struct LocalAverageResult {
  double worst_average = 0;  ///< sup over windows of (1/|W|) int_W |grad phi|^2
  double worst_center = 0;
  double ratio = 0;          ///< worst_average / m0^2 (0 when m0 = 0)
};

/// Averages of |grad phi|^2 over windows |x_n - x0| < 1 centred on every
/// axial node x0 with the window inside the domain. Requires L >= 2.
template <int Dim>
LocalAverageResult local_average_diagnostic(const Mesh<Dim>& mesh, const DiscreteField& field,
                                            const NozzleMap<Dim>& nozzle, double m0);

struct PoincareResult {
  double worst_ratio = 0;  ///< max over slabs and fields
  std::vector<double> slab_max;  ///< per slab, max over fields
  std::vector<double> slab_start;
  int skipped = 0;         ///< (slab, field) pairs whose gradient is round-off
};

/// ||f - mean||_2 / ||grad f||_2 on every unit slab a < x_n < a + 1 that is
/// a union of cell layers.
template <int Dim>
PoincareResult poincare_diagnostic(const Mesh<Dim>& mesh, const NozzleMap<Dim>& nozzle,
                                   const std::vector<DiscreteField>& fields);

}  // namespace nozzleflow
