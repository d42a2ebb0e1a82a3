#pragma once

// Multilinear finite elements on the reference mesh, pulled back through the
// nozzle map. Volume integrals use the 2-point tensor Gauss rule per cell.
//
// The discrete energy is
//   J_h(phi) = sum_cells sum_q w_q det_q F(|grad_x phi|^2)
//              - (m0 / |S_L+|) int_{S_L+} phi dx'
// and the residual is its gradient with respect to the nodal values.

#include <Eigen/Dense>
#include <functional>

#include "nozzleflow/gas.hpp"
#include "nozzleflow/mesh.hpp"
#include "nozzleflow/nozzle.hpp"

namespace nozzleflow {

/// Symmetric system K delta = rhs in CSR layout, inlet rows/columns
/// eliminated (zero off-diagonals, unit diagonal, zero rhs).
struct SparseSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
};

struct ResidualJacobian {
  Eigen::VectorXd residual;
  SparseSystem system;  ///< rhs = -residual
};

template <int Dim>
struct QuadraturePoint {
  int cell;
  Point<Dim> y;     ///< reference position
  Point<Dim> x;     ///< physical position
  double value;     ///< phi
  Point<Dim> grad;  ///< grad_x phi
  double volume;    ///< quadrature weight times det(dx/dy)
};

template <int Dim>
double assemble_energy(const Mesh<Dim>& mesh, const DiscreteField& field, const GasModel<>& gas,
                       const NozzleMap<Dim>& nozzle, double m0);

template <int Dim>
Eigen::VectorXd assemble_residual(const Mesh<Dim>& mesh, const DiscreteField& field, const GasModel<>& gas,
                                  const NozzleMap<Dim>& nozzle, double m0);

template <int Dim>
ResidualJacobian assemble_residual_jacobian(const Mesh<Dim>& mesh, const DiscreteField& field, const GasModel<>& gas,
                                            const NozzleMap<Dim>& nozzle, double m0);

/// Visits every volume quadrature point in cell order.
template <int Dim>
void for_each_quadrature_point(const Mesh<Dim>& mesh, const DiscreteField& field, const NozzleMap<Dim>& nozzle,
                               const std::function<void(const QuadraturePoint<Dim>&)>& visit);

/// Cross-section data on the axial cell midplane nearest to a station.
template <int Dim>
struct SectionSample {
  double station;          ///< axial coordinate actually used (cell midplane)
  double flux;             ///< int Theta(|grad phi|^2) d_n phi dx'
  double measure;          ///< |S| at the station
  double mean_axial;       ///< (1/|S|) int d_n phi dx'
  double max_transverse;   ///< sup |grad_x' phi| over the section's quadrature points
};

/// Throws DomainError unless -L < station < L.
template <int Dim>
SectionSample<Dim> sample_section(const Mesh<Dim>& mesh, const DiscreteField& field, const GasModel<>& gas,
                                  const NozzleMap<Dim>& nozzle, double station);

template <int Dim>
double flux_through_section(const Mesh<Dim>& mesh, const DiscreteField& field, const GasModel<>& gas,
                            const NozzleMap<Dim>& nozzle, double station) {
  return sample_section(mesh, field, gas, nozzle, station).flux;
}

/// Flux on every axial cell midplane, inlet to outlet.
template <int Dim>
std::vector<SectionSample<Dim>> section_fluxes(const Mesh<Dim>& mesh, const DiscreteField& field,
                                               const GasModel<>& gas, const NozzleMap<Dim>& nozzle);

/// Physical gradient at each node, averaged over the cells sharing it.
template <int Dim>
Eigen::Matrix<double, Dim, Eigen::Dynamic> nodal_gradients(const Mesh<Dim>& mesh, const DiscreteField& field,
                                                           const NozzleMap<Dim>& nozzle);

}  // namespace nozzleflow
