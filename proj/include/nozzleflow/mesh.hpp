#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "nozzleflow/nozzle.hpp"

namespace nozzleflow {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

/// Uniform tensor-product mesh of the reference cylinder
/// (-1, 1)^(Dim-1) x (-L, L). The axial direction is the last coordinate;
/// node and cell numbering run transverse-fastest, axial-slowest.
template <int Dim>
class Mesh {
 public:
  static constexpr int kNodesPerCell = 1 << Dim;
  using CellNodes = std::array<int, kNodesPerCell>;

  Mesh(double half_length, int transverse_cells, int axial_cells);

  double half_length() const { return L_; }
  int transverse_cells() const { return nt_; }
  int axial_cells() const { return na_; }
  int nodes_per_section() const { return section_nodes_; }
  int cells_per_section() const { return section_cells_; }
  int num_nodes() const { return section_nodes_ * (na_ + 1); }
  int num_cells() const { return section_cells_ * na_; }

  /// Cell extents in reference coordinates.
  const Point<Dim>& spacing() const { return h_; }
  double axial_spacing() const { return h_(Dim - 1); }

  /// Reference coordinates of a node.
  Point<Dim> node(int id) const;
  int node_axial_index(int id) const { return id / section_nodes_; }
  int cell_axial_index(int cell) const { return cell / section_cells_; }
  /// Lower corner of a cell in reference coordinates.
  Point<Dim> cell_origin(int cell) const;
  /// Node ids of a cell; bit d of the local index selects the upper side in
  /// direction d.
  const CellNodes& cell_nodes(int cell) const { return cells_[cell]; }
  /// Axial coordinate of the midplane of the axial cell layer k.
  double layer_midplane(int k) const { return -L_ + (k + 0.5) * h_(Dim - 1); }
  /// Axial layer whose midplane is nearest to the station x_n.
  int nearest_layer(double xn) const;

  bool is_inlet_node(int id) const { return node_axial_index(id) == 0; }

  /// CSR matrix with the stiffness sparsity pattern (all values zero).
  const SparseMatrix& pattern() const { return *pattern_; }
  /// Position in pattern().valuePtr() of entry (a, b) of a cell's local matrix.
  int value_slot(int cell, int a, int b) const { return slots_[(std::size_t(cell) * kNodesPerCell + a) * kNodesPerCell + b]; }

 private:
  double L_;
  int nt_, na_;
  int section_nodes_, section_cells_;
  Point<Dim> h_;
  std::vector<CellNodes> cells_;
  std::shared_ptr<const SparseMatrix> pattern_;
  std::vector<int> slots_;
};

/// Nodal coefficients of the velocity potential plus the inlet Dirichlet mask.
struct DiscreteField {
  Eigen::VectorXd values;
  std::vector<bool> dirichlet;

  int size() const { return static_cast<int>(values.size()); }
  void apply_bcs() {
    for (int i = 0; i < size(); ++i)
      if (dirichlet[i]) values(i) = 0;
  }
  bool satisfies_bcs() const {
    for (int i = 0; i < size(); ++i)
      if (dirichlet[i] && values(i) != 0) return false;
    return true;
  }
};

/// Checks resolution, builds the mesh and verifies every node maps into the
/// physical nozzle.
template <int Dim>
Mesh<Dim> build_mesh(const NozzleMap<Dim>& nozzle, double half_length, int transverse_cells, int axial_cells);

template <int Dim>
DiscreteField zero_field(const Mesh<Dim>& mesh);

/// Nodal interpolant of f (a function of the physical point) with the
/// inlet mask applied.
template <int Dim>
DiscreteField interpolate(const Mesh<Dim>& mesh, const NozzleMap<Dim>& nozzle,
                          const std::function<double(const Point<Dim>&)>& f);

}  // namespace nozzleflow
