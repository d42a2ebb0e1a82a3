#include "nozzleflow/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nozzleflow {

template <int Dim>
Mesh<Dim>::Mesh(double half_length, int transverse_cells, int axial_cells)
    : L_(half_length), nt_(transverse_cells), na_(axial_cells) {
  if (!(half_length > 0)) throw InvalidResolutionError("half length L must be positive");
  if (transverse_cells < 2) throw InvalidResolutionError("need at least 2 transverse cells");
  if (axial_cells < 4) throw InvalidResolutionError("need at least 4 axial cells");

  section_nodes_ = 1;
  section_cells_ = 1;
  for (int d = 0; d < Dim - 1; ++d) {
    section_nodes_ *= nt_ + 1;
    section_cells_ *= nt_;
  }
  h_.setConstant(2.0 / nt_);
  h_(Dim - 1) = 2 * L_ / na_;

  cells_.resize(num_cells());
  for (int cell = 0; cell < num_cells(); ++cell) {
    const int k = cell / section_cells_;
    int rem = cell % section_cells_;
    std::array<int, Dim - 1> j{};
    for (int d = 0; d < Dim - 1; ++d) {
      j[d] = rem % nt_;
      rem /= nt_;
    }
    for (int local = 0; local < kNodesPerCell; ++local) {
      int id = (k + ((local >> (Dim - 1)) & 1)) * section_nodes_;
      int stride = 1;
      for (int d = 0; d < Dim - 1; ++d) {
        id += (j[d] + ((local >> d) & 1)) * stride;
        stride *= nt_ + 1;
      }
      cells_[cell][local] = id;
    }
  }

  std::vector<Eigen::Triplet<double, int>> triplets;
  triplets.reserve(std::size_t(num_cells()) * kNodesPerCell * kNodesPerCell);
  for (const auto& nodes : cells_)
    for (int a : nodes)
      for (int b : nodes) triplets.emplace_back(a, b, 0.0);
  auto pattern = std::make_shared<SparseMatrix>(num_nodes(), num_nodes());
  pattern->setFromTriplets(triplets.begin(), triplets.end());
  pattern->makeCompressed();

  const int* outer = pattern->outerIndexPtr();
  const int* inner = pattern->innerIndexPtr();
  slots_.resize(std::size_t(num_cells()) * kNodesPerCell * kNodesPerCell);
  for (int cell = 0; cell < num_cells(); ++cell)
    for (int a = 0; a < kNodesPerCell; ++a) {
      const int row = cells_[cell][a];
      for (int b = 0; b < kNodesPerCell; ++b) {
        const int* pos = std::lower_bound(inner + outer[row], inner + outer[row + 1], cells_[cell][b]);
        slots_[(std::size_t(cell) * kNodesPerCell + a) * kNodesPerCell + b] = static_cast<int>(pos - inner);
      }
    }
  pattern_ = std::move(pattern);
}

template <int Dim>
Point<Dim> Mesh<Dim>::node(int id) const {
  Point<Dim> y;
  const int k = id / section_nodes_;
  int rem = id % section_nodes_;
  for (int d = 0; d < Dim - 1; ++d) {
    y(d) = -1 + h_(d) * (rem % (nt_ + 1));
    rem /= nt_ + 1;
  }
  y(Dim - 1) = -L_ + h_(Dim - 1) * k;
  return y;
}

template <int Dim>
Point<Dim> Mesh<Dim>::cell_origin(int cell) const {
  Point<Dim> y;
  const int k = cell / section_cells_;
  int rem = cell % section_cells_;
  for (int d = 0; d < Dim - 1; ++d) {
    y(d) = -1 + h_(d) * (rem % nt_);
    rem /= nt_;
  }
  y(Dim - 1) = -L_ + h_(Dim - 1) * k;
  return y;
}

template <int Dim>
int Mesh<Dim>::nearest_layer(double xn) const {
  const int k = static_cast<int>(std::floor((xn + L_) / h_(Dim - 1)));
  return std::clamp(k, 0, na_ - 1);
}

template <int Dim>
Mesh<Dim> build_mesh(const NozzleMap<Dim>& nozzle, double half_length, int transverse_cells, int axial_cells) {
  Mesh<Dim> mesh(half_length, transverse_cells, axial_cells);
  for (int id = 0; id < mesh.num_nodes(); ++id) {
    const Point<Dim> x = nozzle.inverse(mesh.node(id));
    if (!nozzle.contains(x, 1e-9))
      throw DomainError("mesh node " + std::to_string(id) + " falls outside the physical nozzle");
  }
  return mesh;
}

template <int Dim>
DiscreteField zero_field(const Mesh<Dim>& mesh) {
  DiscreteField f;
  f.values = Eigen::VectorXd::Zero(mesh.num_nodes());
  f.dirichlet.resize(mesh.num_nodes());
  for (int id = 0; id < mesh.num_nodes(); ++id) f.dirichlet[id] = mesh.is_inlet_node(id);
  return f;
}

template <int Dim>
DiscreteField interpolate(const Mesh<Dim>& mesh, const NozzleMap<Dim>& nozzle,
                          const std::function<double(const Point<Dim>&)>& f) {
  DiscreteField field = zero_field(mesh);
  for (int id = 0; id < mesh.num_nodes(); ++id) field.values(id) = f(nozzle.inverse(mesh.node(id)));
  field.apply_bcs();
  return field;
}

template class Mesh<2>;
template class Mesh<3>;
template Mesh<2> build_mesh<2>(const NozzleMap<2>&, double, int, int);
template Mesh<3> build_mesh<3>(const NozzleMap<3>&, double, int, int);
template DiscreteField zero_field<2>(const Mesh<2>&);
template DiscreteField zero_field<3>(const Mesh<3>&);
template DiscreteField interpolate<2>(const Mesh<2>&, const NozzleMap<2>&,
                                      const std::function<double(const Point<2>&)>&);
template DiscreteField interpolate<3>(const Mesh<3>&, const NozzleMap<3>&,
                                      const std::function<double(const Point<3>&)>&);

}  // namespace nozzleflow
