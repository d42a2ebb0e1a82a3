#include "nozzleflow/fem.hpp"

#include <cmath>
#include <string>

#include "nozzleflow/parallel.hpp"

namespace nozzleflow {
namespace {

/// Multilinear reference element on [-1, 1]^Dim with the 2-point Gauss rule.
template <int Dim>
struct Element {
  static constexpr int kNodes = 1 << Dim;
  static constexpr int kPoints = 1 << Dim;
  using Grad = Eigen::Matrix<double, Dim, kNodes>;

  std::array<Point<Dim>, kPoints> points;
  std::array<Eigen::Matrix<double, kNodes, 1>, kPoints> values;
  std::array<Grad, kPoints> grads;

  static double sign(int local, int d) { return ((local >> d) & 1) ? 1.0 : -1.0; }

  static double value(int local, const Point<Dim>& xi) {
    double v = 1;
    for (int d = 0; d < Dim; ++d) v *= (1 + sign(local, d) * xi(d)) / 2;
    return v;
  }

  static Point<Dim> grad(int local, const Point<Dim>& xi) {
    Point<Dim> g;
    for (int d = 0; d < Dim; ++d) {
      double v = sign(local, d) / 2;
      for (int e = 0; e < Dim; ++e)
        if (e != d) v *= (1 + sign(local, e) * xi(e)) / 2;
      g(d) = v;
    }
    return g;
  }

  Element() {
    const double g = 1 / std::sqrt(3.0);
    for (int q = 0; q < kPoints; ++q) {
      for (int d = 0; d < Dim; ++d) points[q](d) = sign(q, d) * g;
      for (int l = 0; l < kNodes; ++l) {
        values[q](l) = value(l, points[q]);
        grads[q].col(l) = grad(l, points[q]);
      }
    }
  }

  static const Element& instance() {
    static const Element e;
    return e;
  }
};

/// Physical shape-function gradients and volume weights at a cell's
/// quadrature points.
template <int Dim>
struct CellGeometry {
  using E = Element<Dim>;
  std::array<typename E::Grad, E::kPoints> B;
  std::array<double, E::kPoints> volume;
  std::array<Point<Dim>, E::kPoints> y;

  CellGeometry(const Mesh<Dim>& mesh, const NozzleMap<Dim>& nozzle, int cell) {
    const auto& el = E::instance();
    const Point<Dim> origin = mesh.cell_origin(cell);
    const Point<Dim>& h = mesh.spacing();
    const double ref_volume = h.prod() / (1 << Dim);
    const auto dxi_dy = (2.0 / h.array()).matrix().asDiagonal();
    for (int q = 0; q < E::kPoints; ++q) {
      y[q] = origin + (h.array() * (el.points[q].array() + 1) / 2).matrix();
      const MapJacobian<Dim> jac = nozzle.jacobian(y[q]);
      B[q] = jac.sigma * (dxi_dy * el.grads[q]);
      volume[q] = ref_volume * jac.det;
    }
  }
};

template <int Dim>
Eigen::Matrix<double, (1 << Dim), 1> gather(const Mesh<Dim>& mesh, const DiscreteField& field, int cell) {
  Eigen::Matrix<double, (1 << Dim), 1> v;
  const auto& nodes = mesh.cell_nodes(cell);
  for (int l = 0; l < (1 << Dim); ++l) v(l) = field.values(nodes[l]);
  return v;
}

/// Outlet load -(m0 / |S_L+|) int N_a dx' per outlet node, accumulated into
/// `out` (scaled by `factor`).
template <int Dim>
void add_outlet_load(const Mesh<Dim>& mesh, double m0, double factor, Eigen::VectorXd& out) {
  if (m0 == 0) return;
  using E = Element<Dim>;
  const double g = 1 / std::sqrt(3.0);
  const Point<Dim>& h = mesh.spacing();
  // |S_L+| = r^(n-1) 2^(n-1) and dx' = r^(n-1) dy', so the radius cancels.
  double face_weight = 1.0;
  for (int d = 0; d < Dim - 1; ++d) face_weight *= h(d) / 2;
  const double scale = -m0 / std::pow(2.0, Dim - 1) * face_weight * factor;
  const int first = (mesh.axial_cells() - 1) * mesh.cells_per_section();
  for (int cell = first; cell < mesh.num_cells(); ++cell) {
    const auto& nodes = mesh.cell_nodes(cell);
    for (int p = 0; p < (1 << (Dim - 1)); ++p) {
      Point<Dim> xi;
      for (int d = 0; d < Dim - 1; ++d) xi(d) = ((p >> d) & 1) ? g : -g;
      xi(Dim - 1) = 1;
      for (int l = 0; l < E::kNodes; ++l) out(nodes[l]) += scale * E::value(l, xi);
    }
  }
}

}  // namespace

template <int Dim>
double assemble_energy(const Mesh<Dim>& mesh, const DiscreteField& field, const GasModel<>& gas,
                       const NozzleMap<Dim>& nozzle, double m0) {
  using E = Element<Dim>;
  Eigen::VectorXd cell_energy(mesh.num_cells());
  parallel_for(mesh.num_cells(), [&](int begin, int end) {
    for (int cell = begin; cell < end; ++cell) {
      const CellGeometry<Dim> geo(mesh, nozzle, cell);
      const auto phi = gather(mesh, field, cell);
      double e = 0;
      for (int q = 0; q < E::kPoints; ++q) {
        const Point<Dim> g = geo.B[q] * phi;
        e += geo.volume[q] * gas.F(g.squaredNorm());
      }
      cell_energy(cell) = e;
    }
  });
  double total = 0;
  for (int cell = 0; cell < mesh.num_cells(); ++cell) total += cell_energy(cell);
  Eigen::VectorXd load = Eigen::VectorXd::Zero(mesh.num_nodes());
  add_outlet_load(mesh, m0, 1.0, load);
  return total + load.dot(field.values);
}

template <int Dim>
Eigen::VectorXd assemble_residual(const Mesh<Dim>& mesh, const DiscreteField& field, const GasModel<>& gas,
                                  const NozzleMap<Dim>& nozzle, double m0) {
  using E = Element<Dim>;
  constexpr int N = E::kNodes;
  Eigen::MatrixXd local(N, mesh.num_cells());
  parallel_for(mesh.num_cells(), [&](int begin, int end) {
    for (int cell = begin; cell < end; ++cell) {
      const CellGeometry<Dim> geo(mesh, nozzle, cell);
      const auto phi = gather(mesh, field, cell);
      Eigen::Matrix<double, N, 1> r = Eigen::Matrix<double, N, 1>::Zero();
      for (int q = 0; q < E::kPoints; ++q) {
        const Point<Dim> g = geo.B[q] * phi;
        r.noalias() += geo.volume[q] * gas.theta(g.squaredNorm()) * (geo.B[q].transpose() * g);
      }
      local.col(cell) = r;
    }
  });
  Eigen::VectorXd residual = Eigen::VectorXd::Zero(mesh.num_nodes());
  for (int cell = 0; cell < mesh.num_cells(); ++cell) {
    const auto& nodes = mesh.cell_nodes(cell);
    for (int l = 0; l < N; ++l) residual(nodes[l]) += local(l, cell);
  }
  add_outlet_load(mesh, m0, 1.0, residual);
  for (int i = 0; i < mesh.num_nodes(); ++i)
    if (field.dirichlet[i]) residual(i) = 0;
  return residual;
}

template <int Dim>
ResidualJacobian assemble_residual_jacobian(const Mesh<Dim>& mesh, const DiscreteField& field, const GasModel<>& gas,
                                            const NozzleMap<Dim>& nozzle, double m0) {
  using E = Element<Dim>;
  constexpr int N = E::kNodes;
  using LocalMatrix = Eigen::Matrix<double, N, N>;
  Eigen::MatrixXd local_r(N, mesh.num_cells());
  std::vector<LocalMatrix, Eigen::aligned_allocator<LocalMatrix>> local_k(mesh.num_cells());
  parallel_for(mesh.num_cells(), [&](int begin, int end) {
    for (int cell = begin; cell < end; ++cell) {
      const CellGeometry<Dim> geo(mesh, nozzle, cell);
      const auto phi = gather(mesh, field, cell);
      Eigen::Matrix<double, N, 1> r = Eigen::Matrix<double, N, 1>::Zero();
      LocalMatrix k = LocalMatrix::Zero();
      for (int q = 0; q < E::kPoints; ++q) {
        const Point<Dim> g = geo.B[q] * phi;
        const double s2 = g.squaredNorm();
        const double theta = gas.theta(s2), theta_prime = gas.theta_prime(s2);
        const Eigen::Matrix<double, N, 1> bg = geo.B[q].transpose() * g;
        r.noalias() += geo.volume[q] * theta * bg;
        k.noalias() += geo.volume[q] * (theta * geo.B[q].transpose() * geo.B[q] + 2 * theta_prime * bg * bg.transpose());
      }
      local_r.col(cell) = r;
      local_k[cell] = k;
    }
  });

  ResidualJacobian out;
  out.residual = Eigen::VectorXd::Zero(mesh.num_nodes());
  out.system.matrix = mesh.pattern();
  double* values = out.system.matrix.valuePtr();
  for (int cell = 0; cell < mesh.num_cells(); ++cell) {
    const auto& nodes = mesh.cell_nodes(cell);
    for (int a = 0; a < N; ++a) {
      out.residual(nodes[a]) += local_r(a, cell);
      for (int b = 0; b < N; ++b) values[mesh.value_slot(cell, a, b)] += local_k[cell](a, b);
    }
  }
  add_outlet_load(mesh, m0, 1.0, out.residual);

  // Symmetric elimination of the inlet nodes.
  SparseMatrix& K = out.system.matrix;
  for (int row = 0; row < K.outerSize(); ++row) {
    const bool row_fixed = field.dirichlet[row];
    for (SparseMatrix::InnerIterator it(K, row); it; ++it) {
      if (row_fixed || field.dirichlet[it.col()]) it.valueRef() = (row == it.col()) ? 1.0 : 0.0;
    }
    if (row_fixed) out.residual(row) = 0;
  }
  out.system.rhs = -out.residual;
  return out;
}

template <int Dim>
void for_each_quadrature_point(const Mesh<Dim>& mesh, const DiscreteField& field, const NozzleMap<Dim>& nozzle,
                               const std::function<void(const QuadraturePoint<Dim>&)>& visit) {
  using E = Element<Dim>;
  const auto& el = E::instance();
  for (int cell = 0; cell < mesh.num_cells(); ++cell) {
    const CellGeometry<Dim> geo(mesh, nozzle, cell);
    const auto phi = gather(mesh, field, cell);
    for (int q = 0; q < E::kPoints; ++q) {
      QuadraturePoint<Dim> qp{cell, geo.y[q], nozzle.inverse(geo.y[q]), el.values[q].dot(phi), geo.B[q] * phi,
                              geo.volume[q]};
      visit(qp);
    }
  }
}

template <int Dim>
SectionSample<Dim> sample_section(const Mesh<Dim>& mesh, const DiscreteField& field, const GasModel<>& gas,
                                  const NozzleMap<Dim>& nozzle, double station) {
  using E = Element<Dim>;
  const double L = mesh.half_length();
  if (!(station > -L && station < L))
    throw DomainError("station " + std::to_string(station) + " outside (-" + std::to_string(L) + ", " +
                      std::to_string(L) + ")");
  const int layer = mesh.nearest_layer(station);
  const double g = 1 / std::sqrt(3.0);
  const Point<Dim>& h = mesh.spacing();
  double face_weight = 1.0;
  for (int d = 0; d < Dim - 1; ++d) face_weight *= h(d) / 2;

  SectionSample<Dim> s{mesh.layer_midplane(layer), 0, 0, 0, 0};
  const double jdet = std::pow(nozzle.profile().radius(s.station).value, Dim - 1);
  s.measure = nozzle.section_measure(s.station);
  double axial_integral = 0;
  const Eigen::Matrix<double, Dim, Dim> dxi_dy = (2.0 / h.array()).matrix().asDiagonal();
  for (int c = 0; c < mesh.cells_per_section(); ++c) {
    const int cell = layer * mesh.cells_per_section() + c;
    const Point<Dim> origin = mesh.cell_origin(cell);
    const auto phi = gather(mesh, field, cell);
    for (int p = 0; p < (1 << (Dim - 1)); ++p) {
      Point<Dim> xi;
      for (int d = 0; d < Dim - 1; ++d) xi(d) = ((p >> d) & 1) ? g : -g;
      xi(Dim - 1) = 0;
      const Point<Dim> y = origin + (h.array() * (xi.array() + 1) / 2).matrix();
      typename E::Grad G;
      for (int l = 0; l < E::kNodes; ++l) G.col(l) = E::grad(l, xi);
      const Point<Dim> grad = nozzle.jacobian(y).sigma * (dxi_dy * (G * phi));
      const double w = face_weight * jdet;
      s.flux += w * gas.theta(grad.squaredNorm()) * grad(Dim - 1);
      axial_integral += w * grad(Dim - 1);
      s.max_transverse = std::max(s.max_transverse, grad.template head<Dim - 1>().norm());
    }
  }
  s.mean_axial = axial_integral / s.measure;
  return s;
}

template <int Dim>
std::vector<SectionSample<Dim>> section_fluxes(const Mesh<Dim>& mesh, const DiscreteField& field,
                                               const GasModel<>& gas, const NozzleMap<Dim>& nozzle) {
  std::vector<SectionSample<Dim>> out;
  out.reserve(mesh.axial_cells());
  for (int k = 0; k < mesh.axial_cells(); ++k)
    out.push_back(sample_section(mesh, field, gas, nozzle, mesh.layer_midplane(k)));
  return out;
}

template <int Dim>
Eigen::Matrix<double, Dim, Eigen::Dynamic> nodal_gradients(const Mesh<Dim>& mesh, const DiscreteField& field,
                                                           const NozzleMap<Dim>& nozzle) {
  using E = Element<Dim>;
  Eigen::Matrix<double, Dim, Eigen::Dynamic> grads = Eigen::Matrix<double, Dim, Eigen::Dynamic>::Zero(Dim, mesh.num_nodes());
  Eigen::VectorXd count = Eigen::VectorXd::Zero(mesh.num_nodes());
  const Point<Dim>& h = mesh.spacing();
  const Eigen::Matrix<double, Dim, Dim> dxi_dy = (2.0 / h.array()).matrix().asDiagonal();
  for (int cell = 0; cell < mesh.num_cells(); ++cell) {
    const auto& nodes = mesh.cell_nodes(cell);
    const auto phi = gather(mesh, field, cell);
    for (int corner = 0; corner < E::kNodes; ++corner) {
      Point<Dim> xi;
      for (int d = 0; d < Dim; ++d) xi(d) = E::sign(corner, d);
      typename E::Grad G;
      for (int l = 0; l < E::kNodes; ++l) G.col(l) = E::grad(l, xi);
      const Point<Dim> y = mesh.node(nodes[corner]);
      grads.col(nodes[corner]) += nozzle.jacobian(y).sigma * (dxi_dy * (G * phi));
      count(nodes[corner]) += 1;
    }
  }
  for (int i = 0; i < mesh.num_nodes(); ++i) grads.col(i) /= count(i);
  return grads;
}

#define NOZZLEFLOW_INSTANTIATE(D)                                                                                 \
  template double assemble_energy<D>(const Mesh<D>&, const DiscreteField&, const GasModel<>&, const NozzleMap<D>&, \
                                     double);                                                                      \
  template Eigen::VectorXd assemble_residual<D>(const Mesh<D>&, const DiscreteField&, const GasModel<>&,          \
                                                const NozzleMap<D>&, double);                                      \
  template ResidualJacobian assemble_residual_jacobian<D>(const Mesh<D>&, const DiscreteField&, const GasModel<>&, \
                                                          const NozzleMap<D>&, double);                            \
  template void for_each_quadrature_point<D>(const Mesh<D>&, const DiscreteField&, const NozzleMap<D>&,           \
                                             const std::function<void(const QuadraturePoint<D>&)>&);               \
  template SectionSample<D> sample_section<D>(const Mesh<D>&, const DiscreteField&, const GasModel<>&,            \
                                              const NozzleMap<D>&, double);                                        \
  template std::vector<SectionSample<D>> section_fluxes<D>(const Mesh<D>&, const DiscreteField&, const GasModel<>&, \
                                                           const NozzleMap<D>&);                                   \
  template Eigen::Matrix<double, D, Eigen::Dynamic> nodal_gradients<D>(const Mesh<D>&, const DiscreteField&,      \
                                                                       const NozzleMap<D>&);

NOZZLEFLOW_INSTANTIATE(2)
NOZZLEFLOW_INSTANTIATE(3)

}  // namespace nozzleflow
