#include "nozzleflow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nozzleflow {

template <int Dim>
SpeedSummary<Dim> max_speed_and_mach(const Mesh<Dim>& mesh, const DiscreteField& field, const GasModel<>& gas,
                                     const NozzleMap<Dim>& nozzle) {
  SpeedSummary<Dim> s;
  double best = -1;
  for_each_quadrature_point<Dim>(mesh, field, nozzle, [&](const QuadraturePoint<Dim>& qp) {
    const double s2 = qp.grad.squaredNorm();
    if (s2 > best) {
      best = s2;
      s.argmax = qp.x;
    }
  });
  s.max_speed = std::sqrt(std::max(best, 0.0));
  const auto& rel = gas.relation();
  s.max_mach = s.max_speed * s.max_speed < rel.vacuum_bound() ? rel.mach(s.max_speed)
                                                              : std::numeric_limits<double>::infinity();
  s.subsonic = s.max_speed < 1;
  return s;
}

template <int Dim>
FarFieldReport far_field_check(const Mesh<Dim>& mesh, const DiscreteField& field, const GasModel<>& gas,
                               const NozzleMap<Dim>& nozzle, double m0, const std::vector<double>& offsets) {
  FarFieldReport rep;
  rep.q_minus = solve_q_from_flux(gas.relation(), m0 / nozzle.measure_minus());
  rep.q_plus = solve_q_from_flux(gas.relation(), m0 / nozzle.measure_plus());
  const double L = mesh.half_length();
  auto probe = [&](double offset, double sign, double reference) {
    const double station = sign * (L - offset);
    if (!(offset > 0) || !(station > -L && station < L))
      throw DomainError("far-field probe offset " + std::to_string(offset) + " outside the domain");
    const auto s = sample_section(mesh, field, gas, nozzle, station);
    FarFieldProbe p{offset, s.station, reference, s.mean_axial, s.max_transverse,
                    std::abs(s.mean_axial - reference), 0.0};
    p.relative_deviation = reference > 0 ? p.deviation / reference : p.deviation;
    const double rel_t = reference > 0 ? p.max_transverse / reference : p.max_transverse;
    rep.max_relative_deviation = std::max(rep.max_relative_deviation, p.relative_deviation);
    rep.max_relative_transverse = std::max(rep.max_relative_transverse, rel_t);
    return p;
  };
  for (double off : offsets) {
    rep.inlet.push_back(probe(off, -1.0, rep.q_minus));
    rep.outlet.push_back(probe(off, 1.0, rep.q_plus));
  }
  return rep;
}

template <int Dim>
UniquenessResult uniqueness_check(const FlowProblem<Dim>& problem, const NewtonConfig& config) {
  const Mesh<Dim> mesh = problem.mesh();
  const double slope = problem.m0 / problem.nozzle.measure_plus();
  const double L = problem.half_length;
  const DiscreteField ramp =
      interpolate<Dim>(mesh, problem.nozzle, [&](const Point<Dim>& x) { return slope * (x(Dim - 1) + L); });
  const Solution a = newton_solve(mesh, problem.gas, problem.nozzle, problem.m0, zero_field(mesh), config);
  const Solution b = newton_solve(mesh, problem.gas, problem.nozzle, problem.m0, ramp, config);

  UniquenessResult out;
  out.from_zero = a.report;
  out.from_ramp = b.report;
  out.both_certified = a.report.truncation_certified && b.report.truncation_certified;
  std::vector<Point<Dim>> ga;
  for_each_quadrature_point<Dim>(mesh, a.field, problem.nozzle,
                                 [&](const QuadraturePoint<Dim>& qp) { ga.push_back(qp.grad); });
  std::size_t i = 0;
  for_each_quadrature_point<Dim>(mesh, b.field, problem.nozzle, [&](const QuadraturePoint<Dim>& qp) {
    out.discrepancy = std::max(out.discrepancy, (qp.grad - ga[i++]).cwiseAbs().maxCoeff());
  });
  return out;
}

namespace {

template <int Dim>
SweepPoint evaluate(const FlowProblem<Dim>& problem, const Mesh<Dim>& mesh, double m0, const NewtonConfig& config) {
  try {
    const Solution s = newton_solve(mesh, problem.gas, problem.nozzle, m0, zero_field(mesh), config);
    return {m0, s.report.max_speed, true, s.report.truncation_certified, s.report.flux_error};
  } catch (const NewtonFailure&) {
    return {m0, std::numeric_limits<double>::quiet_NaN(), false, false, std::numeric_limits<double>::quiet_NaN()};
  }
}

}  // namespace

template <int Dim>
std::vector<SweepPoint> flux_sweep(const FlowProblem<Dim>& problem, const std::vector<double>& fluxes,
                                   const NewtonConfig& config) {
  for (std::size_t i = 1; i < fluxes.size(); ++i)
    if (!(fluxes[i] > fluxes[i - 1])) throw DomainError("sweep fluxes must be strictly increasing");
  const Mesh<Dim> mesh = problem.mesh();
  std::vector<SweepPoint> out;
  for (double m0 : fluxes) out.push_back(evaluate(problem, mesh, m0, config));
  return out;
}

template <int Dim>
SweepResult critical_flux_search(const FlowProblem<Dim>& problem, const std::vector<double>& delta_schedule,
                                 int bisection_steps, const NewtonConfig& config) {
  if (delta_schedule.empty()) throw DomainError("empty truncation schedule");
  for (std::size_t i = 1; i < delta_schedule.size(); ++i)
    if (!(delta_schedule[i] < delta_schedule[i - 1]))
      throw DomainError("truncation schedule must be strictly decreasing (increasing q_n)");
  const Mesh<Dim> mesh = problem.mesh();

  double min_measure = std::numeric_limits<double>::infinity();
  for (int id = 0; id <= mesh.axial_cells(); ++id)
    min_measure = std::min(min_measure, problem.nozzle.section_measure(-mesh.half_length() + id * mesh.axial_spacing()));
  for (int k = 0; k < mesh.axial_cells(); ++k)
    min_measure = std::min(min_measure, problem.nozzle.section_measure(mesh.layer_midplane(k)));

  SweepResult result;
  for (double delta : delta_schedule) {
    FlowProblem<Dim> p = problem;
    p.gas = GasModel<>(problem.gas.gamma(), delta);
    CriticalBracket br{delta, std::sqrt(1 - 2 * delta), 0.0, 1.001 * min_measure, {}};
    auto ok = [&](double m0) {
      const SweepPoint pt = evaluate(p, mesh, m0, config);
      br.evaluations.push_back(pt);
      return pt.converged && pt.certified;
    };
    if (!ok(1e-3 * br.m_hi))
      throw ConvergenceError("critical flux search: bracket failure, even m0 = " + std::to_string(1e-3 * br.m_hi) +
                             " does not certify");
    for (int grow = 0; grow < 8 && ok(br.m_hi); ++grow) {
      br.m_lo = br.m_hi;
      br.m_hi *= 2;
    }
    for (int it = 0; it < bisection_steps; ++it) {
      const double mid = (br.m_lo + br.m_hi) / 2;
      (ok(mid) ? br.m_lo : br.m_hi) = mid;
    }
    std::sort(br.evaluations.begin(), br.evaluations.end(),
              [](const SweepPoint& a, const SweepPoint& b) { return a.m0 < b.m0; });
    result.brackets.push_back(std::move(br));
  }
  result.points = result.brackets.back().evaluations;
  return result;
}

template <int Dim>
LocalAverageResult local_average_diagnostic(const Mesh<Dim>& mesh, const DiscreteField& field,
                                            const NozzleMap<Dim>& nozzle, double m0) {
  const double L = mesh.half_length();
  if (L < 2) throw DomainError("local average diagnostic needs L >= 2");
  const int layers = mesh.axial_cells();
  std::vector<double> integral(layers, 0.0), volume(layers, 0.0);
  for_each_quadrature_point<Dim>(mesh, field, nozzle, [&](const QuadraturePoint<Dim>& qp) {
    const int k = mesh.cell_axial_index(qp.cell);
    integral[k] += qp.grad.squaredNorm() * qp.volume;
    volume[k] += qp.volume;
  });
  LocalAverageResult out;
  const double h = mesh.axial_spacing();
  const double tol = 1e-9 * h;
  for (int j = 0; j <= layers; ++j) {
    const double x0 = -L + j * h;
    if (x0 - 1 < -L - tol || x0 + 1 > L + tol) continue;
    double num = 0, den = 0;
    for (int k = 0; k < layers; ++k) {
      const double mid = mesh.layer_midplane(k);
      if (std::abs(mid - x0) < 1) {
        num += integral[k];
        den += volume[k];
      }
    }
    const double avg = num / den;
    if (avg > out.worst_average) {
      out.worst_average = avg;
      out.worst_center = x0;
    }
  }
  out.ratio = m0 > 0 ? out.worst_average / (m0 * m0) : 0.0;
  return out;
}

template <int Dim>
PoincareResult poincare_diagnostic(const Mesh<Dim>& mesh, const NozzleMap<Dim>& nozzle,
                                   const std::vector<DiscreteField>& fields) {
  const double L = mesh.half_length();
  const double h = mesh.axial_spacing();
  const double tol = 1e-9 * h;
  PoincareResult out;
  for (double a = -L; a + 1 <= L + tol; a += 1) {
    out.slab_start.push_back(a);
    out.slab_max.push_back(0.0);
  }
  const int slabs = static_cast<int>(out.slab_start.size());
  auto slab_of = [&](int cell) {
    const double mid = mesh.layer_midplane(mesh.cell_axial_index(cell));
    const int s = static_cast<int>(std::floor(mid + L));
    return s < slabs ? s : -1;
  };
  for (const auto& f : fields) {
    std::vector<double> mass(slabs, 0.0), vol(slabs, 0.0), grad2(slabs, 0.0), square(slabs, 0.0);
    for_each_quadrature_point<Dim>(mesh, f, nozzle, [&](const QuadraturePoint<Dim>& qp) {
      const int s = slab_of(qp.cell);
      if (s < 0) return;
      mass[s] += qp.value * qp.volume;
      square[s] += qp.value * qp.value * qp.volume;
      vol[s] += qp.volume;
      grad2[s] += qp.grad.squaredNorm() * qp.volume;
    });
    std::vector<double> dev2(slabs, 0.0);
    for_each_quadrature_point<Dim>(mesh, f, nozzle, [&](const QuadraturePoint<Dim>& qp) {
      const int s = slab_of(qp.cell);
      if (s < 0) return;
      const double d = qp.value - mass[s] / vol[s];
      dev2[s] += d * d * qp.volume;
    });
    for (int s = 0; s < slabs; ++s) {
      // gradients at round-off level of the field count as constant
      if (!(grad2[s] > 1e-24 * square[s]) || grad2[s] == 0) {
        ++out.skipped;
        continue;
      }
      const double ratio = std::sqrt(dev2[s] / grad2[s]);
      out.slab_max[s] = std::max(out.slab_max[s], ratio);
      out.worst_ratio = std::max(out.worst_ratio, ratio);
    }
  }
  return out;
}

#define NOZZLEFLOW_INSTANTIATE(D)                                                                                    \
  template SpeedSummary<D> max_speed_and_mach<D>(const Mesh<D>&, const DiscreteField&, const GasModel<>&,           \
                                                 const NozzleMap<D>&);                                               \
  template FarFieldReport far_field_check<D>(const Mesh<D>&, const DiscreteField&, const GasModel<>&,               \
                                             const NozzleMap<D>&, double, const std::vector<double>&);               \
  template UniquenessResult uniqueness_check<D>(const FlowProblem<D>&, const NewtonConfig&);                        \
  template std::vector<SweepPoint> flux_sweep<D>(const FlowProblem<D>&, const std::vector<double>&,                 \
                                                 const NewtonConfig&);                                               \
  template SweepResult critical_flux_search<D>(const FlowProblem<D>&, const std::vector<double>&, int,              \
                                               const NewtonConfig&);                                                 \
  template LocalAverageResult local_average_diagnostic<D>(const Mesh<D>&, const DiscreteField&, const NozzleMap<D>&, \
                                                          double);                                                   \
  template PoincareResult poincare_diagnostic<D>(const Mesh<D>&, const NozzleMap<D>&, const std::vector<DiscreteField>&);

NOZZLEFLOW_INSTANTIATE(2)
NOZZLEFLOW_INSTANTIATE(3)

}  // namespace nozzleflow
