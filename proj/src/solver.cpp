#include "nozzleflow/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "nozzleflow/linear_solve.hpp"

namespace nozzleflow {

void NewtonConfig::validate() const {
  if (!(relative_tolerance > 0) || !(absolute_tolerance > 0) || !(cg_tolerance > 0))
    throw DomainError("solver tolerances must be positive");
  if (max_iterations < 1) throw DomainError("max_iterations must be at least 1");
  if (!(armijo_slope > 0 && armijo_slope < 1)) throw DomainError("Armijo slope factor must lie in (0, 1)");
  if (!(backtrack_factor > 0 && backtrack_factor < 1)) throw DomainError("backtracking factor must lie in (0, 1)");
  if (!(min_step > 0 && min_step <= 1)) throw DomainError("minimum step must lie in (0, 1]");
}

namespace {

template <int Dim>
void finish_report(const Mesh<Dim>& mesh, const DiscreteField& field, const GasModel<>& gas,
                   const NozzleMap<Dim>& nozzle, double m0, SolverReport& report) {
  const Certification cert = certify_subsonic(mesh, field, gas, nozzle);
  report.max_speed = std::sqrt(cert.max_speed_squared);
  report.truncation_certified = cert.certified;
  report.flux_error = 0;
  for (const auto& s : section_fluxes(mesh, field, gas, nozzle))
    report.flux_error = std::max(report.flux_error, std::abs(s.flux - m0));
  report.relative_flux_error = m0 > 0 ? report.flux_error / m0 : report.flux_error;
}

LinearSolveResult solve_linear(const SparseSystem& system, const NewtonConfig& config) {
  const bool direct = config.linear_solver == LinearSolverKind::Direct ||
                      (config.linear_solver == LinearSolverKind::Automatic &&
                       system.rhs.size() < config.direct_threshold);
  if (direct) return direct_solve(system.matrix, system.rhs);
  LinearSolveResult cg = conjugate_gradient(system.matrix, system.rhs, config.cg_tolerance);
  if (!cg.converged) {
    LinearSolveResult fallback = direct_solve(system.matrix, system.rhs);
    fallback.iterations += cg.iterations;
    return fallback;
  }
  return cg;
}

template <int Dim>
Solution newton_once(const Mesh<Dim>& mesh, const GasModel<>& gas, const NozzleMap<Dim>& nozzle, double m0,
                     const DiscreteField& init, const NewtonConfig& config) {
  Solution sol{init, {}};
  SolverReport& rep = sol.report;
  rep.min_ritz = std::numeric_limits<double>::infinity();
  DiscreteField& field = sol.field;
  double energy = assemble_energy(mesh, field, gas, nozzle, m0);
  double r0 = -1;
  constexpr double eps = std::numeric_limits<double>::epsilon();

  for (int it = 0;; ++it) {
    const ResidualJacobian rj = assemble_residual_jacobian(mesh, field, gas, nozzle, m0);
    const double norm = rj.residual.norm();
    rep.residual_history.push_back(norm);
    rep.energy_history.push_back(energy);
    if (r0 < 0) r0 = norm;
    if (norm <= std::max(config.relative_tolerance * r0, config.absolute_tolerance)) {
      rep.converged = true;
      rep.iterations = it;
      break;
    }
    if (it >= config.max_iterations) {
      rep.iterations = it;
      rep.message = "no convergence after " + std::to_string(it) + " iterations (residual " +
                    std::to_string(norm) + ")";
      return sol;
    }

    const LinearSolveResult lin = solve_linear(rj.system, config);
    rep.linear_iterations += lin.iterations;
    if (!lin.converged) {
      rep.iterations = it;
      rep.message = "linear solve failed (Jacobian not positive definite?)";
      return sol;
    }
    rep.min_ritz = std::min(rep.min_ritz, lin.ritz_min);

    const Eigen::VectorXd& step = lin.x;
    const double slope = rj.residual.dot(step);
    if (!(slope < 0)) {
      rep.iterations = it;
      rep.message = "Newton direction is not a descent direction";
      return sol;
    }

    double alpha = 1.0;
    bool accepted = false;
    DiscreteField trial = field;
    while (alpha >= config.min_step) {
      trial.values = field.values + alpha * step;
      const double trial_energy = assemble_energy(mesh, trial, gas, nozzle, m0);
      const bool armijo = trial_energy <= energy + config.armijo_slope * alpha * slope;
      // Near the minimiser the predicted decrease drops below the resolution of J_h.
      const bool in_noise = alpha == 1.0 && -slope <= 100 * eps * std::max(1.0, std::abs(energy));
      if (armijo || in_noise) {
        field.values.swap(trial.values);
        energy = trial_energy;
        accepted = true;
        break;
      }
      alpha *= config.backtrack_factor;
    }
    if (!accepted) {
      rep.iterations = it;
      rep.message = "line search failed";
      return sol;
    }
    rep.step_lengths.push_back(alpha);
  }
  rep.energy = energy;
  return sol;
}

}  // namespace

template <int Dim>
Solution newton_solve(const Mesh<Dim>& mesh, const GasModel<>& gas, const NozzleMap<Dim>& nozzle, double m0,
                      const DiscreteField& init, const NewtonConfig& config) {
  config.validate();
  if (init.size() != mesh.num_nodes()) throw DomainError("initial field does not match the mesh");
  if (!init.satisfies_bcs()) throw DomainError("initial field violates the inlet condition");
  const auto start = std::chrono::steady_clock::now();

  Solution sol = newton_once(mesh, gas, nozzle, m0, init, config);
  if (!sol.report.converged && config.flux_ramp && m0 > 0) {
    NewtonConfig inner = config;
    inner.flux_ramp = false;
    DiscreteField current = init;
    Solution ramp;
    SolverReport combined;
    for (int stage = 1; stage <= 4; ++stage) {
      ramp = newton_once(mesh, gas, nozzle, m0 * stage / 4.0, current, inner);
      for (double r : ramp.report.residual_history) combined.residual_history.push_back(r);
      for (double e : ramp.report.energy_history) combined.energy_history.push_back(e);
      for (double s : ramp.report.step_lengths) combined.step_lengths.push_back(s);
      combined.iterations += ramp.report.iterations;
      combined.linear_iterations += ramp.report.linear_iterations;
      combined.min_ritz = stage == 1 ? ramp.report.min_ritz : std::min(combined.min_ritz, ramp.report.min_ritz);
      if (!ramp.report.converged) break;
      current = ramp.field;
    }
    combined.converged = ramp.report.converged;
    combined.energy = ramp.report.energy;
    combined.message = ramp.report.message;
    combined.used_flux_ramp = true;
    sol = Solution{ramp.field, combined};
  }

  sol.report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!sol.report.converged) {
    std::string what = "Newton solve failed at m0 = " + std::to_string(m0) + ": " + sol.report.message;
    throw NewtonFailure(what, sol.report);
  }
  finish_report(mesh, sol.field, gas, nozzle, m0, sol.report);
  sol.report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return sol;
}

template <int Dim>
Certification certify_subsonic(const Mesh<Dim>& mesh, const DiscreteField& field, const GasModel<>& gas,
                               const NozzleMap<Dim>& nozzle) {
  Certification c;
  c.limit = gas.truncation().certified_limit();
  bool untruncated = true;
  for_each_quadrature_point<Dim>(mesh, field, nozzle, [&](const QuadraturePoint<Dim>& qp) {
    const double s2 = qp.grad.squaredNorm();
    c.max_speed_squared = std::max(c.max_speed_squared, s2);
    if (untruncated && s2 <= c.limit) {
      if (gas.theta(s2) != gas.relation().density(s2)) untruncated = false;
    } else {
      untruncated = false;
    }
  });
  c.margin = c.limit - c.max_speed_squared;
  c.certified = c.max_speed_squared <= c.limit;
  c.coefficients_untruncated = untruncated;
  return c;
}

template <int Dim>
DiscreteField extend_field(const Mesh<Dim>& source, const DiscreteField& field, const Mesh<Dim>& target) {
  const double h = source.axial_spacing();
  if (std::abs(target.axial_spacing() - h) > 1e-12 * h || source.transverse_cells() != target.transverse_cells())
    throw InvalidResolutionError("continuation meshes must share transverse resolution and axial spacing");
  const double gap = target.half_length() - source.half_length();
  const int shift = static_cast<int>(std::lround(gap / h));
  if (shift < 0 || std::abs(shift * h - gap) > 1e-9 * std::max(1.0, gap))
    throw InvalidResolutionError("continuation meshes are not axially aligned");

  DiscreteField out = zero_field(target);
  const int section = source.nodes_per_section();
  const int last = source.axial_cells();
  for (int t = 0; t < section; ++t) {
    auto old = [&](int k) { return field.values(k * section + t); };
    const double g_in = (old(1) - old(0)) / h;
    const double g_out = (old(last) - old(last - 1)) / h;
    const double offset = g_in * shift * h - old(0);
    for (int i = 0; i <= target.axial_cells(); ++i) {
      const int j = i - shift;
      double v;
      if (j < 0)
        v = g_in * i * h;
      else if (j <= last)
        v = old(j) + offset;
      else
        v = old(last) + offset + g_out * (j - last) * h;
      out.values(i * section + t) = v;
    }
  }
  out.apply_bcs();
  return out;
}

template <int Dim>
std::vector<Point<Dim>> window_gradients(const Mesh<Dim>& mesh, const DiscreteField& field,
                                         const NozzleMap<Dim>& nozzle, double window) {
  std::vector<Point<Dim>> out;
  const double h = mesh.axial_spacing();
  const double tol = 1e-9 * h;
  for_each_quadrature_point<Dim>(mesh, field, nozzle, [&](const QuadraturePoint<Dim>& qp) {
    const double lower = mesh.cell_origin(qp.cell)(Dim - 1);
    if (lower >= -window - tol && lower + h <= window + tol) out.push_back(qp.grad);
  });
  return out;
}

template <int Dim>
ContinuationResult<Dim> continue_in_L(const FlowProblem<Dim>& problem, const std::vector<double>& schedule,
                                      const NewtonConfig& config) {
  if (schedule.empty()) throw DomainError("empty L schedule");
  for (std::size_t k = 1; k < schedule.size(); ++k)
    if (!(schedule[k] > schedule[k - 1])) throw DomainError("L schedule must be strictly increasing");
  const double h = problem.axial_spacing();

  ContinuationResult<Dim> result;
  result.window = schedule.front() / 2;
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const double L = schedule[k];
    const int cells = static_cast<int>(std::lround(2 * L / h));
    if (std::abs(cells * h - 2 * L) > 1e-9 * L)
      throw InvalidResolutionError("half length " + std::to_string(L) + " is not a multiple of the axial spacing");
    Mesh<Dim> mesh = build_mesh(problem.nozzle, L, problem.transverse_cells, cells);
    const DiscreteField init =
        k == 0 ? zero_field(mesh) : extend_field(result.stages.back().mesh, result.stages.back().field, mesh);
    Solution sol = newton_solve(mesh, problem.gas, problem.nozzle, problem.m0, init, config);

    double change = std::numeric_limits<double>::quiet_NaN();
    if (k > 0) {
      const auto& prev = result.stages.back();
      const auto a = window_gradients(prev.mesh, prev.field, problem.nozzle, result.window);
      const auto b = window_gradients(mesh, sol.field, problem.nozzle, result.window);
      if (a.size() != b.size()) throw InvalidResolutionError("interior windows do not align");
      change = 0;
      for (std::size_t i = 0; i < a.size(); ++i) change = std::max(change, (a[i] - b[i]).norm());
    }
    result.stages.push_back({L, std::move(mesh), std::move(sol.field), std::move(sol.report), change});
  }
  return result;
}

#define NOZZLEFLOW_INSTANTIATE(D)                                                                                \
  template Solution newton_solve<D>(const Mesh<D>&, const GasModel<>&, const NozzleMap<D>&, double,             \
                                    const DiscreteField&, const NewtonConfig&);                                  \
  template Certification certify_subsonic<D>(const Mesh<D>&, const DiscreteField&, const GasModel<>&,          \
                                             const NozzleMap<D>&);                                               \
  template DiscreteField extend_field<D>(const Mesh<D>&, const DiscreteField&, const Mesh<D>&);                 \
  template std::vector<Point<D>> window_gradients<D>(const Mesh<D>&, const DiscreteField&, const NozzleMap<D>&, \
                                                     double);                                                    \
  template ContinuationResult<D> continue_in_L<D>(const FlowProblem<D>&, const std::vector<double>&,            \
                                                  const NewtonConfig&);

NOZZLEFLOW_INSTANTIATE(2)
NOZZLEFLOW_INSTANTIATE(3)

}  // namespace nozzleflow
