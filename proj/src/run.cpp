#include "nozzleflow/run.hpp"

#include <cmath>
#include <filesystem>
#include <ostream>

#include "nozzleflow/analysis.hpp"
#include "nozzleflow/output.hpp"

namespace nozzleflow {

namespace {

template <int Dim>
Profile<Dim> make_profile(const NozzleSpec& s) {
  if (s.kind == "cylinder") return Profile<Dim>::cylinder(s.r0);
  if (s.kind == "tanh") return Profile<Dim>::tanh_expansion(s.r_minus, s.r_plus, s.length);
  return Profile<Dim>::gaussian_throat(s.r0, s.depth, s.width);
}

class Runner {
 public:
  Runner(const RunConfig& cfg, std::ostream& log) : cfg_(cfg), log_(log), dir_(cfg.output_directory) {}

  void write(const std::string& name, const std::string& content) {
    const std::string path = (dir_ / name).string();
    write_atomic(path, content);
    log_ << "wrote " << path << "\n";
  }

  template <int Dim>
  int execute() {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory '" + dir_.string() + "': " + ec.message());

    const Profile<Dim> profile = make_profile<Dim>(cfg_.nozzle);
    const RegularityReport reg = verify_regularity(profile, 100.0);
    if (!reg.positive) throw ConfigError("nozzle.kind", 0, "profile pinches to zero width");
    if (!reg.passed) log_ << "warning: nozzle profile fails the regularity screen\n";

    const NozzleMap<Dim> nozzle(profile);
    const GasModel<> gas(cfg_.gamma, cfg_.delta0);
    FlowProblem<Dim> problem{nozzle, gas, cfg_.m0, cfg_.half_length, cfg_.transverse_cells, cfg_.axial_cells};
    log_ << "mode " << to_string(cfg_.mode) << ", " << Dim << "D " << cfg_.nozzle.kind << " nozzle, gamma "
         << cfg_.gamma << ", delta0 " << cfg_.delta0 << "\n";

    switch (cfg_.mode) {
      case RunMode::Solve:
      case RunMode::FarField:
        return solve_mode(problem);
      case RunMode::ValidateCylinder:
        if (!cfg_.has_m0) problem.m0 = nozzle.measure_minus() * gas.relation().momentum(cfg_.q_star);
        return solve_mode(problem);
      case RunMode::Sweep:
        return sweep_mode(problem);
      case RunMode::CriticalFlux:
        return critical_mode(problem);
      case RunMode::Uniqueness:
        return uniqueness_mode(problem);
    }
    return kExitFailure;
  }

 private:
  template <int Dim>
  int solve_mode(const FlowProblem<Dim>& problem) {
    const auto& nozzle = problem.nozzle;
    const auto& gas = problem.gas;
    const double m0 = problem.m0;
    Mesh<Dim> mesh = problem.mesh();
    Solution sol;
    try {
      if (cfg_.L_schedule.size() > 1) {
        auto cont = continue_in_L(problem, cfg_.L_schedule, cfg_.solver);
        write("continuation.csv", continuation_csv(cont));
        for (const auto& st : cont.stages)
          log_ << "L = " << st.half_length << ": " << st.report.iterations << " iterations, interior change "
               << st.interior_change << "\n";
        auto& last = cont.stages.back();
        mesh = last.mesh;
        sol = {last.field, last.report};
      } else {
        sol = newton_solve(mesh, gas, nozzle, m0, zero_field(mesh), cfg_.solver);
      }
    } catch (const NewtonFailure& e) {
      write("convergence.csv", convergence_csv(e.report()));
      throw;
    }
    const SolverReport& rep = sol.report;
    const auto speed = max_speed_and_mach(mesh, sol.field, gas, nozzle);
    log_ << "converged in " << rep.iterations << " iterations (" << rep.wall_seconds << " s)\n"
         << "Q = " << format_number(speed.max_speed) << ", max Mach = " << format_number(speed.max_mach) << "\n"
         << "max station flux error = " << format_number(rep.flux_error) << " (relative "
         << format_number(rep.relative_flux_error) << ")\n"
         << "truncation " << (rep.truncation_certified ? "inactive: certified subsonic" : "ACTIVE: not certified")
         << "\n";

    write("solution.txt", snapshot_text(mesh, nozzle, sol.field, cfg_.hash()));
    write("flux.csv", flux_csv(section_fluxes(mesh, sol.field, gas, nozzle), m0));
    write("convergence.csv", convergence_csv(rep));
    if (cfg_.write_vtk) write("solution.vtk", vtk_text(mesh, nozzle, sol.field, gas));

    int code = rep.truncation_certified ? kExitSuccess : kExitUncertified;

    if (cfg_.mode == RunMode::FarField) {
      const double L = mesh.half_length();
      const std::vector<double> offsets = cfg_.probe_offsets.empty() ? std::vector<double>{L / 8, L / 4}
                                                                      : cfg_.probe_offsets;
      const FarFieldReport ff = far_field_check(mesh, sol.field, gas, nozzle, m0, offsets);
      write("far_field.csv", far_field_csv(ff));
      log_ << "q- = " << format_number(ff.q_minus) << ", q+ = " << format_number(ff.q_plus)
           << ", max relative deviation " << format_number(ff.max_relative_deviation)
           << ", max relative transverse speed " << format_number(ff.max_relative_transverse) << "\n";
    }

    if (cfg_.mode == RunMode::ValidateCylinder) {
      const double q_star = solve_q_from_flux(gas.relation(), m0 / nozzle.measure_minus());
      Point<Dim> exact = Point<Dim>::Zero();
      exact(Dim - 1) = q_star;
      double err = 0;
      for_each_quadrature_point<Dim>(mesh, sol.field, nozzle, [&](const QuadraturePoint<Dim>& qp) {
        err = std::max(err, (qp.grad - exact).cwiseAbs().maxCoeff());
      });
      write("validation.csv", "q_star,m0,max_gradient_error,max_flux_error\n" + format_number(q_star) + "," +
                                  format_number(m0) + "," + format_number(err) + "," + format_number(rep.flux_error) +
                                  "\n");
      log_ << "q* = " << format_number(q_star) << ", max gradient error = " << format_number(err) << "\n";
      if (code == kExitSuccess && !(err < 1e-8)) {
        log_ << "validation FAILED: gradient error exceeds 1e-8\n";
        code = kExitFailure;
      }
    }
    return code;
  }

  template <int Dim>
  int sweep_mode(const FlowProblem<Dim>& problem) {
    const auto points = flux_sweep(problem, cfg_.sweep, cfg_.solver);
    write("q_vs_m0.csv", sweep_csv(points));
    bool all_converged = true, all_certified = true;
    double last_q = -1;
    for (const auto& p : points) {
      log_ << "m0 = " << format_number(p.m0) << ": Q = " << format_number(p.max_speed)
           << (p.converged ? (p.certified ? "" : " (uncertified)") : " (no convergence)") << "\n";
      all_converged &= p.converged;
      all_certified &= p.certified;
      if (p.certified) {
        if (p.max_speed < last_q) log_ << "note: Q decreased at m0 = " << format_number(p.m0) << "\n";
        last_q = p.max_speed;
      }
    }
    if (!all_converged) return kExitFailure;
    return all_certified ? kExitSuccess : kExitUncertified;
  }

  template <int Dim>
  int critical_mode(const FlowProblem<Dim>& problem) {
    const SweepResult res = critical_flux_search(problem, cfg_.delta_schedule, cfg_.bisection_steps, cfg_.solver);
    write("critical.csv", critical_csv(res.brackets));
    write("q_vs_m0.csv", sweep_csv(res.points));
    for (const auto& b : res.brackets)
      log_ << "delta0 = " << b.delta0 << " (q_n = " << format_number(b.q_limit) << "): m0 in ["
           << format_number(b.m_lo) << ", " << format_number(b.m_hi) << "]\n";
    log_ << "critical flux estimate " << format_number(res.critical_estimate()) << " +- "
         << format_number(res.critical_uncertainty()) << "\n";
    return kExitSuccess;
  }

  template <int Dim>
  int uniqueness_mode(const FlowProblem<Dim>& problem) {
    const UniquenessResult u = uniqueness_check(problem, cfg_.solver);
    write("uniqueness.csv", "m0,discrepancy,iterations_zero,iterations_ramp,certified\n" + format_number(problem.m0) +
                                "," + format_number(u.discrepancy) + "," + std::to_string(u.from_zero.iterations) +
                                "," + std::to_string(u.from_ramp.iterations) + "," + (u.both_certified ? "1" : "0") +
                                "\n");
    log_ << "gradient discrepancy between initial guesses = " << format_number(u.discrepancy) << "\n";
    if (!u.both_certified) return kExitUncertified;
    return u.discrepancy < 1e-8 ? kExitSuccess : kExitFailure;
  }

  const RunConfig& cfg_;
  std::ostream& log_;
  std::filesystem::path dir_;
};

}  // namespace

int run(const RunConfig& config, std::ostream& log) {
  try {
    Runner runner(config, log);
    return config.nozzle.dimension == 3 ? runner.execute<3>() : runner.execute<2>();
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace nozzleflow
