#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "nozzleflow/output.hpp"
#include "nozzleflow/run.hpp"

using namespace nozzleflow;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("nozzleflow_cli_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "run.cfg";
  std::ofstream(p) << text;
  return p;
}

struct Outcome {
  int code;
  std::string out;
};

Outcome invoke(const std::string& args, const fs::path& dir) {
  const fs::path log = dir / "stdout.txt";
  const std::string cmd = std::string(NOZZLEFLOW_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_file(log.string())};
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(read_file(p.string()));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig c = parse_config(
      "# cylinder check\n"
      "mode = far-field\n"
      "gas.gamma = 1.4   # air\n"
      "\n"
      "nozzle.kind = tanh\n"
      "flux.m0 = 0.3\n"
      "far_field.offsets = 1, 2.5\n"
      "solver.linear_solver = cg\n",
      {"mesh.N_t=8", "gas.delta0 = 0.1"});
  CHECK(c.mode == RunMode::FarField);
  CHECK(c.gamma == 1.4);
  CHECK(c.delta0 == 0.1);
  CHECK(c.nozzle.kind == "tanh");
  CHECK(c.transverse_cells == 8);
  CHECK(c.axial_cells == 128);
  CHECK(c.probe_offsets == std::vector<double>{1.0, 2.5});
  CHECK(c.solver.linear_solver == LinearSolverKind::ConjugateGradient);
  CHECK(c.entries.at("nozzle.kind").second == 5);
  CHECK(c.entries.at("mesh.N_t").second == 0);

  auto error_of = [](const std::string& text) -> ConfigError {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return e;
    }
    FAIL("expected ConfigError");
    return ConfigError("", 0, "");
  };
  const auto missing = error_of("mode = solve\nflux.m0 = 0.2\n");
  CHECK(missing.key() == "gas.gamma");
  CHECK(std::string(missing.what()).find("gas.gamma") != std::string::npos);

  const auto unknown = error_of("gas.gamma = 1.4\nmesh.Nt = 4\n");
  CHECK(unknown.key() == "mesh.Nt");
  CHECK(unknown.line() == 2);

  const auto bad = error_of("gas.gamma = 1.4\nflux.m0 = 0.2\n\nmesh.N_a = many\n");
  CHECK(bad.key() == "mesh.N_a");
  CHECK(bad.line() == 4);
  CHECK(std::string(bad.what()).find("line 4") != std::string::npos);

  CHECK(error_of("gas.gamma = 0.9\n").key() == "gas.gamma");
  CHECK(error_of("gas.gamma = 1.4\ngas.gamma = 1.3\n").line() == 2);
  CHECK(error_of("gas.gamma = 1.4\nmode = sweep\n").key() == "flux.sweep");
  CHECK(error_of("gas.gamma = 1.4\nflux.m0 = 0.1\nflux.sweep = 0.2, 0.1\n").key() == "flux.sweep");
  CHECK(error_of("gas.gamma = 1.4\nmode = fly\n").key() == "mode");
  CHECK(error_of("gas.gamma = 1.4\nflux.m0 = 0.1\nnozzle.kind = cone\n").key() == "nozzle.kind");
  CHECK(error_of("gas.gamma = 1.4\nflux.m0\n").line() == 2);
  CHECK(error_of("gas.gamma = 1.4\nmode = validate-cylinder\nnozzle.kind = tanh\n").key() == "nozzle.kind");

  // the hash ignores the output directory and whitespace, not values
  const auto h1 = parse_config("gas.gamma = 1.4\nflux.m0 = 0.2\noutput.directory = a\n").hash();
  const auto h2 = parse_config("gas.gamma=1.4\nflux.m0=0.2\noutput.directory=b\n").hash();
  const auto h3 = parse_config("gas.gamma = 1.4\nflux.m0 = 0.3\n").hash();
  CHECK(h1 == h2);
  CHECK(h1 != h3);
}

TEST_CASE("snapshot round trip") {
  const NozzleMap<2> nozzle(Profile<2>::tanh_expansion(0.5, 1.0, 1.0));
  const auto mesh = build_mesh(nozzle, 2.0, 4, 8);
  DiscreteField f = zero_field(mesh);
  for (int i = 0; i < f.size(); ++i) f.values(i) = std::sin(1.0 + i) / 3.0 * (f.dirichlet[i] ? 0 : 1);
  const std::string text = snapshot_text(mesh, nozzle, f, 0xabcdef0123456789ull);
  const Snapshot s = parse_snapshot(text);
  CHECK(s.config_hash == 0xabcdef0123456789ull);
  CHECK(s.dimension == 2);
  CHECK(s.transverse_cells == 4);
  CHECK(s.axial_cells == 8);
  CHECK(s.half_length == 2.0);
  const DiscreteField g = field_from_snapshot(mesh, s);
  CHECK((g.values - f.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK(snapshot_text(mesh, nozzle, g, s.config_hash) == text);
  CHECK_THROWS_AS(field_from_snapshot(build_mesh(nozzle, 2.0, 4, 16), s), DomainError);
  CHECK_THROWS_AS(parse_snapshot("garbage"), DomainError);

  const NozzleMap<3> n3(Profile<3>::cylinder(0.5));
  const auto m3 = build_mesh(n3, 1.0, 2, 4);
  const std::string t3 = snapshot_text(m3, n3, zero_field(m3), 1);
  CHECK(parse_snapshot(t3).coordinates.cols() == 45);
}

TEST_CASE("atomic writes") {
  const fs::path dir = scratch("atomic");
  const std::string p = (dir / "a.txt").string();
  write_atomic(p, "one");
  write_atomic(p, "two");
  CHECK(read_file(p) == "two");
  int files = 0;
  for (const auto& e : fs::directory_iterator(dir)) files += e.is_regular_file();
  CHECK(files == 1);
  CHECK_THROWS_AS(write_atomic((dir / "missing" / "x.txt").string(), "x"), IoError);
  CHECK_THROWS_AS(read_file((dir / "nope").string()), IoError);
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch("exit");
  SUBCASE("validate-cylinder with defaults succeeds") {
    const auto cfg = write_config(dir, "mode = validate-cylinder\ngas.gamma = 1.4\n");
    const auto r = invoke(cfg.string() + " --output-dir " + (dir / "out").string(), dir);
    CHECK(r.code == 0);
    const auto rows = read_csv(dir / "out" / "validation.csv");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0][2] == "max_gradient_error");
    CHECK(std::stod(rows[1][2]) < 1e-8);
    CHECK(std::stod(rows[1][0]) == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("choking flux on a cylinder is uncertified") {
    const auto cfg = write_config(dir, "gas.gamma = 1.4\nflux.m0 = 1.0\nmesh.N_t = 4\nmesh.N_a = 32\n");
    const auto r = invoke(cfg.string() + " --override output.directory=" + (dir / "out").string(), dir);
    CHECK(r.code == 2);
    CHECK(r.out.find("not certified") != std::string::npos);
  }
  SUBCASE("missing gamma") {
    const auto cfg = write_config(dir, "mode = solve\nflux.m0 = 0.2\n");
    const auto r = invoke(cfg.string(), dir);
    CHECK(r.code == 1);
    CHECK(r.out.find("gas.gamma") != std::string::npos);
  }
  SUBCASE("bad override and missing file") {
    const auto cfg = write_config(dir, "gas.gamma = 1.4\nflux.m0 = 0.2\n");
    CHECK(invoke(cfg.string() + " --override mesh.N_t=1", dir).code == 1);
    CHECK(invoke((dir / "absent.cfg").string(), dir).code == 1);
    CHECK(invoke("", dir).code == 1);
  }
  SUBCASE("uniqueness and sweep modes") {
    const std::string base = "gas.gamma = 1.4\nmesh.N_t = 4\nmesh.N_a = 32\noutput.directory = " +
                             (dir / "out").string() + "\n";
    CHECK(invoke(write_config(dir, base + "mode = uniqueness\nnozzle.kind = tanh\nflux.m0 = 0.3\n").string(), dir)
              .code == 0);
    CHECK(fs::exists(dir / "out" / "uniqueness.csv"));
    CHECK(invoke(write_config(dir, base + "mode = sweep\nflux.sweep = 0.2, 0.4\n").string(), dir).code == 0);
    CHECK(invoke(write_config(dir, base + "mode = sweep\nflux.sweep = 0.5, 1.1\n").string(), dir).code == 2);
    const auto rows = read_csv(dir / "out" / "q_vs_m0.csv");
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == std::vector<std::string>{"m0", "Q", "converged", "certified", "flux_error"});
    CHECK(rows[2][3] == "0");
  }
  SUBCASE("far-field with continuation") {
    const auto cfg = write_config(dir,
                                  "mode = far-field\ngas.gamma = 1.4\nnozzle.kind = tanh\nflux.m0 = 0.3\n"
                                  "domain.L_schedule = 4, 8\nmesh.N_t = 4\nmesh.N_a = 32\n");
    const auto r = invoke(cfg.string() + " --output-dir " + (dir / "out").string(), dir);
    CHECK(r.code == 0);
    const auto cont = read_csv(dir / "out" / "continuation.csv");
    REQUIRE(cont.size() == 3);
    CHECK(cont[2][1] == "64");
    CHECK(read_csv(dir / "out" / "far_field.csv").size() == 5);
  }
  SUBCASE("critical flux mode") {
    const auto cfg = write_config(dir,
                                  "mode = critical-flux\ngas.gamma = 1.4\nmesh.N_t = 2\nmesh.N_a = 8\n"
                                  "domain.L = 1\ncritical.delta0_schedule = 0.1, 0.05\ncritical.bisection_steps = 5\n");
    CHECK(invoke(cfg.string() + " --output-dir " + (dir / "out").string(), dir).code == 0);
    const auto rows = read_csv(dir / "out" / "critical.csv");
    REQUIRE(rows.size() == 3);
    CHECK(std::stod(rows[2][2]) >= std::stod(rows[1][2]));
  }
}

TEST_CASE("output files") {
  const fs::path dir = scratch("files");
  const std::string cfg_text =
      "gas.gamma = 1.4\nnozzle.kind = cylinder\nnozzle.r0 = 0.5\ndomain.L = 1\nmesh.N_t = 2\nmesh.N_a = 4\n"
      "flux.m0 = 0.5\n";
  const auto cfg = write_config(dir, cfg_text);
  REQUIRE(invoke(cfg.string() + " --output-dir " + (dir / "a").string(), dir).code == 0);
  REQUIRE(invoke(cfg.string() + " --output-dir " + (dir / "b").string(), dir).code == 0);

  for (const char* name : {"solution.txt", "flux.csv", "convergence.csv", "solution.vtk"})
    CHECK(read_file((dir / "a" / name).string()) == read_file((dir / "b" / name).string()));

  const std::string vtk = read_file((dir / "a" / "solution.vtk").string());
  CHECK(vtk.rfind("# vtk DataFile Version 3.0\n", 0) == 0);
  CHECK(vtk.find("DATASET STRUCTURED_GRID") != std::string::npos);
  CHECK(vtk.find("DIMENSIONS 3 1 5") != std::string::npos);
  CHECK(vtk.find("POINTS 15 double") != std::string::npos);
  CHECK(vtk.find("POINT_DATA 15") != std::string::npos);
  CHECK(vtk.find("SCALARS phi double 1") != std::string::npos);
  CHECK(vtk.find("VECTORS velocity double") != std::string::npos);
  CHECK(vtk.find("SCALARS mach double 1") != std::string::npos);

  const auto flux = read_csv(dir / "a" / "flux.csv");
  REQUIRE(flux.size() == 5);
  CHECK(flux[0] == std::vector<std::string>{"station", "measure", "flux", "deviation"});
  for (std::size_t i = 1; i < flux.size(); ++i) CHECK(std::stod(flux[i][2]) == doctest::Approx(0.5).epsilon(1e-10));
  // 17 significant digits
  CHECK(flux[1][1] == "1");
  CHECK(flux[1][0] == "-0.75");

  const Snapshot snap = parse_snapshot(read_file((dir / "a" / "solution.txt").string()));
  CHECK(snap.config_hash == parse_config(cfg_text).hash());
  CHECK(snap.values.size() == 15);

  for (const auto& e : fs::directory_iterator(dir / "a")) CHECK(e.path().string().find(".tmp.") == std::string::npos);
}

TEST_CASE("run reports errors instead of throwing") {
  RunConfig c = parse_config("gas.gamma = 1.4\nflux.m0 = 0.2\n");
  c.output_directory = "/proc/forbidden/nozzleflow";
  std::ostringstream log;
  CHECK(run(c, log) == kExitFailure);
  CHECK(log.str().find("error") != std::string::npos);
}
