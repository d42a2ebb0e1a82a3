#include "nozzleflow/output.hpp"

#include <unistd.h>

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace nozzleflow {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename temporary file onto '" + path + "'");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <int Dim>
std::string snapshot_text(const Mesh<Dim>& mesh, const NozzleMap<Dim>& nozzle, const DiscreteField& field,
                          std::uint64_t config_hash) {
  if (field.size() != mesh.num_nodes()) throw DomainError("field does not match the mesh");
  std::string out = "# nozzleflow snapshot 1\n";
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016" PRIx64, config_hash);
  out += "config_hash " + std::string(hash) + "\n";
  out += "dimension " + std::to_string(Dim) + "\n";
  out += "mesh " + format_number(mesh.half_length()) + " " + std::to_string(mesh.transverse_cells()) + " " +
         std::to_string(mesh.axial_cells()) + "\n";
  out += "nodes " + std::to_string(mesh.num_nodes()) + "\n";
  for (int id = 0; id < mesh.num_nodes(); ++id) {
    const Point<Dim> x = nozzle.inverse(mesh.node(id));
    for (int d = 0; d < Dim; ++d) out += format_number(x(d)) + " ";
    out += format_number(field.values(id)) + "\n";
  }
  return out;
}

Snapshot parse_snapshot(const std::string& text) {
  std::istringstream in(text);
  std::string line, word;
  Snapshot s;
  auto expect = [&](const char* key) {
    if (!(in >> word) || word != key) throw DomainError(std::string("snapshot: expected '") + key + "'");
  };
  std::getline(in, line);
  if (line.rfind("# nozzleflow snapshot", 0) != 0) throw DomainError("snapshot: missing header line");
  expect("config_hash");
  std::string hash;
  in >> hash;
  s.config_hash = std::stoull(hash, nullptr, 16);
  expect("dimension");
  in >> s.dimension;
  expect("mesh");
  in >> word >> s.transverse_cells >> s.axial_cells;
  s.half_length = std::strtod(word.c_str(), nullptr);
  expect("nodes");
  int count = 0;
  in >> count;
  if (!in || s.dimension < 2 || s.dimension > 3 || count <= 0) throw DomainError("snapshot: bad header");
  s.coordinates.resize(s.dimension, count);
  s.values.resize(count);
  for (int i = 0; i < count; ++i) {
    for (int d = 0; d <= s.dimension; ++d) {
      if (!(in >> word)) throw DomainError("snapshot: truncated at node " + std::to_string(i));
      const double v = std::strtod(word.c_str(), nullptr);
      if (d < s.dimension)
        s.coordinates(d, i) = v;
      else
        s.values(i) = v;
    }
  }
  return s;
}

template <int Dim>
DiscreteField field_from_snapshot(const Mesh<Dim>& mesh, const Snapshot& snapshot) {
  if (snapshot.dimension != Dim || snapshot.transverse_cells != mesh.transverse_cells() ||
      snapshot.axial_cells != mesh.axial_cells() || snapshot.values.size() != mesh.num_nodes())
    throw DomainError("snapshot does not match the mesh");
  DiscreteField f = zero_field(mesh);
  f.values = snapshot.values;
  return f;
}

template <int Dim>
std::string flux_csv(const std::vector<SectionSample<Dim>>& sections, double m0) {
  std::string out = "station,measure,flux,deviation\n";
  for (const auto& s : sections)
    out += format_number(s.station) + "," + format_number(s.measure) + "," + format_number(s.flux) + "," +
           format_number(s.flux - m0) + "\n";
  return out;
}

std::string convergence_csv(const SolverReport& report) {
  std::string out = "iteration,residual,energy,step_length\n";
  for (std::size_t k = 0; k < report.residual_history.size(); ++k) {
    out += std::to_string(k) + "," + format_number(report.residual_history[k]) + ",";
    out += (k < report.energy_history.size() ? format_number(report.energy_history[k]) : "") + ",";
    out += (k < report.step_lengths.size() ? format_number(report.step_lengths[k]) : "") + "\n";
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
  std::string out = "m0,Q,converged,certified,flux_error\n";
  for (const auto& p : points)
    out += format_number(p.m0) + "," + format_number(p.max_speed) + "," + (p.converged ? "1" : "0") + "," +
           (p.certified ? "1" : "0") + "," + format_number(p.flux_error) + "\n";
  return out;
}

std::string critical_csv(const std::vector<CriticalBracket>& brackets) {
  std::string out = "delta0,q_limit,m_lo,m_hi,evaluations\n";
  for (const auto& b : brackets)
    out += format_number(b.delta0) + "," + format_number(b.q_limit) + "," + format_number(b.m_lo) + "," +
           format_number(b.m_hi) + "," + std::to_string(b.evaluations.size()) + "\n";
  return out;
}

std::string far_field_csv(const FarFieldReport& report) {
  std::string out = "end,offset,station,reference,mean_axial,max_transverse,deviation,relative_deviation\n";
  auto rows = [&](const char* end, const std::vector<FarFieldProbe>& probes) {
    for (const auto& p : probes)
      out += std::string(end) + "," + format_number(p.offset) + "," + format_number(p.station) + "," +
             format_number(p.reference) + "," + format_number(p.mean_axial) + "," + format_number(p.max_transverse) +
             "," + format_number(p.deviation) + "," + format_number(p.relative_deviation) + "\n";
  };
  rows("inlet", report.inlet);
  rows("outlet", report.outlet);
  return out;
}

template <int Dim>
std::string continuation_csv(const ContinuationResult<Dim>& result) {
  std::string out = "L,N_a,iterations,Q,certified,interior_change\n";
  for (const auto& s : result.stages)
    out += format_number(s.half_length) + "," + std::to_string(s.mesh.axial_cells()) + "," +
           std::to_string(s.report.iterations) + "," + format_number(s.report.max_speed) + "," +
           (s.report.truncation_certified ? "1" : "0") + "," + format_number(s.interior_change) + "\n";
  return out;
}

template <int Dim>
std::string vtk_text(const Mesh<Dim>& mesh, const NozzleMap<Dim>& nozzle, const DiscreteField& field,
                     const GasModel<>& gas) {
  const int n = mesh.num_nodes();
  const int nt = mesh.transverse_cells() + 1;
  const auto grads = nodal_gradients(mesh, field, nozzle);
  auto pad = [](const Point<Dim>& v) {
    return Dim == 2 ? Eigen::Vector3d(v(0), 0, v(Dim - 1)) : Eigen::Vector3d(v(0), v(1 % Dim), v(Dim - 1));
  };
  std::string out = "# vtk DataFile Version 3.0\nnozzleflow solution\nASCII\nDATASET STRUCTURED_GRID\n";
  out += "DIMENSIONS " + std::to_string(nt) + " " + std::to_string(Dim == 2 ? 1 : nt) + " " +
         std::to_string(mesh.axial_cells() + 1) + "\n";
  out += "POINTS " + std::to_string(n) + " double\n";
  for (int id = 0; id < n; ++id) {
    const Eigen::Vector3d p = pad(nozzle.inverse(mesh.node(id)));
    out += format_number(p(0)) + " " + format_number(p(1)) + " " + format_number(p(2)) + "\n";
  }
  out += "POINT_DATA " + std::to_string(n) + "\nSCALARS phi double 1\nLOOKUP_TABLE default\n";
  for (int id = 0; id < n; ++id) out += format_number(field.values(id)) + "\n";
  out += "VECTORS velocity double\n";
  for (int id = 0; id < n; ++id) {
    const Eigen::Vector3d v = pad(grads.col(id));
    out += format_number(v(0)) + " " + format_number(v(1)) + " " + format_number(v(2)) + "\n";
  }
  out += "SCALARS mach double 1\nLOOKUP_TABLE default\n";
  const auto& rel = gas.relation();
  for (int id = 0; id < n; ++id) {
    const double q = grads.col(id).norm();
    out += format_number(q * q < rel.vacuum_bound() ? rel.mach(q) : -1.0) + "\n";
  }
  return out;
}

#define NOZZLEFLOW_INSTANTIATE(D)                                                                              \
  template std::string snapshot_text<D>(const Mesh<D>&, const NozzleMap<D>&, const DiscreteField&, std::uint64_t); \
  template DiscreteField field_from_snapshot<D>(const Mesh<D>&, const Snapshot&);                              \
  template std::string flux_csv<D>(const std::vector<SectionSample<D>>&, double);                              \
  template std::string continuation_csv<D>(const ContinuationResult<D>&);                                      \
  template std::string vtk_text<D>(const Mesh<D>&, const NozzleMap<D>&, const DiscreteField&, const GasModel<>&);

NOZZLEFLOW_INSTANTIATE(2)
NOZZLEFLOW_INSTANTIATE(3)

}  // namespace nozzleflow
