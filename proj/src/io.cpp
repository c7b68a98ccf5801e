#include "ktlab/io.hpp"

#include <cstdio>
#include <fstream>

#include "ktlab/errors.hpp"

namespace ktlab {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_snapshot_csv(std::ostream& os, const DistributionState& st) {
  os << "x,v,f\n";
  const PhaseGrid& g = st.grid;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.nv; ++j)
      os << format_double(g.x_center(i)) << ',' << format_double(g.v_center(j)) << ','
         << format_double(st.f(i, j)) << '\n';
}

void write_diagnostics_header(std::ostream& os) {
  os << "t,mass,momentum,energy,linf,rX_min,rX_max,rV_min,rV_max,diss_Qi,diss_Qr\n";
}

void write_diagnostics_row(std::ostream& os, const DiagnosticsReport& r) {
  os << format_double(r.t) << ',' << format_double(r.mass) << ',' << format_double(r.momentum)
     << ',' << format_double(r.energy) << ',' << format_double(r.linf) << ','
     << format_double(r.rx_min) << ',' << format_double(r.rx_max) << ','
     << format_double(r.rv_min) << ',' << format_double(r.rv_max) << ','
     << format_double(r.diss_qi) << ',' << format_double(r.diss_qr) << '\n';
}

void write_euler_fields_header(std::ostream& os) { os << "t,x,rho,u\n"; }

void write_euler_fields_rows(std::ostream& os, const EulerState& st, Boundary bc) {
  const EulerFields f = euler_fields_on_grid(st, bc);
  for (int i = 0; i < st.grid.nx; ++i)
    os << format_double(st.t) << ',' << format_double(st.grid.x_center(i)) << ','
       << format_double(f.rho[i]) << ',' << format_double(f.u[i]) << '\n';
}

void write_particle_dump_header(std::ostream& os) { os << "t,x,m,v\n"; }

void write_particle_dump_rows(std::ostream& os, const EulerState& st) {
  for (const auto& p : st.particles)
    os << format_double(st.t) << ',' << format_double(p.x) << ',' << format_double(p.m) << ','
       << format_double(p.v) << '\n';
}

void write_convergence_csv(std::ostream& os, const ConvergenceRecord& rec) {
  os << "eps,w1_sup,re_sup,mono_sup\n";
  for (const auto& r : rec.rows)
    os << format_double(r.eps) << ',' << format_double(r.w1_sup) << ','
       << format_double(r.re_sup) << ',' << format_double(r.mono_sup) << '\n';
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw NumericalError("cannot write file: " + path);
  out << content;
}

}  // namespace ktlab
