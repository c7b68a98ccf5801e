#ifndef KTLAB_IO_HPP
#define KTLAB_IO_HPP

// CSV and manifest output. All floating-point fields print with %.17g so
// repeated runs with the same config and seed produce byte-identical files.

#include <ostream>
#include <string>
#include <vector>

#include "ktlab/euler.hpp"
#include "ktlab/kinetic_ops.hpp"
#include "ktlab/metrics.hpp"
#include "ktlab/phase.hpp"

namespace ktlab {

std::string format_double(double v);

// phase-space snapshot, header `x,v,f`
void write_snapshot_csv(std::ostream& os, const DistributionState& st);

// diagnostics table, header
// `t,mass,momentum,energy,linf,rX_min,rX_max,rV_min,rV_max,diss_Qi,diss_Qr`
void write_diagnostics_header(std::ostream& os);
void write_diagnostics_row(std::ostream& os, const DiagnosticsReport& r);

// Euler trajectory, header `t,x,rho,u` (FV states) and particle dumps
// `t,x,m,v`
void write_euler_fields_rows(std::ostream& os, const EulerState& st, Boundary bc);
void write_euler_fields_header(std::ostream& os);
void write_particle_dump_header(std::ostream& os);
void write_particle_dump_rows(std::ostream& os, const EulerState& st);

// sweep record, header `eps,w1_sup,re_sup,mono_sup`
void write_convergence_csv(std::ostream& os, const ConvergenceRecord& rec);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace ktlab

#endif
