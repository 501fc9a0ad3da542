#pragma once

#include <string>

#include "whs/model.hpp"

namespace whs {

/// Field dump: text header "WHS1 d N_g L m repr\n" (repr phys|spec) followed
/// by little-endian doubles, (re, im) interleaved, component-major then
/// row-major lattice order. Spectral dumps use the FFT storage order
/// (q = 0 .. n/2-1, -n/2 .. -1 per dimension).
void write_field(const std::string& path, const SpectralField& u);
void write_field(const std::string& path, const PhysicalField& u);
SpectralField read_spectral_field(const std::string& path);
PhysicalField read_physical_field(const std::string& path);

/// Coefficient table: header "WHSCOEF1 d N_g L m n_time t0 dt\n" followed,
/// per time node, by the d matrices A_1..A_d then B; each matrix laid out
/// entry-major (row, then column) with the grid field of that entry in
/// row-major lattice order, (re, im) doubles. Values between nodes are
/// interpolated linearly in t; off-node x queries use trigonometric
/// interpolation, which also provides the analytic x-derivatives.
void write_coefficient_table(const std::string& path, const SystemModel& mdl, const GridSpec& g,
                             double t0, double dt, int n_time);
SystemModel read_coefficient_table(const std::string& path, int theta);

/// Deterministic formatting for CSV output (%.17g).
std::string csv_num(double v);

}  // namespace whs
