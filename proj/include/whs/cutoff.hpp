#pragma once

#include <vector>

#include "whs/grid.hpp"

namespace whs {

/// Smooth radial cutoff profile: c(r) = 1 for r <= 2, c(r) = 0 for r >= 2*sqrt(2),
/// glued with the standard two-sided exponential e^{-1/s} bridge in between.
/// chi(x) = c(|x|) and chi_h(xi) = chi(h xi).
double chi(double r);

/// Analytic derivative c'(r); vanishes on the plateau and outside the support.
double chi_prime(double r);

inline constexpr double chi_plateau_radius = 2.0;
double chi_support_radius();  // 2*sqrt(2)

/// Samples of chi(scale*h*|xi|) over the frequency lattice. scale is 1 for
/// chi_h and 2 for chi_{2h}.
std::vector<double> cutoff_multiplier(const GridSpec& g, double h, int scale);

struct ResolutionReport {
    bool pass = false;
    double max_lattice_freq = 0.0;  // pi*(n/2-1)/L
    double needed_freq = 0.0;       // 2*sqrt(2)/h, the support radius of chi_h
    int required_n = 0;             // minimal even point count that passes
};

/// The lattice must resolve the full support of chi_h (radius 2*sqrt(2)/h);
/// chi_{2h} then fits with a factor-two margin.
ResolutionReport validate_resolution(const GridSpec& g, double h);

}  // namespace whs
