#pragma once

#include <optional>
#include <vector>

#include "whs/grid.hpp"

namespace whs {

/// Regularity bookkeeping derived from the integer theta:
///   s = (2+6 theta)/(1+6 theta),  rho = 1/s,  nu = theta (1-rho).
/// rho >= 3 nu + 1/2 always holds (with equality for these formulas).
struct RegularityParams {
    int theta = 0;
    double s = 2.0;
    double rho = 0.5;
    double nu = 0.0;
};

RegularityParams regularity_params(int theta);

/// Shifted bracket <xi>_ell = sqrt(ell^2 + |xi|^2), ell >= 1.
double bracket(double xi_norm, double ell);

/// Smallest ell satisfying b ell^{-(1-rho)} <= 1 and a ell^{-rho/6} <= 1.
double default_ell(double a, double b, double rho);

/// Specification of one Gevrey-weighted norm
///   e(xi) = sigma log<xi>_ell + (tau_bar - rate*t) <xi>_ell^rho [chi_h(xi)],
/// the bracketed cutoff factor present only for the truncated variant.
struct WeightSpec {
    double sigma = 0.0;
    double tau_bar = 0.0;
    double rate = 0.0;
    double rho = 0.5;
    double ell = 1.0;
    std::optional<double> cutoff_h;
};

double weight_exponent(const WeightSpec& w, double t, double xi_norm);

/// A nonnegative scalar carried in log space so that e^{tau (3/h)^rho} scales
/// beyond double range stay exact. value() overflows to inf gracefully.
struct LogScalar {
    double log_value = -std::numeric_limits<double>::infinity();

    double value() const { return std::exp(log_value); }
    bool representable() const { return log_value < 709.0; }

    // value = mantissa * 2^exp2 with mantissa in [1,2)
    double mantissa() const;
    int exp2() const;
};

/// Overflow-safe weighted norm via max-shifted summation in log space.
LogScalar weighted_norm(const SpectralField& u, double t, const WeightSpec& w);

/// Lattice samples of the weight (or its inverse). Throws std::range_error if
/// any sample overflows the plain double representation.
std::vector<double> weight_multiplier(const GridSpec& g, double t, const WeightSpec& w,
                                      bool inverse = false);

/// omega_h from the discrete weight identity
///   (W^{n+1}-W^n)/k = -2 a omega_h chi_h (W^{n+1}+W^n)/2,
/// omega_h = <xi>_ell^rho * int_0^1 e^{-a k theta <xi>^rho chi_h} dtheta
///           / (1 + e^{-a k <xi>^rho chi_h}).
/// Under the scheme constraints, <xi>^rho/4 <= omega_h <= <xi>^rho.
double omega_h(double xi_norm, double a, double k, double rho, double ell, double h);

}  // namespace whs
