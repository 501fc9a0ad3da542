#pragma once

#include "whs/gevrey.hpp"
#include "whs/model.hpp"

namespace whs {

/// Pointwise symbol configuration for the symmetrizer machinery.
struct SymbolConfig {
    double b = 1.0;
    double ell = 1.0;
    double rho = 0.5;
    double nu = 0.0;
    double tau_bar = 1.0;
    double h = 0.1;
    int order_N = 2;  // max{2 theta, m}
    double fd_step = 1e-2;
};

SymbolConfig make_symbol_config(const SystemModel& mdl, double b, double ell, double tau_bar,
                                double h);

/// Truncated Taylor symbol
///   calH_r = sum_{|alpha+beta| <= r} (eps^{|alpha+beta|}/(alpha! beta!))
///            D_x^alpha d_xi^beta A(t,x,xi) y^alpha (-i eta)^beta,
/// with D_x = -i d_x. A is linear in xi, so only |beta| <= 1 contributes.
Matc calH(const SystemModel& mdl, double t, const Vec3& x, const Vec3& xi, const Vec3& y,
          const Vec3& eta, double eps, int r, double fd_step = 1e-2);

/// grad_xi(<xi>_ell^rho chi_h(xi)), analytic in both factors.
Vec3 grad_weight_phase(const Vec3& xi, double ell, double rho, double h);

struct HSymbols {
    Matc H;        // sum_{|alpha| <= N} (1/alpha!) D_x^alpha A(t,x,xi) w^alpha
    Matc Hh;       // chi_{2h}^2(xi) H
    double chi2h;  // chi_{2h}(|xi|)
};

/// H(t,x,xi,tau) with w = (tau_bar - tau) grad_xi(<xi>^rho chi_h).
HSymbols taylor_symbol_H(const SystemModel& mdl, double t, const Vec3& x, const Vec3& xi,
                         double tau, const SymbolConfig& cfg);

/// The rescaled-calH route to H^h: chi_{2h}^2 <xi>_ell calH_N at the
/// substitution (xi/<xi>, w/<xi>^{rho-1}, eta = 0, eps = <xi>^{rho-1}).
/// Agrees with taylor_symbol_H to rounding; used as a cross-check.
Matc taylor_symbol_H_via_calH(const SystemModel& mdl, double t, const Vec3& x, const Vec3& xi,
                              double tau, const SymbolConfig& cfg);

struct MSymbol {
    Matc M;  // iH^h - b <xi>^rho I
    double spectral_abscissa = 0.0;
    bool hurwitz = false;
};

MSymbol build_M(const Matc& Hh, double b, double bracket_val, double rho);

/// Solves M* R + R M = -b sigma I (sigma = <xi>_ell^rho) densely; R is the
/// symmetrizer b int_0^inf sigma e^{sM*} e^{sM} ds.
Matc solve_symmetrizer(const Matc& M, double b, double sigma);

/// Quadrature of the defining integral, for cross-checking the dense solve.
Matc symmetrizer_quadrature(const Matc& M, double b, double sigma, double tol = 1e-10);

struct LowerBoundReport {
    double min_eig = 0.0;
    double c_est = 0.0;  // min_eig(R) <xi>^{2 nu}
};

LowerBoundReport verify_lower_bound(const Matc& R, double nu, double bracket_val);

/// One sample point with its matrices and certification diagnostics.
struct SymmetrizerProbe {
    double t = 0.0;
    Vec3 x{0, 0, 0};
    Vec3 xi{0, 0, 0};
    double tau = 0.0;
    int order_N = 2;
    Matc Hh, M, R;
    double bracket_val = 0.0;
    double lyapunov_residual = 0.0;  // ||M*R + RM + b sigma I|| / (b sigma)
    double rih_residual = 0.0;       // ||R(i chi^2 H) + (i chi^2 H)*R + b sigma - 2 b sigma R|| / (b sigma)
    double hermiticity_defect = 0.0;
    double min_eig_R = 0.0;
    double c_est = 0.0;
    double spectral_abscissa = 0.0;
};

SymmetrizerProbe probe_point(const SystemModel& mdl, double t, const Vec3& x, const Vec3& xi,
                             double tau, const SymbolConfig& cfg);

struct ThetaFit {
    double theta_hat = 0.0;
    double r2 = 0.0;
    double residual_rms = 0.0;
    bool degenerate = false;
    std::vector<std::pair<double, double>> table;  // (eps, max norm)
    std::string note;
};

/// Fits the growth exponent of ||e^{i s calH_N}|| with s = 1/eps over
/// eps = 2^-3 .. 2^-10; the slope of log norm against log(1/eps).
ThetaFit fit_theta(const SystemModel& mdl, int sample_count = 24, double T = 1.0);

}  // namespace whs
