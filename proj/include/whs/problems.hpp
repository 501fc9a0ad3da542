#pragma once

#include "whs/scheme.hpp"
#include "whs/symmetrizer.hpp"

namespace whs {

/// A built-in test system: model, declared theta, default spectral data, and
/// a closed-form torus solution when the coefficients are constant.
struct ProblemPreset {
    std::string name;
    std::string description;
    SystemModel model;
    bool constant_coeff = false;
    std::function<SpectralField(const GridSpec&)> default_g;
    std::function<SpectralField(const SpectralField& g, double t)> exact;  // f = 0 only
};

/// m = 2 Jordan block, A1 = [[0,1],[0,0]], B = 0, theta = 1.
/// Per mode e^{itA(xi)} = I + it xi A1: polynomial growth, nilpotent symbol.
ProblemPreset preset_jordan();

/// First-order reduction of u_tt = a(t) u_xx in (d_t u, d_x u):
/// A1(t) = [[0, a(t)],[1, 0]], eigenvalues +-sqrt(a(t)) xi.
ProblemPreset preset_degenerate_wave(std::function<double(double)> a_profile,
                                     const std::string& tag, int theta);

/// Variable-coefficient strictly hyperbolic model, A1 = Q(x) diag(1,-1) Q(x)^-1
/// with Q = I + psi(x) [[0,1],[0,0]], psi a compactly supported bump; theta = 0.
ProblemPreset preset_variable_smooth();

/// Trivial tensorized symmetric model in d = 2: A1 = diag(1,-1), A2 = [[0,1],[1,0]].
ProblemPreset preset_sym2d();

/// G = 0 model (m = 1, A = B = 0); trajectories are constant.
ProblemPreset preset_zero();

/// Accepted names: jordan, degwave:a=t2, degwave:a=1, varsmooth, sym2d, zero.
ProblemPreset preset_by_name(const std::string& name);
std::vector<std::string> preset_names();

/// Per-mode propagator u_hat(t) = e^{t(iA(xi)+B)} g_hat(xi) for constant
/// coefficients.
SpectralField exact_constant_coeff(const SystemModel& mdl, const SpectralField& g, double t);

/// Separable forcing f(t,x) = cos(omega t) zeta(x).
struct CosForcing {
    double omega = 1.7;
    SpectralField zeta;
};

ForcingSampler make_cos_forcing_sampler(const CosForcing& f);

/// Duhamel solution with CosForcing for constant coefficients:
/// u_hat(t) = e^{tM} g_hat + (1/2) sum_{s=+-1} (M - is w)^-1 (e^{tM} - e^{is w t}) zeta_hat.
SpectralField exact_constant_coeff_forced(const SystemModel& mdl, const SpectralField& g, double t,
                                          const CosForcing& f);

/// Deterministic Gaussian-spectral data, normalized to unit L2 norm.
SpectralField default_gaussian_data(const GridSpec& g, int m, double width = 2.5);

/// Smooth compactly supported bump used by the varsmooth preset, with
/// derivatives: psi(x) = amp * e^{1 - 1/(1-(x/r)^2)} for |x| < r, else 0.
double bump_psi(double x, int derivative = 0);

}  // namespace whs
