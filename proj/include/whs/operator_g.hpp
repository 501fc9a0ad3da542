#pragma once

#include "whs/model.hpp"

namespace whs {

/// G(t,x,D) u = sum_j A_j(t,x) d_j u + B(t,x) u, derivatives realized by the
/// i xi_j multiplier. Equals iA(t,x,D)u + B u.
SpectralField apply_G(const CoeffFrame& fr, const SpectralField& u);
SpectralField apply_G(const SystemModel& mdl, double t, const SpectralField& u);

/// Adjoint of apply_G with respect to the L2 inner product:
/// G* v = -sum_j d_j(A_j^* v) + B^* v.
SpectralField apply_G_adjoint(const CoeffFrame& fr, const SpectralField& u);

/// G_h = chi_{2h}(D) G chi_{2h}(D); output spectrum lies in supp chi_{2h}.
SpectralField apply_G_h(const CoeffFrame& fr, const SpectralField& u,
                        const std::vector<double>& chi_2h);
SpectralField apply_G_h(const SystemModel& mdl, double t, const SpectralField& u, double h);

struct CbarEstimate {
    double value = 0.0;  // includes the 1.1 safety factor
    double raw = 0.0;    // (sqrt(3)/2) * max_t sigma_max(<D>^-1 G(t))
    bool converged = false;
    int iterations = 0;
    bool fallback = false;
};

/// Operator-norm constant Cbar = (sqrt(3)/2) sup_t ||<D>^-1 G(t,x,D)||,
/// estimated by power iteration on M*M over sampled t in [0,T], inflated by
/// a 1.1 safety factor. Falls back to the coefficient-sum bound
/// (sqrt(3)/2)(sum_j sup||A_j|| + sup||B||) if the iteration misbehaves.
CbarEstimate estimate_cbar(const SystemModel& mdl, const GridSpec& g, double T, double h);

struct HyperbolicityReport {
    double max_im = 0.0;
    bool pass = false;
    double worst_t = 0.0;
    Vec3 worst_x{0.0, 0.0, 0.0};
    Vec3 worst_xi{0.0, 0.0, 0.0};
    int samples = 0;
};

/// Checks Spectrum A(t,x,xi) subset R over quasi-random samples with |xi| = 1.
HyperbolicityReport check_hyperbolicity(const SystemModel& mdl, int sample_count, double tol);

}  // namespace whs
