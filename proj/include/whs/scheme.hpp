#pragma once

#include <map>

#include "whs/errors.hpp"
#include "whs/gevrey.hpp"
#include "whs/operator_g.hpp"

namespace whs {

/// All scheme parameters. rho and nu are the exponents derived from the
/// model's theta; cbar the estimated operator-norm constant.
struct SchemeConfig {
    double k = 0.0;        // time step
    double h = 0.1;        // cutoff parameter
    double ell = 1.0;      // frequency shift, >= 1
    double a = 1.0;        // weight decay rate
    double b = 1.0;        // symmetrizer damping
    double tau_bar = 1.0;  // initial weight exponent budget
    double rho = 0.5;
    double nu = 0.0;
    double cbar = 1.0;
    double neumann_tol = 1e-12;
    int neumann_max_terms = 64;

    /// Weight spec of the stability energy ||<D>^sigma e^{(tau-at)<D>^rho} u||.
    WeightSpec weight(double sigma) const {
        WeightSpec w;
        w.sigma = sigma;
        w.tau_bar = tau_bar;
        w.rate = a;
        w.rho = rho;
        w.ell = ell;
        return w;
    }
};

struct ConstraintCheck {
    std::string name;
    bool ok = true;
    double value = 0.0;
    double bound = 0.0;
    std::string detail;
};

struct ConstraintReport {
    bool pass = true;
    std::vector<ConstraintCheck> checks;
    std::string first_violation() const;
    void throw_if_violated() const;
};

/// Checks, in order:
///   h <= ell^-1,  k h^-1 <= 1/(2 Cbar),  a k h^-rho <= log(2)/3,
///   a ell^-(rho/6) <= 1,  b ell^-(1-rho) <= 1,  n k a <= tau_bar.
/// Each violated check names the admissible bound.
ConstraintReport validate_constraints(const SchemeConfig& cfg, double n_steps);

/// u^0 = chi_{2h}(D) g
SpectralField initial_truncation(const SpectralField& g, double h);

struct NeumannDiag {
    int terms = 0;
    double residual = 0.0;  // ||(I - (k/2) G_h) x - rhs||
    double rhs_norm = 0.0;
};

/// Solves (I - (k/2) G_h^n) x = rhs by the truncated Neumann series,
/// terms added until the last one falls below neumann_tol * ||rhs||.
SpectralField cn_solve(const SystemModel& mdl, double t_n, const SpectralField& rhs,
                       const SchemeConfig& cfg, NeumannDiag* diag = nullptr);

/// One Crank-Nicholson step:
/// (I - (k/2) G_h^n) u^{n+1} = (I + (k/2) G_h^n) u^n + k chi_{2h} f^n.
SpectralField cn_step(const SystemModel& mdl, double t_n, const SpectralField& u,
                      const SpectralField* f, const SchemeConfig& cfg,
                      NeumannDiag* diag = nullptr);

struct StepDiag {
    int n = 0;
    double t = 0.0;
    double l2_norm = 0.0;
    double weighted_energy = 0.0;  // ||<D>^-nu e^{(tau-at)<D>^rho} u^n||^2
    double log_weighted_energy = 0.0;
    int neumann_terms = 0;
    double neumann_residual = 0.0;
    std::vector<double> extra_log_energies;  // one per RunOptions::extra_energies
    double log_f_energy = 0.0;               // ||<D>^-nu W(t_n) f^n||^2, -inf if f = 0
};

struct Trajectory {
    std::vector<double> times;
    std::map<int, SpectralField> states;  // kept states, keyed by step index
    std::vector<StepDiag> diag;           // one entry per step 0..n
    bool failed = false;
    std::string error;
    bool f_spectral_condition = true;  // chi_h f^n = f^n held for every sample

    const SpectralField& final_state() const { return states.rbegin()->second; }
};

using ForcingSampler = std::function<SpectralField(double t)>;

struct RunOptions {
    int keep_every = 0;  // 0: keep only u^0 and the final state
    bool record_energy = true;
    std::vector<WeightSpec> extra_energies;
};

/// Full trajectory: u^0 = chi_{2h} g, then n_steps Crank-Nicholson steps with
/// f sampled at t_n = n k. Constraints are validated up front.
Trajectory run(const SystemModel& mdl, const SpectralField& g, const ForcingSampler& f,
               const SchemeConfig& cfg, int n_steps, const RunOptions& opt = {});

}  // namespace whs
