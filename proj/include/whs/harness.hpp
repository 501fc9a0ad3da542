#pragma once

#include <cstdint>

#include "whs/problems.hpp"

namespace whs {

struct RateFit {
    double rate = 0.0;
    double r2 = 0.0;
    double intercept = 0.0;
};

/// Least-squares line fit of ys against xs (both already in log space).
RateFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys);

/// Zero-pad spectral coefficients onto a finer grid with the same half period.
SpectralField embed(const SpectralField& u, const GridSpec& fine);

struct StudyConfig {
    double L = M_PI;
    double tau_bar = 1.0;
    double a = 1.0;
    double b = 1.0;
    double ell = 1.0;
    double t_star_frac = 0.5;  // measure at tau_bar * frac / a
    double neumann_tol = 1e-12;
    int neumann_max_terms = 64;
    bool include_timings = true;
    bool with_forcing = false;  // cos forcing, constant-coefficient presets only
    double forcing_omega = 3.0;
    int ref_refine = 4;  // self-convergence reference refinement
    std::size_t max_points = 4u << 20;
};

struct StudyRow {
    double h = 0.0, k = 0.0, ell = 1.0;
    int Ng = 0;
    double error_weighted = 0.0;
    double error_plain = 0.0;
    double fitted_C = 0.0;
    double runtime = 0.0;
    std::uint64_t fft_count = 0;
    bool skipped = false;
};

struct StudyResult {
    std::vector<StudyRow> rows;  // sorted by h descending
    RateFit weighted_fit, plain_fit;
    double C_weighted = 0.0, C_plain = 0.0;
    double t_star = 0.0;
};

/// Refinement ladder against the preset's reference solution with k = beta_bar h
/// (beta_bar = min(1/(2 Cbar), log2/(3a)), k then snapped so n k = t_star).
/// Measures ||<D>^-nu e^{(tau-a t)<D>^rho} (u_ref - u^n)|| and the plain L2
/// error; reports fitted rates and the smallest admissible constants.
StudyResult convergence_study(const ProblemPreset& preset, const std::vector<double>& ladder,
                              const StudyConfig& cfg);

struct AuditRow {
    int n = 0;
    double t = 0.0;
    double log_lhs = 0.0;   // log ||<D>^-nu e^{(tau-at)<D>^rho} u^n||^2
    double log_rhs = 0.0;   // log (g-term + k sum f-terms)
    double c_fit = 0.0;
    double c_fit_diss = 0.0;
};

struct AuditResult {
    std::vector<AuditRow> rows;
    double c_fit = 0.0;       // max over steps
    double c_fit_diss = 0.0;  // with the dissipation sum added to the LHS
    double h = 0.0, k = 0.0;
    int Ng = 0;
    int steps = 0;
};

struct AuditConfig {
    double L = M_PI;
    double tau_bar = 1.0;
    double a = 1.0;
    double b = 1.0;
    double ell = 1.0;
    double t_star_frac = 0.5;
    double neumann_tol = 1e-12;
    bool with_forcing = false;
    double forcing_omega = 3.0;
    double forcing_amp = 1.0;
};

/// Energy audit of one run: per step the weighted energy against the data +
/// forcing budget, plus the dissipation-augmented variant.
AuditResult stability_audit(const ProblemPreset& preset, double h, const AuditConfig& cfg);

struct CostConfig {
    double L = 2.0;
    double tau_bar = 1.0;
    double a = 1.0;
    double b = 1.0;
    double ell = 1.0;
    double t_end = 0.05;
    double calib = 0.5;  // h = calib * eps^{1/(1-nu)}
    double neumann_tol = 1e-10;
    int neumann_max_terms = 64;
    int ref_refine = 2;
    std::size_t max_points = 4u << 20;
    bool include_timings = true;
};

struct CostRow {
    double epsilon = 0.0, h = 0.0, k = 0.0;
    int Ng = 0, steps = 0;
    double achieved_error = 0.0;
    std::uint64_t fft_count = 0;
    double fft_proxy = 0.0;  // fft_count * N_total * ln(N_total)
    double runtime = 0.0;
    bool skipped = false;
};

struct CostResult {
    std::vector<CostRow> rows;
    double slope = 0.0;  // log fft_proxy against log(1/eps)
    double r2 = 0.0;
};

/// Accuracy-versus-cost scaling: h selected by inverting the error bound,
/// errors measured against one shared fine reference run.
CostResult cost_accuracy(const ProblemPreset& preset, const std::vector<double>& eps_ladder,
                         const CostConfig& cfg);

// CSV emitters; byte-deterministic given include_timings = false.
std::string study_csv(const StudyResult& r);
std::string audit_csv(const AuditResult& r);
std::string cost_csv(const CostResult& r);
std::string diagnostics_csv(const Trajectory& t);

}  // namespace whs
