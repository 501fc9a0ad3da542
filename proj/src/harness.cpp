#include "whs/harness.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "whs/cutoff.hpp"
#include "whs/fft.hpp"
#include "whs/io.hpp"

namespace whs {

namespace {

double log_sum_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double now_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

struct RungSetup {
    GridSpec grid;
    SchemeConfig cfg;
    int n_steps = 0;
};

// grid, Cbar, and a CFL-consistent k with n k = t_star exactly
RungSetup setup_rung(const ProblemPreset& preset, double h, double L, double tau_bar, double a,
                     double b, double ell_req, double t_star, double neumann_tol, int max_terms) {
    RungSetup rs;
    const auto rp = regularity_params(preset.model.theta);
    double ell = std::max(ell_req, default_ell(a, b, rp.rho));
    GridSpec probe = make_grid(preset.model.d, 8, L);
    rs.grid = make_grid(preset.model.d, validate_resolution(probe, h).required_n, L);

    SchemeConfig& cfg = rs.cfg;
    cfg.h = h;
    cfg.ell = ell;
    cfg.a = a;
    cfg.b = b;
    cfg.tau_bar = tau_bar;
    cfg.rho = rp.rho;
    cfg.nu = rp.nu;
    cfg.neumann_tol = neumann_tol;
    cfg.neumann_max_terms = max_terms;
    // Cbar saturates quickly in the grid size (|xi|/<xi> -> 1); estimating on
    // a capped grid keeps large rungs cheap, and the 1.1 safety factor covers
    // the residual growth.
    const GridSpec cgrid = rs.grid.n <= 512 ? rs.grid : make_grid(rs.grid.d, 512, L);
    cfg.cbar = estimate_cbar(preset.model, cgrid, t_star, h).value;

    const double beta_bar = std::min(0.5 / cfg.cbar, 0.23104906018664842 / a);
    rs.n_steps = std::max(2, static_cast<int>(std::ceil(t_star / (beta_bar * h))));
    cfg.k = t_star / rs.n_steps;
    return rs;
}

struct ReferenceSolution {
    GridSpec grid;
    SpectralField state;
};

// fine-grid self-convergence reference at t_star (shared across rungs)
ReferenceSolution self_reference(const ProblemPreset& preset, double h_ref, double L,
                                 double tau_bar, double a, double b, double ell, double t_star,
                                 double neumann_tol, int max_terms, const ForcingSampler& f_of) {
    RungSetup rs = setup_rung(preset, h_ref, L, tau_bar, a, b, ell, t_star, neumann_tol, max_terms);
    SpectralField g = preset.default_g(rs.grid);
    RunOptions opt;
    opt.record_energy = false;
    Trajectory tr = run(preset.model, g, f_of, rs.cfg, rs.n_steps, opt);
    if (tr.failed) throw Error(ErrorKind::constraint, "reference run failed: " + tr.error);
    return {rs.grid, tr.final_state()};
}

}  // namespace

RateFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    RateFit f;
    const std::size_t n = xs.size();
    if (n < 2) return f;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) return f;
    f.rate = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.rate * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double my = sy / n;
    for (std::size_t i = 0; i < n; ++i) {
        const double pred = f.rate * xs[i] + f.intercept;
        ss_res += (ys[i] - pred) * (ys[i] - pred);
        ss_tot += (ys[i] - my) * (ys[i] - my);
    }
    f.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

SpectralField embed(const SpectralField& u, const GridSpec& fine) {
    if (fine.d != u.grid.d || fine.L != u.grid.L || fine.n < u.grid.n)
        throw std::invalid_argument("embed: incompatible grids");
    SpectralField out(fine, u.m);
    const std::size_t nt_c = u.grid.size(), nt_f = fine.size();
    for (std::size_t s = 0; s < nt_c; ++s) {
        auto idx = u.grid.unflatten(s);
        std::size_t flat_f = 0;
        for (int k = 0; k < u.grid.d; ++k) {
            const int q = u.grid.freq_of(idx[k]);
            flat_f = flat_f * fine.n + (q >= 0 ? q : q + fine.n);
        }
        for (int c = 0; c < u.m; ++c) out.data[c * nt_f + flat_f] = u.data[c * nt_c + s];
    }
    return out;
}

StudyResult convergence_study(const ProblemPreset& preset, const std::vector<double>& ladder,
                              const StudyConfig& cfg) {
    StudyResult result;
    const auto rp = regularity_params(preset.model.theta);
    const double t_star = cfg.tau_bar * cfg.t_star_frac / cfg.a;
    result.t_star = t_star;

    std::vector<double> hs = ladder;
    std::sort(hs.begin(), hs.end(), std::greater<double>());

    const bool forced = cfg.with_forcing && preset.constant_coeff;

    // self-convergence reference when no closed form exists
    ReferenceSolution ref;
    if (!preset.exact) {
        const double h_ref = hs.back() / cfg.ref_refine;
        ref = self_reference(preset, h_ref, cfg.L, cfg.tau_bar, cfg.a, cfg.b, cfg.ell, t_star,
                             cfg.neumann_tol, cfg.neumann_max_terms, nullptr);
    }

    std::vector<double> log_h, log_ew, log_ep;
    for (double h : hs) {
        StudyRow row;
        row.h = h;
        RungSetup rs = setup_rung(preset, h, cfg.L, cfg.tau_bar, cfg.a, cfg.b, cfg.ell, t_star,
                                  cfg.neumann_tol, cfg.neumann_max_terms);
        if (rs.grid.size() > cfg.max_points) {
            row.skipped = true;
            result.rows.push_back(row);
            continue;
        }
        row.k = rs.cfg.k;
        row.ell = rs.cfg.ell;
        row.Ng = rs.grid.n;

        SpectralField g = preset.default_g(rs.grid);
        CosForcing forcing;
        ForcingSampler sampler;
        if (forced) {
            forcing.omega = cfg.forcing_omega;
            forcing.zeta = default_gaussian_data(rs.grid, preset.model.m, 2.0);
            sampler = make_cos_forcing_sampler(forcing);
        }

        reset_fft_op_count();
        const double t0 = now_seconds();
        RunOptions opt;
        opt.record_energy = false;
        Trajectory tr = run(preset.model, g, sampler, rs.cfg, rs.n_steps, opt);
        if (tr.failed) throw Error(ErrorKind::constraint, "rung h=" + csv_num(h) + ": " + tr.error);
        row.runtime = cfg.include_timings ? now_seconds() - t0 : 0.0;
        row.fft_count = fft_op_count();

        // error against the reference at t_star
        SpectralField diff(rs.grid, preset.model.m);
        const SpectralField& un = tr.final_state();
        if (preset.exact) {
            SpectralField ue = forced ? exact_constant_coeff_forced(preset.model, g, t_star, forcing)
                                      : preset.exact(g, t_star);
            diff = ue;
            add_scaled(diff, un, cd(-1.0));
            row.error_plain = l2_norm(diff);
            WeightSpec w = rs.cfg.weight(-rs.cfg.nu);
            row.error_weighted = weighted_norm(diff, t_star, w).value();
        } else {
            SpectralField ue = ref.state;
            SpectralField uf = embed(un, ref.grid);
            add_scaled(uf, ue, cd(-1.0));
            row.error_plain = l2_norm(uf);
            WeightSpec w = rs.cfg.weight(-rs.cfg.nu);
            row.error_weighted = weighted_norm(uf, t_star, w).value();
        }

        // smallest C with error <= C (k+h) h^-nu ||<D>^{2+nu} e^{tau<D>^rho} g||
        // (weighted variant drops the h^-nu); forcing budget added when present
        WeightSpec wdata = rs.cfg.weight(2.0 + rs.cfg.nu);
        double denom_log = weighted_norm(g, 0.0, wdata).log_value;
        if (forced) denom_log = log_sum_exp(denom_log, weighted_norm(forcing.zeta, 0.0, wdata).log_value);
        const double denom = std::exp(denom_log);
        const double cw = row.error_weighted / ((row.k + h) * denom);
        const double cp = row.error_plain / ((row.k + h) * std::pow(h, -rp.nu) * denom);
        row.fitted_C = std::max(cw, cp);
        result.C_weighted = std::max(result.C_weighted, cw);
        result.C_plain = std::max(result.C_plain, cp);

        result.rows.push_back(row);
        if (row.error_weighted > 0.0 && row.error_plain > 0.0) {
            log_h.push_back(std::log(h));
            log_ew.push_back(std::log(row.error_weighted));
            log_ep.push_back(std::log(row.error_plain));
        }
    }
    if (log_h.size() >= 3) {
        result.weighted_fit = fit_line(log_h, log_ew);
        result.plain_fit = fit_line(log_h, log_ep);
    }
    return result;
}

AuditResult stability_audit(const ProblemPreset& preset, double h, const AuditConfig& cfg) {
    AuditResult res;
    const double t_star = cfg.tau_bar * cfg.t_star_frac / cfg.a;
    RungSetup rs = setup_rung(preset, h, cfg.L, cfg.tau_bar, cfg.a, cfg.b, cfg.ell, t_star,
                              cfg.neumann_tol, 64);
    res.h = h;
    res.k = rs.cfg.k;
    res.Ng = rs.grid.n;
    res.steps = rs.n_steps;

    SpectralField g = preset.default_g(rs.grid);
    ForcingSampler sampler;
    if (cfg.with_forcing && preset.constant_coeff) {
        CosForcing forcing;
        forcing.omega = cfg.forcing_omega;
        forcing.zeta = default_gaussian_data(rs.grid, preset.model.m, 2.0);
        for (cd& z : forcing.zeta.data) z *= cfg.forcing_amp;
        sampler = make_cos_forcing_sampler(forcing);
    }

    RunOptions opt;
    opt.record_energy = true;
    opt.extra_energies = {rs.cfg.weight(2.0 * rs.cfg.nu)};  // dissipation weight
    Trajectory tr = run(preset.model, g, sampler, rs.cfg, rs.n_steps, opt);
    if (tr.failed) throw Error(ErrorKind::constraint, "audit run failed: " + tr.error);

    const double log_g2 = 2.0 * weighted_norm(g, 0.0, rs.cfg.weight(rs.cfg.nu)).log_value;
    const double log_k = std::log(rs.cfg.k);
    double f_acc = -std::numeric_limits<double>::infinity();     // sum_j ||W f^j||^2
    double diss_acc = -std::numeric_limits<double>::infinity();  // sum_p ||<D>^{2nu} W u^p||^2

    for (std::size_t n = 0; n < tr.diag.size(); ++n) {
        const StepDiag& sd = tr.diag[n];
        if (!sd.extra_log_energies.empty()) diss_acc = log_sum_exp(diss_acc, sd.extra_log_energies[0]);
        AuditRow row;
        row.n = sd.n;
        row.t = sd.t;
        row.log_lhs = sd.log_weighted_energy;
        row.log_rhs = log_sum_exp(log_g2, log_k + f_acc);
        row.c_fit = std::exp(row.log_lhs - row.log_rhs);
        const double lhs_diss =
            log_sum_exp(row.log_lhs, std::log(rs.cfg.a) + log_k + diss_acc);
        row.c_fit_diss = std::exp(lhs_diss - row.log_rhs);
        res.rows.push_back(row);
        res.c_fit = std::max(res.c_fit, row.c_fit);
        res.c_fit_diss = std::max(res.c_fit_diss, row.c_fit_diss);
        // f^n recorded on the diag entry of step n+1 enters the budget from there on
        if (n + 1 < tr.diag.size()) f_acc = log_sum_exp(f_acc, tr.diag[n + 1].log_f_energy);
    }
    return res;
}

CostResult cost_accuracy(const ProblemPreset& preset, const std::vector<double>& eps_ladder,
                         const CostConfig& cfg) {
    CostResult res;
    const auto rp = regularity_params(preset.model.theta);
    std::vector<double> eps = eps_ladder;
    std::sort(eps.begin(), eps.end(), std::greater<double>());

    const double h_min = cfg.calib * std::pow(eps.back(), 1.0 / (1.0 - rp.nu));
    ReferenceSolution ref =
        self_reference(preset, h_min / cfg.ref_refine, cfg.L, cfg.tau_bar, cfg.a, cfg.b, cfg.ell,
                       cfg.t_end, cfg.neumann_tol, cfg.neumann_max_terms, nullptr);

    std::vector<double> log_inv_eps, log_proxy;
    for (double e : eps) {
        CostRow row;
        row.epsilon = e;
        row.h = cfg.calib * std::pow(e, 1.0 / (1.0 - rp.nu));
        RungSetup rs = setup_rung(preset, row.h, cfg.L, cfg.tau_bar, cfg.a, cfg.b, cfg.ell,
                                  cfg.t_end, cfg.neumann_tol, cfg.neumann_max_terms);
        if (rs.grid.size() > cfg.max_points) {
            row.skipped = true;
            res.rows.push_back(row);
            continue;
        }
        row.k = rs.cfg.k;
        row.Ng = rs.grid.n;
        row.steps = rs.n_steps;

        SpectralField g = preset.default_g(rs.grid);
        reset_fft_op_count();
        const double t0 = now_seconds();
        RunOptions opt;
        opt.record_energy = false;
        Trajectory tr = run(preset.model, g, nullptr, rs.cfg, rs.n_steps, opt);
        if (tr.failed) throw Error(ErrorKind::constraint, "cost rung failed: " + tr.error);
        row.runtime = cfg.include_timings ? now_seconds() - t0 : 0.0;
        row.fft_count = fft_op_count();
        const double ntot = static_cast<double>(rs.grid.size());
        row.fft_proxy = static_cast<double>(row.fft_count) * ntot * std::log(ntot);

        SpectralField uf = embed(tr.final_state(), ref.grid);
        add_scaled(uf, ref.state, cd(-1.0));
        row.achieved_error = l2_norm(uf);

        res.rows.push_back(row);
        log_inv_eps.push_back(std::log(1.0 / e));
        log_proxy.push_back(std::log(row.fft_proxy));
    }
    if (log_inv_eps.size() >= 2) {
        RateFit f = fit_line(log_inv_eps, log_proxy);
        res.slope = f.rate;
        res.r2 = f.r2;
    }
    return res;
}

std::string study_csv(const StudyResult& r) {
    std::ostringstream os;
    os << "h,k,ell,Ng,error_weighted,error_plain,fitted_C,runtime,fft_count\n";
    for (const auto& row : r.rows) {
        if (row.skipped) {
            os << csv_num(row.h) << ",,,,,,,,skipped\n";
            continue;
        }
        os << csv_num(row.h) << ',' << csv_num(row.k) << ',' << csv_num(row.ell) << ',' << row.Ng
           << ',' << csv_num(row.error_weighted) << ',' << csv_num(row.error_plain) << ','
           << csv_num(row.fitted_C) << ',' << csv_num(row.runtime) << ',' << row.fft_count << '\n';
    }
    os << "# rate_weighted=" << csv_num(r.weighted_fit.rate) << " r2_weighted="
       << csv_num(r.weighted_fit.r2) << " rate_plain=" << csv_num(r.plain_fit.rate)
       << " r2_plain=" << csv_num(r.plain_fit.r2) << " C_weighted=" << csv_num(r.C_weighted)
       << " C_plain=" << csv_num(r.C_plain)
       << " verdict=" << (r.weighted_fit.r2 >= 0.95 && r.plain_fit.r2 >= 0.95 ? "pass" : "no-fit")
       << '\n';
    return os.str();
}

std::string audit_csv(const AuditResult& r) {
    std::ostringstream os;
    os << "n,t,log_lhs,log_rhs,c_fit,c_fit_diss\n";
    for (const auto& row : r.rows)
        os << row.n << ',' << csv_num(row.t) << ',' << csv_num(row.log_lhs) << ','
           << csv_num(row.log_rhs) << ',' << csv_num(row.c_fit) << ',' << csv_num(row.c_fit_diss)
           << '\n';
    os << "# c_fit=" << csv_num(r.c_fit) << " c_fit_diss=" << csv_num(r.c_fit_diss)
       << " h=" << csv_num(r.h) << " k=" << csv_num(r.k) << " Ng=" << r.Ng << '\n';
    return os.str();
}

std::string cost_csv(const CostResult& r) {
    std::ostringstream os;
    os << "epsilon,h,k,Ng,steps,achieved_error,fft_count,fft_proxy,runtime\n";
    for (const auto& row : r.rows) {
        if (row.skipped) {
            os << csv_num(row.epsilon) << ",,,,,,,,skipped\n";
            continue;
        }
        os << csv_num(row.epsilon) << ',' << csv_num(row.h) << ',' << csv_num(row.k) << ','
           << row.Ng << ',' << row.steps << ',' << csv_num(row.achieved_error) << ','
           << row.fft_count << ',' << csv_num(row.fft_proxy) << ',' << csv_num(row.runtime)
           << '\n';
    }
    os << "# cost_slope=" << csv_num(r.slope) << " r2=" << csv_num(r.r2) << '\n';
    return os.str();
}

std::string diagnostics_csv(const Trajectory& t) {
    std::ostringstream os;
    os << "n,t,l2_norm,weighted_energy,neumann_terms,neumann_residual\n";
    for (const auto& sd : t.diag)
        os << sd.n << ',' << csv_num(sd.t) << ',' << csv_num(sd.l2_norm) << ','
           << csv_num(sd.weighted_energy) << ',' << sd.neumann_terms << ','
           << csv_num(sd.neumann_residual) << '\n';
    return os.str();
}

}  // namespace whs
