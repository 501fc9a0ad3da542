#include "whs/scheme.hpp"

#include <cmath>
#include <sstream>

#include "whs/cutoff.hpp"
#include "whs/fft.hpp"

namespace whs {

namespace {

constexpr double kLog2Third = 0.23104906018664842;  // log(2)/3

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

void scale_by(SpectralField& u, const std::vector<double>& mult) {
    const std::size_t nt = u.grid.size();
    for (int c = 0; c < u.m; ++c)
        for (std::size_t s = 0; s < nt; ++s) u.data[c * nt + s] *= mult[s];
}

}  // namespace

std::string ConstraintReport::first_violation() const {
    for (const auto& c : checks)
        if (!c.ok) return c.name + " violated (" + c.detail + ")";
    return {};
}

void ConstraintReport::throw_if_violated() const {
    if (!pass) throw Error(ErrorKind::constraint, first_violation());
}

ConstraintReport validate_constraints(const SchemeConfig& cfg, double n_steps) {
    ConstraintReport rep;
    auto push = [&](std::string name, double value, double bound, std::string detail) {
        ConstraintCheck c;
        c.name = std::move(name);
        c.value = value;
        c.bound = bound;
        c.ok = value <= bound + 1e-15;
        c.detail = std::move(detail);
        rep.pass = rep.pass && c.ok;
        rep.checks.push_back(std::move(c));
    };

    push("h <= ell^-1", cfg.h, 1.0 / cfg.ell, "h_max = " + fmt(1.0 / cfg.ell));
    push("k h^-1 <= 1/(2 Cbar)", cfg.k / cfg.h, 0.5 / cfg.cbar,
         "k_max = " + fmt(0.5 * cfg.h / cfg.cbar));
    push("a k h^-rho <= log(2)/3", cfg.a * cfg.k * std::pow(cfg.h, -cfg.rho), kLog2Third,
         "k_max = " + fmt(kLog2Third / (cfg.a * std::pow(cfg.h, -cfg.rho))));
    push("a ell^-(rho/6) <= 1", cfg.a * std::pow(cfg.ell, -cfg.rho / 6.0), 1.0,
         "ell_min = " + fmt(std::pow(std::max(cfg.a, 1.0), 6.0 / cfg.rho)));
    push("b ell^-(1-rho) <= 1", cfg.b * std::pow(cfg.ell, -(1.0 - cfg.rho)), 1.0,
         "ell_min = " + fmt(std::pow(std::max(cfg.b, 1.0), 1.0 / (1.0 - cfg.rho))));
    push("n k a <= tau_bar", n_steps * cfg.k * cfg.a, cfg.tau_bar,
         "n_max = " + fmt(cfg.k > 0.0 ? cfg.tau_bar / (cfg.k * cfg.a) : 0.0));
    return rep;
}

SpectralField initial_truncation(const SpectralField& g, double h) {
    auto rep = validate_resolution(g.grid, h);
    if (!rep.pass)
        throw Error(ErrorKind::bad_input,
                    "initial_truncation: grid under-resolved, need points_per_dim >= " +
                        std::to_string(rep.required_n));
    SpectralField u = g;
    scale_by(u, cutoff_multiplier(g.grid, h, 2));
    return u;
}

namespace {

// shared machinery: one apply of K = (k/2) G_h^n
struct Stepper {
    const CoeffFrame frame;
    const std::vector<double>& chi2h;
    double half_k;

    SpectralField apply_K(const SpectralField& v) const {
        SpectralField w = apply_G_h(frame, v, chi2h);
        for (cd& z : w.data) z *= half_k;
        return w;
    }
};

SpectralField neumann_solve(const Stepper& st, const SpectralField& rhs, const SchemeConfig& cfg,
                            NeumannDiag* diag) {
    const double rhs_norm = l2_norm(rhs);
    SpectralField x = rhs;
    int terms = 1;  // j = 0 term
    if (cfg.k != 0.0 && rhs_norm > 0.0) {
        SpectralField term = rhs;
        while (true) {
            term = st.apply_K(term);
            add_scaled(x, term, cd(1.0));
            ++terms;
            if (l2_norm(term) <= cfg.neumann_tol * rhs_norm) break;
            if (terms > cfg.neumann_max_terms)
                throw Error(ErrorKind::constraint,
                            "cn_solve: Neumann series exceeded " +
                                std::to_string(cfg.neumann_max_terms) +
                                " terms; constraint k h^-1 <= 1/(2 Cbar) violated or Cbar underestimated");
        }
    }
    if (diag) {
        // true residual: rhs - (I - K) x
        SpectralField r = st.apply_K(x);
        add_scaled(r, x, cd(-1.0));
        add_scaled(r, rhs, cd(1.0));
        diag->terms = terms;
        diag->residual = l2_norm(r);
        diag->rhs_norm = rhs_norm;
    }
    return x;
}

}  // namespace

SpectralField cn_solve(const SystemModel& mdl, double t_n, const SpectralField& rhs,
                       const SchemeConfig& cfg, NeumannDiag* diag) {
    auto res = validate_resolution(rhs.grid, cfg.h);
    if (!res.pass) throw Error(ErrorKind::bad_input, "cn_solve: grid under-resolved for h");
    const auto chi2h = cutoff_multiplier(rhs.grid, cfg.h, 2);
    Stepper st{sample_coefficients(mdl, t_n, rhs.grid), chi2h, 0.5 * cfg.k};
    return neumann_solve(st, rhs, cfg, diag);
}

SpectralField cn_step(const SystemModel& mdl, double t_n, const SpectralField& u,
                      const SpectralField* f, const SchemeConfig& cfg, NeumannDiag* diag) {
    auto res = validate_resolution(u.grid, cfg.h);
    if (!res.pass) throw Error(ErrorKind::bad_input, "cn_step: grid under-resolved for h");
    const auto chi2h = cutoff_multiplier(u.grid, cfg.h, 2);
    Stepper st{sample_coefficients(mdl, t_n, u.grid), chi2h, 0.5 * cfg.k};

    SpectralField rhs = u;
    add_scaled(rhs, st.apply_K(u), cd(1.0));
    if (f) {
        SpectralField fc = *f;
        scale_by(fc, chi2h);
        add_scaled(rhs, fc, cd(cfg.k));
    }
    return neumann_solve(st, rhs, cfg, diag);
}

Trajectory run(const SystemModel& mdl, const SpectralField& g, const ForcingSampler& f,
               const SchemeConfig& cfg, int n_steps, const RunOptions& opt) {
    validate_constraints(cfg, n_steps).throw_if_violated();
    auto res = validate_resolution(g.grid, cfg.h);
    if (!res.pass)
        throw Error(ErrorKind::bad_input, "run: grid under-resolved, need points_per_dim >= " +
                                              std::to_string(res.required_n));

    const auto chi2h = cutoff_multiplier(g.grid, cfg.h, 2);
    const auto chih = cutoff_multiplier(g.grid, cfg.h, 1);
    const std::size_t nt = g.grid.size();

    Trajectory traj;
    SpectralField u = g;
    scale_by(u, chi2h);

    const WeightSpec wmain = cfg.weight(-cfg.nu);

    auto record = [&](int n, double t, const NeumannDiag& nd, const SpectralField& state,
                      double log_f_energy) {
        StepDiag sd;
        sd.n = n;
        sd.t = t;
        sd.l2_norm = l2_norm(state);
        if (opt.record_energy) {
            LogScalar ls = weighted_norm(state, t, wmain);
            sd.log_weighted_energy = 2.0 * ls.log_value;
            sd.weighted_energy = std::exp(sd.log_weighted_energy);
            for (const WeightSpec& w : opt.extra_energies)
                sd.extra_log_energies.push_back(2.0 * weighted_norm(state, t, w).log_value);
        }
        sd.neumann_terms = nd.terms;
        sd.neumann_residual = nd.residual;
        sd.log_f_energy = log_f_energy;
        traj.diag.push_back(sd);
        traj.times.push_back(t);
    };

    auto keep = [&](int n, const SpectralField& state) {
        if (n == 0 || n == n_steps || (opt.keep_every > 0 && n % opt.keep_every == 0))
            traj.states.emplace(n, state);
    };

    record(0, 0.0, NeumannDiag{}, u, -std::numeric_limits<double>::infinity());
    keep(0, u);

    for (int n = 0; n < n_steps; ++n) {
        const double t_n = n * cfg.k;
        SpectralField fn;
        const SpectralField* fptr = nullptr;
        double log_f_energy = -std::numeric_limits<double>::infinity();
        if (f) {
            fn = f(t_n);
            if (fn.grid != g.grid || fn.m != g.m)
                throw Error(ErrorKind::bad_input, "run: forcing sample shape mismatch");
            fptr = &fn;
            // does chi_h f^n = f^n hold? (recorded, not required)
            double outside = 0.0, total = 0.0;
            for (int c = 0; c < fn.m; ++c)
                for (std::size_t s = 0; s < nt; ++s) {
                    const double mass = std::norm(fn.data[c * nt + s]);
                    total += mass;
                    if (chih[s] < 1.0) outside += (1.0 - chih[s]) * mass;
                }
            if (total > 0.0 && outside > 1e-24 * total) traj.f_spectral_condition = false;
            log_f_energy = 2.0 * weighted_norm(fn, t_n, wmain).log_value;
        }
        NeumannDiag nd;
        try {
            Stepper st{sample_coefficients(mdl, t_n, g.grid), chi2h, 0.5 * cfg.k};
            SpectralField rhs = u;
            add_scaled(rhs, st.apply_K(u), cd(1.0));
            if (fptr) {
                SpectralField fc = *fptr;
                scale_by(fc, chi2h);
                add_scaled(rhs, fc, cd(cfg.k));
            }
            u = neumann_solve(st, rhs, cfg, &nd);
        } catch (const Error& e) {
            traj.failed = true;
            traj.error = "step " + std::to_string(n) + ": " + e.what();
            break;
        }
        record(n + 1, (n + 1) * cfg.k, nd, u, log_f_energy);
        keep(n + 1, u);
    }
    if (!traj.failed && traj.states.find(n_steps) == traj.states.end())
        traj.states.emplace(n_steps, u);
    return traj;
}

}  // namespace whs
