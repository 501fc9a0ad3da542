// whs: spectral Crank-Nicholson solver for weakly hyperbolic first-order
// systems. Subcommands: run, converge, stability, symmetrizer-probe,
// theta-fit, hyperbolicity, weights, cost.
#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "whs/fft.hpp"
#include "whs/harness.hpp"
#include "whs/cutoff.hpp"
#include "whs/io.hpp"

using namespace whs;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CommonOpts {
    std::string model = "jordan";
    std::string out;
    double L = M_PI;
    double a = 1.0, b = 1.0, tau = 1.0, ell = 1.0;
    int theta = -1;  // -1: use the preset's declared value
};

ProblemPreset load_model(const CommonOpts& c) {
    // a model naming an existing file is a coefficient table
    if (fs::exists(c.model)) {
        ProblemPreset p;
        p.name = c.model;
        p.description = "coefficient table";
        p.model = read_coefficient_table(c.model, std::max(c.theta, 0));
        if (c.theta < 0) p.model.theta = p.model.m - 1;  // safe upper value
        p.default_g = [m = p.model.m](const GridSpec& g) { return default_gaussian_data(g, m); };
        return p;
    }
    ProblemPreset p = preset_by_name(c.model);
    if (c.theta >= 0) p.model.theta = c.theta;
    return p;
}

void write_text(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream os(path);
    if (!os) throw Error(ErrorKind::bad_input, "cannot open for writing: " + path.string());
    os << text;
}

ForcingSampler parse_forcing(const std::string& spec, const GridSpec& g, int m, CosForcing* out) {
    if (spec.empty() || spec == "none") return nullptr;
    if (spec.rfind("cos", 0) == 0) {
        double omega = 1.7, width = 2.0, amp = 0.5;
        const auto args = spec.find(':');
        if (args != std::string::npos) {
            std::stringstream ss(spec.substr(args + 1));
            std::string kv;
            while (std::getline(ss, kv, ',')) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) throw Error(ErrorKind::bad_input, "bad forcing spec: " + spec);
                const std::string key = kv.substr(0, eq);
                const double val = std::stod(kv.substr(eq + 1));
                if (key == "omega") omega = val;
                else if (key == "width") width = val;
                else if (key == "amp") amp = val;
                else throw Error(ErrorKind::bad_input, "bad forcing key: " + key);
            }
        }
        out->omega = omega;
        out->zeta = default_gaussian_data(g, m, width);
        for (cd& z : out->zeta.data) z *= amp;
        return make_cos_forcing_sampler(*out);
    }
    // otherwise: a field dump used as a time-constant source
    out->omega = 0.0;
    out->zeta = read_spectral_field(spec);
    if (out->zeta.grid != g) throw Error(ErrorKind::bad_input, "forcing dump grid mismatch");
    SpectralField zeta = out->zeta;
    return [zeta](double) { return zeta; };
}

json mat_to_json(const Matc& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(row);
    }
    return rows;
}

int dispatch(CLI::App& app, int argc, char** argv) {
    CommonOpts common;

    // the default help flag claims -h, which collides with the --h option
    auto add_sub = [&app](const std::string& name, const std::string& desc) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->set_help_flag("--help", "print help");
        return sub;
    };

    // ---- run ----
    auto* cmd_run = add_sub("run", "run one Crank-Nicholson trajectory");
    int Ng = 0, steps = 40, dump_every = 0;
    double h = 0.1, k = 0.0;
    std::string fspec = "none";
    cmd_run->add_option("--model", common.model);
    cmd_run->add_option("--Ng", Ng, "grid points per dim (0: minimal resolving grid)");
    cmd_run->add_option("--L", common.L);
    cmd_run->add_option("--h", h);
    cmd_run->add_option("--k", k, "time step (0: beta_bar * h)");
    cmd_run->add_option("--ell", common.ell);
    cmd_run->add_option("--a", common.a);
    cmd_run->add_option("--b", common.b);
    cmd_run->add_option("--tau", common.tau);
    cmd_run->add_option("--theta", common.theta);
    cmd_run->add_option("--steps", steps);
    cmd_run->add_option("--f", fspec, "forcing: none | cos[:omega=..,width=..,amp=..] | dump path");
    cmd_run->add_option("--dump-every", dump_every);
    cmd_run->add_option("--out", common.out)->required();

    // ---- converge ----
    auto* cmd_conv = add_sub("converge", "refinement-ladder convergence study");
    int ladder = 4;
    double h0 = 0.125;
    bool forcing_flag = false, no_timings = false;
    cmd_conv->add_option("--model", common.model);
    cmd_conv->add_option("--ladder", ladder, "number of rungs (h0, h0/2, ...)");
    cmd_conv->add_option("--h0", h0, "coarsest h");
    cmd_conv->add_option("--L", common.L);
    cmd_conv->add_option("--a", common.a);
    cmd_conv->add_option("--b", common.b);
    cmd_conv->add_option("--tau", common.tau);
    cmd_conv->add_option("--ell", common.ell);
    cmd_conv->add_option("--theta", common.theta);
    cmd_conv->add_flag("--forcing", forcing_flag, "drive constant-coefficient models with a cos source");
    cmd_conv->add_flag("--no-timings", no_timings, "zero the runtime column (byte-reproducible CSV)");
    cmd_conv->add_option("--out", common.out);

    // ---- stability ----
    auto* cmd_stab = add_sub("stability", "weighted-energy stability audit");
    double stab_h = 0.125;
    cmd_stab->add_option("--model", common.model);
    cmd_stab->add_option("--h", stab_h);
    cmd_stab->add_option("--L", common.L);
    cmd_stab->add_option("--a", common.a);
    cmd_stab->add_option("--b", common.b);
    cmd_stab->add_option("--tau", common.tau);
    cmd_stab->add_option("--ell", common.ell);
    cmd_stab->add_option("--theta", common.theta);
    cmd_stab->add_flag("--forcing", forcing_flag);
    cmd_stab->add_option("--out", common.out);

    // ---- symmetrizer-probe ----
    auto* cmd_probe = add_sub("symmetrizer-probe", "pointwise symmetrizer diagnostics");
    double pt = 0.0, px = 0.0, pxi = 5.0, ptau = 0.0, ph = 0.05;
    cmd_probe->add_option("--model", common.model);
    cmd_probe->add_option("--t", pt);
    cmd_probe->add_option("--x", px);
    cmd_probe->add_option("--xi", pxi);
    cmd_probe->add_option("--tau", ptau);
    cmd_probe->add_option("--b", common.b);
    cmd_probe->add_option("--ell", common.ell);
    cmd_probe->add_option("--theta", common.theta);
    cmd_probe->add_option("--h", ph);
    cmd_probe->add_option("--tau-bar", common.tau);

    // ---- theta-fit ----
    auto* cmd_theta = add_sub("theta-fit", "empirical regularity exponent");
    int samples = 24;
    cmd_theta->add_option("--model", common.model);
    cmd_theta->add_option("--samples", samples);
    cmd_theta->add_option("--theta", common.theta, "declared theta for table models");

    // ---- hyperbolicity ----
    auto* cmd_hyp = add_sub("hyperbolicity", "real-spectrum check over random samples");
    double tol = 1e-9;
    cmd_hyp->add_option("--model", common.model);
    cmd_hyp->add_option("--samples", samples);
    cmd_hyp->add_option("--tol", tol);
    cmd_hyp->add_option("--theta", common.theta, "declared theta for table models");

    // ---- weights ----
    auto* cmd_w = add_sub("weights", "exponent profile of the Gevrey weight");
    double wt = 0.0, sigma = 0.0;
    bool truncated = false;
    int wNg = 128;
    cmd_w->add_option("--Ng", wNg);
    cmd_w->add_option("--L", common.L);
    cmd_w->add_option("--h", ph);
    cmd_w->add_option("--ell", common.ell);
    cmd_w->add_option("--a", common.a);
    cmd_w->add_option("--tau", common.tau);
    cmd_w->add_option("--theta", common.theta);
    cmd_w->add_option("--t", wt);
    cmd_w->add_option("--sigma", sigma);
    cmd_w->add_flag("--truncated", truncated, "apply the chi_h spectral truncation");
    cmd_w->add_option("--out", common.out);

    // ---- cost ----
    auto* cmd_cost = add_sub("cost", "accuracy-versus-cost scaling");
    std::vector<double> eps_ladder{1e-2, 3e-3, 1e-3};
    double cost_L = 2.0;
    cmd_cost->add_option("--model", common.model);
    cmd_cost->add_option("--eps", eps_ladder, "target accuracies");
    cmd_cost->add_option("--L", cost_L);
    cmd_cost->add_option("--theta", common.theta);
    cmd_cost->add_flag("--no-timings", no_timings);
    cmd_cost->add_option("--out", common.out);

    app.require_subcommand(1);
    CLI11_PARSE(app, argc, argv);

    if (*cmd_run) {
        ProblemPreset p = load_model(common);
        const auto rp = regularity_params(p.model.theta);
        GridSpec probe = make_grid(p.model.d, 8, common.L);
        const int n_needed = validate_resolution(probe, h).required_n;
        if (Ng == 0) Ng = n_needed;
        GridSpec g = make_grid(p.model.d, Ng, common.L);
        if (g.size() * p.model.m > (16u << 20))
            throw Error(ErrorKind::resource, "grid exceeds the resource cap (16M samples)");

        SchemeConfig cfg;
        cfg.h = h;
        cfg.ell = std::max(common.ell, default_ell(common.a, common.b, rp.rho));
        cfg.a = common.a;
        cfg.b = common.b;
        cfg.tau_bar = common.tau;
        cfg.rho = rp.rho;
        cfg.nu = rp.nu;
        cfg.cbar = estimate_cbar(p.model, g, steps * (k > 0 ? k : h), h).value;
        cfg.k = k > 0 ? k : std::min(0.5 / cfg.cbar, 0.23104906018664842 / cfg.a) * h;
        auto ledger = validate_constraints(cfg, steps);
        ledger.throw_if_violated();
        // which constraint binds (largest value/bound ratio)
        std::string binding = "none";
        double ratio = -1.0;
        for (const auto& c : ledger.checks)
            if (c.bound > 0.0 && c.value / c.bound > ratio) {
                ratio = c.value / c.bound;
                binding = c.name;
            }

        SpectralField g0 = p.default_g(g);
        CosForcing fstore;
        ForcingSampler f = parse_forcing(fspec, g, p.model.m, &fstore);
        RunOptions opt;
        opt.keep_every = dump_every;
        Trajectory tr = run(p.model, g0, f, cfg, steps, opt);

        fs::create_directories(common.out);
        write_text(fs::path(common.out) / "diagnostics.csv", diagnostics_csv(tr));
        for (const auto& [n, state] : tr.states) {
            char name[32];
            std::snprintf(name, sizeof(name), "u_%06d.spec", n);
            write_field((fs::path(common.out) / name).string(), state);
        }
        std::cout << "steps=" << tr.diag.back().n << " t_final=" << csv_num(tr.diag.back().t)
                  << " l2=" << csv_num(tr.diag.back().l2_norm)
                  << " f_spectral_condition=" << (tr.f_spectral_condition ? "yes" : "no")
                  << " binding_constraint=\"" << binding << "\" (ratio " << csv_num(ratio) << ")\n";
        if (tr.failed) {
            std::cerr << "trajectory truncated: " << tr.error << "\n";
            return 1;
        }
        return 0;
    }

    if (*cmd_conv) {
        ProblemPreset p = load_model(common);
        StudyConfig cfg;
        cfg.L = common.L;
        cfg.tau_bar = common.tau;
        cfg.a = common.a;
        cfg.b = common.b;
        cfg.ell = common.ell;
        cfg.with_forcing = forcing_flag;
        cfg.include_timings = !no_timings;
        std::vector<double> hs;
        for (int i = 0; i < ladder; ++i) hs.push_back(h0 / (1 << i));
        StudyResult res = convergence_study(p, hs, cfg);
        const std::string csv = study_csv(res);
        if (common.out.empty())
            std::cout << csv;
        else
            write_text(fs::path(common.out) / "convergence.csv", csv);
        return 0;
    }

    if (*cmd_stab) {
        ProblemPreset p = load_model(common);
        AuditConfig cfg;
        cfg.L = common.L;
        cfg.tau_bar = common.tau;
        cfg.a = common.a;
        cfg.b = common.b;
        cfg.ell = common.ell;
        cfg.with_forcing = forcing_flag;
        AuditResult res = stability_audit(p, stab_h, cfg);
        const std::string csv = audit_csv(res);
        if (common.out.empty())
            std::cout << csv;
        else
            write_text(fs::path(common.out) / "stability.csv", csv);
        return 0;
    }

    if (*cmd_probe) {
        ProblemPreset p = load_model(common);
        SymbolConfig cfg = make_symbol_config(p.model, common.b, common.ell, common.tau, ph);
        SymmetrizerProbe pr = probe_point(p.model, pt, Vec3{px, 0, 0}, Vec3{pxi, 0, 0}, ptau, cfg);
        json j;
        j["model"] = p.name;
        j["t"] = pr.t;
        j["x"] = pr.x[0];
        j["xi"] = pr.xi[0];
        j["tau"] = pr.tau;
        j["order_N"] = pr.order_N;
        j["b"] = cfg.b;
        j["ell"] = cfg.ell;
        j["rho"] = cfg.rho;
        j["nu"] = cfg.nu;
        j["bracket"] = pr.bracket_val;
        j["H_h"] = mat_to_json(pr.Hh);
        j["M_h"] = mat_to_json(pr.M);
        j["R_h"] = mat_to_json(pr.R);
        j["lyapunov_residual"] = pr.lyapunov_residual;
        j["rih_residual"] = pr.rih_residual;
        j["hermiticity_defect"] = pr.hermiticity_defect;
        j["min_eig_R"] = pr.min_eig_R;
        j["c_est"] = pr.c_est;
        j["spectral_abscissa"] = pr.spectral_abscissa;
        std::cout << j.dump(2) << "\n";
        return 0;
    }

    if (*cmd_theta) {
        ProblemPreset p = load_model(common);
        ThetaFit fit = fit_theta(p.model, samples);
        std::cout << "eps,max_norm\n";
        for (const auto& [e, n] : fit.table) std::cout << csv_num(e) << ',' << csv_num(n) << '\n';
        std::cout << "# theta_hat=" << csv_num(fit.theta_hat) << " r2=" << csv_num(fit.r2)
                  << " residual_rms=" << csv_num(fit.residual_rms)
                  << (fit.degenerate ? " degenerate" : "") << "\n";
        return 0;
    }

    if (*cmd_hyp) {
        ProblemPreset p = load_model(common);
        auto rep = check_hyperbolicity(p.model, samples, tol);
        std::cout << "max_im=" << csv_num(rep.max_im) << " samples=" << rep.samples
                  << " worst_t=" << csv_num(rep.worst_t) << " worst_xi=" << csv_num(rep.worst_xi[0])
                  << " pass=" << (rep.pass ? "yes" : "no") << "\n";
        return rep.pass ? 0 : 1;
    }

    if (*cmd_w) {
        double rho = 0.5;
        if (common.theta >= 0) rho = regularity_params(common.theta).rho;
        GridSpec g = make_grid(1, wNg, common.L);
        WeightSpec w;
        w.sigma = sigma;
        w.tau_bar = common.tau;
        w.rate = common.a;
        w.rho = rho;
        w.ell = common.ell;
        if (truncated) w.cutoff_h = ph;
        std::ostringstream os;
        os << "xi,exponent,multiplier_or_log\n";
        for (int s = 0; s < g.n; ++s) {
            const double e = weight_exponent(w, wt, g.xi_norm(s));
            os << csv_num(g.xi_of(s)) << ',' << csv_num(e) << ','
               << csv_num(e < 709.0 ? std::exp(e) : e) << '\n';
        }
        if (common.out.empty())
            std::cout << os.str();
        else
            write_text(fs::path(common.out) / "weights.csv", os.str());
        return 0;
    }

    if (*cmd_cost) {
        ProblemPreset p = load_model(common);
        CostConfig cfg;
        cfg.L = cost_L;
        cfg.include_timings = !no_timings;
        CostResult res = cost_accuracy(p, eps_ladder, cfg);
        const std::string csv = cost_csv(res);
        if (common.out.empty())
            std::cout << csv;
        else
            write_text(fs::path(common.out) / "cost.csv", csv);
        return 0;
    }
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral Crank-Nicholson solver for weakly hyperbolic systems"};
    app.set_help_flag("--help", "print help");
    app.set_config("--config", "", "key=value config file, overridden by explicit flags");
    try {
        return dispatch(app, argc, argv);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
