#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "oracles.hpp"
#include "whs/harness.hpp"
#include "whs/operator_g.hpp"
#include "whs/problems.hpp"

using namespace whs;

TEST_CASE("every preset passes the hyperbolicity check") {
    for (const auto& name : preset_names()) {
        auto p = preset_by_name(name);
        auto rep = check_hyperbolicity(p.model, 150, 1e-9);
        INFO(name);
        CHECK(rep.pass);
    }
    CHECK_THROWS_AS(preset_by_name("nope"), Error);
}

TEST_CASE("jordan: polynomial growth of the propagator") {
    auto p = preset_jordan();
    // ||e^{itA(xi)}|| >= t|xi| for t xi large; eigenvalues all zero
    const double t = 4.0, xi = 30.0;
    Matc E = (t * cd(0, 1) * symbol_A(p.model, 0, Vec3{0, 0, 0}, Vec3{xi, 0, 0})).exp();
    CHECK(E.operatorNorm() >= t * xi);
    // and exactly I + it xi A1 (nilpotent closed form)
    Matc expect = Matc::Identity(2, 2);
    expect(0, 1) = cd(0.0, t * xi);
    CHECK((E - expect).norm() < 1e-12 * expect.norm());
}

TEST_CASE("jordan exact solution matches the nilpotent closed form") {
    GridSpec g = make_grid(1, 32, M_PI);
    auto p = preset_jordan();
    SpectralField g0 = p.default_g(g);
    const double t = 0.7;
    SpectralField ue = p.exact(g0, t);
    for (int s = 0; s < g.n; ++s) {
        const double xi = g.xi_of(s);
        const cd e0 = g0.at(0, s) + cd(0, t * xi) * g0.at(1, s);
        const cd e1 = g0.at(1, s);
        CHECK(std::abs(ue.at(0, s) - e0) < 1e-12 * std::max(1.0, std::abs(e0)));
        CHECK(std::abs(ue.at(1, s) - e1) < 1e-14);
    }
}

TEST_CASE("degenerate wave eigenstructure") {
    auto pw = preset_by_name("degwave:a=1");
    Eigen::ComplexEigenSolver<Matc> es(symbol_A(pw.model, 0.5, Vec3{0, 0, 0}, Vec3{1, 0, 0}), false);
    std::vector<double> evs{es.eigenvalues()(0).real(), es.eigenvalues()(1).real()};
    std::sort(evs.begin(), evs.end());
    CHECK(evs[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(evs[1] == doctest::Approx(1.0).epsilon(1e-12));

    auto pt = preset_by_name("degwave:a=t2");
    for (double t : {0.0, 0.5, 2.0}) {
        Eigen::ComplexEigenSolver<Matc> e2(symbol_A(pt.model, t, Vec3{0, 0, 0}, Vec3{1, 0, 0}), false);
        for (int i = 0; i < 2; ++i) {
            CHECK(std::abs(e2.eigenvalues()(i).imag()) < 1e-12);
            CHECK(std::abs(std::abs(e2.eigenvalues()(i).real()) - t) < 1e-9);
        }
    }

    // negative profile is rejected at evaluation time
    auto bad = preset_degenerate_wave([](double t) { return -t; }, "bad", 1);
    CHECK_THROWS_AS(bad.model.A_eval(0, 1.0, Vec3{0, 0, 0}), Error);
}

TEST_CASE("degwave a=t2 runs through the degeneracy with bounded energy") {
    auto p = preset_by_name("degwave:a=t2");
    AuditConfig cfg;
    auto audit = stability_audit(p, 0.25, cfg);
    CHECK(audit.rows.size() > 4);
    CHECK(std::isfinite(audit.c_fit));
    CHECK(audit.c_fit < 100.0);
}

TEST_CASE("varsmooth structure") {
    auto p = preset_variable_smooth();
    // far field: exactly diag(1,-1)
    Matc far = p.model.A_eval(0, 0.0, Vec3{2.5, 0, 0});
    CHECK((far - (Matc(2, 2) << 1, 0, 0, -1).finished()).norm() == 0.0);
    // hyperbolic with |Im| below 1e-10 (eigenvalues exactly +-1)
    auto rep = check_hyperbolicity(p.model, 200, 1e-10);
    CHECK(rep.pass);
    // bump derivative consistency: analytic jet against finite differences
    for (int der = 1; der <= 4; ++der) {
        const double x = 0.37, e = 1e-2;
        std::function<double(double, int)> fd = [&](double xx, int k) -> double {
            if (k == 0) return bump_psi(xx);
            return (fd(xx + e, k - 1) - fd(xx - e, k - 1)) / (2.0 * e);
        };
        CHECK(bump_psi(x, der) == doctest::Approx(fd(x, der)).epsilon(2e-2));
    }
    CHECK(bump_psi(1.5) == 0.0);
    CHECK(bump_psi(1.5, 3) == 0.0);
}

TEST_CASE("varsmooth self-convergence at a fitted rate") {
    auto p = preset_variable_smooth();
    StudyConfig cfg;
    cfg.ref_refine = 4;
    cfg.t_star_frac = 0.25;
    StudyResult res = convergence_study(p, {1.0 / 8, 1.0 / 16, 1.0 / 32}, cfg);
    CHECK(res.rows.size() == 3);
    CHECK(res.plain_fit.rate >= 1.0);  // self-convergence rate at least first order
}

TEST_CASE("exact constant-coefficient propagator") {
    GridSpec g = make_grid(1, 16, M_PI);
    auto p = preset_by_name("degwave:a=1");
    SpectralField g0 = p.default_g(g);

    SpectralField at0 = exact_constant_coeff(p.model, g0, 0.0);
    for (std::size_t i = 0; i < g0.data.size(); ++i) CHECK(std::abs(at0.data[i] - g0.data[i]) < 1e-14);

    // A = 0, B = I: e^t g
    SystemModel be;
    be.m = 1;
    be.d = 1;
    be.A_eval = [](int, double, const Vec3&) { return Matc::Zero(1, 1); };
    be.B_eval = [](double, const Vec3&) { return Matc::Identity(1, 1); };
    SpectralField s0 = ora::random_field(g, 1, 50);
    SpectralField s1 = exact_constant_coeff(be, s0, 1.3);
    for (std::size_t i = 0; i < s0.data.size(); ++i)
        CHECK(std::abs(s1.data[i] - std::exp(1.3) * s0.data[i]) < 1e-12 * std::abs(s0.data[i]) + 1e-15);
}

TEST_CASE("forced constant-coefficient solution satisfies the ODE residual") {
    GridSpec g = make_grid(1, 16, M_PI);
    auto p = preset_jordan();
    SpectralField g0 = p.default_g(g);
    CosForcing f{1.7, default_gaussian_data(g, 2, 2.0)};

    // central-difference time derivative against G u + f
    const double t = 0.35, dt = 1e-5;
    SpectralField up = exact_constant_coeff_forced(p.model, g0, t + dt, f);
    SpectralField um = exact_constant_coeff_forced(p.model, g0, t - dt, f);
    SpectralField uc = exact_constant_coeff_forced(p.model, g0, t, f);
    SpectralField rhs = apply_G(p.model, t, uc);
    SpectralField fs = make_cos_forcing_sampler(f)(t);
    add_scaled(rhs, fs, cd(1.0));
    double err = 0.0;
    for (std::size_t i = 0; i < rhs.data.size(); ++i) {
        const cd dudt = (up.data[i] - um.data[i]) / (2.0 * dt);
        err = std::max(err, std::abs(dudt - rhs.data[i]));
    }
    CHECK(err < 1e-7);

    // reduces to the unforced propagator when zeta = 0
    CosForcing nof{1.7, SpectralField(g, 2)};
    SpectralField u_free = exact_constant_coeff_forced(p.model, g0, 0.9, nof);
    SpectralField u_ref = p.exact(g0, 0.9);
    for (std::size_t i = 0; i < u_free.data.size(); ++i)
        CHECK(std::abs(u_free.data[i] - u_ref.data[i]) < 1e-12);
}

TEST_CASE("subexponential growth of e^{iA+B} for jordan plus B") {
    SystemModel mdl = preset_jordan().model;
    mdl.B_eval = [](double, const Vec3&) {
        Matc b(2, 2);
        b << cd(0.2), cd(0.1), cd(0.3), cd(-0.1);
        return b;
    };
    // log ||e^{iA(xi)+B}|| / |xi| -> 0 along a dyadic sweep
    double prev_ratio = std::numeric_limits<double>::infinity();
    for (double xi = 4.0; xi <= 4096.0; xi *= 4.0) {
        Matc M = cd(0, 1) * symbol_A(mdl, 0, Vec3{0, 0, 0}, Vec3{xi, 0, 0}) + mdl.B_eval(0, Vec3{0, 0, 0});
        const double ratio = std::log(M.exp().operatorNorm()) / xi;
        CHECK(ratio < prev_ratio + 1e-12);
        prev_ratio = ratio;
    }
    CHECK(prev_ratio < 0.1);  // slower than e^{delta |xi|} for small delta
}

TEST_CASE("scheme error against exact solutions shrinks under refinement") {
    for (const char* name : {"jordan", "degwave:a=1", "sym2d"}) {
        auto p = preset_by_name(name);
        double prev = std::numeric_limits<double>::infinity();
        const double T = 0.25;
        for (double h : {0.5, 0.25}) {
            GridSpec g = make_grid(p.model.d, p.model.d == 2 ? 32 : 64, M_PI);
            SchemeConfig cfg;
            cfg.h = h;
            cfg.k = 0.05 * h;
            const int n = static_cast<int>(std::lround(T / cfg.k));
            SpectralField g0 = p.default_g(g);
            Trajectory tr = run(p.model, g0, nullptr, cfg, n);
            REQUIRE_FALSE(tr.failed);
            SpectralField d = tr.final_state();
            add_scaled(d, p.exact(g0, n * cfg.k), cd(-1.0));
            const double err = l2_norm(d);
            CHECK(err <= prev * 1.1);
            prev = err;
        }
    }
}

TEST_CASE("declared theta consistent with the empirical fit") {
    for (const char* name : {"jordan", "degwave:a=1", "degwave:a=t2", "varsmooth"}) {
        auto p = preset_by_name(name);
        auto fit = fit_theta(p.model, 16);
        INFO(name, " theta_hat=", fit.theta_hat);
        CHECK(std::abs(fit.theta_hat - p.model.theta) <= 0.25);
    }
}
