// Independent dense reference implementations used by the tests. Everything
// here is built from explicit DFT matrices and dense linear algebra so it
// shares no code path with the spectral implementation it checks.
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <random>

#include "whs/cutoff.hpp"
#include "whs/model.hpp"

namespace ora {

using whs::cd;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// forward DFT matrix: coeff_q = (1/N) sum_j u(x_j) e^{-i xi_q x_j}, storage in
// FFT wrap-around order to match the library layout
inline Mat dft_matrix(const whs::GridSpec& g) {
    const int n = g.n;
    Mat F(n, n);
    for (int q = 0; q < n; ++q)
        for (int j = 0; j < n; ++j)
            F(q, j) = std::polar(1.0 / n, -g.xi_of(q) * g.node(j));
    return F;
}

inline Mat idft_matrix(const whs::GridSpec& g) {
    const int n = g.n;
    Mat F(n, n);
    for (int j = 0; j < n; ++j)
        for (int q = 0; q < n; ++q)
            F(j, q) = std::polar(1.0, g.xi_of(q) * g.node(j));
    return F;
}

// dense spectral->spectral operator matrix of G(t) on a 1-D grid,
// component-major layout (index c*n + slot)
inline Mat dense_G(const whs::SystemModel& mdl, double t, const whs::GridSpec& g) {
    const int n = g.n, m = mdl.m;
    const Mat F = dft_matrix(g), Fi = idft_matrix(g);
    Mat D = Mat::Zero(n, n);
    for (int q = 0; q < n; ++q) D(q, q) = cd(0.0, g.xi_of(q));
    const Mat DX = Fi * D * F;  // physical derivative matrix

    Mat G = Mat::Zero(n * m, n * m);
    for (int i = 0; i < n; ++i) {
        const whs::Vec3 x{g.node(i), 0.0, 0.0};
        const whs::Matc A = mdl.A_eval(0, t, x);
        const whs::Matc B = mdl.B_eval(t, x);
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < m; ++c) {
                for (int j = 0; j < n; ++j) G(r * n + i, c * n + j) += A(r, c) * DX(i, j);
                G(r * n + i, c * n + i) += B(r, c);
            }
    }
    // conjugate back to spectral coordinates
    Mat Fm = Mat::Zero(n * m, n * m), Fim = Mat::Zero(n * m, n * m);
    for (int c = 0; c < m; ++c) {
        Fm.block(c * n, c * n, n, n) = F;
        Fim.block(c * n, c * n, n, n) = Fi;
    }
    return Fm * G * Fim;
}

// dense chi_{s h}(D) in spectral coordinates: diagonal
inline Mat dense_cutoff(const whs::GridSpec& g, double h, int scale, int m) {
    const int n = g.n;
    Mat C = Mat::Zero(n * m, n * m);
    for (int c = 0; c < m; ++c)
        for (int q = 0; q < n; ++q)
            C(c * n + q, c * n + q) = whs::chi(scale * h * std::abs(g.xi_of(q)));
    return C;
}

inline Mat dense_G_h(const whs::SystemModel& mdl, double t, const whs::GridSpec& g, double h) {
    const Mat C = dense_cutoff(g, h, 2, mdl.m);
    return C * dense_G(mdl, t, g) * C;
}

inline Vec to_vec(const whs::SpectralField& u) {
    Vec v(u.data.size());
    for (std::size_t i = 0; i < u.data.size(); ++i) v(i) = u.data[i];
    return v;
}

inline whs::SpectralField from_vec(const whs::GridSpec& g, int m, const Vec& v) {
    whs::SpectralField u(g, m);
    for (std::size_t i = 0; i < u.data.size(); ++i) u.data[i] = v(i);
    return u;
}

// dense Crank-Nicholson trajectory with a direct LU solve per step
inline whs::SpectralField dense_cn_trajectory(const whs::SystemModel& mdl, const whs::GridSpec& g,
                                              const whs::SpectralField& g0, double h, double k,
                                              int n_steps,
                                              const std::function<whs::SpectralField(double)>& f) {
    const int nm = g.n * mdl.m;
    const Mat C = dense_cutoff(g, h, 2, mdl.m);
    Vec u = C * to_vec(g0);
    const Mat I = Mat::Identity(nm, nm);
    for (int n = 0; n < n_steps; ++n) {
        const double t = n * k;
        const Mat Gh = dense_G_h(mdl, t, g, h);
        Vec rhs = (I + 0.5 * k * Gh) * u;
        if (f) rhs += k * (C * to_vec(f(t)));
        u = (I - 0.5 * k * Gh).partialPivLu().solve(rhs);
    }
    return from_vec(g, mdl.m, u);
}

// deterministic random helpers
inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline whs::SpectralField random_field(const whs::GridSpec& g, int m, std::uint64_t seed) {
    whs::SpectralField u(g, m);
    auto r = rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (cd& z : u.data) z = cd(nd(r), nd(r));
    return u;
}

// smooth periodic trig-polynomial model for oracle comparisons (no
// hyperbolicity requirement; used only where linear algebra is tested)
inline whs::SystemModel random_trig_model(int m, double L, std::uint64_t seed,
                                          double amplitude = 0.4) {
    auto r = rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    const int modes = 2;
    // coefficients for A and B entries: [entry][mode] pairs
    auto draw_entry = [&]() {
        std::vector<cd> c(2 * modes + 1);
        for (cd& z : c) z = cd(nd(r), nd(r));
        return c;
    };
    std::vector<std::vector<cd>> ca(m * m), cb(m * m);
    for (auto& e : ca) e = draw_entry();
    for (auto& e : cb) e = draw_entry();

    auto eval = [modes, L, amplitude](const std::vector<std::vector<cd>>& coef, int m_,
                                      const whs::Vec3& x) {
        whs::Matc M(m_, m_);
        for (int r_ = 0; r_ < m_; ++r_)
            for (int c_ = 0; c_ < m_; ++c_) {
                cd acc = 0.0;
                const auto& e = coef[r_ * m_ + c_];
                for (int k = -modes; k <= modes; ++k)
                    acc += e[k + modes] * std::polar(1.0, k * M_PI * x[0] / L);
                M(r_, c_) = amplitude * acc;
            }
        return M;
    };

    whs::SystemModel mdl;
    mdl.m = m;
    mdl.d = 1;
    mdl.support_radius = L;
    mdl.theta = 0;
    mdl.A_eval = [=](int, double t, const whs::Vec3& x) {
        return eval(ca, m, x) * (1.0 + 0.3 * std::sin(t));
    };
    mdl.B_eval = [=](double t, const whs::Vec3& x) { return eval(cb, m, x) * (1.0 + 0.2 * t); };
    return mdl;
}

// long-double compensated summation oracle for the weighted norm
inline long double weighted_norm_ld(const whs::SpectralField& u, double t, double sigma,
                                    double tau_bar, double rate, double rho, double ell) {
    const auto& g = u.grid;
    const std::size_t nt = g.size();
    long double vol = 1.0L;
    for (int k = 0; k < g.d; ++k) vol *= 2.0L * g.L;
    long double acc = 0.0L, comp = 0.0L;
    for (std::size_t s = 0; s < nt; ++s) {
        const long double br = sqrtl((long double)(ell * ell) + (long double)(g.xi_norm(s)) * g.xi_norm(s));
        const long double e = sigma * logl(br) + (long double)(tau_bar - rate * t) * powl(br, rho);
        long double mass = 0.0L;
        for (int c = 0; c < u.m; ++c) mass += (long double)std::norm(u.data[c * nt + s]);
        const long double term = expl(2.0L * e) * mass - comp;
        const long double tmp = acc + term;
        comp = (tmp - acc) - term;
        acc = tmp;
    }
    return sqrtl(vol * acc);
}

}  // namespace ora
