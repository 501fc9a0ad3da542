#include "whs/operator_g.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <random>

#include "whs/cutoff.hpp"
#include "whs/fft.hpp"

namespace whs {

namespace {

// out += Mat(node) * in, node-wise m x m matvec over a physical field
void matvec_accumulate(const CoeffFrame& fr, const std::vector<cd>& coeff,
                       const PhysicalField& in, PhysicalField& out, bool adjoint) {
    const std::size_t nt = fr.grid.size();
    const int m = fr.m;
    for (std::size_t i = 0; i < nt; ++i) {
        const cd* M = coeff.data() + i * m * m;
        for (int r = 0; r < m; ++r) {
            cd acc = 0.0;
            for (int c = 0; c < m; ++c)
                acc += (adjoint ? std::conj(M[c * m + r]) : M[r * m + c]) * in.data[c * nt + i];
            out.data[r * nt + i] += acc;
        }
    }
}

SpectralField derivative(const SpectralField& u, int axis) {
    const GridSpec& g = u.grid;
    const std::size_t nt = g.size();
    SpectralField out(g, u.m);
    for (std::size_t s = 0; s < nt; ++s) {
        const cd ixi(0.0, g.xi(s)[axis]);
        for (int c = 0; c < u.m; ++c) out.data[c * nt + s] = ixi * u.data[c * nt + s];
    }
    return out;
}

}  // namespace

SpectralField apply_G(const CoeffFrame& fr, const SpectralField& u) {
    if (u.grid != fr.grid || u.m != fr.m) throw std::invalid_argument("apply_G: grid/model mismatch");
    PhysicalField out_phys(fr.grid, fr.m);
    for (int j = 0; j < fr.d; ++j) {
        PhysicalField dj = inverse_transform(derivative(u, j));
        matvec_accumulate(fr, fr.A[j], dj, out_phys, false);
    }
    PhysicalField up = inverse_transform(u);
    matvec_accumulate(fr, fr.B, up, out_phys, false);
    return forward_transform(out_phys);
}

SpectralField apply_G(const SystemModel& mdl, double t, const SpectralField& u) {
    return apply_G(sample_coefficients(mdl, t, u.grid), u);
}

SpectralField apply_G_adjoint(const CoeffFrame& fr, const SpectralField& u) {
    if (u.grid != fr.grid || u.m != fr.m) throw std::invalid_argument("apply_G_adjoint: grid/model mismatch");
    PhysicalField up = inverse_transform(u);
    SpectralField out(fr.grid, fr.m);
    for (int j = 0; j < fr.d; ++j) {
        PhysicalField w(fr.grid, fr.m);
        matvec_accumulate(fr, fr.A[j], up, w, true);
        add_scaled(out, derivative(forward_transform(w), j), cd(-1.0));
    }
    PhysicalField wb(fr.grid, fr.m);
    matvec_accumulate(fr, fr.B, up, wb, true);
    add_scaled(out, forward_transform(wb), cd(1.0));
    return out;
}

SpectralField apply_G_h(const CoeffFrame& fr, const SpectralField& u,
                        const std::vector<double>& chi_2h) {
    const std::size_t nt = fr.grid.size();
    SpectralField v(u.grid, u.m);
    for (int c = 0; c < u.m; ++c)
        for (std::size_t s = 0; s < nt; ++s) v.data[c * nt + s] = chi_2h[s] * u.data[c * nt + s];
    SpectralField w = apply_G(fr, v);
    for (int c = 0; c < u.m; ++c)
        for (std::size_t s = 0; s < nt; ++s) w.data[c * nt + s] *= chi_2h[s];
    return w;
}

SpectralField apply_G_h(const SystemModel& mdl, double t, const SpectralField& u, double h) {
    auto rep = validate_resolution(u.grid, h);
    if (!rep.pass) throw std::invalid_argument("apply_G_h: grid under-resolved for h");
    return apply_G_h(sample_coefficients(mdl, t, u.grid), u, cutoff_multiplier(u.grid, h, 2));
}

CbarEstimate estimate_cbar(const SystemModel& mdl, const GridSpec& g, double T, double h) {
    (void)h;  // Cbar is h-free; h kept in the signature for config plumbing
    CbarEstimate est;
    const std::size_t nt = g.size();
    std::vector<double> brinv(nt);
    for (std::size_t s = 0; s < nt; ++s) brinv[s] = 1.0 / std::sqrt(1.0 + g.xi_norm(s) * g.xi_norm(s));

    const int n_time = T > 0.0 ? 9 : 1;
    double worst = 0.0;
    bool all_ok = true;
    int iterations = 0;
    std::mt19937_64 rng(0x5eed0001ULL);
    std::normal_distribution<double> nd(0.0, 1.0);

    for (int it_t = 0; it_t < n_time; ++it_t) {
        const double t = n_time == 1 ? 0.0 : T * it_t / (n_time - 1);
        CoeffFrame fr = sample_coefficients(mdl, t, g);

        auto op = [&](const SpectralField& v) {
            SpectralField w = apply_G(fr, v);
            for (std::size_t i = 0; i < w.data.size(); ++i) w.data[i] *= brinv[i % nt];
            return w;
        };
        auto op_adj = [&](const SpectralField& v) {
            SpectralField w(v.grid, v.m);
            for (std::size_t i = 0; i < v.data.size(); ++i) w.data[i] = brinv[i % nt] * v.data[i];
            return apply_G_adjoint(fr, w);
        };

        SpectralField v(g, mdl.m);
        for (cd& z : v.data) z = cd(nd(rng), nd(rng));
        double nv = l2_norm(v);
        for (cd& z : v.data) z /= nv;

        double lambda = 0.0, lambda_prev = -1.0;
        bool settled = false;
        for (int it = 0; it < 50; ++it) {
            SpectralField mv = op(v);
            lambda = l2_norm(mv);  // sqrt of Rayleigh quotient of M*M
            lambda *= lambda;
            SpectralField w = op_adj(mv);
            double nw = l2_norm(w);
            if (!(nw > 0.0) || !std::isfinite(nw)) break;
            for (cd& z : w.data) z /= nw;
            v = std::move(w);
            ++iterations;
            if (lambda_prev > 0.0 && std::abs(lambda - lambda_prev) <= 1e-6 * lambda) {
                settled = true;
                break;
            }
            lambda_prev = lambda;
        }
        if (!settled && lambda_prev > 0.0 &&
            std::abs(lambda - lambda_prev) > 1e-2 * std::max(lambda, 1e-300))
            all_ok = false;
        worst = std::max(worst, std::sqrt(std::max(lambda, 0.0)));
    }

    est.iterations = iterations;
    est.converged = all_ok && worst > 0.0 && std::isfinite(worst);
    if (!est.converged) {
        // coefficient-sum bound over sampled (t, node)
        double bound = 0.0;
        for (int it_t = 0; it_t < n_time; ++it_t) {
            const double t = n_time == 1 ? 0.0 : T * it_t / (n_time - 1);
            double sa = 0.0, sb = 0.0;
            for (std::size_t i = 0; i < nt; ++i) {
                const Vec3 x = g.x(i);
                double row = 0.0;
                for (int j = 0; j < mdl.d; ++j) row += mdl.A_eval(j, t, x).operatorNorm();
                sa = std::max(sa, row);
                sb = std::max(sb, mdl.B_eval(t, x).operatorNorm());
            }
            bound = std::max(bound, sa + sb);
        }
        est.fallback = true;
        est.raw = 0.5 * std::sqrt(3.0) * bound;
        est.value = est.raw;
        return est;
    }
    est.raw = 0.5 * std::sqrt(3.0) * worst;
    est.value = 1.1 * est.raw;
    return est;
}

HyperbolicityReport check_hyperbolicity(const SystemModel& mdl, int sample_count, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("check_hyperbolicity: tol must be positive");
    HyperbolicityReport rep;
    rep.samples = sample_count;
    const double X = mdl.support_radius + 1.0;
    auto frac = [](double v) { return v - std::floor(v); };
    Eigen::ComplexEigenSolver<Matc> es;
    for (int i = 0; i < sample_count; ++i) {
        const double t = 2.0 * frac(i * std::numbers::sqrt2);
        Vec3 x{0.0, 0.0, 0.0}, xi{0.0, 0.0, 0.0};
        for (int k = 0; k < mdl.d; ++k) x[k] = -X + 2.0 * X * frac(i * std::numbers::sqrt3 + 0.37 * k);
        if (mdl.d == 1) {
            xi[0] = (i % 2 == 0) ? 1.0 : -1.0;
        } else {
            const double phi = 2.0 * M_PI * frac(i * std::numbers::phi);
            if (mdl.d == 2) {
                xi[0] = std::cos(phi);
                xi[1] = std::sin(phi);
            } else {
                const double cth = 2.0 * frac(i * 2.6457513110645906) - 1.0;  // sqrt(7)
                const double sth = std::sqrt(std::max(0.0, 1.0 - cth * cth));
                xi[0] = sth * std::cos(phi);
                xi[1] = sth * std::sin(phi);
                xi[2] = cth;
            }
        }
        es.compute(symbol_A(mdl, t, x, xi), false);
        double im = 0.0;
        for (int r = 0; r < mdl.m; ++r) im = std::max(im, std::abs(es.eigenvalues()(r).imag()));
        if (im > rep.max_im) {
            rep.max_im = im;
            rep.worst_t = t;
            rep.worst_x = x;
            rep.worst_xi = xi;
        }
    }
    rep.pass = rep.max_im <= tol;
    return rep;
}

}  // namespace whs
