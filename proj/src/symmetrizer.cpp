#include "whs/symmetrizer.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>

#include "whs/cutoff.hpp"

namespace whs {

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

double multi_factorial(const Index3& a) { return factorial(a[0]) * factorial(a[1]) * factorial(a[2]); }

// enumerate multi-indices over the first d axes with |alpha| <= r
std::vector<Index3> multi_indices(int d, int r) {
    std::vector<Index3> out;
    for (int a0 = 0; a0 <= r; ++a0)
        for (int a1 = 0; a1 <= (d > 1 ? r - a0 : 0); ++a1)
            for (int a2 = 0; a2 <= (d > 2 ? r - a0 - a1 : 0); ++a2)
                out.push_back(Index3{a0, a1, a2});
    return out;
}

double vec_pow(const Vec3& v, const Index3& a) {
    double p = 1.0;
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < a[k]; ++i) p *= v[k];
    return p;
}

cd ipow(int n) {  // (-i)^n
    switch (((n % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, -1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, 1.0};
    }
}

double norm3(const Vec3& v, int d) {
    double s = 0.0;
    for (int k = 0; k < d; ++k) s += v[k] * v[k];
    return std::sqrt(s);
}

double spectral_abscissa_of(const Matc& M) {
    Eigen::ComplexEigenSolver<Matc> es(M, false);
    double a = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < M.rows(); ++i) a = std::max(a, es.eigenvalues()(i).real());
    return a;
}

}  // namespace

SymbolConfig make_symbol_config(const SystemModel& mdl, double b, double ell, double tau_bar,
                                double h) {
    SymbolConfig c;
    auto rp = regularity_params(mdl.theta);
    c.b = b;
    c.ell = ell;
    c.rho = rp.rho;
    c.nu = rp.nu;
    c.tau_bar = tau_bar;
    c.h = h;
    c.order_N = std::max(2 * mdl.theta, mdl.m);
    return c;
}

Matc calH(const SystemModel& mdl, double t, const Vec3& x, const Vec3& xi, const Vec3& y,
          const Vec3& eta, double eps, int r, double fd_step) {
    Matc out = Matc::Zero(mdl.m, mdl.m);
    // beta = 0 branch: sum_{|alpha| <= r} (eps/1)^{|alpha|}/alpha! D_x^alpha A(.,xi) y^alpha
    for (const Index3& a : multi_indices(mdl.d, r)) {
        const int p = order_of(a);
        if (p > 0 && eps == 0.0) continue;
        const cd coef = std::pow(eps, p) / multi_factorial(a) * ipow(p) * vec_pow(y, a);
        if (coef == cd(0.0)) continue;
        out += coef * deriv_symbol_A(mdl, t, x, xi, a, fd_step);
    }
    // |beta| = 1 branch: d_{xi_j} A = A_j, extra factor eps * (-i eta_j)
    for (int j = 0; j < mdl.d; ++j) {
        if (eta[j] == 0.0 || eps == 0.0) continue;
        for (const Index3& a : multi_indices(mdl.d, r - 1)) {
            const int p = order_of(a);
            const cd coef = std::pow(eps, p + 1) / multi_factorial(a) * ipow(p) * vec_pow(y, a) *
                            cd(0.0, -eta[j]);
            if (coef == cd(0.0)) continue;
            if (p == 0) {
                out += coef * mdl.A_eval(j, t, x);
            } else {
                Vec3 ej{0.0, 0.0, 0.0};
                ej[j] = 1.0;
                out += coef * deriv_symbol_A(mdl, t, x, ej, a, fd_step);
            }
        }
    }
    return out;
}

Vec3 grad_weight_phase(const Vec3& xi, double ell, double rho, double h) {
    Vec3 g{0.0, 0.0, 0.0};
    const double r = std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
    const double br = bracket(r, ell);
    const double c = chi(h * r);
    const double dbr = rho * std::pow(br, rho - 2.0);  // d/dxi_k <xi>^rho = rho <xi>^{rho-2} xi_k
    const double dc = r > 0.0 ? h * chi_prime(h * r) / r : 0.0;  // d/dxi_k chi(h|xi|)
    for (int k = 0; k < 3; ++k) g[k] = dbr * xi[k] * c + std::pow(br, rho) * dc * xi[k];
    return g;
}

HSymbols taylor_symbol_H(const SystemModel& mdl, double t, const Vec3& x, const Vec3& xi,
                         double tau, const SymbolConfig& cfg) {
    if (tau < -1e-15 || tau > cfg.tau_bar + 1e-15)
        throw std::invalid_argument("taylor_symbol_H: tau outside [0, tau_bar]");
    Vec3 w = grad_weight_phase(xi, cfg.ell, cfg.rho, cfg.h);
    for (int k = 0; k < 3; ++k) w[k] *= (cfg.tau_bar - tau);
    Matc H = Matc::Zero(mdl.m, mdl.m);
    for (const Index3& a : multi_indices(mdl.d, cfg.order_N)) {
        const int p = order_of(a);
        const cd coef = ipow(p) / multi_factorial(a) * vec_pow(w, a);
        if (coef == cd(0.0)) continue;
        H += coef * deriv_symbol_A(mdl, t, x, xi, a, cfg.fd_step);
    }
    HSymbols out;
    out.H = H;
    out.chi2h = chi(2.0 * cfg.h * norm3(xi, mdl.d));
    out.Hh = out.chi2h * out.chi2h * H;
    return out;
}

Matc taylor_symbol_H_via_calH(const SystemModel& mdl, double t, const Vec3& x, const Vec3& xi,
                              double tau, const SymbolConfig& cfg) {
    const double r = norm3(xi, mdl.d);
    const double br = bracket(r, cfg.ell);
    const double eps = std::pow(br, cfg.rho - 1.0);
    Vec3 xin{0.0, 0.0, 0.0}, y{0.0, 0.0, 0.0};
    Vec3 w = grad_weight_phase(xi, cfg.ell, cfg.rho, cfg.h);
    for (int k = 0; k < 3; ++k) {
        xin[k] = xi[k] / br;
        y[k] = (cfg.tau_bar - tau) * w[k] / eps;
    }
    const double c2 = chi(2.0 * cfg.h * r);
    return c2 * c2 * br *
           calH(mdl, t, x, xin, y, Vec3{0.0, 0.0, 0.0}, eps, cfg.order_N, cfg.fd_step);
}

MSymbol build_M(const Matc& Hh, double b, double bracket_val, double rho) {
    if (!(b > 0.0)) throw std::invalid_argument("build_M: b must be positive");
    if (!(bracket_val > 0.0)) throw std::invalid_argument("build_M: bracket must be positive");
    MSymbol out;
    const double sigma = std::pow(bracket_val, rho);
    out.M = cd(0.0, 1.0) * Hh - b * sigma * Matc::Identity(Hh.rows(), Hh.cols());
    out.spectral_abscissa = spectral_abscissa_of(out.M);
    out.hurwitz = out.spectral_abscissa < 0.0;
    return out;
}

Matc solve_symmetrizer(const Matc& M, double b, double sigma) {
    const int m = static_cast<int>(M.rows());
    if (spectral_abscissa_of(M) >= 0.0)
        throw std::invalid_argument("solve_symmetrizer: M is not Hurwitz");
    // vec form of M* R + R M = -b sigma I
    Matc K = Matc::Zero(m * m, m * m);
    const Matc Ms = M.adjoint();
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) {
                K(i * m + j, k * m + j) += Ms(i, k);  // (M* R)_{ij} from R_{kj}
                K(i * m + j, i * m + k) += M(k, j);   // (R M)_{ij} from R_{ik}
            }
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(m * m);
    for (int i = 0; i < m; ++i) rhs(i * m + i) = -b * sigma;
    Eigen::VectorXcd r = K.fullPivLu().solve(rhs);
    Matc R(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) R(i, j) = r(i * m + j);
    return 0.5 * (R + R.adjoint());  // enforce Hermitian part; defect reported by callers
}

Matc symmetrizer_quadrature(const Matc& M, double b, double sigma, double tol) {
    const int m = static_cast<int>(M.rows());
    auto integrand = [&](double s) -> Matc {
        Matc E = (s * M).exp();
        return b * sigma * (E.adjoint() * E);
    };
    // panel-wise Simpson with dyadic refinement per panel
    const double panel = 0.5 / (b * sigma);
    Matc acc = Matc::Zero(m, m);
    double s0 = 0.0;
    for (int p = 0; p < 400; ++p) {
        const double s1 = s0 + panel;
        Matc coarse = (integrand(s0) + 4.0 * integrand(0.5 * (s0 + s1)) + integrand(s1)) *
                      ((s1 - s0) / 6.0);
        Matc fine = Matc::Zero(m, m);
        int n_sub = 2;
        for (int refine = 0; refine < 16; ++refine) {
            fine.setZero();
            const double ds = (s1 - s0) / n_sub;
            for (int i = 0; i < n_sub; ++i) {
                const double a = s0 + i * ds;
                fine += (integrand(a) + 4.0 * integrand(a + 0.5 * ds) + integrand(a + ds)) * (ds / 6.0);
            }
            if ((fine - coarse).norm() <= 0.1 * tol * std::max(1.0, acc.norm() + fine.norm())) break;
            coarse = fine;
            n_sub *= 2;
        }
        acc += fine;
        s0 = s1;
        if (fine.norm() < 0.01 * tol * acc.norm() && integrand(s0).norm() * panel < 0.01 * tol * acc.norm())
            break;
    }
    return 0.5 * (acc + acc.adjoint());
}

LowerBoundReport verify_lower_bound(const Matc& R, double nu, double bracket_val) {
    LowerBoundReport rep;
    Eigen::SelfAdjointEigenSolver<Matc> es(0.5 * (R + R.adjoint()));
    rep.min_eig = es.eigenvalues().minCoeff();
    rep.c_est = rep.min_eig * std::pow(bracket_val, 2.0 * nu);
    return rep;
}

SymmetrizerProbe probe_point(const SystemModel& mdl, double t, const Vec3& x, const Vec3& xi,
                             double tau, const SymbolConfig& cfg) {
    SymmetrizerProbe pr;
    pr.t = t;
    pr.x = x;
    pr.xi = xi;
    pr.tau = tau;
    pr.order_N = cfg.order_N;
    pr.bracket_val = bracket(norm3(xi, mdl.d), cfg.ell);
    const double sigma = std::pow(pr.bracket_val, cfg.rho);

    HSymbols hs = taylor_symbol_H(mdl, t, x, xi, tau, cfg);
    pr.Hh = hs.Hh;
    MSymbol ms = build_M(hs.Hh, cfg.b, pr.bracket_val, cfg.rho);
    pr.M = ms.M;
    pr.spectral_abscissa = ms.spectral_abscissa;
    pr.R = solve_symmetrizer(ms.M, cfg.b, sigma);

    const double bs = cfg.b * sigma;
    const int m = mdl.m;
    pr.lyapunov_residual = (ms.M.adjoint() * pr.R + pr.R * ms.M + bs * Matc::Identity(m, m)).norm() / bs;
    const Matc iH = cd(0.0, 1.0) * hs.Hh;
    pr.rih_residual =
        (pr.R * iH + iH.adjoint() * pr.R + bs * Matc::Identity(m, m) - 2.0 * bs * pr.R).norm() / bs;
    pr.hermiticity_defect = (pr.R - pr.R.adjoint()).norm();
    auto lb = verify_lower_bound(pr.R, cfg.nu, pr.bracket_val);
    pr.min_eig_R = lb.min_eig;
    pr.c_est = lb.c_est;
    return pr;
}

ThetaFit fit_theta(const SystemModel& mdl, int sample_count, double T) {
    ThetaFit fit;
    const int N = std::max(2 * mdl.theta, mdl.m);
    const double X = mdl.support_radius + 1.0;
    auto frac = [](double v) { return v - std::floor(v); };

    std::vector<double> logs_eps, logs_norm;
    for (int p = 3; p <= 10; ++p) {
        const double eps = std::pow(2.0, -p);
        const double s = 1.0 / eps;
        double worst = 0.0;
        for (int i = 0; i < sample_count; ++i) {
            const double t = T * frac(i * std::numbers::sqrt2);
            Vec3 x{0.0, 0.0, 0.0}, xi{0.0, 0.0, 0.0}, y{0.0, 0.0, 0.0}, eta{0.0, 0.0, 0.0};
            for (int k = 0; k < mdl.d; ++k) {
                x[k] = -X + 2.0 * X * frac(i * std::numbers::sqrt3 + 0.31 * k);
                y[k] = -1.0 + 2.0 * frac(i * 2.2360679774997896 + 0.17 * k);   // sqrt(5)
                eta[k] = -1.0 + 2.0 * frac(i * 2.6457513110645906 + 0.23 * k); // sqrt(7)
            }
            // keep |xi| = 1 and |(y,eta)| <= 1
            if (mdl.d == 1) {
                xi[0] = (i % 2 == 0) ? 1.0 : -1.0;
            } else {
                const double phi = 2.0 * M_PI * frac(i * std::numbers::phi);
                xi[0] = std::cos(phi);
                xi[1] = std::sin(phi);
            }
            double ynorm = 0.0;
            for (int k = 0; k < mdl.d; ++k) ynorm += y[k] * y[k] + eta[k] * eta[k];
            ynorm = std::sqrt(ynorm);
            if (ynorm > 1.0)
                for (int k = 0; k < mdl.d; ++k) { y[k] /= ynorm; eta[k] /= ynorm; }

            Matc Hr = calH(mdl, t, x, xi, y, eta, eps, N);
            Matc E = (cd(0.0, 1.0) * s * Hr).exp();
            worst = std::max(worst, E.operatorNorm());
        }
        fit.table.emplace_back(eps, worst);
        logs_eps.push_back(std::log(1.0 / eps));
        logs_norm.push_back(std::log(worst));
    }

    const double spread =
        *std::max_element(logs_norm.begin(), logs_norm.end()) -
        *std::min_element(logs_norm.begin(), logs_norm.end());
    if (spread < 0.1) {
        fit.degenerate = true;
        fit.theta_hat = 0.0;
        fit.note = "degenerate fit: norms flat across eps";
        fit.r2 = 1.0;
        return fit;
    }

    // least squares line log||.|| = theta * log(1/eps) + c
    const std::size_t n = logs_eps.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += logs_eps[i];
        sy += logs_norm[i];
        sxx += logs_eps[i] * logs_eps[i];
        sxy += logs_eps[i] * logs_norm[i];
    }
    const double denom = n * sxx - sx * sx;
    fit.theta_hat = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - fit.theta_hat * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double mean_y = sy / n;
    for (std::size_t i = 0; i < n; ++i) {
        const double pred = fit.theta_hat * logs_eps[i] + intercept;
        ss_res += (logs_norm[i] - pred) * (logs_norm[i] - pred);
        ss_tot += (logs_norm[i] - mean_y) * (logs_norm[i] - mean_y);
    }
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    fit.residual_rms = std::sqrt(ss_res / n);
    return fit;
}

}  // namespace whs
