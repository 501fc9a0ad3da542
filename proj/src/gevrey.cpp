#include "whs/gevrey.hpp"

#include <cmath>

#include "whs/cutoff.hpp"

namespace whs {

RegularityParams regularity_params(int theta) {
    if (theta < 0) throw std::invalid_argument("regularity_params: theta must be >= 0");
    RegularityParams p;
    p.theta = theta;
    p.s = (2.0 + 6.0 * theta) / (1.0 + 6.0 * theta);
    p.rho = 1.0 / p.s;
    p.nu = theta * (1.0 - p.rho);
    // rho - (3 nu + 1/2) is identically zero for these formulas; keep the
    // guard so hand-edited parameter sets cannot sneak past it.
    if (p.rho + 1e-12 < 3.0 * p.nu + 0.5)
        throw std::logic_error("regularity_params: rho >= 3 nu + 1/2 failed");
    return p;
}

double bracket(double xi_norm, double ell) {
    if (ell < 1.0) throw std::invalid_argument("bracket: ell must be >= 1");
    return std::sqrt(ell * ell + xi_norm * xi_norm);
}

double default_ell(double a, double b, double rho) {
    double ell = 1.0;
    if (b > 1.0) ell = std::max(ell, std::pow(b, 1.0 / (1.0 - rho)));
    if (a > 1.0) ell = std::max(ell, std::pow(a, 6.0 / rho));
    return ell;
}

double weight_exponent(const WeightSpec& w, double t, double xi_norm) {
    const double budget = w.tau_bar - w.rate * t;
    if (budget < -1e-15) throw std::domain_error("weight_exponent: budget tau_bar - rate*t exhausted");
    const double br = bracket(xi_norm, w.ell);
    double e = w.sigma * std::log(br) + std::max(budget, 0.0) * std::pow(br, w.rho);
    if (w.cutoff_h) {
        const double c = chi(*w.cutoff_h * xi_norm);
        e = w.sigma * std::log(br) + std::max(budget, 0.0) * std::pow(br, w.rho) * c;
    }
    return e;
}

double LogScalar::mantissa() const {
    if (!std::isfinite(log_value)) return log_value > 0 ? HUGE_VAL : 0.0;
    const double l2 = log_value / M_LN2;
    return std::exp2(l2 - std::floor(l2));
}

int LogScalar::exp2() const {
    if (!std::isfinite(log_value)) return 0;
    return static_cast<int>(std::floor(log_value / M_LN2));
}

LogScalar weighted_norm(const SpectralField& u, double t, const WeightSpec& w) {
    const GridSpec& g = u.grid;
    const std::size_t nt = g.size();
    std::vector<double> expo(nt);
    double emax = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < nt; ++s) {
        expo[s] = weight_exponent(w, t, g.xi_norm(s));
        bool occupied = false;
        for (int c = 0; c < u.m; ++c)
            if (u.data[c * nt + s] != cd(0.0, 0.0)) { occupied = true; break; }
        if (occupied && expo[s] > emax) emax = expo[s];
    }
    LogScalar out;
    if (!std::isfinite(emax)) return out;  // zero field
    double vol = 1.0;
    for (int k = 0; k < g.d; ++k) vol *= 2.0 * g.L;
    double acc = 0.0;
    for (std::size_t s = 0; s < nt; ++s) {
        double mass = 0.0;
        for (int c = 0; c < u.m; ++c) mass += std::norm(u.data[c * nt + s]);
        if (mass != 0.0) acc += std::exp(2.0 * (expo[s] - emax)) * mass;
    }
    out.log_value = emax + 0.5 * std::log(vol * acc);
    return out;
}

std::vector<double> weight_multiplier(const GridSpec& g, double t, const WeightSpec& w,
                                      bool inverse) {
    std::vector<double> out(g.size());
    for (std::size_t s = 0; s < out.size(); ++s) {
        double e = weight_exponent(w, t, g.xi_norm(s));
        if (inverse) e = -e;
        if (e > 709.0) throw std::range_error("weight_multiplier: overflow, use log-space path");
        out[s] = std::exp(e);
    }
    return out;
}

double omega_h(double xi_norm, double a, double k, double rho, double ell, double h) {
    if (!(k > 0.0)) throw std::invalid_argument("omega_h: k must be positive");
    const double br = std::pow(bracket(xi_norm, ell), rho);
    const double c = chi(h * xi_norm);
    const double z = a * k * br * c;
    // int_0^1 e^{-z theta} dtheta, stable for small z
    const double integral = z > 0.0 ? -std::expm1(-z) / z : 1.0;
    return br * integral / (1.0 + std::exp(-z));
}

}  // namespace whs
