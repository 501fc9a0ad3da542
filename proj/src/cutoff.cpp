#include "whs/cutoff.hpp"

#include <cmath>

namespace whs {

namespace {

const double kR2 = 2.0 * std::sqrt(2.0);
const double kW = kR2 - 2.0;

double phi(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }
double phi_prime(double s) { return s > 0.0 ? std::exp(-1.0 / s) / (s * s) : 0.0; }

}  // namespace

double chi_support_radius() { return kR2; }

double chi(double r) {
    if (r < 0.0) throw std::invalid_argument("chi: negative radius");
    if (r <= chi_plateau_radius) return 1.0;
    if (r >= kR2) return 0.0;
    const double a = phi((kR2 - r) / kW);
    const double b = phi((r - 2.0) / kW);
    return a / (a + b);
}

double chi_prime(double r) {
    if (r < 0.0) throw std::invalid_argument("chi_prime: negative radius");
    if (r <= chi_plateau_radius || r >= kR2) return 0.0;
    const double p = (kR2 - r) / kW;
    const double q = (r - 2.0) / kW;
    const double a = phi(p), b = phi(q);
    return -(phi_prime(p) * b + a * phi_prime(q)) / (kW * (a + b) * (a + b));
}

std::vector<double> cutoff_multiplier(const GridSpec& g, double h, int scale) {
    if (scale != 1 && scale != 2) throw std::invalid_argument("cutoff_multiplier: scale must be 1 or 2");
    if (!(h > 0.0)) throw std::invalid_argument("cutoff_multiplier: h must be positive");
    auto rep = validate_resolution(g, h);
    if (!rep.pass) throw std::invalid_argument("cutoff_multiplier: grid under-resolved for h");
    std::vector<double> out(g.size());
    const double sh = scale * h;
    for (std::size_t s = 0; s < out.size(); ++s) out[s] = chi(sh * g.xi_norm(s));
    return out;
}

ResolutionReport validate_resolution(const GridSpec& g, double h) {
    ResolutionReport r;
    r.max_lattice_freq = g.max_pos_freq();
    r.needed_freq = kR2 / h;
    r.pass = r.max_lattice_freq >= r.needed_freq;
    int n = 2 * static_cast<int>(std::ceil(kR2 * g.L / (M_PI * h))) + 2;
    r.required_n = std::max(n, 8);
    return r;
}

}  // namespace whs
