#include "whs/grid.hpp"

#include <cmath>

namespace whs {

GridSpec make_grid(int d, int points_per_dim, double half_period) {
    if (d < 1 || d > 3) throw std::invalid_argument("make_grid: d must be 1, 2 or 3");
    if (points_per_dim < 8) throw std::invalid_argument("make_grid: points_per_dim must be >= 8");
    if (points_per_dim % 2 != 0) throw std::invalid_argument("make_grid: points_per_dim must be even");
    if (!(half_period > 0.0)) throw std::invalid_argument("make_grid: half_period must be positive");
    GridSpec g;
    g.d = d;
    g.n = points_per_dim;
    g.L = half_period;
    return g;
}

double l2_norm(const PhysicalField& u) {
    double cell = 1.0;
    for (int k = 0; k < u.grid.d; ++k) cell *= u.grid.dx();
    double s = 0.0;
    for (const cd& z : u.data) s += std::norm(z);
    return std::sqrt(cell * s);
}

double l2_norm(const SpectralField& u) {
    double vol = 1.0;
    for (int k = 0; k < u.grid.d; ++k) vol *= 2.0 * u.grid.L;
    double s = 0.0;
    for (const cd& z : u.data) s += std::norm(z);
    return std::sqrt(vol * s);
}

cd inner(const SpectralField& u, const SpectralField& v) {
    if (u.grid != v.grid || u.m != v.m) throw std::invalid_argument("inner: field shape mismatch");
    double vol = 1.0;
    for (int k = 0; k < u.grid.d; ++k) vol *= 2.0 * u.grid.L;
    cd s = 0.0;
    for (std::size_t i = 0; i < u.data.size(); ++i) s += u.data[i] * std::conj(v.data[i]);
    return vol * s;
}

void add_scaled(SpectralField& acc, const SpectralField& x, cd alpha) {
    if (acc.grid != x.grid || acc.m != x.m) throw std::invalid_argument("add_scaled: field shape mismatch");
    for (std::size_t i = 0; i < acc.data.size(); ++i) acc.data[i] += alpha * x.data[i];
}

}  // namespace whs
