#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace whs {

using cd = std::complex<double>;

/// Periodic lattice on [-L, L)^d with its dual frequency lattice.
///
/// Nodes per dimension: x_i = -L + i * (2L/n), i = 0..n-1.
/// Dual frequencies:    xi_q = pi*q/L, q in {-n/2, ..., n/2 - 1}.
/// Spectral storage follows FFT wrap-around order: the storage slot s
/// per dimension carries q = s for s < n/2 and q = s - n otherwise.
struct GridSpec {
    int d = 1;       // spatial dimension, 1..3
    int n = 0;       // points per dimension (even)
    double L = 0.0;  // half period

    std::size_t size() const {
        std::size_t t = 1;
        for (int k = 0; k < d; ++k) t *= static_cast<std::size_t>(n);
        return t;
    }

    double dx() const { return 2.0 * L / n; }
    double dxi() const { return M_PI / L; }

    double node(int i) const { return -L + i * dx(); }

    // wrap-around frequency index of storage slot s
    int freq_of(int s) const { return s < n / 2 ? s : s - n; }
    double xi_of(int s) const { return dxi() * freq_of(s); }

    /// Largest positive lattice frequency per dimension, pi*(n/2-1)/L.
    double max_pos_freq() const { return dxi() * (n / 2 - 1); }

    /// Decompose flat row-major index into per-dimension slots.
    std::array<int, 3> unflatten(std::size_t flat) const {
        std::array<int, 3> s{0, 0, 0};
        for (int k = d - 1; k >= 0; --k) {
            s[k] = static_cast<int>(flat % n);
            flat /= n;
        }
        return s;
    }

    /// Frequency vector of a flat spectral index.
    std::array<double, 3> xi(std::size_t flat) const {
        auto s = unflatten(flat);
        std::array<double, 3> v{0.0, 0.0, 0.0};
        for (int k = 0; k < d; ++k) v[k] = xi_of(s[k]);
        return v;
    }

    /// |xi| of a flat spectral index.
    double xi_norm(std::size_t flat) const {
        auto v = xi(flat);
        double t = 0.0;
        for (int k = 0; k < d; ++k) t += v[k] * v[k];
        return std::sqrt(t);
    }

    /// Node coordinates of a flat physical index.
    std::array<double, 3> x(std::size_t flat) const {
        auto s = unflatten(flat);
        std::array<double, 3> v{0.0, 0.0, 0.0};
        for (int k = 0; k < d; ++k) v[k] = node(s[k]);
        return v;
    }

    bool operator==(const GridSpec&) const = default;
};

GridSpec make_grid(int d, int points_per_dim, double half_period);

/// m-component state sampled on the nodes, component-major layout:
/// data[c * size + flat] is component c at node flat (row-major).
struct PhysicalField {
    GridSpec grid;
    int m = 1;
    std::vector<cd> data;

    PhysicalField() = default;
    PhysicalField(const GridSpec& g, int m_) : grid(g), m(m_), data(m_ * g.size()) {}

    cd& at(int c, std::size_t flat) { return data[c * grid.size() + flat]; }
    const cd& at(int c, std::size_t flat) const { return data[c * grid.size() + flat]; }
};

/// m-component spectral coefficients, same layout over the frequency lattice.
/// Coefficients are trigonometric-interpolation amplitudes: the field equals
/// sum_q coeff(q) e^{i xi_q . x}, so the L2 norm is (2L)^{d/2} * l2(coeffs).
struct SpectralField {
    GridSpec grid;
    int m = 1;
    std::vector<cd> data;

    SpectralField() = default;
    SpectralField(const GridSpec& g, int m_) : grid(g), m(m_), data(m_ * g.size()) {}

    cd& at(int c, std::size_t flat) { return data[c * grid.size() + flat]; }
    const cd& at(int c, std::size_t flat) const { return data[c * grid.size() + flat]; }
};

/// L2 norms consistent with the continuum norm on the torus.
double l2_norm(const PhysicalField& u);
double l2_norm(const SpectralField& u);
cd inner(const SpectralField& u, const SpectralField& v);

// elementwise axpy-style helpers on matching fields
void add_scaled(SpectralField& acc, const SpectralField& x, cd alpha);

}  // namespace whs
