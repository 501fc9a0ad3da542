#pragma once

#include <array>
#include <cstdint>
#include <functional>

#include "whs/grid.hpp"

namespace whs {

/// Forward transform: samples on the nodes -> trig-interpolation coefficients.
/// coeff(q) = (1/N^d) sum_j u(x_j) e^{-i xi_q . x_j}. Round trip with
/// inverse_transform is the identity to machine precision.
SpectralField forward_transform(const PhysicalField& u);
PhysicalField inverse_transform(const SpectralField& u);

/// Diagonal Fourier multiplier: coefficients multiplied mode-wise, all
/// components alike. The sampled overload expects one value per lattice point.
SpectralField apply_multiplier(const SpectralField& u, const std::vector<cd>& symbol);
SpectralField apply_multiplier(const SpectralField& u,
                               const std::function<cd(const std::array<double, 3>&)>& symbol);

/// Sample a scalar symbol on the frequency lattice.
std::vector<cd> sample_symbol(const GridSpec& g,
                              const std::function<cd(const std::array<double, 3>&)>& symbol);

/// Mode-wise linear map acting across components: out[m] = F(flat, in[m]).
/// Used for constant-coefficient propagators and dense per-mode solves.
SpectralField apply_mode_map(const SpectralField& u,
                             const std::function<void(std::size_t flat, const cd* in, cd* out)>& map);

/// Number of size-N^d transforms executed so far (cost accounting).
std::uint64_t fft_op_count();
void reset_fft_op_count();

}  // namespace whs
