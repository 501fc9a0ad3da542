#include "whs/fft.hpp"

#include <fftw3.h>

#include <atomic>
#include <map>
#include <mutex>

namespace whs {

namespace {

std::atomic<std::uint64_t> g_fft_count{0};

// FFTW planner is not thread-safe; execution with new-array interface is.
std::mutex g_plan_mutex;

fftw_plan get_plan(const GridSpec& g, int sign) {
    static std::map<std::tuple<int, int, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto key = std::make_tuple(g.d, g.n, sign);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<cd> dummy(g.size());
    int dims[3] = {g.n, g.n, g.n};
    fftw_plan p = fftw_plan_dft(g.d, dims,
                                reinterpret_cast<fftw_complex*>(dummy.data()),
                                reinterpret_cast<fftw_complex*>(dummy.data()),
                                sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.emplace(key, p);
    return p;
}

// parity of the sum of storage indices; equals (-1)^{sum q_k} since n is even
int index_parity(const GridSpec& g, std::size_t flat) {
    int p = 0;
    for (int k = 0; k < g.d; ++k) {
        p += static_cast<int>(flat % g.n);
        flat /= g.n;
    }
    return p & 1;
}

void execute(const GridSpec& g, int sign, cd* in, cd* out) {
    fftw_plan p = get_plan(g, sign);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(in), reinterpret_cast<fftw_complex*>(out));
    g_fft_count.fetch_add(1, std::memory_order_relaxed);
}

}  // namespace

SpectralField forward_transform(const PhysicalField& u) {
    const GridSpec& g = u.grid;
    const std::size_t nt = g.size();
    if (u.data.size() != static_cast<std::size_t>(u.m) * nt)
        throw std::invalid_argument("forward_transform: field shape mismatch");
    SpectralField out(g, u.m);
    std::vector<cd> buf(nt);
    const double scale = 1.0 / static_cast<double>(nt);
    for (int c = 0; c < u.m; ++c) {
        std::copy(u.data.begin() + c * nt, u.data.begin() + (c + 1) * nt, buf.begin());
        execute(g, FFTW_FORWARD, buf.data(), out.data.data() + c * nt);
    }
    // phase e^{i xi_q L} = (-1)^{sum q_k} accounts for the -L node offset
    for (std::size_t s = 0; s < nt; ++s) {
        const double f = index_parity(g, s) ? -scale : scale;
        for (int c = 0; c < u.m; ++c) out.data[c * nt + s] *= f;
    }
    return out;
}

PhysicalField inverse_transform(const SpectralField& u) {
    const GridSpec& g = u.grid;
    const std::size_t nt = g.size();
    if (u.data.size() != static_cast<std::size_t>(u.m) * nt)
        throw std::invalid_argument("inverse_transform: field shape mismatch");
    PhysicalField out(g, u.m);
    std::vector<cd> buf(nt);
    for (int c = 0; c < u.m; ++c) {
        for (std::size_t s = 0; s < nt; ++s)
            buf[s] = index_parity(g, s) ? -u.data[c * nt + s] : u.data[c * nt + s];
        execute(g, FFTW_BACKWARD, buf.data(), out.data.data() + c * nt);
    }
    return out;
}

SpectralField apply_multiplier(const SpectralField& u, const std::vector<cd>& symbol) {
    const std::size_t nt = u.grid.size();
    if (symbol.size() != nt) throw std::invalid_argument("apply_multiplier: symbol sample count mismatch");
    SpectralField out(u.grid, u.m);
    for (int c = 0; c < u.m; ++c)
        for (std::size_t s = 0; s < nt; ++s) out.data[c * nt + s] = symbol[s] * u.data[c * nt + s];
    return out;
}

SpectralField apply_multiplier(const SpectralField& u,
                               const std::function<cd(const std::array<double, 3>&)>& symbol) {
    return apply_multiplier(u, sample_symbol(u.grid, symbol));
}

std::vector<cd> sample_symbol(const GridSpec& g,
                              const std::function<cd(const std::array<double, 3>&)>& symbol) {
    std::vector<cd> out(g.size());
    for (std::size_t s = 0; s < out.size(); ++s) out[s] = symbol(g.xi(s));
    return out;
}

SpectralField apply_mode_map(const SpectralField& u,
                             const std::function<void(std::size_t, const cd*, cd*)>& map) {
    const std::size_t nt = u.grid.size();
    SpectralField out(u.grid, u.m);
    std::vector<cd> in(u.m), res(u.m);
    for (std::size_t s = 0; s < nt; ++s) {
        for (int c = 0; c < u.m; ++c) in[c] = u.data[c * nt + s];
        map(s, in.data(), res.data());
        for (int c = 0; c < u.m; ++c) out.data[c * nt + s] = res[c];
    }
    return out;
}

std::uint64_t fft_op_count() { return g_fft_count.load(std::memory_order_relaxed); }
void reset_fft_op_count() { g_fft_count.store(0, std::memory_order_relaxed); }

}  // namespace whs
