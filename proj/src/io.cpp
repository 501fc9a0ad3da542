#include "whs/io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include "whs/errors.hpp"
#include "whs/fft.hpp"

namespace whs {

namespace {

void write_header_and_payload(const std::string& path, const GridSpec& g, int m, const char* repr,
                              const std::vector<cd>& data) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorKind::bad_input, "cannot open for writing: " + path);
    os << "WHS1 " << g.d << ' ' << g.n << ' ' << csv_num(g.L) << ' ' << m << ' ' << repr << '\n';
    // doubles are written natively; the format is little-endian by definition
    // and this code targets little-endian hosts
    for (const cd& z : data) {
        const double re = z.real(), im = z.imag();
        os.write(reinterpret_cast<const char*>(&re), sizeof(double));
        os.write(reinterpret_cast<const char*>(&im), sizeof(double));
    }
    if (!os) throw Error(ErrorKind::bad_input, "write failed: " + path);
}

struct Header {
    GridSpec grid;
    int m = 1;
    std::string repr;
};

Header read_header(std::istream& is, const std::string& path) {
    std::string line;
    if (!std::getline(is, line)) throw Error(ErrorKind::bad_input, "empty dump file: " + path);
    std::istringstream ls(line);
    std::string magic;
    Header h;
    double L = 0.0;
    int d = 0, n = 0;
    ls >> magic >> d >> n >> L >> h.m >> h.repr;
    if (!ls || magic != "WHS1") throw Error(ErrorKind::bad_input, "bad dump header: " + path);
    h.grid = make_grid(d, n, L);
    return h;
}

std::vector<cd> read_payload(std::istream& is, std::size_t count, const std::string& path) {
    std::vector<cd> data(count);
    for (cd& z : data) {
        double re = 0.0, im = 0.0;
        is.read(reinterpret_cast<char*>(&re), sizeof(double));
        is.read(reinterpret_cast<char*>(&im), sizeof(double));
        if (!is) throw Error(ErrorKind::bad_input, "truncated dump payload: " + path);
        z = cd(re, im);
    }
    return data;
}

}  // namespace

void write_field(const std::string& path, const SpectralField& u) {
    write_header_and_payload(path, u.grid, u.m, "spec", u.data);
}

void write_field(const std::string& path, const PhysicalField& u) {
    write_header_and_payload(path, u.grid, u.m, "phys", u.data);
}

SpectralField read_spectral_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorKind::bad_input, "cannot open: " + path);
    Header h = read_header(is, path);
    if (h.repr != "spec") throw Error(ErrorKind::bad_input, "expected spec dump: " + path);
    SpectralField u(h.grid, h.m);
    u.data = read_payload(is, u.data.size(), path);
    return u;
}

PhysicalField read_physical_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorKind::bad_input, "cannot open: " + path);
    Header h = read_header(is, path);
    if (h.repr != "phys") throw Error(ErrorKind::bad_input, "expected phys dump: " + path);
    PhysicalField u(h.grid, h.m);
    u.data = read_payload(is, u.data.size(), path);
    return u;
}

void write_coefficient_table(const std::string& path, const SystemModel& mdl, const GridSpec& g,
                             double t0, double dt, int n_time) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorKind::bad_input, "cannot open for writing: " + path);
    os << "WHSCOEF1 " << g.d << ' ' << g.n << ' ' << csv_num(g.L) << ' ' << mdl.m << ' ' << n_time
       << ' ' << csv_num(t0) << ' ' << csv_num(dt) << '\n';
    const std::size_t nt = g.size();
    auto write_entry_field = [&](const std::function<cd(const Vec3&)>& f) {
        for (std::size_t i = 0; i < nt; ++i) {
            const cd z = f(g.x(i));
            const double re = z.real(), im = z.imag();
            os.write(reinterpret_cast<const char*>(&re), sizeof(double));
            os.write(reinterpret_cast<const char*>(&im), sizeof(double));
        }
    };
    for (int it = 0; it < n_time; ++it) {
        const double t = t0 + it * dt;
        for (int j = 0; j < mdl.d; ++j)
            for (int r = 0; r < mdl.m; ++r)
                for (int c = 0; c < mdl.m; ++c)
                    write_entry_field([&](const Vec3& x) { return mdl.A_eval(j, t, x)(r, c); });
        for (int r = 0; r < mdl.m; ++r)
            for (int c = 0; c < mdl.m; ++c)
                write_entry_field([&](const Vec3& x) { return mdl.B_eval(t, x)(r, c); });
    }
    if (!os) throw Error(ErrorKind::bad_input, "write failed: " + path);
}

namespace {

// One matrix entry sampled per time node, held spectrally so that arbitrary-x
// evaluation and x-derivatives come from the trig series.
struct TableData {
    GridSpec grid;
    int m = 1, d = 1, n_time = 1;
    double t0 = 0.0, dt = 1.0;
    // [time][j (d = B)][r*m+c] -> spectral coefficients
    std::vector<std::vector<std::vector<std::vector<cd>>>> coef;

    cd eval(int slot, int r, int c, double t, const Vec3& x, const Index3& alpha) const {
        // clamped linear interpolation in t
        double pos = n_time > 1 ? (t - t0) / dt : 0.0;
        pos = std::clamp(pos, 0.0, static_cast<double>(n_time - 1));
        const int i0 = std::min(static_cast<int>(pos), n_time - 2 >= 0 ? n_time - 2 : 0);
        const double w1 = n_time > 1 ? pos - i0 : 0.0;
        auto sum_at = [&](int it) {
            const std::vector<cd>& ch = coef[it][slot][r * m + c];
            cd acc = 0.0;
            for (std::size_t s = 0; s < ch.size(); ++s) {
                if (ch[s] == cd(0.0)) continue;
                const auto xi = grid.xi(s);
                cd factor = 1.0;
                double phase = 0.0;
                for (int k = 0; k < d; ++k) {
                    phase += xi[k] * x[k];
                    for (int a = 0; a < alpha[k]; ++a) factor *= cd(0.0, xi[k]);
                }
                acc += ch[s] * factor * std::polar(1.0, phase);
            }
            return acc;
        };
        cd v = sum_at(i0);
        if (w1 > 0.0) v = (1.0 - w1) * v + w1 * sum_at(i0 + 1);
        return v;
    }
};

}  // namespace

SystemModel read_coefficient_table(const std::string& path, int theta) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorKind::bad_input, "cannot open: " + path);
    std::string line;
    if (!std::getline(is, line)) throw Error(ErrorKind::bad_input, "empty table file: " + path);
    std::istringstream ls(line);
    std::string magic;
    int d = 0, n = 0, m = 0, n_time = 0;
    double L = 0.0, t0 = 0.0, dt = 0.0;
    ls >> magic >> d >> n >> L >> m >> n_time >> t0 >> dt;
    if (!ls || magic != "WHSCOEF1") throw Error(ErrorKind::bad_input, "bad table header: " + path);

    auto td = std::make_shared<TableData>();
    td->grid = make_grid(d, n, L);
    td->m = m;
    td->d = d;
    td->n_time = n_time;
    td->t0 = t0;
    td->dt = dt;
    const std::size_t nt = td->grid.size();

    td->coef.resize(n_time);
    for (int it = 0; it < n_time; ++it) {
        td->coef[it].resize(d + 1);
        for (int slot = 0; slot <= d; ++slot) {
            td->coef[it][slot].resize(m * m);
            for (int e = 0; e < m * m; ++e) {
                PhysicalField f(td->grid, 1);
                f.data = read_payload(is, nt, path);
                td->coef[it][slot][e] = forward_transform(f).data;
            }
        }
    }

    SystemModel mdl;
    mdl.m = m;
    mdl.d = d;
    mdl.theta = theta;
    mdl.support_radius = L;  // unknown; the whole torus is the compact set
    mdl.A_eval = [td](int j, double t, const Vec3& x) {
        Matc a(td->m, td->m);
        for (int r = 0; r < td->m; ++r)
            for (int c = 0; c < td->m; ++c) a(r, c) = td->eval(j, r, c, t, x, Index3{0, 0, 0});
        return a;
    };
    mdl.B_eval = [td](double t, const Vec3& x) {
        Matc b(td->m, td->m);
        for (int r = 0; r < td->m; ++r)
            for (int c = 0; c < td->m; ++c) b(r, c) = td->eval(td->d, r, c, t, x, Index3{0, 0, 0});
        return b;
    };
    mdl.A_deriv = [td](int j, double t, const Vec3& x, const Index3& alpha) {
        Matc a(td->m, td->m);
        for (int r = 0; r < td->m; ++r)
            for (int c = 0; c < td->m; ++c) a(r, c) = td->eval(j, r, c, t, x, alpha);
        return a;
    };
    return mdl;
}

std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace whs
