#include "whs/problems.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

#include "whs/fft.hpp"

namespace whs {

namespace {

// Truncated Taylor jet for the bump's analytic x-derivatives.
constexpr int kJetOrder = 8;

struct Jet {
    std::array<double, kJetOrder + 1> c{};  // Taylor coefficients f^(k)/k!

    static Jet variable(double x) {
        Jet j;
        j.c[0] = x;
        j.c[1] = 1.0;
        return j;
    }
    static Jet constant(double v) {
        Jet j;
        j.c[0] = v;
        return j;
    }
};

Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    for (int k = 0; k <= kJetOrder; ++k)
        for (int i = 0; i <= k; ++i) r.c[k] += a.c[i] * b.c[k - i];
    return r;
}

Jet operator-(const Jet& a, const Jet& b) {
    Jet r;
    for (int k = 0; k <= kJetOrder; ++k) r.c[k] = a.c[k] - b.c[k];
    return r;
}

Jet recip(const Jet& b) {
    Jet r;
    r.c[0] = 1.0 / b.c[0];
    for (int k = 1; k <= kJetOrder; ++k) {
        double acc = 0.0;
        for (int j = 1; j <= k; ++j) acc += b.c[j] * r.c[k - j];
        r.c[k] = -acc / b.c[0];
    }
    return r;
}

Jet exp(const Jet& a) {
    Jet r;
    r.c[0] = std::exp(a.c[0]);
    for (int k = 1; k <= kJetOrder; ++k) {
        double acc = 0.0;
        for (int j = 1; j <= k; ++j) acc += j * a.c[j] * r.c[k - j];
        r.c[k] = acc / k;
    }
    return r;
}

constexpr double kBumpAmp = 0.35;
constexpr double kBumpRadius = 1.0;

Jet bump_jet(double x) {
    if (std::abs(x) >= kBumpRadius * (1.0 - 1e-12)) return Jet();  // identically zero outside
    Jet u = Jet::variable(x / kBumpRadius);
    u.c[1] = 1.0 / kBumpRadius;
    Jet s = Jet::constant(1.0) - u * u;
    Jet g = Jet::constant(1.0) - recip(s);
    Jet f = exp(g);
    for (double& v : f.c) v *= kBumpAmp;
    return f;
}

double factorial_d(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

Matc mat2(cd a00, cd a01, cd a10, cd a11) {
    Matc m(2, 2);
    m << a00, a01, a10, a11;
    return m;
}

}  // namespace

double bump_psi(double x, int derivative) {
    if (derivative > kJetOrder) throw std::invalid_argument("bump_psi: derivative order too high");
    return bump_jet(x).c[derivative] * factorial_d(derivative);
}

SpectralField default_gaussian_data(const GridSpec& g, int m, double width) {
    SpectralField u(g, m);
    const std::size_t nt = g.size();
    for (int c = 0; c < m; ++c) {
        const double amp = 1.0 / (1.0 + 0.5 * c);
        for (std::size_t s = 0; s < nt; ++s) {
            const auto xi = g.xi(s);
            const double r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
            const double env = amp * std::exp(-r2 / (2.0 * width * width));
            u.data[c * nt + s] =
                env * cd(std::cos(0.7 * (c + 1) * xi[0]), 0.4 * std::sin(0.3 * xi[0] + 0.2 * c));
        }
    }
    const double nrm = l2_norm(u);
    for (cd& z : u.data) z /= nrm;
    return u;
}

SpectralField exact_constant_coeff(const SystemModel& mdl, const SpectralField& g, double t) {
    const Vec3 origin{0.0, 0.0, 0.0};
    std::vector<Matc> Aj(mdl.d);
    for (int j = 0; j < mdl.d; ++j) Aj[j] = mdl.A_eval(j, 0.0, origin);
    const Matc B = mdl.B_eval(0.0, origin);
    return apply_mode_map(g, [&](std::size_t s, const cd* in, cd* out) {
        const auto xi = g.grid.xi(s);
        Matc M = B;
        for (int j = 0; j < mdl.d; ++j) M += cd(0.0, xi[j]) * Aj[j];
        Matc E = (t * M).exp();
        for (int r = 0; r < mdl.m; ++r) {
            cd acc = 0.0;
            for (int c = 0; c < mdl.m; ++c) acc += E(r, c) * in[c];
            out[r] = acc;
        }
    });
}

ForcingSampler make_cos_forcing_sampler(const CosForcing& f) {
    return [f](double t) {
        SpectralField out = f.zeta;
        const double c = std::cos(f.omega * t);
        for (cd& z : out.data) z *= c;
        return out;
    };
}

SpectralField exact_constant_coeff_forced(const SystemModel& mdl, const SpectralField& g, double t,
                                          const CosForcing& f) {
    const Vec3 origin{0.0, 0.0, 0.0};
    std::vector<Matc> Aj(mdl.d);
    for (int j = 0; j < mdl.d; ++j) Aj[j] = mdl.A_eval(j, 0.0, origin);
    const Matc B = mdl.B_eval(0.0, origin);
    const int m = mdl.m;
    const Matc I = Matc::Identity(m, m);
    SpectralField out(g.grid, m);
    const std::size_t nt = g.grid.size();
    for (std::size_t s = 0; s < nt; ++s) {
        const auto xi = g.grid.xi(s);
        Matc M = B;
        for (int j = 0; j < mdl.d; ++j) M += cd(0.0, xi[j]) * Aj[j];
        const Matc E = (t * M).exp();
        // Duhamel integral of cos(w s): (1/2) sum_{lam = +-iw} (M-lam)^-1 (e^{tM} - e^{lam t})
        Matc D = Matc::Zero(m, m);
        for (int sign : {+1, -1}) {
            const cd lam(0.0, sign * f.omega);
            D += (M - lam * I).fullPivLu().solve(E - std::exp(lam * t) * I);
        }
        D *= 0.5;
        for (int r = 0; r < m; ++r) {
            cd acc = 0.0;
            for (int c = 0; c < m; ++c)
                acc += E(r, c) * g.data[c * nt + s] + D(r, c) * f.zeta.data[c * nt + s];
            out.data[r * nt + s] = acc;
        }
    }
    return out;
}

ProblemPreset preset_jordan() {
    ProblemPreset p;
    p.name = "jordan";
    p.description = "m=2 Jordan block, A1=[[0,1],[0,0]], B=0, theta=1";
    p.constant_coeff = true;
    SystemModel& mdl = p.model;
    mdl.m = 2;
    mdl.d = 1;
    mdl.support_radius = 0.0;
    mdl.theta = 1;
    mdl.gevrey_index = 8.0 / 7.0;
    mdl.A_eval = [](int, double, const Vec3&) { return mat2(0, 1, 0, 0); };
    mdl.B_eval = [](double, const Vec3&) { return Matc::Zero(2, 2); };
    mdl.A_deriv = [](int, double, const Vec3&, const Index3&) { return Matc::Zero(2, 2); };
    p.default_g = [](const GridSpec& g) { return default_gaussian_data(g, 2); };
    SystemModel mcopy = mdl;
    p.exact = [mcopy](const SpectralField& g, double t) {
        return exact_constant_coeff(mcopy, g, t);
    };
    return p;
}

ProblemPreset preset_degenerate_wave(std::function<double(double)> a_profile,
                                     const std::string& tag, int theta) {
    ProblemPreset p;
    p.name = "degwave:a=" + tag;
    p.description = "first-order reduction of u_tt = a(t) u_xx, A1=[[0,a(t)],[1,0]]";
    SystemModel& mdl = p.model;
    mdl.m = 2;
    mdl.d = 1;
    mdl.support_radius = 0.0;
    mdl.theta = theta;
    mdl.gevrey_index = 2.0;
    mdl.A_eval = [a_profile](int, double t, const Vec3&) {
        const double a = a_profile(t);
        if (a < 0.0) throw Error(ErrorKind::bad_input, "degwave: a(t) < 0 at t = " + std::to_string(t));
        return mat2(0, a, 1, 0);
    };
    mdl.B_eval = [](double, const Vec3&) { return Matc::Zero(2, 2); };
    mdl.A_deriv = [](int, double, const Vec3&, const Index3&) { return Matc::Zero(2, 2); };
    p.default_g = [](const GridSpec& g) { return default_gaussian_data(g, 2); };
    // a constant in t => genuinely constant coefficients
    if (tag == "1") {
        p.constant_coeff = true;
        SystemModel mcopy = mdl;
        p.exact = [mcopy](const SpectralField& g, double t) {
            return exact_constant_coeff(mcopy, g, t);
        };
    }
    return p;
}

ProblemPreset preset_variable_smooth() {
    ProblemPreset p;
    p.name = "varsmooth";
    p.description = "strictly hyperbolic variable-coefficient model, theta=0";
    SystemModel& mdl = p.model;
    mdl.m = 2;
    mdl.d = 1;
    mdl.support_radius = kBumpRadius;
    mdl.theta = 0;
    mdl.gevrey_index = 2.0;
    // A1 = Q diag(1,-1) Q^-1 with Q = I + psi S collapses to [[1,-2psi],[0,-1]]
    mdl.A_eval = [](int, double, const Vec3& x) {
        return mat2(1.0, -2.0 * bump_psi(x[0]), 0.0, -1.0);
    };
    mdl.B_eval = [](double t, const Vec3& x) {
        const double amp = bump_psi(x[0]) * (0.3 + 0.2 * std::cos(t));
        return mat2(0.2 * amp, 0.1 * amp, 0.0, -0.1 * amp);
    };
    mdl.A_deriv = [](int, double, const Vec3& x, const Index3& alpha) {
        return mat2(0.0, -2.0 * bump_psi(x[0], alpha[0]), 0.0, 0.0);
    };
    p.default_g = [](const GridSpec& g) { return default_gaussian_data(g, 2, 2.0); };
    return p;
}

ProblemPreset preset_sym2d() {
    ProblemPreset p;
    p.name = "sym2d";
    p.description = "constant symmetric 2-d model, A1=diag(1,-1), A2=[[0,1],[1,0]]";
    p.constant_coeff = true;
    SystemModel& mdl = p.model;
    mdl.m = 2;
    mdl.d = 2;
    mdl.support_radius = 0.0;
    mdl.theta = 0;
    mdl.gevrey_index = 2.0;
    mdl.A_eval = [](int j, double, const Vec3&) {
        return j == 0 ? mat2(1, 0, 0, -1) : mat2(0, 1, 1, 0);
    };
    mdl.B_eval = [](double, const Vec3&) { return Matc::Zero(2, 2); };
    mdl.A_deriv = [](int, double, const Vec3&, const Index3&) { return Matc::Zero(2, 2); };
    p.default_g = [](const GridSpec& g) { return default_gaussian_data(g, 2); };
    SystemModel mcopy = mdl;
    p.exact = [mcopy](const SpectralField& g, double t) {
        return exact_constant_coeff(mcopy, g, t);
    };
    return p;
}

ProblemPreset preset_zero() {
    ProblemPreset p;
    p.name = "zero";
    p.description = "G = 0; trajectories constant in time";
    p.constant_coeff = true;
    SystemModel& mdl = p.model;
    mdl.m = 1;
    mdl.d = 1;
    mdl.support_radius = 0.0;
    mdl.theta = 0;
    mdl.A_eval = [](int, double, const Vec3&) { return Matc::Zero(1, 1); };
    mdl.B_eval = [](double, const Vec3&) { return Matc::Zero(1, 1); };
    mdl.A_deriv = [](int, double, const Vec3&, const Index3&) { return Matc::Zero(1, 1); };
    // band-limited data: inside the chi_2h plateau for every h <= 1/2, so the
    // trajectory reproduces g to solver precision
    p.default_g = [](const GridSpec& g) {
        SpectralField u(g, 1);
        for (std::size_t s = 0; s < g.size(); ++s) {
            const double r = g.xi_norm(s);
            if (r <= 2.0) u.at(0, s) = std::exp(-r * r) * cd(1.0, 0.3);
        }
        const double nrm = l2_norm(u);
        for (cd& z : u.data) z /= nrm;
        return u;
    };
    p.exact = [](const SpectralField& g, double) { return g; };
    return p;
}

ProblemPreset preset_by_name(const std::string& name) {
    if (name == "jordan") return preset_jordan();
    if (name == "degwave:a=t2")
        return preset_degenerate_wave([](double t) { return t * t; }, "t2", 1);
    if (name == "degwave:a=1")
        return preset_degenerate_wave([](double) { return 1.0; }, "1", 0);
    if (name == "varsmooth") return preset_variable_smooth();
    if (name == "sym2d") return preset_sym2d();
    if (name == "zero") return preset_zero();
    throw Error(ErrorKind::bad_input, "unknown model name: " + name);
}

std::vector<std::string> preset_names() {
    return {"jordan", "degwave:a=t2", "degwave:a=1", "varsmooth", "sym2d", "zero"};
}

}  // namespace whs
