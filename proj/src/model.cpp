#include "whs/model.hpp"

namespace whs {

Matc symbol_A(const SystemModel& mdl, double t, const Vec3& x, const Vec3& xi) {
    Matc out = Matc::Zero(mdl.m, mdl.m);
    for (int j = 0; j < mdl.d; ++j)
        if (xi[j] != 0.0) out += mdl.A_eval(j, t, x) * xi[j];
    return out;
}

Matc fd_partial(const std::function<Matc(const Vec3&)>& f, const Vec3& x, const Index3& alpha,
                double step) {
    int axis = -1;
    for (int k = 0; k < 3; ++k)
        if (alpha[k] > 0) { axis = k; break; }
    if (axis < 0) return f(x);
    Index3 rest = alpha;
    rest[axis] -= 1;
    auto g = [&](double offset) {
        Vec3 xs = x;
        xs[axis] += offset;
        return fd_partial(f, xs, rest, step);
    };
    // 4th-order central stencil
    return (g(-2.0 * step) - 8.0 * g(-step) + 8.0 * g(step) - g(2.0 * step)) / (12.0 * step);
}

Matc deriv_symbol_A(const SystemModel& mdl, double t, const Vec3& x, const Vec3& xi,
                    const Index3& alpha, double fd_step) {
    if (order_of(alpha) == 0) return symbol_A(mdl, t, x, xi);
    Matc out = Matc::Zero(mdl.m, mdl.m);
    if (mdl.A_deriv) {
        for (int j = 0; j < mdl.d; ++j)
            if (xi[j] != 0.0) out += mdl.A_deriv(j, t, x, alpha) * xi[j];
        return out;
    }
    if (!mdl.allow_fd)
        throw std::invalid_argument("deriv_symbol_A: no analytic derivative and finite differences disabled");
    for (int j = 0; j < mdl.d; ++j) {
        if (xi[j] == 0.0) continue;
        auto f = [&](const Vec3& xs) { return mdl.A_eval(j, t, xs); };
        // Richardson step from the 4th-order stencil: h and h/2 evaluations
        Matc coarse = fd_partial(f, x, alpha, fd_step);
        Matc fine = fd_partial(f, x, alpha, 0.5 * fd_step);
        out += (16.0 * fine - coarse) / 15.0 * xi[j];
    }
    return out;
}

CoeffFrame sample_coefficients(const SystemModel& mdl, double t, const GridSpec& g) {
    CoeffFrame fr;
    fr.t = t;
    fr.m = mdl.m;
    fr.d = mdl.d;
    fr.grid = g;
    const std::size_t nt = g.size();
    fr.A.assign(mdl.d, std::vector<cd>(nt * mdl.m * mdl.m));
    fr.B.assign(nt * mdl.m * mdl.m, cd(0.0));
    for (std::size_t i = 0; i < nt; ++i) {
        const Vec3 x = g.x(i);
        for (int j = 0; j < mdl.d; ++j) {
            Matc a = mdl.A_eval(j, t, x);
            for (int r = 0; r < mdl.m; ++r)
                for (int c = 0; c < mdl.m; ++c) fr.A[j][(i * mdl.m + r) * mdl.m + c] = a(r, c);
        }
        Matc b = mdl.B_eval(t, x);
        for (int r = 0; r < mdl.m; ++r)
            for (int c = 0; c < mdl.m; ++c) fr.B[(i * mdl.m + r) * mdl.m + c] = b(r, c);
    }
    return fr;
}

}  // namespace whs
