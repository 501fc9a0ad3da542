#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <string>

#include "whs/grid.hpp"

namespace whs {

using Matc = Eigen::MatrixXcd;

using Index3 = std::array<int, 3>;     // multi-index over x, only first d entries used
using Vec3 = std::array<double, 3>;

inline int order_of(const Index3& a) { return a[0] + a[1] + a[2]; }

/// First-order m x m system: coefficients A_j(t,x), B(t,x), constant in x
/// outside |x| <= support_radius. theta is the declared regularity integer;
/// gevrey_index is unchecked metadata for the coefficient class.
struct SystemModel {
    int m = 1;
    int d = 1;
    double support_radius = 0.0;
    int theta = 0;
    double gevrey_index = 2.0;

    std::function<Matc(int j, double t, const Vec3& x)> A_eval;
    std::function<Matc(double t, const Vec3& x)> B_eval;

    /// Analytic partial_x^alpha A_j; optional. When absent, callers fall back
    /// to finite differences if allow_fd is set.
    std::function<Matc(int j, double t, const Vec3& x, const Index3& alpha)> A_deriv;
    bool allow_fd = true;
};

/// A(t,x,xi) = sum_j A_j(t,x) xi_j
Matc symbol_A(const SystemModel& mdl, double t, const Vec3& x, const Vec3& xi);

/// partial_x^alpha of A(t,x,xi); analytic when the model provides it,
/// otherwise 4th-order central differences with the given step.
Matc deriv_symbol_A(const SystemModel& mdl, double t, const Vec3& x, const Vec3& xi,
                    const Index3& alpha, double fd_step = 1e-2);

/// 4th-order central finite difference of a matrix function along one axis,
/// composed recursively over the multi-index.
Matc fd_partial(const std::function<Matc(const Vec3&)>& f, const Vec3& x, const Index3& alpha,
                double step);

/// Coefficients of one time slice sampled on the grid nodes, node-major then
/// row-major m x m. Caches the per-step coefficient evaluations.
struct CoeffFrame {
    double t = 0.0;
    int m = 1;
    int d = 1;
    GridSpec grid;
    std::vector<std::vector<cd>> A;  // [j][ (node*m + r)*m + c ]
    std::vector<cd> B;

    const cd* A_at(int j, std::size_t node) const { return A[j].data() + node * m * m; }
    const cd* B_at(std::size_t node) const { return B.data() + node * m * m; }
};

CoeffFrame sample_coefficients(const SystemModel& mdl, double t, const GridSpec& g);

}  // namespace whs
