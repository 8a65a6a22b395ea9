#pragma once

#include "vesselstress/core/error.hpp"
#include "vesselstress/core/types.hpp"
#include "vesselstress/element/quadrature.hpp"

#include <array>
#include <cmath>
#include <span>

namespace vesselstress {

/// Six-node triangle: corners 0-2, midsides (0,1), (1,2), (2,0).
namespace tri6 {

inline constexpr std::array<std::array<int, 2>, 3> kEdges{{{0, 1}, {1, 2}, {2, 0}}};

inline std::array<double, 6> shape(const std::array<double, 3>& L) {
    std::array<double, 6> N;
    for (int i = 0; i < 3; ++i) N[i] = L[i] * (2.0 * L[i] - 1.0);
    for (int e = 0; e < 3; ++e) N[3 + e] = 4.0 * L[kEdges[e][0]] * L[kEdges[e][1]];
    return N;
}

/// Surface tangents (dx/ds, dx/dt) with L1 = s, L2 = t, L0 = 1 - s - t.
inline std::pair<Vec3, Vec3> tangents(const std::array<double, 3>& L, std::span<const Vec3, 6> x) {
    std::array<std::array<double, 3>, 6> dL{};
    for (int i = 0; i < 3; ++i) dL[i][i] = 4.0 * L[i] - 1.0;
    for (int e = 0; e < 3; ++e) {
        const int a = kEdges[e][0], b = kEdges[e][1];
        dL[3 + e][a] = 4.0 * L[b];
        dL[3 + e][b] = 4.0 * L[a];
    }
    Vec3 ts = Vec3::Zero(), tt = Vec3::Zero();
    for (int n = 0; n < 6; ++n) {
        ts += (dL[n][1] - dL[n][0]) * x[n];
        tt += (dL[n][2] - dL[n][0]) * x[n];
    }
    return {ts, tt};
}

inline Vec3 point(const std::array<double, 3>& L, std::span<const Vec3, 6> x) {
    const auto N = shape(L);
    Vec3 p = Vec3::Zero();
    for (int n = 0; n < 6; ++n) p += N[n] * x[n];
    return p;
}

/// Area of the curved face.
inline double area(std::span<const Vec3, 6> x) {
    const auto& rule = tri_rule_degree5();
    double a = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        auto [ts, tt] = tangents(rule.points[q], x);
        a += rule.weights[q] * ts.cross(tt).norm();
    }
    return a;
}

}  // namespace tri6

using FaceLoad = Eigen::Matrix<double, 18, 1>;

/// Consistent nodal load of uniform pressure p on a six-node face,
/// f_i = -p * integral(N_i n dA), n the outward normal given by the node order.
inline FaceLoad face_pressure_load(std::span<const Vec3, 6> x, double p) {
    const auto& rule = tri_rule_degree5();
    double scale = 0.0;
    for (int i = 1; i < 3; ++i) scale = std::max(scale, (x[i] - x[0]).squaredNorm());

    FaceLoad f = FaceLoad::Zero();
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const auto& L = rule.points[q];
        auto [ts, tt] = tri6::tangents(L, x);
        const Vec3 nda = ts.cross(tt);  // outward normal times area Jacobian
        if (!(nda.norm() > 1e-12 * scale)) fail(ErrorCode::DegenerateFace);
        const auto N = tri6::shape(L);
        for (int n = 0; n < 6; ++n) f.segment<3>(3 * n) += (rule.weights[q] * N[n]) * nda;
    }
    return -p * f;
}

}  // namespace vesselstress
