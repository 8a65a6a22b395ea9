#pragma once

#include "vesselstress/core/error.hpp"
#include "vesselstress/core/types.hpp"
#include "vesselstress/element/quadrature.hpp"
#include "vesselstress/mesh/mesh.hpp"

#include <array>
#include <cmath>
#include <span>

namespace vesselstress {

using ElementStiffness = Eigen::Matrix<double, 30, 30>;
using Barycentric = std::array<double, 4>;

/// P2 basis at barycentric point L: corners Li(2Li-1), midsides 4 Li Lj.
inline std::array<double, 10> tet10_shape(const Barycentric& L) {
    std::array<double, 10> N;
    for (int i = 0; i < 4; ++i) N[i] = L[i] * (2.0 * L[i] - 1.0);
    for (int e = 0; e < 6; ++e) N[4 + e] = 4.0 * L[tet::kEdges[e][0]] * L[tet::kEdges[e][1]];
    return N;
}

/// Derivatives of the basis with respect to reference coordinates (xi, eta, zeta),
/// where L1 = xi, L2 = eta, L3 = zeta and L0 = 1 - xi - eta - zeta.
inline std::array<Vec3, 10> tet10_reference_gradients(const Barycentric& L) {
    // dN/dL_k for k = 0..3, then chain rule dL_k/dxi_j.
    std::array<std::array<double, 4>, 10> dL{};
    for (int i = 0; i < 4; ++i) dL[i][i] = 4.0 * L[i] - 1.0;
    for (int e = 0; e < 6; ++e) {
        const int a = tet::kEdges[e][0], b = tet::kEdges[e][1];
        dL[4 + e][a] = 4.0 * L[b];
        dL[4 + e][b] = 4.0 * L[a];
    }
    std::array<Vec3, 10> g;
    for (int n = 0; n < 10; ++n)
        g[n] = Vec3(dL[n][1] - dL[n][0], dL[n][2] - dL[n][0], dL[n][3] - dL[n][0]);
    return g;
}

struct ShapeGradients {
    std::array<Vec3, 10> grad;  // spatial gradients
    double det_j = 0.0;
};

/// Spatial gradients of the isoparametric P2 basis at barycentric point L.
inline ShapeGradients tet10_shape_grad(const Barycentric& L, std::span<const Vec3, 10> x) {
    const auto ref = tet10_reference_gradients(L);
    Mat3 J = Mat3::Zero();  // J(a, b) = dx_a / dxi_b
    for (int n = 0; n < 10; ++n) J += x[n] * ref[n].transpose();

    const double det = J.determinant();
    double hmax = 0.0;
    for (const auto& [a, b] : tet::kEdges) hmax = std::max(hmax, (x[a] - x[b]).norm());
    if (!std::isfinite(det) || det <= 1e-12 * hmax * hmax * hmax)
        fail(ErrorCode::SingularJacobian, "det J = " + std::to_string(det));

    const Mat3 JinvT = J.inverse().transpose();
    ShapeGradients out;
    out.det_j = det;
    for (int n = 0; n < 10; ++n) out.grad[n] = JinvT * ref[n];
    return out;
}

/// Strain-displacement matrix (6 x 30) for engineering Voigt strains.
inline Eigen::Matrix<double, 6, 30> strain_displacement(const std::array<Vec3, 10>& grad) {
    Eigen::Matrix<double, 6, 30> B = Eigen::Matrix<double, 6, 30>::Zero();
    for (int n = 0; n < 10; ++n) {
        const double gx = grad[n].x(), gy = grad[n].y(), gz = grad[n].z();
        const int c = 3 * n;
        B(0, c) = gx;
        B(1, c + 1) = gy;
        B(2, c + 2) = gz;
        B(3, c) = gy;
        B(3, c + 1) = gx;
        B(4, c + 1) = gz;
        B(4, c + 2) = gy;
        B(5, c) = gz;
        B(5, c + 2) = gx;
    }
    return B;
}

/// K_e = sum_q w_q det J_q B^T D B. Local DOF 3*node + axis.
inline ElementStiffness element_stiffness(std::span<const Vec3, 10> x, const Mat6& D, const TetRule& rule) {
    ElementStiffness K = ElementStiffness::Zero();
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const auto sg = tet10_shape_grad(rule.points[q], x);
        const auto B = strain_displacement(sg.grad);
        const Eigen::Matrix<double, 6, 30> DB = D * B;
        K.noalias() += (rule.weights[q] * sg.det_j) * (B.transpose() * DB);
    }
    // Symmetrize exactly; the two triangles differ only by rounding.
    return 0.5 * (K + K.transpose());
}

/// Isoparametric element volume, integrated with the degree-5 rule.
inline double element_volume(std::span<const Vec3, 10> x) {
    const auto& rule = tet_rule_degree5();
    double v = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q)
        v += rule.weights[q] * tet10_shape_grad(rule.points[q], x).det_j;
    return v;
}

/// Element volume for either mesh order (straight tetrahedron for linear meshes).
inline double element_volume(const Mesh& mesh, std::size_t e) {
    if (mesh.order == MeshOrder::Linear) return vertex_volume(mesh, e);
    const auto x = mesh.element_coords(e);
    return element_volume(std::span<const Vec3, 10>(x));
}

inline double mesh_volume(const Mesh& mesh) {
    double v = 0.0;
    for (std::size_t e = 0; e < mesh.element_count(); ++e) v += element_volume(mesh, e);
    return v;
}

}  // namespace vesselstress
