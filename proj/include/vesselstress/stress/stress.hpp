#pragma once

#include "vesselstress/core/error.hpp"
#include "vesselstress/core/parallel.hpp"
#include "vesselstress/core/types.hpp"
#include "vesselstress/element/material.hpp"
#include "vesselstress/element/tet10.hpp"
#include "vesselstress/mesh/mesh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace vesselstress {

/// Nodal Cauchy stress in Voigt order (xx, yy, zz, xy, yz, zx), MPa.
struct StressTensorField {
    std::vector<Voigt6> values;
};

struct ScalarField {
    std::string name;
    std::vector<double> values;
};

/// Nodal stress from the displacement field: sigma = D sym(grad u) at each
/// element's ten nodes, averaged over the elements sharing a node with
/// element volumes as weights. u is the full vector, 3 entries per node.
inline StressTensorField recover_stress(const Mesh& mesh, std::span<const double> u, const ElasticMaterial& material,
                                        int threads = 1) {
    if (mesh.order != MeshOrder::Quadratic) fail(ErrorCode::ConfigInvalid, "stress recovery needs a quadratic mesh");
    if (u.size() != 3 * mesh.nodes.size()) fail(ErrorCode::ConfigInvalid, "displacement length does not match mesh");

    const std::size_t nn = mesh.nodes.size();
    const std::size_t ne = mesh.elements.size();
    std::vector<Voigt6> sum(nn, Voigt6::Zero());
    std::vector<double> weight(nn, 0.0);

    constexpr std::size_t kChunk = 4096;
    struct Staged {
        double volume;
        std::array<Voigt6, 10> sigma;
    };
    std::vector<Staged> staged;
    for (std::size_t base = 0; base < ne; base += kChunk) {
        const std::size_t count = std::min(kChunk, ne - base);
        staged.resize(count);
        parallel_ranges(count, threads, [&](std::size_t lo, std::size_t hi, int) {
            for (std::size_t k = lo; k < hi; ++k) {
                const std::size_t e = base + k;
                const auto x = mesh.element_coords(e);
                Eigen::Matrix<double, 30, 1> ue;
                for (int i = 0; i < 10; ++i)
                    for (int a = 0; a < 3; ++a) ue[3 * i + a] = u[3 * static_cast<std::size_t>(mesh.elements[e][i]) + a];
                try {
                    staged[k].volume = element_volume(x);
                    for (int i = 0; i < 10; ++i) {
                        const auto sg = tet10_shape_grad(tet::kNodeBarycentric[i], x);
                        staged[k].sigma[i] = material.D * (strain_displacement(sg.grad) * ue);
                    }
                } catch (const Error& err) {
                    throw Error(err.code(), "element " + std::to_string(e) + ": " + err.detail());
                }
            }
        });
        for (std::size_t k = 0; k < count; ++k) {
            const auto& el = mesh.elements[base + k];
            for (int i = 0; i < 10; ++i) {
                sum[el[i]] += staged[k].volume * staged[k].sigma[i];
                weight[el[i]] += staged[k].volume;
            }
        }
    }

    StressTensorField out;
    out.values.resize(nn);
    for (std::size_t n = 0; n < nn; ++n) out.values[n] = weight[n] > 0.0 ? Voigt6(sum[n] / weight[n]) : Voigt6::Zero();
    return out;
}

/// Eigenvalues s1 >= s2 >= s3 of a symmetric tensor.
///
/// The trigonometric closed form locates the root farthest from the other
/// two. Its eigenvector is taken from cross products of the rows of
/// (A - lambda I) and the remaining pair comes from the 2x2 block of A in
/// the orthogonal complement. Close pairs are resolved to roundoff, which
/// the closed form alone does not do.
inline std::array<double, 3> principal_stresses(const Voigt6& s) {
    const double scale = s.cwiseAbs().maxCoeff();
    if (!(scale > 0.0)) return {0.0, 0.0, 0.0};
    const Mat3 A = voigt_to_matrix(s / scale);

    const double m = A.trace() / 3.0;
    const Mat3 B = A - m * Mat3::Identity();
    const double p = B.squaredNorm() / 6.0;
    if (p <= 0.0) return {scale * m, scale * m, scale * m};
    const double sp = std::sqrt(p);
    const double arg = std::clamp(B.determinant() / (2.0 * p * sp), -1.0, 1.0);
    const double phi = std::acos(arg) / 3.0;
    const double hi = 2.0 * sp * std::cos(phi);
    const double lo = 2.0 * sp * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
    const double mid = -hi - lo;
    const double isolated = (hi - mid >= mid - lo) ? hi : lo;

    const Mat3 C = B - isolated * Mat3::Identity();
    const std::array<Vec3, 3> cand{C.row(0).cross(C.row(1)), C.row(0).cross(C.row(2)), C.row(1).cross(C.row(2))};
    Vec3 v = cand[0];
    for (const Vec3& c : cand)
        if (c.squaredNorm() > v.squaredNorm()) v = c;
    if (!(v.squaredNorm() > 0.0)) v = Vec3::UnitX();
    v.normalize();

    // Orthonormal complement of v.
    const Vec3 t = std::abs(v.x()) > std::abs(v.y()) ? Vec3(-v.z(), 0.0, v.x()) : Vec3(0.0, v.z(), -v.y());
    const Vec3 u = t.normalized();
    const Vec3 w = v.cross(u);

    const double l1 = v.dot(A * v);
    const double a = u.dot(A * u), b = u.dot(A * w), d = w.dot(A * w);
    const double centre = 0.5 * (a + d);
    const double radius = std::hypot(0.5 * (a - d), b);
    std::array<double, 3> out{scale * l1, scale * (centre + radius), scale * (centre - radius)};
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

inline double von_mises(const Voigt6& s) {
    const double dxy = s[0] - s[1], dyz = s[1] - s[2], dzx = s[2] - s[0];
    return std::sqrt(0.5 * (dxy * dxy + dyz * dyz + dzx * dzx) + 3.0 * (s[3] * s[3] + s[4] * s[4] + s[5] * s[5]));
}

inline ScalarField max_principal_field(const StressTensorField& f) {
    ScalarField out{"MPS", {}};
    out.values.reserve(f.values.size());
    for (const auto& s : f.values) out.values.push_back(principal_stresses(s)[0]);
    return out;
}

inline ScalarField von_mises_field(const StressTensorField& f) {
    ScalarField out{"vonMises", {}};
    out.values.reserve(f.values.size());
    for (const auto& s : f.values) out.values.push_back(von_mises(s));
    return out;
}

/// Field values at the patch nodes, in ascending node order.
inline std::vector<double> restrict_to_patch(const ScalarField& field, const SurfacePatch& patch) {
    if (patch.faces.empty() || patch.node_set.empty())
        fail(ErrorCode::EmptyPatch, to_string(patch.kind) + " patch has no faces");
    std::vector<NodeId> nodes = patch.node_set;
    std::sort(nodes.begin(), nodes.end());
    std::vector<double> out;
    out.reserve(nodes.size());
    for (NodeId n : nodes) {
        if (n < 0 || static_cast<std::size_t>(n) >= field.values.size())
            fail(ErrorCode::EmptyPatch, "patch node " + std::to_string(n) + " outside the field");
        out.push_back(field.values[n]);
    }
    return out;
}

}  // namespace vesselstress
