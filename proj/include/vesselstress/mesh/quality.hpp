#pragma once

#include "vesselstress/element/tet10.hpp"
#include "vesselstress/mesh/boundary.hpp"
#include "vesselstress/mesh/mesh.hpp"

#include <algorithm>
#include <limits>

namespace vesselstress {

/// Normalized radius ratio 3 r_in / r_circ of the vertex tetrahedron:
/// 1 for the regular tetrahedron, 0 for flat or inverted ones.
inline double tet_quality(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3) {
    const Vec3 a = p1 - p0, b = p2 - p0, c = p3 - p0;
    const double six_v = a.dot(b.cross(c));
    const double area = 0.5 * ((p1 - p0).cross(p2 - p0).norm() + (p1 - p0).cross(p3 - p0).norm() +
                               (p2 - p0).cross(p3 - p0).norm() + (p2 - p1).cross(p3 - p1).norm());
    const double scale = std::max({a.squaredNorm(), b.squaredNorm(), c.squaredNorm()});
    if (!(six_v > 1e-14 * scale * std::sqrt(scale)) || area <= 0.0) return 0.0;
    const double r_in = 0.5 * six_v / area;  // 3V / A
    const Vec3 num = a.squaredNorm() * b.cross(c) + b.squaredNorm() * c.cross(a) + c.squaredNorm() * a.cross(b);
    const double r_circ = num.norm() / (2.0 * six_v);
    return std::clamp(3.0 * r_in / r_circ, 0.0, 1.0);
}

/// Degenerate elements are reported with quality 0, never thrown.
inline MeshQualityReport mesh_quality(const Mesh& mesh) {
    MeshQualityReport r;
    r.element_count = mesh.element_count();
    r.node_count = mesh.node_count();
    r.wall_layers = mesh.wall_layers;
    if (mesh.elements.empty()) return r;

    r.min_volume = std::numeric_limits<double>::infinity();
    r.max_volume = -std::numeric_limits<double>::infinity();
    r.min_quality = 1.0;
    double sum = 0.0;
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const auto& el = mesh.elements[e];
        double v;
        try {
            v = element_volume(mesh, e);
        } catch (const Error&) {
            v = vertex_volume(mesh, e);
        }
        r.min_volume = std::min(r.min_volume, v);
        r.max_volume = std::max(r.max_volume, v);
        sum += v;
        r.min_quality = std::min(
            r.min_quality, tet_quality(mesh.nodes[el[0]], mesh.nodes[el[1]], mesh.nodes[el[2]], mesh.nodes[el[3]]));
    }
    r.mean_volume = sum / static_cast<double>(mesh.element_count());
    if (mesh.order == MeshOrder::Quadratic) r.boundary_face_count = boundary_faces(mesh).size();
    return r;
}

}  // namespace vesselstress
