#pragma once

#include "vesselstress/core/error.hpp"
#include "vesselstress/mesh/boundary.hpp"
#include "vesselstress/mesh/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

namespace vesselstress {

struct ClassifyOptions {
    double crease_angle_deg = 40.0;
    double cap_planarity_rel = 0.01;
    int ray_samples = 64;
};

/// Boundary region found by crease-limited region growing, before labelling.
struct BoundaryRegion {
    std::vector<std::int32_t> faces;  // indices into the boundary face list
    std::vector<NodeId> node_set;
    double plane_deviation = 0.0;
    double diameter = 0.0;
    bool planar = false;
    std::optional<double> mean_crossings;  // lateral regions only
};

struct Classification {
    std::vector<SurfacePatch> patches;
    std::vector<BoundaryRegion> regions;
};

namespace detail {

inline std::vector<NodeId> region_nodes(const std::vector<BoundaryFace>& faces, const std::vector<std::int32_t>& ids) {
    std::vector<NodeId> nodes;
    nodes.reserve(ids.size() * 6);
    for (auto f : ids) nodes.insert(nodes.end(), faces[f].nodes.begin(), faces[f].nodes.end());
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
}

/// Least-squares plane through the points; returns max |distance| to it.
inline double plane_deviation(const Mesh& mesh, const std::vector<NodeId>& nodes) {
    Vec3 c = Vec3::Zero();
    for (auto n : nodes) c += mesh.nodes[n];
    c /= static_cast<double>(nodes.size());
    Mat3 cov = Mat3::Zero();
    for (auto n : nodes) {
        const Vec3 d = mesh.nodes[n] - c;
        cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Mat3> es(cov);
    const Vec3 normal = es.eigenvectors().col(0);
    double dev = 0.0;
    for (auto n : nodes) dev = std::max(dev, std::abs((mesh.nodes[n] - c).dot(normal)));
    return dev;
}

inline double point_set_diameter(const Mesh& mesh, const std::vector<NodeId>& nodes) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = i + 1; j < nodes.size(); ++j)
            d2 = std::max(d2, (mesh.nodes[nodes[i]] - mesh.nodes[nodes[j]]).squaredNorm());
    return std::sqrt(d2);
}

/// Moller-Trumbore; returns ray parameter t of the hit, if any.
inline std::optional<double> ray_triangle(const Vec3& o, const Vec3& d, const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 e1 = b - a, e2 = c - a;
    const Vec3 p = d.cross(e2);
    const double det = e1.dot(p);
    if (std::abs(det) < 1e-300) return std::nullopt;
    const double inv = 1.0 / det;
    const Vec3 s = o - a;
    const double u = s.dot(p) * inv;
    if (u < 0.0 || u > 1.0) return std::nullopt;
    const Vec3 q = s.cross(e1);
    const double v = d.dot(q) * inv;
    if (v < 0.0 || u + v > 1.0) return std::nullopt;
    return e2.dot(q) * inv;
}

/// The four flat sub-triangles of a six-node face.
inline std::array<std::array<int, 3>, 4> subtriangles() {
    return {{{0, 3, 5}, {3, 1, 4}, {5, 4, 2}, {3, 4, 5}}};
}

}  // namespace detail

/// Splits the boundary into Interior, Exterior and Cap patches.
///
/// Regions grow across boundary edges whose corner-triangle normals differ by
/// at most the crease angle. A region is a cap when its nodes deviate from
/// their best-fit plane by at most cap_planarity_rel times its diameter. The
/// two remaining regions are told apart by casting rays along the outward
/// normal from sampled face centroids: rays leaving the exterior surface cross
/// the boundary less often on average than rays leaving into the lumen.
inline Classification classify_boundary(const Mesh& mesh, const ClassifyOptions& opt = {}) {
    BoundaryTopology topo = boundary_topology(boundary_faces(mesh));
    const auto& faces = topo.faces;
    const std::size_t nf = faces.size();

    std::vector<Vec3> normal(nf);
    for (std::size_t f = 0; f < nf; ++f) normal[f] = corner_normal(mesh, faces[f]);
    const double cos_crease = std::cos(opt.crease_angle_deg * std::numbers::pi / 180.0);

    // Region growing in face order.
    std::vector<int> region_of(nf, -1);
    Classification out;
    std::vector<std::int32_t> stack;
    for (std::size_t s = 0; s < nf; ++s) {
        if (region_of[s] >= 0) continue;
        const int r = static_cast<int>(out.regions.size());
        out.regions.emplace_back();
        region_of[s] = r;
        stack.push_back(static_cast<std::int32_t>(s));
        while (!stack.empty()) {
            const auto f = stack.back();
            stack.pop_back();
            out.regions[r].faces.push_back(f);
            for (auto g : topo.neighbors[f]) {
                if (region_of[g] >= 0) continue;
                if (normal[f].dot(normal[g]) < cos_crease) continue;
                region_of[g] = r;
                stack.push_back(g);
            }
        }
        std::sort(out.regions[r].faces.begin(), out.regions[r].faces.end());
    }

    std::vector<int> lateral;
    for (std::size_t r = 0; r < out.regions.size(); ++r) {
        auto& reg = out.regions[r];
        reg.node_set = detail::region_nodes(faces, reg.faces);
        reg.plane_deviation = detail::plane_deviation(mesh, reg.node_set);
        // Bounding-box diagonal brackets the diameter within a factor sqrt(3);
        // the exact O(n^2) diameter is needed only inside that bracket.
        Vec3 lo = mesh.nodes[reg.node_set[0]], hi = lo;
        for (auto n : reg.node_set) {
            lo = lo.cwiseMin(mesh.nodes[n]);
            hi = hi.cwiseMax(mesh.nodes[n]);
        }
        const double diag = (hi - lo).norm();
        const double tol_hi = opt.cap_planarity_rel * diag;
        if (reg.plane_deviation > tol_hi) {
            reg.planar = false;
            reg.diameter = diag;
        } else if (reg.plane_deviation <= tol_hi / std::sqrt(3.0)) {
            reg.planar = true;
            reg.diameter = diag;
        } else {
            reg.diameter = detail::point_set_diameter(mesh, reg.node_set);
            reg.planar = reg.plane_deviation <= opt.cap_planarity_rel * reg.diameter;
        }
        if (!reg.planar) lateral.push_back(static_cast<int>(r));
    }

    if (lateral.empty()) fail(ErrorCode::NoLateralSurface, std::to_string(out.regions.size()) + " planar regions");
    if (lateral.size() != 2)
        fail(ErrorCode::TooManyLateralRegions, std::to_string(lateral.size()) + " non-planar regions");

    // Ray parity vote.
    Vec3 lo = mesh.nodes[faces[0].nodes[0]], hi = lo;
    for (const auto& f : faces)
        for (auto n : f.nodes) {
            lo = lo.cwiseMin(mesh.nodes[n]);
            hi = hi.cwiseMax(mesh.nodes[n]);
        }
    const double eps = 1e-9 * (hi - lo).norm();
    const auto subs = detail::subtriangles();

    auto crossings = [&](std::int32_t source) {
        const auto x = face_coords(mesh, faces[source]);
        const Vec3 origin = tri6::point({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, std::span<const Vec3, 6>(x));
        const Vec3 dir = normal[source];
        int count = 0;
        for (std::size_t g = 0; g < nf; ++g) {
            if (static_cast<std::int32_t>(g) == source) continue;
            const auto& fn = faces[g].nodes;
            for (const auto& t : subs) {
                auto hit = detail::ray_triangle(origin, dir, mesh.nodes[fn[t[0]]], mesh.nodes[fn[t[1]]],
                                                mesh.nodes[fn[t[2]]]);
                if (hit && *hit > eps) ++count;
            }
        }
        return count;
    };

    for (int r : lateral) {
        auto& reg = out.regions[r];
        const std::size_t n = reg.faces.size();
        const std::size_t samples = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, opt.ray_samples)));
        double total = 0.0;
        for (std::size_t i = 0; i < samples; ++i) total += crossings(reg.faces[i * n / samples]);
        reg.mean_crossings = total / static_cast<double>(samples);
    }
    const double m0 = *out.regions[lateral[0]].mean_crossings;
    const double m1 = *out.regions[lateral[1]].mean_crossings;
    if (std::abs(m0 - m1) < 0.5)
        fail(ErrorCode::AmbiguousClassification,
             "mean crossings " + std::to_string(m0) + " vs " + std::to_string(m1));
    const int exterior = m0 < m1 ? lateral[0] : lateral[1];
    const int interior = m0 < m1 ? lateral[1] : lateral[0];

    auto make_patch = [&](int r, PatchKind kind) {
        SurfacePatch p;
        p.kind = kind;
        const auto& reg = out.regions[r];
        p.faces.reserve(reg.faces.size());
        for (auto f : reg.faces) p.faces.push_back(faces[f]);
        p.node_set = reg.node_set;
        if (kind == PatchKind::Cap) p.planarity = reg.plane_deviation;
        return p;
    };
    out.patches.push_back(make_patch(interior, PatchKind::Interior));
    out.patches.push_back(make_patch(exterior, PatchKind::Exterior));
    for (std::size_t r = 0; r < out.regions.size(); ++r)
        if (out.regions[r].planar) out.patches.push_back(make_patch(static_cast<int>(r), PatchKind::Cap));
    return out;
}

inline std::vector<SurfacePatch> classify_patches(const Mesh& mesh, const ClassifyOptions& opt = {}) {
    return classify_boundary(mesh, opt).patches;
}

inline std::vector<SurfacePatch> classify_patches(const Mesh& mesh, double crease_angle_deg, double cap_planarity_rel) {
    return classify_patches(mesh, ClassifyOptions{crease_angle_deg, cap_planarity_rel});
}

inline const SurfacePatch* find_patch(const std::vector<SurfacePatch>& patches, PatchKind kind) {
    for (const auto& p : patches)
        if (p.kind == kind) return &p;
    return nullptr;
}

inline double patch_area(const Mesh& mesh, const SurfacePatch& patch) {
    double a = 0.0;
    for (const auto& f : patch.faces) a += face_area(mesh, f);
    return a;
}

}  // namespace vesselstress
