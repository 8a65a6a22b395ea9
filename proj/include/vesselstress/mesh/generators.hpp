#pragma once

#include "vesselstress/core/error.hpp"
#include "vesselstress/mesh/mesh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

namespace vesselstress {

namespace detail {

/// Shell built by extruding a quadrilateral surface grid radially.
///
/// A surface point with chart parameters (u, v) maps to direction(u, v) and
/// offset(u, v); a node at radius r sits at r * direction + offset. Every hex
/// cell (quad x radial interval) is cut into two prisms along the quad diagonal
/// (0, 2), and each prism into three tetrahedra whose quad-face diagonals pass
/// through the lowest global vertex id. That rule only looks at global ids, so
/// neighbouring cells always agree on shared faces.
struct ShellQuad {
    std::array<std::int32_t, 4> surface_vertex;
    std::array<std::array<double, 2>, 4> uv;  // chart parameters, unwrapped within the quad
    int chart = 0;
};

template <typename Chart>
Mesh extrude_shell(const std::vector<Vec3>& surface_direction, const std::vector<Vec3>& surface_offset,
                   const std::vector<ShellQuad>& quads, const std::vector<double>& radii, const Chart& chart) {
    const int layers = static_cast<int>(radii.size()) - 1;
    const auto stride = static_cast<std::int32_t>(radii.size());

    Mesh mesh;
    mesh.order = MeshOrder::Quadratic;
    mesh.wall_layers = layers;
    mesh.nodes.resize(surface_direction.size() * radii.size());
    for (std::size_t s = 0; s < surface_direction.size(); ++s)
        for (int i = 0; i <= layers; ++i)
            mesh.nodes[s * stride + i] = radii[i] * surface_direction[s] + surface_offset[s];

    struct Corner {
        NodeId id;
        double u, v, r;
    };
    std::unordered_map<std::uint64_t, NodeId> midside;
    midside.reserve(quads.size() * layers * 14);

    auto emit_tet = [&](std::array<Corner, 4> c, int chart_id) {
        auto pos = [&](const Corner& k) { return mesh.nodes[k.id]; };
        if (signed_volume(pos(c[0]), pos(c[1]), pos(c[2]), pos(c[3])) < 0.0) std::swap(c[1], c[2]);
        Element el;
        for (int i = 0; i < 4; ++i) el[i] = c[i].id;
        for (int e = 0; e < 6; ++e) {
            const Corner& a = c[tet::kEdges[e][0]];
            const Corner& b = c[tet::kEdges[e][1]];
            auto [it, inserted] = midside.emplace(edge_key(a.id, b.id), static_cast<NodeId>(mesh.nodes.size()));
            if (inserted) {
                const double u = 0.5 * (a.u + b.u), v = 0.5 * (a.v + b.v), r = 0.5 * (a.r + b.r);
                auto [dir, off] = chart(chart_id, u, v);
                mesh.nodes.push_back(r * dir + off);
            }
            el[4 + e] = it->second;
        }
        mesh.elements.push_back(el);
    };

    // Prism vertices 0-2 bottom, 3-5 top (3 above 0). Rows relabel the prism so
    // that the minimum id lands in slot 0.
    static constexpr int kRelabel[6][6] = {{0, 1, 2, 3, 4, 5}, {1, 2, 0, 4, 5, 3}, {2, 0, 1, 5, 3, 4},
                                           {3, 5, 4, 0, 2, 1}, {4, 3, 5, 1, 0, 2}, {5, 4, 3, 2, 1, 0}};
    auto emit_prism = [&](const std::array<Corner, 6>& p, int chart_id) {
        int m = 0;
        for (int i = 1; i < 6; ++i)
            if (p[i].id < p[m].id) m = i;
        std::array<Corner, 6> v;
        for (int i = 0; i < 6; ++i) v[i] = p[kRelabel[m][i]];
        if (std::min(v[1].id, v[5].id) < std::min(v[2].id, v[4].id)) {
            emit_tet({v[0], v[1], v[2], v[5]}, chart_id);
            emit_tet({v[0], v[1], v[5], v[4]}, chart_id);
        } else {
            emit_tet({v[0], v[1], v[2], v[4]}, chart_id);
            emit_tet({v[0], v[4], v[2], v[5]}, chart_id);
        }
        emit_tet({v[0], v[4], v[5], v[3]}, chart_id);
    };

    static constexpr int kTriangles[2][3] = {{0, 1, 2}, {0, 2, 3}};
    for (const auto& q : quads) {
        for (int i = 0; i < layers; ++i) {
            for (const auto& tri : kTriangles) {
                std::array<Corner, 6> p;
                for (int k = 0; k < 3; ++k) {
                    const int c = tri[k];
                    const NodeId base = q.surface_vertex[c] * stride;
                    p[k] = {base + i, q.uv[c][0], q.uv[c][1], radii[i]};
                    p[k + 3] = {base + i + 1, q.uv[c][0], q.uv[c][1], radii[i + 1]};
                }
                emit_prism(p, q.chart);
            }
        }
    }
    return mesh;
}

inline std::vector<double> layer_radii(double a, double b, int layers) {
    std::vector<double> r(layers + 1);
    for (int i = 0; i <= layers; ++i) r[i] = a + (b - a) * i / layers;
    r.back() = b;
    return r;
}

inline int wall_layer_count(double a, double b, double h) {
    return std::max(2, static_cast<int>(std::ceil((b - a) / h - 1e-12)));
}

}  // namespace detail

/// Straight circular tube a <= r <= b, 0 <= z <= L, with target edge length h.
/// The tube axis is z. Layers, circumferential and axial divisions follow
/// n_r = max(2, ceil((b-a)/h)), n_theta = max(8, ceil(pi (a+b) / h)), n_z = ceil(L/h).
inline Mesh generate_cylinder_shell(double a, double b, double L, double h) {
    if (!(a > 0.0 && b > a && L > 0.0 && h > 0.0) || !std::isfinite(a + b + L + h))
        fail(ErrorCode::DegenerateParams, "cylinder a=" + std::to_string(a) + " b=" + std::to_string(b) +
                                              " L=" + std::to_string(L) + " h=" + std::to_string(h));
    const int nr = detail::wall_layer_count(a, b, h);
    const int nt = std::max(8, static_cast<int>(std::ceil(std::numbers::pi * (a + b) / h - 1e-12)));
    const int nz = std::max(1, static_cast<int>(std::ceil(L / h - 1e-12)));
    const double dt = 2.0 * std::numbers::pi / nt;

    auto chart = [&](int, double theta, double z) {
        return std::pair<Vec3, Vec3>{Vec3(std::cos(theta), std::sin(theta), 0.0), Vec3(0.0, 0.0, z)};
    };

    std::vector<Vec3> dir, off;
    dir.reserve(static_cast<std::size_t>(nt) * (nz + 1));
    off.reserve(dir.capacity());
    for (int k = 0; k <= nz; ++k) {
        const double z = (k == nz) ? L : L * k / nz;
        for (int j = 0; j < nt; ++j) {
            auto [d, o] = chart(0, j * dt, z);
            dir.push_back(d);
            off.push_back(o);
        }
    }
    auto sid = [&](int j, int k) { return static_cast<std::int32_t>(k * nt + (j % nt)); };

    std::vector<detail::ShellQuad> quads;
    quads.reserve(static_cast<std::size_t>(nt) * nz);
    for (int k = 0; k < nz; ++k) {
        const double z0 = L * k / nz, z1 = (k + 1 == nz) ? L : L * (k + 1) / nz;
        for (int j = 0; j < nt; ++j) {
            detail::ShellQuad q;
            q.surface_vertex = {sid(j, k), sid(j + 1, k), sid(j + 1, k + 1), sid(j, k + 1)};
            q.uv = {{{j * dt, z0}, {(j + 1) * dt, z0}, {(j + 1) * dt, z1}, {j * dt, z1}}};
            quads.push_back(q);
        }
    }
    return detail::extrude_shell(dir, off, quads, detail::layer_radii(a, b, nr), chart);
}

/// Spherical shell a <= |x| <= b from an equiangular cubed-sphere surface grid
/// with n = max(2, ceil(pi (a+b) / (4h))) cells along each cube-face edge.
inline Mesh generate_sphere_shell(double a, double b, double h) {
    if (!(a > 0.0 && b > a && h > 0.0) || !std::isfinite(a + b + h))
        fail(ErrorCode::DegenerateParams,
             "sphere a=" + std::to_string(a) + " b=" + std::to_string(b) + " h=" + std::to_string(h));
    const int nr = detail::wall_layer_count(a, b, h);
    const int n = std::max(2, static_cast<int>(std::ceil(std::numbers::pi * (a + b) / (4.0 * h) - 1e-12)));

    // Cube faces: centre normal, u axis, v axis.
    static const std::array<std::array<Vec3, 3>, 6> kFaces{{
        {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)},
        {Vec3(-1, 0, 0), Vec3(0, 0, 1), Vec3(0, 1, 0)},
        {Vec3(0, 1, 0), Vec3(0, 0, 1), Vec3(1, 0, 0)},
        {Vec3(0, -1, 0), Vec3(1, 0, 0), Vec3(0, 0, 1)},
        {Vec3(0, 0, 1), Vec3(1, 0, 0), Vec3(0, 1, 0)},
        {Vec3(0, 0, -1), Vec3(0, 1, 0), Vec3(1, 0, 0)},
    }};
    // Grid parameter is an angle in [-pi/4, pi/4]; (2p - n) is exact, so
    // opposite grid lines are exact negatives and shared cube edges weld exactly.
    auto grid_tan = [n](int p) {
        if (2 * p == n) return 0.0;
        if (p == 0) return -1.0;
        if (p == n) return 1.0;
        return std::tan(0.25 * std::numbers::pi * (2 * p - n) / n);
    };
    auto chart = [&](int f, double xi, double eta) {
        const auto& F = kFaces[f];
        Vec3 d = F[0] + std::tan(xi) * F[1] + std::tan(eta) * F[2];
        return std::pair<Vec3, Vec3>{d.normalized(), Vec3::Zero()};
    };
    auto grid_angle = [n](int p) { return 0.25 * std::numbers::pi * (2 * p - n) / n; };

    std::vector<Vec3> dir;
    std::map<std::array<long long, 3>, std::int32_t> weld;
    std::vector<std::int32_t> local(static_cast<std::size_t>(6) * (n + 1) * (n + 1));
    for (int f = 0; f < 6; ++f) {
        const auto& F = kFaces[f];
        for (int q = 0; q <= n; ++q)
            for (int p = 0; p <= n; ++p) {
                Vec3 d = (F[0] + grid_tan(p) * F[1] + grid_tan(q) * F[2]).normalized();
                std::array<long long, 3> key{std::llround(d.x() * 1e9), std::llround(d.y() * 1e9),
                                             std::llround(d.z() * 1e9)};
                auto [it, inserted] = weld.emplace(key, static_cast<std::int32_t>(dir.size()));
                if (inserted) dir.push_back(d);
                local[(static_cast<std::size_t>(f) * (n + 1) + q) * (n + 1) + p] = it->second;
            }
    }
    const std::vector<Vec3> off(dir.size(), Vec3::Zero());

    std::vector<detail::ShellQuad> quads;
    quads.reserve(static_cast<std::size_t>(6) * n * n);
    for (int f = 0; f < 6; ++f)
        for (int q = 0; q < n; ++q)
            for (int p = 0; p < n; ++p) {
                auto at = [&](int pp, int qq) { return local[(static_cast<std::size_t>(f) * (n + 1) + qq) * (n + 1) + pp]; };
                detail::ShellQuad s;
                s.chart = f;
                s.surface_vertex = {at(p, q), at(p + 1, q), at(p + 1, q + 1), at(p, q + 1)};
                s.uv = {{{grid_angle(p), grid_angle(q)},
                         {grid_angle(p + 1), grid_angle(q)},
                         {grid_angle(p + 1), grid_angle(q + 1)},
                         {grid_angle(p), grid_angle(q + 1)}}};
                quads.push_back(s);
            }
    return detail::extrude_shell(dir, off, quads, detail::layer_radii(a, b, nr), chart);
}

/// Solid box [0,lx]x[0,ly]x[0,lz] with nx*ny*nz cells, each cut into six
/// tetrahedra around its main diagonal; straight-sided quadratic elements.
/// `jitter` (fraction of the cell size) perturbs interior vertices only.
inline Mesh generate_box(int nx, int ny, int nz, double lx, double ly, double lz, double jitter = 0.0,
                         unsigned seed = 1) {
    if (nx < 1 || ny < 1 || nz < 1 || !(lx > 0 && ly > 0 && lz > 0) || jitter < 0.0 || jitter >= 0.25)
        fail(ErrorCode::DegenerateParams, "box");
    const double hx = lx / nx, hy = ly / ny, hz = lz / nz;
    auto vid = [&](int i, int j, int k) { return static_cast<NodeId>((k * (ny + 1) + j) * (nx + 1) + i); };

    Mesh mesh;
    mesh.order = MeshOrder::Quadratic;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int k = 0; k <= nz; ++k)
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i <= nx; ++i) {
                Vec3 p(i * hx, j * hy, k * hz);
                const bool interior = i > 0 && i < nx && j > 0 && j < ny && k > 0 && k < nz;
                if (interior && jitter > 0.0) p += Vec3(U(rng) * hx, U(rng) * hy, U(rng) * hz) * jitter;
                mesh.nodes.push_back(p);
            }

    std::unordered_map<std::uint64_t, NodeId> midside;
    static constexpr int kPerm[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                for (const auto& perm : kPerm) {
                    std::array<int, 3> step{0, 0, 0};
                    std::array<NodeId, 4> c;
                    c[0] = vid(i, j, k);
                    for (int s = 0; s < 3; ++s) {
                        step[perm[s]] = 1;
                        c[s + 1] = vid(i + step[0], j + step[1], k + step[2]);
                    }
                    if (signed_volume(mesh.nodes[c[0]], mesh.nodes[c[1]], mesh.nodes[c[2]], mesh.nodes[c[3]]) < 0)
                        std::swap(c[1], c[2]);
                    Element el;
                    for (int v = 0; v < 4; ++v) el[v] = c[v];
                    for (int e = 0; e < 6; ++e) {
                        const NodeId a = c[tet::kEdges[e][0]], b = c[tet::kEdges[e][1]];
                        auto [it, inserted] = midside.emplace(edge_key(a, b), static_cast<NodeId>(mesh.nodes.size()));
                        if (inserted) mesh.nodes.push_back(0.5 * (mesh.nodes[a] + mesh.nodes[b]));
                        el[4 + e] = it->second;
                    }
                    mesh.elements.push_back(el);
                }
    return mesh;
}

}  // namespace vesselstress
