#pragma once

#include "vesselstress/core/error.hpp"
#include "vesselstress/core/types.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace vesselstress {

enum class MeshOrder { Linear, Quadratic };

/// Local topology of the 10-node tetrahedron.
///
/// Nodes 0-3 are the vertices. Midside node 4+e sits on edge kEdges[e]:
/// (0,1), (1,2), (0,2), (0,3), (1,3), (2,3). Local face k is the face opposite
/// vertex k, with corners listed so that the right-hand normal points out of a
/// positively oriented element.
namespace tet {

inline constexpr std::array<std::array<int, 2>, 6> kEdges{{{0, 1}, {1, 2}, {0, 2}, {0, 3}, {1, 3}, {2, 3}}};

inline constexpr std::array<std::array<int, 3>, 4> kFaceCorners{{{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}}};

/// Local node index of the midside node between vertices i and j.
constexpr int midside(int i, int j) {
    if (i > j) std::swap(i, j);
    for (int e = 0; e < 6; ++e)
        if (kEdges[e][0] == i && kEdges[e][1] == j) return 4 + e;
    return -1;
}

/// Six local node indices of face k: three corners, then midsides (c0,c1), (c1,c2), (c2,c0).
constexpr std::array<int, 6> face_nodes(int k) {
    const auto& c = kFaceCorners[k];
    return {c[0], c[1], c[2], midside(c[0], c[1]), midside(c[1], c[2]), midside(c[2], c[0])};
}

/// Barycentric coordinates of the ten local nodes.
inline constexpr std::array<std::array<double, 4>, 10> kNodeBarycentric{{
    {1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1},
    {0.5, 0.5, 0, 0}, {0, 0.5, 0.5, 0}, {0.5, 0, 0.5, 0},
    {0.5, 0, 0, 0.5}, {0, 0.5, 0, 0.5}, {0, 0, 0.5, 0.5},
}};

}  // namespace tet

using Element = std::array<NodeId, 10>;

struct Mesh {
    std::vector<Vec3> nodes;
    /// Linear meshes use the first four entries; the rest are -1.
    std::vector<Element> elements;
    MeshOrder order = MeshOrder::Quadratic;
    /// Through-thickness element layers, known only for generated meshes.
    std::optional<int> wall_layers;

    std::size_t node_count() const { return nodes.size(); }
    std::size_t element_count() const { return elements.size(); }

    std::array<Vec3, 10> element_coords(std::size_t e) const {
        std::array<Vec3, 10> x;
        const int n = order == MeshOrder::Quadratic ? 10 : 4;
        for (int i = 0; i < n; ++i) x[i] = nodes[elements[e][i]];
        for (int i = n; i < 10; ++i) x[i] = Vec3::Zero();
        return x;
    }
};

struct BoundaryFace {
    std::int32_t element = -1;
    int local_face = -1;
    std::array<NodeId, 6> nodes{};
};

enum class PatchKind { Interior, Exterior, Cap };

inline std::string to_string(PatchKind k) {
    switch (k) {
    case PatchKind::Interior: return "Interior";
    case PatchKind::Exterior: return "Exterior";
    case PatchKind::Cap: return "Cap";
    }
    return "?";
}

struct SurfacePatch {
    PatchKind kind = PatchKind::Cap;
    std::vector<BoundaryFace> faces;
    std::vector<NodeId> node_set;
    /// Max point-to-plane deviation (mm); set for caps only.
    std::optional<double> planarity;
};

struct MeshQualityReport {
    std::size_t element_count = 0;
    std::size_t node_count = 0;
    double min_volume = 0.0;
    double max_volume = 0.0;
    double mean_volume = 0.0;
    double min_quality = 0.0;
    std::optional<int> wall_layers;
    std::size_t boundary_face_count = 0;
};

inline double signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    return (b - a).dot((c - a).cross(d - a)) / 6.0;
}

inline double vertex_volume(const Mesh& mesh, std::size_t e) {
    const auto& el = mesh.elements[e];
    return signed_volume(mesh.nodes[el[0]], mesh.nodes[el[1]], mesh.nodes[el[2]], mesh.nodes[el[3]]);
}

inline std::uint64_t edge_key(NodeId a, NodeId b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
}

/// Throws if an element references a missing node or has non-positive vertex volume.
inline void validate_mesh(const Mesh& mesh) {
    const int n = mesh.order == MeshOrder::Quadratic ? 10 : 4;
    const auto count = static_cast<NodeId>(mesh.nodes.size());
    for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
        for (int i = 0; i < n; ++i) {
            NodeId id = mesh.elements[e][i];
            if (id < 0 || id >= count)
                fail(ErrorCode::MalformedFile,
                     "element " + std::to_string(e) + " references node " + std::to_string(id));
        }
        if (!(vertex_volume(mesh, e) > 0.0))
            fail(ErrorCode::NonPositiveVolume, "element " + std::to_string(e));
    }
}

/// Every edge carries the same midside node in all elements sharing it.
inline bool is_conforming(const Mesh& mesh) {
    if (mesh.order != MeshOrder::Quadratic) return true;
    std::unordered_map<std::uint64_t, NodeId> mid;
    mid.reserve(mesh.elements.size() * 2);
    for (const auto& el : mesh.elements) {
        for (int k = 0; k < 6; ++k) {
            auto key = edge_key(el[tet::kEdges[k][0]], el[tet::kEdges[k][1]]);
            auto [it, inserted] = mid.emplace(key, el[4 + k]);
            if (!inserted && it->second != el[4 + k]) return false;
        }
    }
    return true;
}

/// Drops nodes no element references and renumbers the rest in order.
/// Returns the number of nodes removed.
inline std::size_t remove_unreferenced_nodes(Mesh& mesh) {
    const int per = mesh.order == MeshOrder::Quadratic ? 10 : 4;
    std::vector<NodeId> remap(mesh.nodes.size(), -1);
    for (const auto& el : mesh.elements)
        for (int i = 0; i < per; ++i) remap[el[i]] = 0;
    NodeId next = 0;
    for (std::size_t n = 0; n < remap.size(); ++n)
        if (remap[n] == 0) {
            mesh.nodes[next] = mesh.nodes[n];
            remap[n] = next++;
        }
    const std::size_t removed = mesh.nodes.size() - static_cast<std::size_t>(next);
    if (removed == 0) return 0;
    mesh.nodes.resize(next);
    for (auto& el : mesh.elements)
        for (int i = 0; i < per; ++i) el[i] = remap[el[i]];
    return removed;
}

}  // namespace vesselstress
