#pragma once

#include "vesselstress/core/error.hpp"
#include "vesselstress/element/face_load.hpp"
#include "vesselstress/mesh/mesh.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <tuple>
#include <vector>

namespace vesselstress {

namespace detail {

struct FaceRecord {
    std::array<NodeId, 3> key;  // sorted corners
    std::int32_t element;
    int local_face;
};

}  // namespace detail

/// Faces that belong to exactly one element, outward-oriented, in element order.
/// Does not check manifoldness; see extract_boundary.
inline std::vector<BoundaryFace> boundary_faces(const Mesh& mesh) {
    if (mesh.order != MeshOrder::Quadratic)
        fail(ErrorCode::UnsupportedElementType, "boundary extraction needs a quadratic mesh");
    std::vector<detail::FaceRecord> recs;
    recs.reserve(mesh.element_count() * 4);
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const auto& el = mesh.elements[e];
        for (int k = 0; k < 4; ++k) {
            const auto& c = tet::kFaceCorners[k];
            std::array<NodeId, 3> key{el[c[0]], el[c[1]], el[c[2]]};
            std::sort(key.begin(), key.end());
            recs.push_back({key, static_cast<std::int32_t>(e), k});
        }
    }
    std::sort(recs.begin(), recs.end(), [](const auto& a, const auto& b) {
        if (a.key != b.key) return a.key < b.key;
        return std::tie(a.element, a.local_face) < std::tie(b.element, b.local_face);
    });

    std::vector<std::pair<std::int32_t, int>> single;
    for (std::size_t i = 0; i < recs.size();) {
        std::size_t j = i + 1;
        while (j < recs.size() && recs[j].key == recs[i].key) ++j;
        if (j - i == 1) single.emplace_back(recs[i].element, recs[i].local_face);
        i = j;
    }
    std::sort(single.begin(), single.end());

    std::vector<BoundaryFace> faces;
    faces.reserve(single.size());
    for (auto [e, k] : single) {
        BoundaryFace f;
        f.element = e;
        f.local_face = k;
        const auto local = tet::face_nodes(k);
        for (int i = 0; i < 6; ++i) f.nodes[i] = mesh.elements[e][local[i]];
        faces.push_back(f);
    }
    return faces;
}

/// Edge adjacency of a boundary face set. neighbors[f][k] is the face across
/// corner edge (c_k, c_{k+1}) of face f.
struct BoundaryTopology {
    std::vector<BoundaryFace> faces;
    std::vector<std::array<std::int32_t, 3>> neighbors;
};

/// Builds edge adjacency and throws NonManifoldBoundary unless every boundary
/// edge borders exactly two boundary faces.
inline BoundaryTopology boundary_topology(std::vector<BoundaryFace> faces) {
    struct EdgeRec {
        std::uint64_t key;
        std::int32_t face;
        int slot;
    };
    std::vector<EdgeRec> edges;
    edges.reserve(faces.size() * 3);
    for (std::size_t f = 0; f < faces.size(); ++f)
        for (int k = 0; k < 3; ++k)
            edges.push_back({edge_key(faces[f].nodes[k], faces[f].nodes[(k + 1) % 3]),
                             static_cast<std::int32_t>(f), k});
    std::sort(edges.begin(), edges.end(), [](const EdgeRec& a, const EdgeRec& b) {
        return std::tie(a.key, a.face, a.slot) < std::tie(b.key, b.face, b.slot);
    });

    BoundaryTopology topo;
    topo.neighbors.assign(faces.size(), {-1, -1, -1});
    for (std::size_t i = 0; i < edges.size();) {
        std::size_t j = i + 1;
        while (j < edges.size() && edges[j].key == edges[i].key) ++j;
        if (j - i != 2) {
            const auto a = static_cast<NodeId>(edges[i].key >> 32);
            const auto b = static_cast<NodeId>(edges[i].key & 0xffffffffu);
            fail(ErrorCode::NonManifoldBoundary, "edge (" + std::to_string(a) + ", " + std::to_string(b) +
                                                     ") borders " + std::to_string(j - i) + " boundary faces");
        }
        topo.neighbors[edges[i].face][edges[i].slot] = edges[i + 1].face;
        topo.neighbors[edges[i + 1].face][edges[i + 1].slot] = edges[i].face;
        i = j;
    }
    topo.faces = std::move(faces);
    return topo;
}

/// Boundary faces of a quadratic mesh; the result forms closed 2-manifolds.
inline std::vector<BoundaryFace> extract_boundary(const Mesh& mesh) {
    return boundary_topology(boundary_faces(mesh)).faces;
}

/// Connected components of the boundary surface (edge connectivity).
inline std::vector<int> boundary_component_labels(const BoundaryTopology& topo) {
    std::vector<int> label(topo.faces.size(), -1);
    int next = 0;
    std::vector<std::int32_t> stack;
    for (std::size_t s = 0; s < topo.faces.size(); ++s) {
        if (label[s] >= 0) continue;
        label[s] = next;
        stack.push_back(static_cast<std::int32_t>(s));
        while (!stack.empty()) {
            auto f = stack.back();
            stack.pop_back();
            for (auto nb : topo.neighbors[f])
                if (nb >= 0 && label[nb] < 0) {
                    label[nb] = next;
                    stack.push_back(nb);
                }
        }
        ++next;
    }
    return label;
}

inline int boundary_component_count(const BoundaryTopology& topo) {
    const auto labels = boundary_component_labels(topo);
    return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

inline std::array<Vec3, 6> face_coords(const Mesh& mesh, const BoundaryFace& f) {
    std::array<Vec3, 6> x;
    for (int i = 0; i < 6; ++i) x[i] = mesh.nodes[f.nodes[i]];
    return x;
}

/// Unit normal of the corner triangle.
inline Vec3 corner_normal(const Mesh& mesh, const BoundaryFace& f) {
    const Vec3& a = mesh.nodes[f.nodes[0]];
    const Vec3& b = mesh.nodes[f.nodes[1]];
    const Vec3& c = mesh.nodes[f.nodes[2]];
    return (b - a).cross(c - a).normalized();
}

inline double face_area(const Mesh& mesh, const BoundaryFace& f) {
    const auto x = face_coords(mesh, f);
    return tri6::area(std::span<const Vec3, 6>(x));
}

}  // namespace vesselstress
