#pragma once

#include "vesselstress/core/error.hpp"
#include "vesselstress/mesh/mesh.hpp"

#include <unordered_map>

namespace vesselstress {

/// Adds one node at the midpoint of every unique edge of a linear mesh.
inline Mesh promote_to_quadratic(const Mesh& mesh) {
    if (mesh.order == MeshOrder::Quadratic) fail(ErrorCode::AlreadyQuadratic);
    Mesh out;
    out.order = MeshOrder::Quadratic;
    out.nodes = mesh.nodes;
    out.wall_layers = mesh.wall_layers;
    out.elements.reserve(mesh.element_count());
    std::unordered_map<std::uint64_t, NodeId> midside;
    midside.reserve(mesh.element_count() * 2);
    for (const auto& src : mesh.elements) {
        Element el = src;
        for (int e = 0; e < 6; ++e) {
            const NodeId a = src[tet::kEdges[e][0]], b = src[tet::kEdges[e][1]];
            auto [it, inserted] = midside.emplace(edge_key(a, b), static_cast<NodeId>(out.nodes.size()));
            if (inserted) out.nodes.push_back(0.5 * (out.nodes[a] + out.nodes[b]));
            el[4 + e] = it->second;
        }
        out.elements.push_back(el);
    }
    return out;
}

}  // namespace vesselstress
