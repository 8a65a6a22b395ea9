#pragma once

#include "vesselstress/core/error.hpp"
#include "vesselstress/core/parallel.hpp"
#include "vesselstress/element/face_load.hpp"
#include "vesselstress/element/material.hpp"
#include "vesselstress/element/tet10.hpp"
#include "vesselstress/mesh/boundary.hpp"
#include "vesselstress/mesh/classify.hpp"
#include "vesselstress/mesh/mesh.hpp"
#include "vesselstress/solve/csr.hpp"

#include <algorithm>
#include <vector>

namespace vesselstress {

/// DOF id = 3 * node + axis.
inline std::int64_t dof_of(NodeId node, int axis) { return 3 * static_cast<std::int64_t>(node) + axis; }

/// Node-to-node coupling through shared elements, sorted per node.
struct NodeGraph {
    std::vector<std::int64_t> ptr;
    std::vector<NodeId> adj;

    std::span<const NodeId> neighbors(NodeId n) const {
        return {adj.data() + ptr[n], static_cast<std::size_t>(ptr[n + 1] - ptr[n])};
    }

    /// Position of m within neighbors(n); m must be present.
    std::int64_t slot(NodeId n, NodeId m) const {
        auto nb = neighbors(n);
        return std::lower_bound(nb.begin(), nb.end(), m) - nb.begin();
    }
};

inline NodeGraph build_node_graph(const Mesh& mesh) {
    const std::size_t nn = mesh.node_count();
    const int per = mesh.order == MeshOrder::Quadratic ? 10 : 4;
    std::vector<std::int64_t> count(nn + 1, 0);
    for (const auto& el : mesh.elements)
        for (int a = 0; a < per; ++a) count[el[a] + 1] += per;
    for (std::size_t i = 0; i < nn; ++i) count[i + 1] += count[i];

    std::vector<NodeId> raw(count[nn]);
    std::vector<std::int64_t> fill(count.begin(), count.end() - 1);
    for (const auto& el : mesh.elements)
        for (int a = 0; a < per; ++a)
            for (int b = 0; b < per; ++b) raw[fill[el[a]]++] = el[b];

    NodeGraph g;
    g.ptr.assign(nn + 1, 0);
    g.adj.reserve(raw.size() / 3);
    for (std::size_t n = 0; n < nn; ++n) {
        auto b = raw.begin() + count[n], e = raw.begin() + count[n + 1];
        std::sort(b, e);
        e = std::unique(b, e);
        g.adj.insert(g.adj.end(), b, e);
        g.ptr[n + 1] = static_cast<std::int64_t>(g.adj.size());
    }
    return g;
}

/// Empty stiffness pattern over 3n DOFs. Row 3n+i lists columns 3m+j for each
/// neighbour m of n (sorted) and j = 0..2.
inline CsrMatrix stiffness_pattern(const NodeGraph& g) {
    const std::size_t nn = g.ptr.size() - 1;
    CsrMatrix K;
    K.rows = K.cols = 3 * nn;
    K.row_ptr.assign(3 * nn + 1, 0);
    for (std::size_t n = 0; n < nn; ++n) {
        const std::int64_t width = 3 * (g.ptr[n + 1] - g.ptr[n]);
        for (int i = 0; i < 3; ++i) K.row_ptr[3 * n + i + 1] = K.row_ptr[3 * n + i] + width;
    }
    K.col.resize(K.row_ptr.back());
    K.val.assign(K.row_ptr.back(), 0.0);
    for (std::size_t n = 0; n < nn; ++n) {
        const auto nb = g.neighbors(static_cast<NodeId>(n));
        for (int i = 0; i < 3; ++i) {
            std::int64_t k = K.row_ptr[3 * n + i];
            for (auto m : nb)
                for (int j = 0; j < 3; ++j) K.col[k++] = static_cast<std::int32_t>(3 * m + j);
        }
    }
    return K;
}

/// K = sum of element stiffness matrices. Element matrices may be computed on
/// several threads, but they are always added in element order, so the result
/// is bit-identical for any thread count.
inline CsrMatrix assemble(const Mesh& mesh, const ElasticMaterial& material, const TetRule& rule, int threads = 1) {
    if (mesh.order != MeshOrder::Quadratic)
        fail(ErrorCode::UnsupportedElementType, "assembly needs a quadratic mesh");
    const NodeGraph g = build_node_graph(mesh);
    CsrMatrix K = stiffness_pattern(g);

    auto scatter = [&](std::size_t e, const ElementStiffness& Ke) {
        const auto& el = mesh.elements[e];
        for (int a = 0; a < 10; ++a) {
            for (int b = 0; b < 10; ++b) {
                const std::int64_t s = 3 * g.slot(el[a], el[b]);
                for (int i = 0; i < 3; ++i) {
                    double* row = K.val.data() + K.row_ptr[dof_of(el[a], i)] + s;
                    for (int j = 0; j < 3; ++j) row[j] += Ke(3 * a + i, 3 * b + j);
                }
            }
        }
    };
    auto element_matrix = [&](std::size_t e) {
        const auto x = mesh.element_coords(e);
        try {
            return element_stiffness(std::span<const Vec3, 10>(x), material.D, rule);
        } catch (const Error& err) {
            throw Error(err.code(), "element " + std::to_string(e) + ": " + err.detail());
        }
    };

    const std::size_t ne = mesh.element_count();
    if (threads <= 1) {
        for (std::size_t e = 0; e < ne; ++e) scatter(e, element_matrix(e));
        return K;
    }
    constexpr std::size_t kChunk = 4096;
    std::vector<ElementStiffness> stage(kChunk);
    for (std::size_t base = 0; base < ne; base += kChunk) {
        const std::size_t n = std::min(kChunk, ne - base);
        parallel_ranges(n, threads, [&](std::size_t lo, std::size_t hi, int) {
            for (std::size_t i = lo; i < hi; ++i) stage[i] = element_matrix(base + i);
        });
        for (std::size_t i = 0; i < n; ++i) scatter(base + i, stage[i]);
    }
    return K;
}

/// Consistent pressure load on the Interior patch; zero elsewhere.
inline std::vector<double> assemble_load(const Mesh& mesh, const std::vector<SurfacePatch>& patches,
                                         const LoadSpec& load) {
    const SurfacePatch* interior = find_patch(patches, PatchKind::Interior);
    if (!interior) fail(ErrorCode::MissingInteriorPatch);
    std::vector<double> F(3 * mesh.node_count(), 0.0);
    for (const auto& face : interior->faces) {
        const auto x = face_coords(mesh, face);
        const FaceLoad f = face_pressure_load(std::span<const Vec3, 6>(x), load.pressure);
        for (int n = 0; n < 6; ++n)
            for (int i = 0; i < 3; ++i) F[dof_of(face.nodes[n], i)] += f[3 * n + i];
    }
    return F;
}

}  // namespace vesselstress
