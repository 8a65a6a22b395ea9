#pragma once

#include "vesselstress/core/error.hpp"
#include "vesselstress/mesh/classify.hpp"
#include "vesselstress/mesh/mesh.hpp"
#include "vesselstress/solve/assemble.hpp"
#include "vesselstress/solve/csr.hpp"

#include <algorithm>
#include <vector>

namespace vesselstress {

struct Dirichlet {
    std::int64_t dof;
    double value;  // mm

    bool operator==(const Dirichlet&) const = default;
};

/// Prescribed displacements, sorted by DOF, each DOF at most once.
using DirichletSet = std::vector<Dirichlet>;

/// All three displacement components of every cap node fixed at zero.
inline DirichletSet fixed_caps(const std::vector<SurfacePatch>& patches) {
    std::vector<NodeId> nodes;
    for (const auto& p : patches)
        if (p.kind == PatchKind::Cap) nodes.insert(nodes.end(), p.node_set.begin(), p.node_set.end());
    if (nodes.empty()) fail(ErrorCode::NoCaps);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    DirichletSet set;
    set.reserve(nodes.size() * 3);
    for (auto n : nodes)
        for (int a = 0; a < 3; ++a) set.push_back({dof_of(n, a), 0.0});
    return set;
}

/// Anchor nodes picked by rigid_mode_anchors.
struct AnchorNodes {
    NodeId a, b, c;
};

/// 3-2-1 anchoring for self-equilibrated loads. Node A (lowest referenced
/// index) is fixed; node B, farthest from A, is fixed along the two axes other
/// than the dominant axis of A->B; node C, farthest from line AB, is fixed
/// along the dominant axis of the normal of plane ABC. Six DOFs in total.
inline DirichletSet rigid_mode_anchors(const Mesh& mesh, AnchorNodes* picked = nullptr) {
    std::vector<char> used(mesh.node_count(), 0);
    for (const auto& el : mesh.elements)
        for (int i = 0; i < (mesh.order == MeshOrder::Quadratic ? 10 : 4); ++i) used[el[i]] = 1;
    std::vector<NodeId> nodes;
    for (std::size_t n = 0; n < used.size(); ++n)
        if (used[n]) nodes.push_back(static_cast<NodeId>(n));
    if (nodes.size() < 3) fail(ErrorCode::DegenerateGeometry, "fewer than three nodes");

    const NodeId A = nodes.front();
    const Vec3& xa = mesh.nodes[A];
    NodeId B = A;
    double best = 0.0;
    for (auto n : nodes) {
        const double d = (mesh.nodes[n] - xa).squaredNorm();
        if (d > best) best = d, B = n;
    }
    const double span = std::sqrt(best);
    if (!(span > 0.0)) fail(ErrorCode::DegenerateGeometry, "all nodes coincide");
    const Vec3 axis = (mesh.nodes[B] - xa) / span;
    NodeId C = A;
    best = 0.0;
    for (auto n : nodes) {
        const Vec3 d = mesh.nodes[n] - xa;
        const double off = (d - d.dot(axis) * axis).squaredNorm();
        if (off > best) best = off, C = n;
    }
    if (!(std::sqrt(best) > 1e-9 * span)) fail(ErrorCode::DegenerateGeometry, "all nodes collinear");

    int kb;
    (mesh.nodes[B] - xa).cwiseAbs().maxCoeff(&kb);
    const Vec3 normal = (mesh.nodes[B] - xa).cross(mesh.nodes[C] - xa);
    int kc;
    normal.cwiseAbs().maxCoeff(&kc);

    DirichletSet set;
    for (int i = 0; i < 3; ++i) set.push_back({dof_of(A, i), 0.0});
    for (int i = 0; i < 3; ++i)
        if (i != kb) set.push_back({dof_of(B, i), 0.0});
    set.push_back({dof_of(C, kc), 0.0});
    std::sort(set.begin(), set.end(), [](const auto& l, const auto& r) { return l.dof < r.dof; });
    if (picked) *picked = {A, B, C};
    return set;
}

/// System left after eliminating prescribed DOFs.
struct ReducedSystem {
    CsrMatrix K;
    std::vector<double> F;
    std::vector<std::int64_t> free_dofs;  // reduced index -> full DOF
    std::vector<double> prescribed;       // full-length; prescribed values, zero on free DOFs

    std::vector<double> reconstruct(std::span<const double> u_reduced) const {
        std::vector<double> u = prescribed;
        for (std::size_t i = 0; i < free_dofs.size(); ++i) u[free_dofs[i]] = u_reduced[i];
        return u;
    }
};

/// Removes constrained rows and columns, moving K_fc * g to the right-hand
/// side. K is consumed and compacted in place.
inline ReducedSystem apply_dirichlet(CsrMatrix K, std::vector<double> F, const DirichletSet& dirichlet) {
    const std::size_t n = K.rows;
    std::vector<double> g(n, 0.0);
    std::vector<char> fixed(n, 0);
    for (const auto& d : dirichlet) {
        fixed[d.dof] = 1;
        g[d.dof] = d.value;
    }
    std::vector<std::int32_t> reduced_id(n, -1);
    ReducedSystem out;
    for (std::size_t i = 0; i < n; ++i)
        if (!fixed[i]) {
            reduced_id[i] = static_cast<std::int32_t>(out.free_dofs.size());
            out.free_dofs.push_back(static_cast<std::int64_t>(i));
        }

    // Writes never overtake reads: rows are visited in order and only shrink.
    std::int64_t w = 0;
    std::size_t r = 0;
    out.F.resize(out.free_dofs.size());
    std::int64_t read_begin = K.row_ptr[0];
    for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t read_end = K.row_ptr[i + 1];
        if (!fixed[i]) {
            double rhs = F[i];
            for (std::int64_t k = read_begin; k < read_end; ++k) {
                const auto j = static_cast<std::size_t>(K.col[k]);
                if (fixed[j]) {
                    rhs -= K.val[k] * g[j];
                } else {
                    K.col[w] = reduced_id[j];
                    K.val[w] = K.val[k];
                    ++w;
                }
            }
            out.F[r] = rhs;
            K.row_ptr[++r] = w;
        }
        read_begin = read_end;
    }
    K.rows = K.cols = out.free_dofs.size();
    K.row_ptr.resize(K.rows + 1);
    K.col.resize(w);
    K.val.resize(w);
    out.K = std::move(K);
    out.prescribed = std::move(g);
    return out;
}

}  // namespace vesselstress
