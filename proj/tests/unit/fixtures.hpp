#pragma once

// Small meshes, random tensors and oracles shared by the unit and acceptance tests.

#include "vesselstress/vesselstress.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <random>
#include <vector>

namespace vstest {

using namespace vesselstress;

inline double uniform(std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vec3 random_vec(std::mt19937_64& rng, double scale = 1.0) {
    return Vec3(uniform(rng), uniform(rng), uniform(rng)) * scale;
}

/// Straight-sided tet10 with positive orientation and radius ratio above min_quality.
inline std::array<Vec3, 10> random_tet(std::mt19937_64& rng, double min_quality = 0.2) {
    while (true) {
        std::array<Vec3, 4> v;
        for (auto& p : v) p = random_vec(rng, 2.0) + Vec3(3, -1, 5);
        if (signed_volume(v[0], v[1], v[2], v[3]) < 0.0) std::swap(v[2], v[3]);
        if (tet_quality(v[0], v[1], v[2], v[3]) < min_quality) continue;
        std::array<Vec3, 10> x;
        for (int i = 0; i < 4; ++i) x[i] = v[i];
        for (int e = 0; e < 6; ++e) x[4 + e] = 0.5 * (v[tet::kEdges[e][0]] + v[tet::kEdges[e][1]]);
        return x;
    }
}

inline Voigt6 random_voigt(std::mt19937_64& rng, double scale = 1.0) {
    Voigt6 s;
    for (int i = 0; i < 6; ++i) s[i] = uniform(rng) * scale;
    return s;
}

inline Mat3 random_rotation(std::mt19937_64& rng) {
    Eigen::Quaterniond q(uniform(rng), uniform(rng), uniform(rng), uniform(rng));
    q.normalize();
    return q.toRotationMatrix();
}

/// Single straight tet10 as a mesh.
inline Mesh single_tet_mesh(const std::array<Vec3, 10>& x) {
    Mesh m;
    m.nodes.assign(x.begin(), x.end());
    Element el;
    for (int i = 0; i < 10; ++i) el[i] = i;
    m.elements.push_back(el);
    return m;
}

/// Two irregular tets sharing face (1, 2, 3).
inline Mesh two_tet_mesh(std::mt19937_64& rng) {
    Mesh lin;
    lin.order = MeshOrder::Linear;
    lin.nodes = {Vec3(0, 0, 0), Vec3(1.3, 0.1, -0.2), Vec3(0.2, 1.1, 0.1), Vec3(-0.1, 0.3, 1.2), Vec3(1.1, 1.2, 1.0)};
    for (auto& p : lin.nodes) p += random_vec(rng, 0.1);
    lin.elements.push_back({0, 1, 2, 3, -1, -1, -1, -1, -1, -1});
    lin.elements.push_back({4, 3, 2, 1, -1, -1, -1, -1, -1, -1});
    for (std::size_t e = 0; e < 2; ++e)
        if (vertex_volume(lin, e) < 0.0) std::swap(lin.elements[e][2], lin.elements[e][3]);
    return promote_to_quadratic(lin);
}

/// nx x ny x nz unit cubes, five tets per cube with alternating orientation,
/// vertices jittered by up to `jitter` cube widths. Promoted to tet10.
inline Mesh box_mesh(int nx, int ny, int nz, double jitter, std::mt19937_64& rng) {
    Mesh lin;
    lin.order = MeshOrder::Linear;
    auto id = [&](int i, int j, int k) { return static_cast<NodeId>((k * (ny + 1) + j) * (nx + 1) + i); };
    for (int k = 0; k <= nz; ++k)
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i <= nx; ++i) lin.nodes.push_back(Vec3(i, j, k) + random_vec(rng, jitter));
    static constexpr int kEven[5][4] = {{1, 3, 4, 6}, {0, 1, 3, 4}, {2, 1, 3, 6}, {5, 1, 4, 6}, {7, 3, 4, 6}};
    static constexpr int kOdd[5][4] = {{0, 2, 5, 7}, {1, 0, 2, 5}, {3, 0, 2, 7}, {4, 0, 5, 7}, {6, 2, 5, 7}};
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const NodeId c[8] = {id(i, j, k),         id(i + 1, j, k),         id(i + 1, j + 1, k),
                                     id(i, j + 1, k),     id(i, j, k + 1),         id(i + 1, j, k + 1),
                                     id(i + 1, j + 1, k + 1), id(i, j + 1, k + 1)};
                const auto& pattern = ((i + j + k) % 2 == 0) ? kEven : kOdd;
                for (const auto& t : pattern) {
                    Element el;
                    el.fill(-1);
                    for (int q = 0; q < 4; ++q) el[q] = c[t[q]];
                    lin.elements.push_back(el);
                    if (vertex_volume(lin, lin.elements.size() - 1) < 0.0) std::swap(lin.elements.back()[2], lin.elements.back()[3]);
                }
            }
    return promote_to_quadratic(lin);
}

inline std::vector<NodeId> boundary_nodes(const Mesh& mesh) {
    std::vector<NodeId> nodes;
    for (const auto& f : boundary_faces(mesh)) nodes.insert(nodes.end(), f.nodes.begin(), f.nodes.end());
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
}

/// Sum of all element stiffness matrices into a dense matrix.
inline Eigen::MatrixXd dense_stiffness(const Mesh& mesh, const Mat6& D, const TetRule& rule) {
    const auto n = static_cast<Eigen::Index>(3 * mesh.node_count());
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const auto x = mesh.element_coords(e);
        const auto Ke = element_stiffness(std::span<const Vec3, 10>(x), D, rule);
        for (int a = 0; a < 10; ++a)
            for (int b = 0; b < 10; ++b)
                K.block<3, 3>(3 * mesh.elements[e][a], 3 * mesh.elements[e][b]) += Ke.block<3, 3>(3 * a, 3 * b);
    }
    return K;
}

struct PatchTestResult {
    double max_rel_error = 0.0;
    std::size_t free_dofs = 0;
    std::size_t iterations = 0;
};

/// Prescribes u = A x + c on every boundary node, solves for the rest and
/// compares recovered nodal stress with D sym(A).
inline PatchTestResult patch_test(const Mesh& mesh, const ElasticMaterial& mat, const Mat3& A, const Vec3& c) {
    const auto nodes = boundary_nodes(mesh);
    DirichletSet bc;
    for (auto n : nodes) {
        const Vec3 u = A * mesh.nodes[n] + c;
        for (int a = 0; a < 3; ++a) bc.push_back({dof_of(n, a), u[a]});
    }
    CsrMatrix K = assemble(mesh, mat, tet_rule(StiffnessQuadrature::Degree2));
    ReducedSystem sys = apply_dirichlet(std::move(K), std::vector<double>(3 * mesh.node_count(), 0.0), bc);
    PatchTestResult out;
    out.free_dofs = sys.free_dofs.size();
    std::vector<double> u_red(sys.free_dofs.size(), 0.0);
    if (!sys.free_dofs.empty()) {
        CgOptions opt;
        opt.rel_tol = 1e-14;
        const auto res = solve_cg(sys.K, sys.F, opt);
        u_red = res.u;
        out.iterations = res.iterations;
    }
    const auto u = sys.reconstruct(u_red);
    const auto stress = recover_stress(mesh, u, mat, 1);
    const Mat3 eps = 0.5 * (A + A.transpose());
    Voigt6 e6;
    e6 << eps(0, 0), eps(1, 1), eps(2, 2), 2 * eps(0, 1), 2 * eps(1, 2), 2 * eps(2, 0);
    const Voigt6 expected = mat.D * e6;
    const double scale = expected.norm();
    for (const auto& s : stress.values) out.max_rel_error = std::max(out.max_rel_error, (s - expected).norm() / scale);
    return out;
}

/// Cyclic Jacobi eigenvalues of a symmetric 3x3 matrix, descending.
inline std::array<double, 3> jacobi_eigenvalues(Mat3 a) {
    for (int sweep = 0; sweep < 100; ++sweep) {
        const double off = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
        if (off < 1e-300) break;
        for (int p = 0; p < 2; ++p)
            for (int q = p + 1; q < 3; ++q) {
                if (a(p, q) == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                Mat3 J = Mat3::Identity();
                J(p, p) = c;
                J(q, q) = c;
                J(p, q) = s;
                J(q, p) = -s;
                a = J.transpose() * a * J;
            }
    }
    std::array<double, 3> ev{a(0, 0), a(1, 1), a(2, 2)};
    std::sort(ev.begin(), ev.end(), std::greater<>());
    return ev;
}

/// p99 MPS values (MPa) of the ten-case reference cohort.
inline const std::vector<double>& reference_cohort_p99() {
    static const std::vector<double> v{0.324, 0.404, 0.437, 0.406, 0.401, 0.522, 0.320, 0.389, 0.366, 0.405};
    return v;
}

}  // namespace vstest
