#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace vesselstress;
using namespace vstest;

namespace {

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::IoError;
}

Eigen::MatrixXd random_spd(std::mt19937_64& rng, int n) {
    Eigen::MatrixXd B(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) B(i, j) = uniform(rng);
    return B * B.transpose() + n * Eigen::MatrixXd::Identity(n, n);
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

TEST(Csr, DenseConversionAndProduct) {
    std::mt19937_64 rng(1);
    Eigen::MatrixXd A = random_spd(rng, 12);
    A(0, 5) = A(5, 0) = 0.0;
    const CsrMatrix M = CsrMatrix::from_dense(A);
    EXPECT_EQ(M.to_dense(), A);
    EXPECT_EQ(M.at(0, 5), 0.0);
    EXPECT_EQ(M.at(3, 4), A(3, 4));
    EXPECT_TRUE(M.structurally_symmetric());
    EXPECT_EQ(M.symmetry_error(), 0.0);
    Eigen::VectorXd x = Eigen::VectorXd::Random(12);
    const auto y = M.multiply(to_std(x));
    const Eigen::VectorXd ref = A * x;
    for (int i = 0; i < 12; ++i) EXPECT_NEAR(y[i], ref[i], 1e-12);
}

TEST(Assemble, MatchesDenseOracle) {
    std::mt19937_64 rng(2);
    const Mesh m = box_mesh(2, 2, 1, 0.15, rng);
    const auto mat = ElasticMaterial::make(300.0, 0.45);
    const CsrMatrix K = assemble(m, mat, tet_rule_degree2());
    const Eigen::MatrixXd Kd = dense_stiffness(m, mat.D, tet_rule_degree2());
    EXPECT_LT((K.to_dense() - Kd).norm(), 1e-12 * Kd.norm());
    EXPECT_TRUE(K.structurally_symmetric());
    EXPECT_LT(K.symmetry_error(), 1e-12 * K.max_abs());
}

TEST(Assemble, IndependentOfThreadCount) {
    std::mt19937_64 rng(3);
    const Mesh m = box_mesh(3, 3, 2, 0.1, rng);
    const auto mat = ElasticMaterial::make(1.0, 0.3);
    const CsrMatrix K1 = assemble(m, mat, tet_rule_degree2(), 1);
    const CsrMatrix K3 = assemble(m, mat, tet_rule_degree2(), 3);
    EXPECT_EQ(K1.row_ptr, K3.row_ptr);
    EXPECT_EQ(K1.col, K3.col);
    EXPECT_EQ(K1.val, K3.val);
}

TEST(Assemble, RigidModesInGlobalNullspace) {
    std::mt19937_64 rng(4);
    const Mesh m = box_mesh(2, 1, 1, 0.2, rng);
    const CsrMatrix K = assemble(m, ElasticMaterial::make(1.0, 0.49), tet_rule_degree2());
    for (int mode = 0; mode < 6; ++mode) {
        std::vector<double> u(3 * m.node_count());
        for (std::size_t n = 0; n < m.node_count(); ++n) {
            Vec3 v = Vec3::Zero();
            if (mode < 3) v[mode] = 1.0;
            else v = Vec3::Unit(mode - 3).cross(m.nodes[n]);
            for (int a = 0; a < 3; ++a) u[3 * n + a] = v[a];
        }
        const auto f = K.multiply(u);
        double norm = 0.0;
        for (double v : f) norm = std::max(norm, std::abs(v));
        EXPECT_LT(norm, 1e-11 * K.norm_inf());
    }
}

TEST(Assemble, PressureLoadOnTubeInterior) {
    const double a = 10, L = 6, p = 0.013;
    const Mesh m = generate_cylinder_shell(a, 11.5, L, 1.5);
    const auto patches = classify_patches(m);
    const auto F = assemble_load(m, patches, LoadSpec{p});
    Vec3 net = Vec3::Zero();
    double radial = 0.0;
    for (std::size_t n = 0; n < m.node_count(); ++n) {
        const Vec3 f(F[3 * n], F[3 * n + 1], F[3 * n + 2]);
        net += f;
        const Vec3 er = Vec3(m.nodes[n].x(), m.nodes[n].y(), 0).normalized();
        radial += f.dot(er);
    }
    // Open tube: radial loads cancel; their sum is p times the lateral area.
    EXPECT_LT(net.norm(), 1e-12 * radial);
    EXPECT_NEAR(radial, p * 2 * std::numbers::pi * a * L, 1e-3 * radial);
    std::vector<SurfacePatch> no_interior;
    for (const auto& s : patches)
        if (s.kind != PatchKind::Interior) no_interior.push_back(s);
    EXPECT_EQ(code_of([&] { assemble_load(m, no_interior, LoadSpec{p}); }), ErrorCode::MissingInteriorPatch);
}

TEST(Constraints, FixedCapsCoverCapNodes) {
    const Mesh m = generate_cylinder_shell(10, 11.5, 6, 2.0);
    const auto patches = classify_patches(m);
    const auto bc = fixed_caps(patches);
    std::size_t cap_nodes = 0;
    for (const auto& s : patches)
        if (s.kind == PatchKind::Cap) cap_nodes += s.node_set.size();
    EXPECT_EQ(bc.size(), 3 * cap_nodes);
    for (std::size_t i = 1; i < bc.size(); ++i) EXPECT_LT(bc[i - 1].dof, bc[i].dof);
    for (const auto& d : bc) EXPECT_EQ(d.value, 0.0);
    std::vector<SurfacePatch> lateral(patches.begin(), patches.begin() + 2);
    EXPECT_EQ(code_of([&] { fixed_caps(lateral); }), ErrorCode::NoCaps);
}

TEST(Constraints, RigidModeAnchorsRemoveNullspace) {
    std::mt19937_64 rng(3);
    const Mesh m = box_mesh(3, 2, 2, 0.1, rng);
    AnchorNodes picked{};
    const auto bc = rigid_mode_anchors(m, &picked);
    EXPECT_EQ(bc.size(), 6u);
    EXPECT_EQ(picked.a, 0);
    EXPECT_NE(picked.b, picked.a);
    EXPECT_NE(picked.c, picked.b);
    const CsrMatrix K = assemble(m, ElasticMaterial::make(1.0, 0.3), tet_rule_degree2());
    ReducedSystem sys = apply_dirichlet(K, std::vector<double>(K.rows, 0.0), bc);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(sys.K.to_dense());
    ASSERT_EQ(ldlt.info(), Eigen::Success);
    EXPECT_TRUE(ldlt.isPositive());
    const Eigen::VectorXd d = ldlt.vectorD();
    EXPECT_GT(d.minCoeff(), 1e-8 * d.maxCoeff());
}

TEST(Constraints, ReductionMatchesDenseOracle) {
    std::mt19937_64 rng(5);
    const Eigen::MatrixXd A = random_spd(rng, 9);
    std::vector<double> F(9);
    for (auto& f : F) f = uniform(rng);
    const DirichletSet bc{{1, 0.5}, {4, -2.0}, {8, 0.25}};
    const ReducedSystem sys = apply_dirichlet(CsrMatrix::from_dense(A), F, bc);
    const std::vector<std::int64_t> free{0, 2, 3, 5, 6, 7};
    EXPECT_EQ(sys.free_dofs, free);
    for (std::size_t i = 0; i < free.size(); ++i) {
        double rhs = F[free[i]];
        for (const auto& d : bc) rhs -= A(free[i], d.dof) * d.value;
        EXPECT_NEAR(sys.F[i], rhs, 1e-13);
        for (std::size_t j = 0; j < free.size(); ++j) EXPECT_EQ(sys.K.at(i, j), A(free[i], free[j]));
    }
    const auto u = sys.reconstruct(std::vector<double>(free.size(), 7.0));
    EXPECT_EQ(u[1], 0.5);
    EXPECT_EQ(u[4], -2.0);
    EXPECT_EQ(u[0], 7.0);
}

TEST(Cg, IdentityConvergesInOneIteration) {
    const CsrMatrix I = CsrMatrix::identity(20);
    std::vector<double> F(20);
    for (int i = 0; i < 20; ++i) F[i] = i - 3.5;
    const auto r = solve_cg(I, F);
    EXPECT_EQ(r.iterations, 1u);
    for (int i = 0; i < 20; ++i) EXPECT_NEAR(r.u[i], F[i], 1e-14);
}

TEST(Cg, DiagonalSystemIsExactWithJacobi) {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(10, 10);
    for (int i = 0; i < 10; ++i) D(i, i) = 1.0 + i * i;
    std::vector<double> F(10, 1.0);
    const auto r = solve_cg(CsrMatrix::from_dense(D), F);
    EXPECT_EQ(r.iterations, 1u);
    for (int i = 0; i < 10; ++i) EXPECT_NEAR(r.u[i], 1.0 / D(i, i), 1e-15);
}

TEST(Cg, MatchesDenseSolveOnRandomSpd) {
    std::mt19937_64 rng(6);
    const Eigen::MatrixXd A = random_spd(rng, 50);
    Eigen::VectorXd b(50);
    for (int i = 0; i < 50; ++i) b[i] = uniform(rng);
    const Eigen::VectorXd ref = A.llt().solve(b);
    CgOptions opt;
    opt.rel_tol = 1e-12;
    const auto r = solve_cg(CsrMatrix::from_dense(A), to_std(b), opt);
    EXPECT_LE(r.relative_residual, 1e-12);
    for (int i = 0; i < 50; ++i) EXPECT_NEAR(r.u[i], ref[i], 1e-10 * ref.cwiseAbs().maxCoeff());
}

TEST(Cg, ZeroRightHandSide) {
    const auto r = solve_cg(CsrMatrix::identity(5), std::vector<double>(5, 0.0));
    EXPECT_EQ(r.iterations, 0u);
    for (double v : r.u) EXPECT_EQ(v, 0.0);
}

TEST(Cg, Failures) {
    std::mt19937_64 rng(7);
    const Eigen::MatrixXd A = random_spd(rng, 30);
    CgOptions opt;
    opt.max_iter = 2;
    opt.rel_tol = 1e-14;
    try {
        solve_cg(CsrMatrix::from_dense(A), std::vector<double>(30, 1.0), opt);
        FAIL() << "no error thrown";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::SolverDiverged);
        EXPECT_NE(std::string(e.what()).find("residual tail"), std::string::npos);
        EXPECT_TRUE(is_numerical(e.code()));
    }
    Eigen::MatrixXd Z = Eigen::MatrixXd::Identity(4, 4);
    Z(2, 2) = 0.0;
    EXPECT_EQ(code_of([&] { solve_cg(CsrMatrix::from_dense(Z), std::vector<double>(4, 1.0)); }),
              ErrorCode::ZeroDiagonal);
    Eigen::MatrixXd N = -Eigen::MatrixXd::Identity(4, 4);
    N(0, 0) = 1.0;
    EXPECT_EQ(code_of([&] { solve_cg(CsrMatrix::from_dense(N), std::vector<double>(4, 1.0)); }),
              ErrorCode::ZeroDiagonal);
}

TEST(Cg, DotIsIndependentOfThreadCount) {
    std::mt19937_64 rng(8);
    std::vector<double> a(50000), b(50000);
    for (auto& v : a) v = uniform(rng);
    for (auto& v : b) v = uniform(rng);
    const double d1 = detail::dot(a, b, 1);
    for (int t : {2, 3, 7}) EXPECT_EQ(detail::dot(a, b, t), d1);
}

TEST(Pmg, AgreesWithJacobiAndNeedsFewerIterations) {
    const Mesh m = generate_cylinder_shell(10, 11.5, 8, 1.5);
    const auto patches = classify_patches(m);
    const auto mat = ElasticMaterial::make(100000.0, 0.49);
    CsrMatrix K = assemble(m, mat, tet_rule_degree2());
    auto F = assemble_load(m, patches, LoadSpec{0.013});
    const ReducedSystem sys = apply_dirichlet(std::move(K), std::move(F), fixed_caps(patches));
    CgOptions opt;
    opt.rel_tol = 1e-9;
    const PMultigridPreconditioner pmg(sys.K, m, sys.free_dofs);
    EXPECT_GT(pmg.coarse_size(), 0u);
    EXPECT_LT(pmg.coarse_size(), sys.K.rows);
    const auto a = solve_cg(sys.K, sys.F, pmg, opt);
    const auto b = solve_cg(sys.K, sys.F, opt);
    EXPECT_LT(a.iterations, b.iterations);
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < a.u.size(); ++i) {
        diff = std::max(diff, std::abs(a.u[i] - b.u[i]));
        scale = std::max(scale, std::abs(b.u[i]));
    }
    EXPECT_LT(diff, 1e-7 * scale);
}

TEST(Pmg, PreconditionerIsSymmetric) {
    const Mesh m = generate_cylinder_shell(10, 11.5, 4, 2.0);
    const auto patches = classify_patches(m);
    CsrMatrix K = assemble(m, ElasticMaterial::make(1.0, 0.45), tet_rule_degree2());
    const ReducedSystem sys = apply_dirichlet(std::move(K), std::vector<double>(3 * m.node_count(), 0.0),
                                              fixed_caps(patches));
    const PMultigridPreconditioner pmg(sys.K, m, sys.free_dofs);
    std::mt19937_64 rng(9);
    std::vector<double> x(sys.K.rows), y(sys.K.rows), mx(sys.K.rows), my(sys.K.rows);
    for (auto& v : x) v = uniform(rng);
    for (auto& v : y) v = uniform(rng);
    pmg.apply(x, mx);
    pmg.apply(y, my);
    const double xmy = detail::dot(x, my, 1), ymx = detail::dot(y, mx, 1);
    EXPECT_NEAR(xmy, ymx, 1e-10 * std::abs(xmy));
    EXPECT_GT(detail::dot(x, mx, 1), 0.0);
}
