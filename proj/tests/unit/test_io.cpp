#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace vesselstress;
using namespace vstest;

namespace {

const std::filesystem::path kData = VS_TEST_DATA_DIR;

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

Mesh round_trip(const Mesh& m) {
    std::stringstream s;
    format_msh(m, s);
    return parse_msh(s);
}

std::string binary_stl(const std::vector<std::array<Vec3, 3>>& tris) {
    std::string bytes(80, ' ');
    const auto n = static_cast<std::uint32_t>(tris.size());
    bytes.append(reinterpret_cast<const char*>(&n), 4);
    for (const auto& t : tris) {
        float rec[12] = {0, 0, 0};
        for (int k = 0; k < 3; ++k)
            for (int a = 0; a < 3; ++a) rec[3 + 3 * k + a] = static_cast<float>(t[k][a]);
        bytes.append(reinterpret_cast<const char*>(rec), sizeof rec);
        bytes.append(2, '\0');
    }
    return bytes;
}

std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("vesselstress_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST(Msh, QuadraticRoundTripIsExact) {
    const Mesh m = generate_cylinder_shell(10, 11.5, 6, 2.0);
    const Mesh r = round_trip(m);
    EXPECT_EQ(r.order, MeshOrder::Quadratic);
    ASSERT_EQ(r.node_count(), m.node_count());
    ASSERT_EQ(r.element_count(), m.element_count());
    for (std::size_t i = 0; i < m.node_count(); ++i) EXPECT_EQ(r.nodes[i], m.nodes[i]);
    for (std::size_t e = 0; e < m.element_count(); ++e) EXPECT_EQ(r.elements[e], m.elements[e]);
}

TEST(Msh, LinearRoundTripIsExact) {
    std::mt19937_64 rng(4);
    Mesh lin;
    lin.order = MeshOrder::Linear;
    lin.nodes = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
    for (auto& p : lin.nodes) p += random_vec(rng, 0.1);
    lin.elements.push_back({0, 1, 2, 3, -1, -1, -1, -1, -1, -1});
    const Mesh r = round_trip(lin);
    EXPECT_EQ(r.order, MeshOrder::Linear);
    EXPECT_EQ(r.nodes, lin.nodes);
    for (int i = 0; i < 4; ++i) EXPECT_EQ(r.elements[0][i], lin.elements[0][i]);
}

TEST(Msh, WritesGmshMidsideOrder) {
    std::mt19937_64 rng(8);
    const Mesh m = single_tet_mesh(random_tet(rng));
    std::stringstream s;
    format_msh(m, s);
    const std::string text = s.str();
    // Element line: tag, then nodes 1-based in Gmsh order (last two midsides swapped).
    EXPECT_NE(text.find("\n1 1 2 3 4 5 6 7 8 10 9\n"), std::string::npos) << text;
}

TEST(Msh, ReadsFixtureAndSkipsSurfaceElements) {
    const Mesh m = read_msh(kData / "two_tets.msh");
    EXPECT_EQ(m.order, MeshOrder::Linear);
    EXPECT_EQ(m.node_count(), 5u);
    ASSERT_EQ(m.element_count(), 2u);
    EXPECT_EQ(m.elements[1][3], 4);
    EXPECT_EQ(m.nodes[4], Vec3(1, 1, 1));
}

TEST(Msh, MalformedInputs) {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return parse_msh(in);
    };
    EXPECT_EQ(code_of([&] { parse("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"); }), ErrorCode::MalformedFile);
    EXPECT_EQ(code_of([&] { parse("$MeshFormat\n4.1 0 8\n$EndMeshFormat\n"); }), ErrorCode::MalformedFile);
    const std::string nodes = "$MeshFormat\n4.1 0 8\n$EndMeshFormat\n$Nodes\n1 4 1 4\n3 1 0 4\n1\n2\n3\n4\n"
                              "0 0 0\n1 0 0\n0 1 0\n0 0 1\n$EndNodes\n";
    EXPECT_NO_THROW(parse(nodes + "$Elements\n1 1 1 1\n3 1 4 1\n1 1 2 3 4\n$EndElements\n"));
    EXPECT_EQ(code_of([&] { parse(nodes + "$Elements\n1 1 1 1\n3 1 4 1\n1 1 2 3 7\n$EndElements\n"); }),
              ErrorCode::MalformedFile);
    EXPECT_EQ(code_of([&] { parse(nodes + "$Elements\n1 1 1 1\n3 1 5 1\n1 1 2 3 4 1 2 3 4\n$EndElements\n"); }),
              ErrorCode::UnsupportedElementType);
    EXPECT_EQ(code_of([&] { parse(nodes + "$Elements\n1 1 1 1\n3 1 4 2\n1 1 2 3 4\n$EndElements\n"); }),
              ErrorCode::MalformedFile);
    EXPECT_EQ(code_of([] { read_msh("/nonexistent/mesh.msh"); }), ErrorCode::IoError);
}

TEST(Stl, AsciiTetrahedronFixture) {
    const TriangleSoup s = read_stl(kData / "tetra_ascii.stl");
    EXPECT_EQ(s.triangles.size(), 4u);
    EXPECT_EQ(s.vertices.size(), 4u);
    EXPECT_EQ(s.edge_count(), 6u);
    EXPECT_EQ(s.euler_characteristic(), 2);
    // Normals come from winding, not from the stored facet normals.
    EXPECT_NEAR(s.normals[3].dot(Vec3(1, 1, 1).normalized()), 1.0, 1e-12);
}

TEST(Stl, BinaryWeldsSharedCorners) {
    const Vec3 a(0, 0, 0), b(1, 0, 0), c(0, 1, 0), d(0, 0, 1);
    const std::string bytes = binary_stl({{a, c, b}, {a, b, d}, {a, d, c}, {b, c, d}});
    const TriangleSoup s = parse_stl(bytes);
    EXPECT_EQ(s.triangles.size(), 4u);
    EXPECT_EQ(s.vertices.size(), 4u);
    EXPECT_EQ(s.euler_characteristic(), 2);
    EXPECT_EQ(code_of([&] { parse_stl(bytes.substr(0, bytes.size() - 10)); }), ErrorCode::MalformedFile);
    EXPECT_EQ(code_of([] { parse_stl(std::string(40, '\0')); }), ErrorCode::MalformedFile);
}

TEST(Vtk, OneElementLayout) {
    std::mt19937_64 rng(6);
    const Mesh m = single_tet_mesh(random_tet(rng));
    std::vector<double> u(30, 0.5);
    ScalarField f{"MPS", std::vector<double>(10, 1.25)};
    const std::string s = format_vtk(m, u, {f});
    EXPECT_EQ(s.rfind("# vtk DataFile Version 3.0\n", 0), 0u);
    EXPECT_NE(s.find("POINTS 10 double\n"), std::string::npos);
    EXPECT_NE(s.find("CELLS 1 11\n10 0 1 2 3 4 5 6 7 8 9\n"), std::string::npos);
    EXPECT_NE(s.find("CELL_TYPES 1\n24\n"), std::string::npos);
    EXPECT_NE(s.find("POINT_DATA 10\nVECTORS displacement double\n"), std::string::npos);
    EXPECT_NE(s.find("SCALARS MPS double 1\nLOOKUP_TABLE default\n1.25\n"), std::string::npos);
    EXPECT_EQ(code_of([&] { format_vtk(m, std::vector<double>(29), {}); }), ErrorCode::IoError);
    EXPECT_EQ(code_of([&] { format_vtk(m, u, {ScalarField{"x", {1.0}}}); }), ErrorCode::IoError);
}

TEST(Vtk, NumbersRoundTripExactly) {
    Mesh m = single_tet_mesh(std::array<Vec3, 10>{});
    m.nodes[0] = Vec3(0.1, 1.0 / 3.0, -2.5e-7);
    const std::string s = format_vtk(m, {}, {});
    std::istringstream in(s.substr(s.find("double\n") + 7));
    double x, y, z;
    in >> x >> y >> z;
    EXPECT_EQ(x, 0.1);
    EXPECT_EQ(y, 1.0 / 3.0);
    EXPECT_EQ(z, -2.5e-7);
}

TEST(Files, AtomicWriteLeavesOnlyTarget) {
    const auto dir = scratch_dir("atomic");
    const auto target = dir / "sub" / "out.txt";
    write_file_atomic(target, "first");
    write_file_atomic(target, "second");
    std::ifstream in(target);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    EXPECT_EQ(text, "second");
    std::size_t entries = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir / "sub")) ++entries;
    EXPECT_EQ(entries, 1u);
    std::filesystem::remove_all(dir);
}
