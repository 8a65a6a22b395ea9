#pragma once

#include "vesselstress/core/error.hpp"
#include "vesselstress/mesh/mesh.hpp"
#include "vesselstress/stress/stress.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <system_error>
#include <vector>

#include <unistd.h>

namespace vesselstress {

/// Writes to a sibling temporary file, then renames it over the target.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) fail(ErrorCode::IoError, "cannot create " + path.parent_path().string() + ": " + ec.message());
    std::filesystem::path tmp = path;
    tmp += ".tmp" + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorCode::IoError, "cannot open " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) fail(ErrorCode::IoError, "write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        fail(ErrorCode::IoError, "cannot rename onto " + path.string() + ": " + ec.message());
    }
}

namespace detail {

inline void append_number(std::string& s, double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    s.append(buf, end);
}

inline void append_number(std::string& s, long long v) {
    char buf[24];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    s.append(buf, end);
}

}  // namespace detail

/// VTK node order for the quadratic tetrahedron, indexed by VTK position.
/// Midsides (0,1), (1,2), (0,2), (0,3), (1,3), (2,3) match the internal order.
inline constexpr std::array<int, 10> kVtkTet10Order{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};

/// Legacy ASCII unstructured grid: points, cells (type 24 for quadratic,
/// 10 for linear meshes), displacement vectors and the given nodal scalars.
inline std::string format_vtk(const Mesh& mesh, std::span<const double> displacement,
                              const std::vector<ScalarField>& scalars, const std::string& title = "vesselstress") {
    const std::size_t nn = mesh.node_count();
    const std::size_t ne = mesh.element_count();
    const bool quad = mesh.order == MeshOrder::Quadratic;
    const int per = quad ? 10 : 4;
    if (!displacement.empty() && displacement.size() != 3 * nn)
        fail(ErrorCode::IoError, "displacement length does not match node count");
    for (const auto& f : scalars)
        if (f.values.size() != nn) fail(ErrorCode::IoError, "field " + f.name + " does not match node count");

    std::string s;
    s.reserve(nn * 80 + ne * 90 + scalars.size() * nn * 24);
    s += "# vtk DataFile Version 3.0\n";
    s += title.substr(0, 255);
    s += "\nASCII\nDATASET UNSTRUCTURED_GRID\nPOINTS ";
    detail::append_number(s, static_cast<long long>(nn));
    s += " double\n";
    for (const auto& p : mesh.nodes) {
        detail::append_number(s, p.x());
        s += ' ';
        detail::append_number(s, p.y());
        s += ' ';
        detail::append_number(s, p.z());
        s += '\n';
    }
    s += "CELLS ";
    detail::append_number(s, static_cast<long long>(ne));
    s += ' ';
    detail::append_number(s, static_cast<long long>(ne * (per + 1)));
    s += '\n';
    for (const auto& el : mesh.elements) {
        detail::append_number(s, static_cast<long long>(per));
        for (int i = 0; i < per; ++i) {
            s += ' ';
            detail::append_number(s, static_cast<long long>(el[quad ? kVtkTet10Order[i] : i]));
        }
        s += '\n';
    }
    s += "CELL_TYPES ";
    detail::append_number(s, static_cast<long long>(ne));
    s += '\n';
    const char* type = quad ? "24\n" : "10\n";
    for (std::size_t e = 0; e < ne; ++e) s += type;

    s += "POINT_DATA ";
    detail::append_number(s, static_cast<long long>(nn));
    s += '\n';
    if (!displacement.empty()) {
        s += "VECTORS displacement double\n";
        for (std::size_t n = 0; n < nn; ++n) {
            for (int a = 0; a < 3; ++a) {
                if (a) s += ' ';
                detail::append_number(s, displacement[3 * n + a]);
            }
            s += '\n';
        }
    }
    for (const auto& f : scalars) {
        s += "SCALARS " + f.name + " double 1\nLOOKUP_TABLE default\n";
        for (double v : f.values) {
            detail::append_number(s, v);
            s += '\n';
        }
    }
    return s;
}

inline void write_vtk(const Mesh& mesh, std::span<const double> displacement, const std::vector<ScalarField>& scalars,
                      const std::filesystem::path& path) {
    write_file_atomic(path, format_vtk(mesh, displacement, scalars));
}

}  // namespace vesselstress
