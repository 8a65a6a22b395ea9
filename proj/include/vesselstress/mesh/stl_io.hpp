#pragma once

#include "vesselstress/core/error.hpp"
#include "vesselstress/core/types.hpp"
#include "vesselstress/mesh/mesh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace vesselstress {

/// Surface triangles read from STL, with coincident corners welded.
struct TriangleSoup {
    std::vector<Vec3> vertices;
    std::vector<std::array<NodeId, 3>> triangles;
    std::vector<Vec3> normals;  // from vertex winding; zero for degenerate triangles

    std::size_t edge_count() const {
        std::vector<std::uint64_t> keys;
        keys.reserve(triangles.size() * 3);
        for (const auto& t : triangles)
            for (int k = 0; k < 3; ++k) keys.push_back(edge_key(t[k], t[(k + 1) % 3]));
        std::sort(keys.begin(), keys.end());
        return static_cast<std::size_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
    }

    long euler_characteristic() const {
        return static_cast<long>(vertices.size()) - static_cast<long>(edge_count()) +
               static_cast<long>(triangles.size());
    }
};

namespace detail {

/// Welds points closer than `tol` using a hash grid of cell size tol.
class PointWelder {
public:
    explicit PointWelder(double tol) : tol_(tol) {}

    NodeId add(const Vec3& p, std::vector<Vec3>& points) {
        const auto c = cell(p);
        for (long dx = -1; dx <= 1; ++dx)
            for (long dy = -1; dy <= 1; ++dy)
                for (long dz = -1; dz <= 1; ++dz) {
                    auto it = grid_.find({c[0] + dx, c[1] + dy, c[2] + dz});
                    if (it == grid_.end()) continue;
                    for (auto id : it->second)
                        if ((points[id] - p).norm() <= tol_) return id;
                }
        const auto id = static_cast<NodeId>(points.size());
        points.push_back(p);
        grid_[c].push_back(id);
        return id;
    }

private:
    std::array<long long, 3> cell(const Vec3& p) const {
        return {static_cast<long long>(std::floor(p.x() / tol_)), static_cast<long long>(std::floor(p.y() / tol_)),
                static_cast<long long>(std::floor(p.z() / tol_))};
    }

    double tol_;
    std::map<std::array<long long, 3>, std::vector<NodeId>> grid_;
};

inline void finish_soup(TriangleSoup& soup) {
    soup.normals.clear();
    for (const auto& t : soup.triangles) {
        const Vec3 n = (soup.vertices[t[1]] - soup.vertices[t[0]]).cross(soup.vertices[t[2]] - soup.vertices[t[0]]);
        const double len = n.norm();
        soup.normals.push_back(len > 0.0 ? Vec3(n / len) : Vec3::Zero());
    }
}

inline bool looks_ascii(const std::string& bytes) {
    if (bytes.size() < 5 || bytes.compare(0, 5, "solid") != 0) return false;
    // Binary files may also start with "solid"; trust the record count when it fits.
    if (bytes.size() >= 84) {
        std::uint32_t n;
        std::memcpy(&n, bytes.data() + 80, 4);
        if (84 + 50ull * n == bytes.size()) return false;
    }
    return bytes.find("facet") != std::string::npos || bytes.find("endsolid") != std::string::npos;
}

}  // namespace detail

inline constexpr double kStlWeldTolerance = 1e-6;  // mm

/// ASCII or binary STL. Stored facet normals are ignored and recomputed.
inline TriangleSoup parse_stl(const std::string& bytes, double weld_tol = kStlWeldTolerance) {
    TriangleSoup soup;
    detail::PointWelder welder(weld_tol);
    if (detail::looks_ascii(bytes)) {
        std::istringstream in(bytes);
        std::string tok;
        std::vector<Vec3> corners;
        while (in >> tok) {
            if (tok == "vertex") {
                Vec3 p;
                if (!(in >> p.x() >> p.y() >> p.z())) fail(ErrorCode::MalformedFile, "bad STL vertex");
                corners.push_back(p);
            } else if (tok == "endfacet") {
                if (corners.size() != 3) fail(ErrorCode::MalformedFile, "STL facet without three vertices");
                std::array<NodeId, 3> t;
                for (int k = 0; k < 3; ++k) t[k] = welder.add(corners[k], soup.vertices);
                soup.triangles.push_back(t);
                corners.clear();
            }
        }
        if (!corners.empty()) fail(ErrorCode::MalformedFile, "unterminated STL facet");
    } else {
        if (bytes.size() < 84) fail(ErrorCode::MalformedFile, "binary STL shorter than its header");
        std::uint32_t n;
        std::memcpy(&n, bytes.data() + 80, 4);
        if (bytes.size() < 84 + 50ull * n)
            fail(ErrorCode::MalformedFile, "binary STL truncated: " + std::to_string(n) + " records declared");
        for (std::uint32_t i = 0; i < n; ++i) {
            const char* rec = bytes.data() + 84 + 50ull * i;
            std::array<NodeId, 3> t;
            for (int k = 0; k < 3; ++k) {
                float xyz[3];
                std::memcpy(xyz, rec + 12 + 12 * k, 12);
                t[k] = welder.add(Vec3(xyz[0], xyz[1], xyz[2]), soup.vertices);
            }
            soup.triangles.push_back(t);
        }
    }
    if (soup.triangles.empty()) fail(ErrorCode::MalformedFile, "STL without triangles");
    detail::finish_soup(soup);
    return soup;
}

inline TriangleSoup read_stl(const std::filesystem::path& path, double weld_tol = kStlWeldTolerance) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_stl(bytes, weld_tol);
}

}  // namespace vesselstress
