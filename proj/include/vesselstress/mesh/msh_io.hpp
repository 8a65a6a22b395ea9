#pragma once

#include "vesselstress/core/error.hpp"
#include "vesselstress/mesh/mesh.hpp"

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

namespace vesselstress {

/// Gmsh tet10 numbers its last two midsides (2,3) then (1,3); canonical order
/// is (1,3) then (2,3). The permutation is an involution, so it maps both ways.
inline constexpr std::array<int, 10> kMshTet10Order{0, 1, 2, 3, 4, 5, 6, 7, 9, 8};

namespace detail {

class MshTokens {
public:
    explicit MshTokens(std::istream& in) : in_(in) {}

    std::string word(const char* what) {
        std::string s;
        if (!(in_ >> s)) fail(ErrorCode::MalformedFile, std::string("unexpected end of file reading ") + what);
        return s;
    }

    template <typename T>
    T number(const char* what) {
        T v{};
        if (!(in_ >> v)) fail(ErrorCode::MalformedFile, std::string("expected number for ") + what);
        return v;
    }

    void expect(const std::string& tag) {
        const auto s = word(tag.c_str());
        if (s != tag) fail(ErrorCode::MalformedFile, "expected " + tag + ", found " + s);
    }

    void skip_section(const std::string& name) {
        const std::string end = "$End" + name.substr(1);
        std::string s;
        while (in_ >> s)
            if (s == end) return;
        fail(ErrorCode::MalformedFile, "unterminated section " + name);
    }

private:
    std::istream& in_;
};

}  // namespace detail

/// Parses MSH 4.1 ASCII. Volume elements must be all tet4 or all tet10;
/// surface triangles (types 2 and 9) are skipped.
inline Mesh parse_msh(std::istream& in) {
    detail::MshTokens tok(in);
    bool have_format = false, have_nodes = false, have_elements = false;
    Mesh mesh;
    std::unordered_map<std::size_t, NodeId> tag_to_index;
    int volume_type = 0;

    std::string section;
    while (in >> section) {
        if (section == "$MeshFormat") {
            const auto version = tok.word("version");
            const int file_type = tok.number<int>("file-type");
            tok.number<int>("data-size");
            if (version != "4.1") fail(ErrorCode::MalformedFile, "unsupported MSH version " + version);
            if (file_type != 0) fail(ErrorCode::MalformedFile, "binary MSH is not supported");
            tok.expect("$EndMeshFormat");
            have_format = true;
        } else if (section == "$Nodes") {
            if (!have_format) fail(ErrorCode::MalformedFile, "$Nodes before $MeshFormat");
            if (have_nodes) fail(ErrorCode::MalformedFile, "duplicate $Nodes");
            const auto blocks = tok.number<std::size_t>("numEntityBlocks");
            const auto total = tok.number<std::size_t>("numNodes");
            tok.number<std::size_t>("minNodeTag");
            tok.number<std::size_t>("maxNodeTag");
            mesh.nodes.reserve(total);
            for (std::size_t b = 0; b < blocks; ++b) {
                const int dim = tok.number<int>("entityDim");
                tok.number<int>("entityTag");
                const int parametric = tok.number<int>("parametric");
                const auto count = tok.number<std::size_t>("numNodesInBlock");
                std::vector<std::size_t> tags(count);
                for (auto& t : tags) t = tok.number<std::size_t>("nodeTag");
                const int extra = parametric ? dim : 0;
                for (std::size_t i = 0; i < count; ++i) {
                    Vec3 p;
                    p.x() = tok.number<double>("x");
                    p.y() = tok.number<double>("y");
                    p.z() = tok.number<double>("z");
                    for (int k = 0; k < extra; ++k) tok.number<double>("parametric coordinate");
                    if (!tag_to_index.emplace(tags[i], static_cast<NodeId>(mesh.nodes.size())).second)
                        fail(ErrorCode::MalformedFile, "duplicate node tag " + std::to_string(tags[i]));
                    mesh.nodes.push_back(p);
                }
            }
            if (mesh.nodes.size() != total)
                fail(ErrorCode::MalformedFile, "node count " + std::to_string(mesh.nodes.size()) +
                                                   " does not match header " + std::to_string(total));
            tok.expect("$EndNodes");
            have_nodes = true;
        } else if (section == "$Elements") {
            if (!have_nodes) fail(ErrorCode::MalformedFile, "$Elements before $Nodes");
            if (have_elements) fail(ErrorCode::MalformedFile, "duplicate $Elements");
            const auto blocks = tok.number<std::size_t>("numEntityBlocks");
            const auto total = tok.number<std::size_t>("numElements");
            tok.number<std::size_t>("minElementTag");
            tok.number<std::size_t>("maxElementTag");
            std::size_t seen = 0;
            for (std::size_t b = 0; b < blocks; ++b) {
                tok.number<int>("entityDim");
                tok.number<int>("entityTag");
                const int type = tok.number<int>("elementType");
                const auto count = tok.number<std::size_t>("numElementsInBlock");
                int nodes_per = 0;
                switch (type) {
                case 2: nodes_per = 3; break;
                case 9: nodes_per = 6; break;
                case 4: nodes_per = 4; break;
                case 11: nodes_per = 10; break;
                default: fail(ErrorCode::UnsupportedElementType, "MSH element type " + std::to_string(type));
                }
                const bool volume = type == 4 || type == 11;
                if (volume && count > 0) {
                    if (volume_type != 0 && volume_type != type)
                        fail(ErrorCode::UnsupportedElementType, "mixed tet4 and tet10 elements");
                    volume_type = type;
                }
                for (std::size_t i = 0; i < count; ++i) {
                    tok.number<std::size_t>("elementTag");
                    Element el;
                    el.fill(-1);
                    for (int k = 0; k < nodes_per; ++k) {
                        const auto tag = tok.number<std::size_t>("element node tag");
                        if (!volume) continue;
                        auto it = tag_to_index.find(tag);
                        if (it == tag_to_index.end())
                            fail(ErrorCode::MalformedFile, "element references unknown node " + std::to_string(tag));
                        el[type == 11 ? kMshTet10Order[k] : k] = it->second;
                    }
                    if (volume) mesh.elements.push_back(el);
                }
                seen += count;
            }
            if (seen != total)
                fail(ErrorCode::MalformedFile, "element count " + std::to_string(seen) +
                                                   " does not match header " + std::to_string(total));
            tok.expect("$EndElements");
            have_elements = true;
        } else if (!section.empty() && section[0] == '$' && section.rfind("$End", 0) != 0) {
            tok.skip_section(section);
        } else {
            fail(ErrorCode::MalformedFile, "unexpected token " + section);
        }
    }
    if (!have_format) fail(ErrorCode::MalformedFile, "missing $MeshFormat");
    if (!have_nodes) fail(ErrorCode::MalformedFile, "missing $Nodes");
    if (!have_elements) fail(ErrorCode::MalformedFile, "missing $Elements");
    if (mesh.elements.empty()) fail(ErrorCode::MalformedFile, "no volume elements");

    mesh.order = volume_type == 11 ? MeshOrder::Quadratic : MeshOrder::Linear;
    validate_mesh(mesh);
    return mesh;
}

inline Mesh read_msh(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
    return parse_msh(in);
}

/// Writes the volume mesh as MSH 4.1 ASCII with one entity block per section.
inline void format_msh(const Mesh& mesh, std::ostream& out) {
    const std::size_t nn = mesh.node_count(), ne = mesh.element_count();
    const bool quad = mesh.order == MeshOrder::Quadratic;
    char buf[96];
    out << "$MeshFormat\n4.1 0 8\n$EndMeshFormat\n";
    out << "$Nodes\n1 " << nn << " 1 " << nn << "\n3 1 0 " << nn << "\n";
    for (std::size_t i = 0; i < nn; ++i) out << i + 1 << '\n';
    for (const auto& p : mesh.nodes) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", p.x(), p.y(), p.z());
        out << buf;
    }
    out << "$EndNodes\n";
    out << "$Elements\n1 " << ne << " 1 " << ne << "\n3 1 " << (quad ? 11 : 4) << ' ' << ne << '\n';
    for (std::size_t e = 0; e < ne; ++e) {
        out << e + 1;
        if (quad)
            for (int k = 0; k < 10; ++k) out << ' ' << mesh.elements[e][kMshTet10Order[k]] + 1;
        else
            for (int k = 0; k < 4; ++k) out << ' ' << mesh.elements[e][k] + 1;
        out << '\n';
    }
    out << "$EndElements\n";
}

inline void write_msh(const Mesh& mesh, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
    format_msh(mesh, out);
    if (!out) fail(ErrorCode::IoError, "write failed: " + path.string());
}

}  // namespace vesselstress
