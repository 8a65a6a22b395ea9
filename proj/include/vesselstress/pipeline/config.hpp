#pragma once

#include "vesselstress/core/error.hpp"
#include "vesselstress/element/material.hpp"
#include "vesselstress/element/quadrature.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>

namespace vesselstress {

inline constexpr double kMpaPerKpa = 1e-3;
inline constexpr double kMpaPerMmHg = 1.33322e-4;

enum class PressureUnit { kPa, mmHg, MPa };

inline std::string to_string(PressureUnit u) {
    switch (u) {
    case PressureUnit::kPa: return "kPa";
    case PressureUnit::mmHg: return "mmHg";
    case PressureUnit::MPa: return "MPa";
    }
    return "?";
}

inline double to_mpa(double value, PressureUnit unit) {
    switch (unit) {
    case PressureUnit::kPa: return value * kMpaPerKpa;
    case PressureUnit::mmHg: return value * kMpaPerMmHg;
    case PressureUnit::MPa: return value;
    }
    return value;
}

enum class PreconditionerKind { PMultigrid, Jacobi };

inline std::string to_string(PreconditionerKind k) { return k == PreconditionerKind::Jacobi ? "jacobi" : "pmg"; }

struct GeneratorSpec {
    std::string kind = "cylinder";  // cylinder | sphere
    double a = 10.0;                // inner radius, mm
    double b = 11.5;                // outer radius, mm
    double L = 80.0;                // length, mm (cylinder only)
    double h = 0.5;                 // target element size, mm
};

struct AnalysisConfig {
    std::string name;
    std::optional<std::filesystem::path> mesh_path;
    std::optional<GeneratorSpec> generator;
    double pressure_value = 13.0;
    PressureUnit pressure_unit = PressureUnit::kPa;
    double E = 100000.0;  // MPa
    double nu = 0.49;
    double crease_angle_deg = 40.0;
    double cap_planarity_rel = 0.01;
    double rel_tol = 1e-8;
    std::optional<std::size_t> max_iter;
    PreconditionerKind preconditioner = PreconditionerKind::PMultigrid;
    StiffnessQuadrature quadrature = StiffnessQuadrature::Degree2;
    bool deterministic = false;
    /// Empty: no files are written.
    std::filesystem::path out_dir;
    bool write_vtk = true;

    double pressure_mpa() const { return to_mpa(pressure_value, pressure_unit); }
};

namespace detail {

[[noreturn]] inline void config_error(const std::string& what) { fail(ErrorCode::ConfigInvalid, what); }

inline void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& known, const std::string& where) {
    if (!j.is_object()) config_error(where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) config_error("unknown key '" + it.key() + "' in " + where);
}

inline double get_number(const nlohmann::json& j, const char* key, double fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number()) config_error(where + "." + key + " must be a number");
    return v.get<double>();
}

}  // namespace detail

/// Checks ranges and the material; throws ConfigInvalid.
inline void validate_config(const AnalysisConfig& c) {
    using detail::config_error;
    if (c.mesh_path.has_value() == c.generator.has_value())
        config_error("exactly one of input.mesh and input.generator is required");
    if (c.generator) {
        const auto& g = *c.generator;
        if (g.kind != "cylinder" && g.kind != "sphere") config_error("generator kind must be cylinder or sphere");
        if (!(std::isfinite(g.a) && std::isfinite(g.b) && std::isfinite(g.h) && std::isfinite(g.L)))
            config_error("generator parameters must be finite");
        if (!(g.a > 0.0 && g.b > g.a && g.h > 0.0) || (g.kind == "cylinder" && !(g.L > 0.0)))
            config_error("generator needs 0 < a < b, h > 0 and L > 0 for a cylinder");
    }
    if (!(std::isfinite(c.pressure_value) && c.pressure_value > 0.0)) config_error("pressure must be positive");
    try {
        (void)material_matrix(c.E, c.nu);
    } catch (const Error& e) {
        config_error(std::string(to_string(e.code())) + ": " + e.detail());
    }
    if (!(c.crease_angle_deg > 0.0 && c.crease_angle_deg < 180.0)) config_error("creaseAngleDeg must be in (0, 180)");
    if (!(c.cap_planarity_rel > 0.0 && c.cap_planarity_rel < 1.0)) config_error("capPlanarityRel must be in (0, 1)");
    if (!(c.rel_tol > 0.0 && c.rel_tol < 1.0)) config_error("solver.relTol must be in (0, 1)");
    if (c.max_iter && *c.max_iter == 0) config_error("solver.maxIter must be positive");
}

/// Reads a config object. Relative mesh paths are resolved against base_dir.
inline AnalysisConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
    using detail::config_error;
    using detail::get_number;
    detail::reject_unknown_keys(j,
                                {"name", "input", "pressure", "E", "nu", "creaseAngleDeg", "capPlanarityRel",
                                 "solver", "quadrature", "deterministic", "outDir", "writeVtk"},
                                "config");
    AnalysisConfig c;
    try {
        if (j.contains("name")) c.name = j.at("name").get<std::string>();

        if (!j.contains("input")) config_error("input is required");
        const auto& in = j.at("input");
        detail::reject_unknown_keys(in, {"mesh", "generator"}, "input");
        if (in.contains("mesh")) {
            std::filesystem::path p = in.at("mesh").get<std::string>();
            c.mesh_path = (p.is_relative() && !base_dir.empty()) ? base_dir / p : p;
        }
        if (in.contains("generator")) {
            const auto& g = in.at("generator");
            detail::reject_unknown_keys(g, {"kind", "a", "b", "L", "h"}, "input.generator");
            GeneratorSpec s;
            if (!g.contains("kind")) config_error("input.generator.kind is required");
            s.kind = g.at("kind").get<std::string>();
            s.a = get_number(g, "a", s.a, "input.generator");
            s.b = get_number(g, "b", s.b, "input.generator");
            s.L = get_number(g, "L", s.L, "input.generator");
            s.h = get_number(g, "h", s.h, "input.generator");
            c.generator = s;
        }

        if (j.contains("pressure")) {
            const auto& p = j.at("pressure");
            detail::reject_unknown_keys(p, {"value", "unit"}, "pressure");
            if (!p.contains("value")) config_error("pressure.value is required");
            c.pressure_value = get_number(p, "value", 0.0, "pressure");
            const std::string unit = p.value("unit", std::string("kPa"));
            if (unit == "kPa") c.pressure_unit = PressureUnit::kPa;
            else if (unit == "mmHg") c.pressure_unit = PressureUnit::mmHg;
            else if (unit == "MPa") c.pressure_unit = PressureUnit::MPa;
            else config_error("pressure.unit must be kPa, mmHg or MPa");
        }
        c.E = get_number(j, "E", c.E, "config");
        c.nu = get_number(j, "nu", c.nu, "config");
        c.crease_angle_deg = get_number(j, "creaseAngleDeg", c.crease_angle_deg, "config");
        c.cap_planarity_rel = get_number(j, "capPlanarityRel", c.cap_planarity_rel, "config");

        if (j.contains("solver")) {
            const auto& s = j.at("solver");
            detail::reject_unknown_keys(s, {"relTol", "maxIter", "preconditioner"}, "solver");
            c.rel_tol = get_number(s, "relTol", c.rel_tol, "solver");
            if (s.contains("maxIter") && !s.at("maxIter").is_null()) {
                if (!s.at("maxIter").is_number_unsigned()) config_error("solver.maxIter must be a positive integer");
                c.max_iter = s.at("maxIter").get<std::size_t>();
            }
            const std::string pc = s.value("preconditioner", std::string("pmg"));
            if (pc == "pmg") c.preconditioner = PreconditionerKind::PMultigrid;
            else if (pc == "jacobi") c.preconditioner = PreconditionerKind::Jacobi;
            else config_error("solver.preconditioner must be pmg or jacobi");
        }
        if (j.contains("quadrature")) {
            const std::string q = j.at("quadrature").get<std::string>();
            if (q == "degree2") c.quadrature = StiffnessQuadrature::Degree2;
            else if (q == "degree4") c.quadrature = StiffnessQuadrature::Degree4;
            else config_error("quadrature must be degree2 or degree4");
        }
        if (j.contains("deterministic")) c.deterministic = j.at("deterministic").get<bool>();
        if (j.contains("outDir")) {
            std::filesystem::path p = j.at("outDir").get<std::string>();
            c.out_dir = (p.is_relative() && !base_dir.empty() && !p.empty()) ? base_dir / p : p;
        }
        if (j.contains("writeVtk")) c.write_vtk = j.at("writeVtk").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        config_error(e.what());
    }
    validate_config(c);
    return c;
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ConfigInvalid, path.string() + ": " + e.what());
    }
}

inline AnalysisConfig load_config(const std::filesystem::path& path) {
    return parse_config(read_json_file(path), path.parent_path());
}

/// Config echo with a stable key order.
inline nlohmann::ordered_json config_to_json(const AnalysisConfig& c) {
    nlohmann::ordered_json j;
    j["name"] = c.name;
    nlohmann::ordered_json in;
    if (c.mesh_path) in["mesh"] = c.mesh_path->generic_string();
    if (c.generator) {
        const auto& g = *c.generator;
        in["generator"] = {{"kind", g.kind}, {"a", g.a}, {"b", g.b}};
        if (g.kind == "cylinder") in["generator"]["L"] = g.L;
        in["generator"]["h"] = g.h;
    }
    j["input"] = in;
    j["pressure"] = {{"value", c.pressure_value}, {"unit", to_string(c.pressure_unit)}, {"MPa", c.pressure_mpa()}};
    j["E"] = c.E;
    j["nu"] = c.nu;
    j["creaseAngleDeg"] = c.crease_angle_deg;
    j["capPlanarityRel"] = c.cap_planarity_rel;
    nlohmann::ordered_json s;
    s["relTol"] = c.rel_tol;
    if (c.max_iter) s["maxIter"] = *c.max_iter;
    else s["maxIter"] = nullptr;
    s["preconditioner"] = to_string(c.preconditioner);
    j["solver"] = s;
    j["quadrature"] = to_string(c.quadrature);
    j["deterministic"] = c.deterministic;
    j["outDir"] = c.out_dir.generic_string();
    j["writeVtk"] = c.write_vtk;
    return j;
}

}  // namespace vesselstress
