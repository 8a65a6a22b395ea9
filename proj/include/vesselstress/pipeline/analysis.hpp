#pragma once

#include "vesselstress/core/error.hpp"
#include "vesselstress/core/parallel.hpp"
#include "vesselstress/core/version.hpp"
#include "vesselstress/element/material.hpp"
#include "vesselstress/element/quadrature.hpp"
#include "vesselstress/mesh/classify.hpp"
#include "vesselstress/mesh/generators.hpp"
#include "vesselstress/mesh/msh_io.hpp"
#include "vesselstress/mesh/promote.hpp"
#include "vesselstress/mesh/quality.hpp"
#include "vesselstress/pipeline/config.hpp"
#include "vesselstress/pipeline/io.hpp"
#include "vesselstress/solve/assemble.hpp"
#include "vesselstress/solve/cg.hpp"
#include "vesselstress/solve/constraints.hpp"
#include "vesselstress/solve/pmg.hpp"
#include "vesselstress/stats/stats.hpp"
#include "vesselstress/stress/stress.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace vesselstress {

struct PatchSummary {
    PatchKind kind = PatchKind::Cap;
    std::size_t faces = 0;
    std::size_t nodes = 0;
    double area = 0.0;  // mm^2
    std::optional<double> planarity;
};

struct StageTimes {
    double mesh = 0.0;
    double classify = 0.0;
    double assemble = 0.0;
    double preconditioner = 0.0;
    double solve = 0.0;
    double stress = 0.0;
    double output = 0.0;
    double total = 0.0;
};

enum class BoundaryConditionKind { FixedCaps, RigidModeAnchors };

inline std::string to_string(BoundaryConditionKind k) {
    return k == BoundaryConditionKind::FixedCaps ? "fixedCaps" : "rigidModeAnchors";
}

struct ResultBundle {
    AnalysisConfig config;
    Mesh mesh;
    std::size_t removed_nodes = 0;
    MeshQualityReport mesh_stats;
    std::vector<SurfacePatch> patches;
    std::vector<PatchSummary> patch_summary;
    BoundaryConditionKind boundary_condition = BoundaryConditionKind::FixedCaps;
    std::size_t constrained_dofs = 0;
    std::size_t free_dofs = 0;
    std::size_t iterations = 0;
    double rel_residual = 0.0;
    double solve_seconds = 0.0;
    std::vector<double> displacement;  // 3 per node, mm
    StressTensorField stress;
    ScalarField mps;
    ScalarField von_mises;
    PercentileCurve exterior_curve{};
    double p99 = 0.0;  // MPa
    StageTimes timing;
    std::string version = kVersion;
    std::string timestamp;
    std::optional<std::filesystem::path> vtk_path;
    std::optional<std::filesystem::path> report_path;
};

namespace detail {

inline std::string utc_timestamp() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

class StageClock {
public:
    double lap() {
        const auto now = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        return s;
    }
    double since_start() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
    std::chrono::steady_clock::time_point last_ = start_;
};

template <typename Fn>
auto run_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const Error& e) {
        if (!e.stage().empty()) throw;
        throw e.with_stage(stage);
    }
}

inline Mesh load_mesh(const AnalysisConfig& c) {
    if (c.generator) {
        const auto& g = *c.generator;
        return g.kind == "sphere" ? generate_sphere_shell(g.a, g.b, g.h) : generate_cylinder_shell(g.a, g.b, g.L, g.h);
    }
    return read_msh(*c.mesh_path);
}

}  // namespace detail

/// Mesh -> classify -> assemble -> constrain -> solve -> stress -> statistics,
/// plus VTK and JSON output when config.out_dir is set. Errors carry the
/// stage they came from.
inline ResultBundle run_analysis(const AnalysisConfig& config) {
    validate_config(config);
    detail::StageClock clock;
    ResultBundle r;
    r.config = config;
    r.timestamp = detail::utc_timestamp();
    const int threads = config.deterministic ? 1 : worker_count();

    detail::run_stage("mesh", [&] {
        r.mesh = detail::load_mesh(config);
        if (r.mesh.order == MeshOrder::Linear) r.mesh = promote_to_quadratic(r.mesh);
        r.removed_nodes = remove_unreferenced_nodes(r.mesh);
        r.mesh_stats = mesh_quality(r.mesh);
    });
    r.timing.mesh = clock.lap();

    detail::run_stage("classify", [&] {
        r.patches = classify_patches(r.mesh, config.crease_angle_deg, config.cap_planarity_rel);
        for (const auto& p : r.patches)
            r.patch_summary.push_back({p.kind, p.faces.size(), p.node_set.size(), patch_area(r.mesh, p), p.planarity});
    });
    r.timing.classify = clock.lap();

    const ElasticMaterial material = ElasticMaterial::make(config.E, config.nu);
    {
        CsrMatrix K;
        std::vector<double> F;
        DirichletSet bc;
        detail::run_stage("assemble", [&] {
            K = assemble(r.mesh, material, tet_rule(config.quadrature), threads);
            F = assemble_load(r.mesh, r.patches, LoadSpec{config.pressure_mpa()});
        });
        detail::run_stage("constraints", [&] {
            try {
                bc = fixed_caps(r.patches);
                r.boundary_condition = BoundaryConditionKind::FixedCaps;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::NoCaps) throw;
                bc = rigid_mode_anchors(r.mesh);
                r.boundary_condition = BoundaryConditionKind::RigidModeAnchors;
            }
            r.constrained_dofs = bc.size();
        });
        ReducedSystem sys = detail::run_stage("constraints", [&] { return apply_dirichlet(std::move(K), std::move(F), bc); });
        r.free_dofs = sys.K.rows;
        r.timing.assemble = clock.lap();

        std::unique_ptr<Preconditioner> M = detail::run_stage("solve", [&]() -> std::unique_ptr<Preconditioner> {
            if (config.preconditioner == PreconditionerKind::Jacobi) return std::make_unique<JacobiPreconditioner>(sys.K);
            return std::make_unique<PMultigridPreconditioner>(sys.K, r.mesh, sys.free_dofs, threads);
        });
        r.timing.preconditioner = clock.lap();

        CgOptions opt;
        opt.rel_tol = config.rel_tol;
        opt.max_iter = config.max_iter;
        opt.threads = threads;
        SolveResult sol = detail::run_stage("solve", [&] { return solve_cg(sys.K, sys.F, *M, opt); });
        r.iterations = sol.iterations;
        r.rel_residual = sol.relative_residual;
        r.solve_seconds = sol.seconds;
        r.displacement = sys.reconstruct(sol.u);
        r.timing.solve = clock.lap();
    }

    detail::run_stage("stress", [&] {
        r.stress = recover_stress(r.mesh, r.displacement, material, threads);
        r.mps = max_principal_field(r.stress);
        r.von_mises = von_mises_field(r.stress);
        const SurfacePatch* ext = find_patch(r.patches, PatchKind::Exterior);
        if (!ext) fail(ErrorCode::EmptyPatch, "no Exterior patch");
        r.exterior_curve = percentile_curve(restrict_to_patch(r.mps, *ext));
        r.p99 = r.exterior_curve[99];
    });
    r.timing.stress = clock.lap();
    r.timing.total = clock.since_start();
    return r;
}

/// Report document. Keys appear in a fixed order; numbers must be finite.
inline nlohmann::ordered_json report_json(const ResultBundle& r) {
    nlohmann::ordered_json j;
    j["config"] = config_to_json(r.config);

    nlohmann::ordered_json mesh;
    mesh["nodes"] = r.mesh_stats.node_count;
    mesh["elements"] = r.mesh_stats.element_count;
    mesh["order"] = "quadratic";
    mesh["removedNodes"] = r.removed_nodes;
    if (r.mesh_stats.wall_layers) mesh["wallLayers"] = *r.mesh_stats.wall_layers;
    else mesh["wallLayers"] = nullptr;
    mesh["boundaryFaces"] = r.mesh_stats.boundary_face_count;
    mesh["minVolumeMM3"] = r.mesh_stats.min_volume;
    mesh["maxVolumeMM3"] = r.mesh_stats.max_volume;
    mesh["minQuality"] = r.mesh_stats.min_quality;
    j["mesh"] = mesh;

    nlohmann::ordered_json patches = nlohmann::ordered_json::array();
    for (const auto& p : r.patch_summary) {
        nlohmann::ordered_json pj;
        pj["kind"] = to_string(p.kind);
        pj["faces"] = p.faces;
        pj["nodes"] = p.nodes;
        pj["areaMM2"] = p.area;
        if (p.planarity) pj["planarityMM"] = *p.planarity;
        patches.push_back(pj);
    }
    j["patches"] = patches;
    j["boundaryConditions"] = {{"kind", to_string(r.boundary_condition)}, {"constrainedDofs", r.constrained_dofs}};

    nlohmann::ordered_json solver;
    solver["dofs"] = r.free_dofs;
    solver["preconditioner"] = to_string(r.config.preconditioner);
    solver["iterations"] = r.iterations;
    solver["relResidual"] = r.rel_residual;
    solver["seconds"] = r.solve_seconds;
    j["solver"] = solver;

    nlohmann::ordered_json stress;
    stress["p99MPa"] = r.p99;
    stress["percentileCurve"] = std::vector<double>(r.exterior_curve.begin(), r.exterior_curve.end());
    // Nodal fields go to the VTK file; the report carries their extent.
    nlohmann::ordered_json fields;
    for (const ScalarField* f : {&r.mps, &r.von_mises}) {
        nlohmann::ordered_json fj;
        fj["nodes"] = f->values.size();
        if (f->values.empty()) {
            fj["minMPa"] = fj["maxMPa"] = fj["meanMPa"] = 0.0;
        } else {
            const auto [lo, hi] = std::minmax_element(f->values.begin(), f->values.end());
            fj["minMPa"] = *lo;
            fj["maxMPa"] = *hi;
            fj["meanMPa"] = std::accumulate(f->values.begin(), f->values.end(), 0.0) / double(f->values.size());
        }
        fields[f->name] = fj;
    }
    stress["fields"] = fields;
    if (r.vtk_path) stress["vtkFile"] = r.vtk_path->filename().string();
    else stress["vtkFile"] = nullptr;
    j["stress"] = stress;

    j["timing"] = {{"meshSeconds", r.timing.mesh},
                   {"classifySeconds", r.timing.classify},
                   {"assembleSeconds", r.timing.assemble},
                   {"preconditionerSeconds", r.timing.preconditioner},
                   {"solveSeconds", r.timing.solve},
                   {"stressSeconds", r.timing.stress},
                   {"outputSeconds", r.timing.output},
                   {"totalSeconds", r.timing.total}};
    j["version"] = r.version;
    j["provenance"] = {{"timestamp", r.timestamp}};
    return j;
}

namespace detail {

inline void require_finite(const nlohmann::ordered_json& j, const std::string& where) {
    if (j.is_number_float() && !std::isfinite(j.get<double>()))
        fail(ErrorCode::IoError, "non-finite number at " + where);
    if (j.is_object())
        for (auto it = j.begin(); it != j.end(); ++it) require_finite(it.value(), where + "/" + it.key());
    if (j.is_array())
        for (std::size_t i = 0; i < j.size(); ++i) require_finite(j[i], where + "/" + std::to_string(i));
}

}  // namespace detail

inline void write_report(const ResultBundle& r, const std::filesystem::path& path) {
    const auto j = report_json(r);
    detail::require_finite(j, "");
    write_file_atomic(path, j.dump(2) + "\n");
}

/// Writes <name>.vtk (optional) and <name>.json into config.out_dir; name defaults to "result".
inline void write_outputs(ResultBundle& r) {
    if (r.config.out_dir.empty()) return;
    detail::run_stage("output", [&] {
        const auto start = std::chrono::steady_clock::now();
        const std::string stem = r.config.name.empty() ? "result" : r.config.name;
        if (r.config.write_vtk) {
            r.vtk_path = r.config.out_dir / (stem + ".vtk");
            write_vtk(r.mesh, r.displacement, {r.mps, r.von_mises}, *r.vtk_path);
        }
        r.report_path = r.config.out_dir / (stem + ".json");
        r.timing.output = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        r.timing.total += r.timing.output;
        write_report(r, *r.report_path);
    });
}

/// run_analysis followed by write_outputs.
inline ResultBundle run_and_write(const AnalysisConfig& config) {
    ResultBundle r = run_analysis(config);
    write_outputs(r);
    return r;
}

}  // namespace vesselstress
