// vesselstress command line: solve, benchmark, convergence, cohort, mesh-info, classify.
//
// Exit codes: 0 success, 1 user or configuration error, 2 numerical failure.

#include "vesselstress/vesselstress.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace vesselstress;

namespace {

struct Overrides {
    std::optional<double> pressure_kpa;
    std::optional<double> e_mpa;
    std::optional<double> nu;
    std::optional<double> hmax_mm;
    std::optional<std::string> out_dir;
    bool deterministic = false;
    std::optional<std::string> quadrature;

    void add_to(CLI::App* app) {
        app->add_option("--pressure-kpa", pressure_kpa, "Internal pressure (kPa)");
        app->add_option("--e-mpa", e_mpa, "Young's modulus (MPa)");
        app->add_option("--nu", nu, "Poisson's ratio");
        app->add_option("--hmax-mm", hmax_mm, "Target element size for generated meshes (mm)");
        app->add_option("--out-dir", out_dir, "Output directory");
        app->add_flag("--deterministic", deterministic, "Single-threaded, bit-reproducible run");
        app->add_option("--quadrature", quadrature, "Stiffness quadrature: degree2 or degree4")
            ->check(CLI::IsMember({"degree2", "degree4"}));
    }

    void apply(AnalysisConfig& c) const {
        if (pressure_kpa) {
            c.pressure_value = *pressure_kpa;
            c.pressure_unit = PressureUnit::kPa;
        }
        if (e_mpa) c.E = *e_mpa;
        if (nu) c.nu = *nu;
        if (hmax_mm) {
            if (!c.generator) fail(ErrorCode::ConfigInvalid, "--hmax-mm needs a generator input");
            c.generator->h = *hmax_mm;
        }
        if (out_dir) c.out_dir = *out_dir;
        if (deterministic) c.deterministic = true;
        if (quadrature)
            c.quadrature = *quadrature == "degree4" ? StiffnessQuadrature::Degree4 : StiffnessQuadrature::Degree2;
        validate_config(c);
    }
};

void print_patches(const Mesh& mesh, const std::vector<SurfacePatch>& patches) {
    std::cout << std::left << std::setw(10) << "patch" << std::right << std::setw(10) << "faces" << std::setw(10)
              << "nodes" << std::setw(14) << "area_mm2" << std::setw(14) << "planarity_mm" << '\n';
    for (const auto& p : patches) {
        std::cout << std::left << std::setw(10) << to_string(p.kind) << std::right << std::setw(10) << p.faces.size()
                  << std::setw(10) << p.node_set.size() << std::setw(14) << std::fixed << std::setprecision(3)
                  << patch_area(mesh, p) << std::setw(14);
        if (p.planarity) std::cout << std::scientific << std::setprecision(2) << *p.planarity;
        else std::cout << "-";
        std::cout << std::defaultfloat << '\n';
    }
}

Mesh load_any_mesh(const std::optional<std::string>& mesh_path, const std::optional<std::string>& config_path,
                   AnalysisConfig* cfg_out) {
    if (mesh_path.has_value() == config_path.has_value())
        fail(ErrorCode::ConfigInvalid, "give exactly one of --mesh and --config");
    if (mesh_path) return read_msh(*mesh_path);
    AnalysisConfig c = load_config(*config_path);
    if (cfg_out) *cfg_out = c;
    return detail::load_mesh(c);
}

int cmd_solve(const std::string& config_path, const Overrides& ov) {
    AnalysisConfig c = load_config(config_path);
    ov.apply(c);
    if (c.out_dir.empty()) c.out_dir = "out";
    ResultBundle r = run_and_write(c);
    std::cout << "nodes " << r.mesh.node_count() << ", elements " << r.mesh.element_count() << ", dofs "
              << r.free_dofs << '\n';
    std::cout << "boundary conditions: " << to_string(r.boundary_condition) << " (" << r.constrained_dofs
              << " constrained DOFs)\n";
    std::cout << "solver: " << r.iterations << " iterations, relative residual " << r.rel_residual << ", "
              << r.solve_seconds << " s\n";
    std::cout << "exterior MPS p99: " << r.p99 << " MPa\n";
    std::cout << "total: " << r.timing.total << " s\n";
    if (r.vtk_path) std::cout << "wrote " << r.vtk_path->string() << '\n';
    if (r.report_path) std::cout << "wrote " << r.report_path->string() << '\n';
    return 0;
}

int cmd_benchmark(const std::string& kind, const std::optional<std::string>& config_path, const Overrides& ov) {
    BenchmarkParams p;
    if (config_path) {
        // Optional generator/material settings; the benchmark kind decides the geometry.
        AnalysisConfig c = load_config(*config_path);
        if (c.generator) {
            p.a = c.generator->a;
            p.b = c.generator->b;
            p.L = c.generator->L;
            p.h = c.generator->h;
        }
        p.pressure = c.pressure_mpa();
        p.E = c.E;
        p.nu = c.nu;
        p.rel_tol = c.rel_tol;
        p.preconditioner = c.preconditioner;
        p.quadrature = c.quadrature;
        p.deterministic = c.deterministic;
        p.out_dir = c.out_dir;
    }
    if (ov.pressure_kpa) p.pressure = *ov.pressure_kpa * kMpaPerKpa;
    if (ov.e_mpa) p.E = *ov.e_mpa;
    if (ov.nu) p.nu = *ov.nu;
    if (ov.hmax_mm) p.h = *ov.hmax_mm;
    if (ov.out_dir) p.out_dir = *ov.out_dir;
    if (ov.deterministic) p.deterministic = true;
    if (ov.quadrature)
        p.quadrature = *ov.quadrature == "degree4" ? StiffnessQuadrature::Degree4 : StiffnessQuadrature::Degree2;
    if (p.out_dir.empty()) p.out_dir = "out";

    const BenchmarkReport b = run_benchmark(kind, p);
    const auto j = benchmark_json(b);
    write_file_atomic(p.out_dir / (kind + "_benchmark_summary.json"), j.dump(2) + "\n");
    std::cout << std::setprecision(6);
    std::cout << kind << " h=" << p.h << ": inner hoop " << b.inner_hoop << " MPa (Lame " << b.reference.inner_hoop
              << ", error " << 100.0 * b.inner_rel_error << "%), outer hoop " << b.outer_hoop << " MPa (Lame "
              << b.reference.outer_hoop << ", error " << 100.0 * b.outer_rel_error << "%)\n";
    std::cout << (b.passed ? "within" : "outside") << " the 3% tolerance; " << b.timing.total << " s\n";
    return 0;
}

std::vector<double> parse_sizes(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            fail(ErrorCode::ConfigInvalid, "bad size '" + item + "'");
        }
    }
    return out;
}

int cmd_convergence(const std::string& config_path, const std::string& sizes_text, const Overrides& ov) {
    AnalysisConfig c = load_config(config_path);
    ov.apply(c);
    if (c.out_dir.empty()) c.out_dir = "out";
    const ConvergenceReport rep = run_convergence(c, parse_sizes(sizes_text));
    write_file_atomic(c.out_dir / "convergence.json", convergence_json(rep).dump(2) + "\n");
    std::cout << std::setprecision(6);
    for (const auto& l : rep.levels)
        std::cout << "h=" << l.h << ": " << l.dofs << " dofs, p99 " << l.p99 << " MPa, " << l.seconds << " s\n";
    for (const auto& p : rep.pairs)
        std::cout << "h " << p.h_coarse << " -> " << p.h_fine << ": relDiffAt99 " << p.metrics.rel_diff_at_99
                  << ", maxAbsDiffAtOrAbove95 " << p.metrics.max_abs_diff_at_or_above_95 << '\n';
    std::cout << (rep.converged ? "converged" : "not converged") << (rep.monotone ? ", monotone\n" : ", not monotone\n");
    return 0;
}

/// Cohort file: {"cases": [config, ...]} or
/// {"synthetic": {"base": config, "count": n, "jitter": r, "seed": s}}, plus optional "outDir".
std::vector<AnalysisConfig> load_cohort(const std::string& path, const Overrides& ov, std::filesystem::path& out_dir) {
    const auto j = read_json_file(path);
    const auto base_dir = std::filesystem::path(path).parent_path();
    if (!j.is_object()) fail(ErrorCode::ConfigInvalid, "cohort file must be an object");
    std::vector<AnalysisConfig> cases;
    try {
        if (j.contains("outDir")) out_dir = base_dir / j.at("outDir").get<std::string>();
        if (j.contains("cases")) {
            for (const auto& cj : j.at("cases")) cases.push_back(parse_config(cj, base_dir));
        } else if (j.contains("synthetic")) {
            const auto& s = j.at("synthetic");
            cases = synthetic_cylinder_cohort(parse_config(s.at("base"), base_dir), s.value("count", 10),
                                              s.value("jitter", 0.1), s.value("seed", std::uint64_t{1}));
        } else {
            fail(ErrorCode::ConfigInvalid, "cohort file needs 'cases' or 'synthetic'");
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ConfigInvalid, e.what());
    }
    if (ov.out_dir) out_dir = *ov.out_dir;
    if (out_dir.empty()) out_dir = "out";
    for (auto& c : cases) {
        ov.apply(c);
        c.out_dir = out_dir / (c.name.empty() ? "case" : c.name);
    }
    return cases;
}

int cmd_cohort(const std::string& config_path, const Overrides& ov) {
    std::filesystem::path out_dir;
    const auto cases = load_cohort(config_path, ov, out_dir);
    const CohortReport rep = run_cohort(cases);
    write_file_atomic(out_dir / "cohort.csv", cohort_csv(rep));
    write_file_atomic(out_dir / "cohort.json", cohort_json(rep).dump(2) + "\n");
    std::cout << cohort_csv(rep);
    for (const auto& r : rep.rows)
        if (!r.ok) std::cerr << r.name << ": " << r.error << '\n';
    return 0;
}

int cmd_mesh_info(const std::optional<std::string>& mesh_path, const std::optional<std::string>& config_path) {
    if (mesh_path && (mesh_path->ends_with(".stl") || mesh_path->ends_with(".STL"))) {
        const TriangleSoup s = read_stl(*mesh_path);
        std::cout << "triangles " << s.triangles.size() << "\nvertices " << s.vertices.size() << "\nedges "
                  << s.edge_count() << "\neuler characteristic " << s.euler_characteristic() << '\n';
        return 0;
    }
    Mesh m = load_any_mesh(mesh_path, config_path, nullptr);
    const bool linear = m.order == MeshOrder::Linear;
    if (linear) m = promote_to_quadratic(m);
    const std::size_t removed = remove_unreferenced_nodes(m);
    const MeshQualityReport q = mesh_quality(m);
    std::cout << "order " << (linear ? "linear (promoted for statistics)" : "quadratic") << '\n';
    std::cout << "nodes " << q.node_count << " (" << removed << " unreferenced removed)\n";
    std::cout << "elements " << q.element_count << '\n';
    std::cout << "boundary faces " << q.boundary_face_count << '\n';
    std::cout << "volume min/mean/max " << q.min_volume << " / " << q.mean_volume << " / " << q.max_volume << " mm3\n";
    std::cout << "total volume " << mesh_volume(m) << " mm3\n";
    std::cout << "min radius ratio " << q.min_quality << '\n';
    if (q.wall_layers) std::cout << "wall layers " << *q.wall_layers << '\n';
    return 0;
}

int cmd_classify(const std::optional<std::string>& mesh_path, const std::optional<std::string>& config_path,
                 std::optional<double> crease) {
    AnalysisConfig c;
    Mesh m = load_any_mesh(mesh_path, config_path, &c);
    if (m.order == MeshOrder::Linear) m = promote_to_quadratic(m);
    remove_unreferenced_nodes(m);
    const auto patches = classify_patches(m, crease.value_or(c.crease_angle_deg), c.cap_planarity_rel);
    print_patches(m, patches);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wall stress analysis of vessel segments on quadratic tetrahedral meshes"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    std::string config_path;
    std::optional<std::string> opt_config, opt_mesh;
    std::string kind = "cylinder";
    std::string sizes = "1.5,1.0,0.5";
    std::optional<double> crease;
    Overrides ov;

    auto* solve = app.add_subcommand("solve", "Run one analysis from a config file");
    solve->add_option("--config", config_path, "Analysis config (JSON)")->required();
    ov.add_to(solve);

    auto* bench = app.add_subcommand("benchmark", "Compare a generated shell against the Lame solution");
    bench->add_option("--kind", kind, "cylinder or sphere");
    bench->add_option("--config", opt_config, "Optional config supplying geometry and material");
    ov.add_to(bench);

    auto* conv = app.add_subcommand("convergence", "Mesh-size study on a generated geometry");
    conv->add_option("--config", config_path, "Analysis config with a generator input")->required();
    conv->add_option("--sizes", sizes, "Element sizes, descending, comma separated (mm)");
    ov.add_to(conv);

    auto* cohort = app.add_subcommand("cohort", "Run a list of cases and summarise p99 MPS");
    cohort->add_option("--config", config_path, "Cohort file (JSON)")->required();
    ov.add_to(cohort);

    auto* info = app.add_subcommand("mesh-info", "Mesh statistics for an MSH/STL file or a config input");
    info->add_option("--mesh", opt_mesh, "MSH 4.1 or STL file");
    info->add_option("--config", opt_config, "Analysis config");

    auto* cls = app.add_subcommand("classify", "Boundary patches with face counts and areas");
    cls->add_option("--mesh", opt_mesh, "MSH 4.1 file");
    cls->add_option("--config", opt_config, "Analysis config");
    cls->add_option("--crease-deg", crease, "Crease angle (degrees)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*solve) return cmd_solve(config_path, ov);
        if (*bench) return cmd_benchmark(kind, opt_config, ov);
        if (*conv) return cmd_convergence(config_path, sizes, ov);
        if (*cohort) return cmd_cohort(config_path, ov);
        if (*info) return cmd_mesh_info(opt_mesh, opt_config);
        if (*cls) return cmd_classify(opt_mesh, opt_config, crease);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return is_numerical(e.code()) ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
