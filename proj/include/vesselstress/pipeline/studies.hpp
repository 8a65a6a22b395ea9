#pragma once

#include "vesselstress/core/error.hpp"
#include "vesselstress/pipeline/analysis.hpp"
#include "vesselstress/pipeline/config.hpp"
#include "vesselstress/pipeline/io.hpp"
#include "vesselstress/stats/stats.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace vesselstress {

// ---------------------------------------------------------------- benchmark

struct LameReference {
    double inner_hoop = 0.0;
    double outer_hoop = 0.0;
};

inline LameReference lame_cylinder(double a, double b, double p) {
    const double d = b * b - a * a;
    return {p * (a * a + b * b) / d, 2.0 * p * a * a / d};
}

inline LameReference lame_sphere(double a, double b, double p) {
    const double d = b * b * b - a * a * a;
    return {p * (2.0 * a * a * a + b * b * b) / (2.0 * d), 3.0 * p * a * a * a / (2.0 * d)};
}

/// Hoop stress about the z axis: e_theta' sigma e_theta.
inline double cylinder_hoop(const Vec3& x, const Voigt6& s) {
    const Vec3 r(x.x(), x.y(), 0.0);
    const double n = r.norm();
    if (n == 0.0) return 0.0;
    const Vec3 t(-x.y() / n, x.x() / n, 0.0);
    return t.dot(voigt_to_matrix(s) * t);
}

/// Mean tangential stress on a sphere centred at the origin: (tr sigma - sigma_rr) / 2.
inline double sphere_hoop(const Vec3& x, const Voigt6& s) {
    const double n = x.norm();
    if (n == 0.0) return 0.0;
    const Vec3 e = x / n;
    return 0.5 * (s[0] + s[1] + s[2] - e.dot(voigt_to_matrix(s) * e));
}

struct BenchmarkParams {
    double a = 10.0;
    double b = 11.5;
    double L = 80.0;
    double pressure = 0.013;  // MPa
    double h = 0.5;
    double E = 100000.0;
    double nu = 0.49;
    double rel_tol = 1e-8;
    PreconditionerKind preconditioner = PreconditionerKind::PMultigrid;
    StiffnessQuadrature quadrature = StiffnessQuadrature::Degree2;
    bool deterministic = false;
    std::filesystem::path out_dir;
};

struct BenchmarkReport {
    std::string kind;
    BenchmarkParams params;
    LameReference reference;
    double inner_hoop = 0.0;
    double outer_hoop = 0.0;
    std::size_t inner_samples = 0;
    std::size_t outer_samples = 0;
    double inner_rel_error = 0.0;
    double outer_rel_error = 0.0;
    double tolerance = 0.03;
    bool passed = false;
    std::size_t nodes = 0;
    std::size_t elements = 0;
    std::size_t dofs = 0;
    std::size_t iterations = 0;
    double p99 = 0.0;
    StageTimes timing;
};

namespace detail {

/// Cylinder: nodes of the patch on the node layer closest to mid-height.
/// Sphere: every node of the patch.
inline std::pair<double, std::size_t> mean_hoop(const ResultBundle& r, PatchKind kind, bool cylinder, double mid_z) {
    const SurfacePatch* patch = find_patch(r.patches, kind);
    if (!patch) fail(ErrorCode::EmptyPatch, to_string(kind) + " patch missing");
    std::vector<NodeId> nodes = patch->node_set;
    if (cylinder) {
        double best = std::numeric_limits<double>::infinity();
        for (NodeId n : nodes) best = std::min(best, std::abs(r.mesh.nodes[n].z() - mid_z));
        const double tol = best + 1e-9 * std::max(1.0, std::abs(mid_z));
        std::erase_if(nodes, [&](NodeId n) { return std::abs(r.mesh.nodes[n].z() - mid_z) > tol; });
    }
    if (nodes.empty()) fail(ErrorCode::EmptyPatch, "no sample nodes on " + to_string(kind));
    double sum = 0.0;
    for (NodeId n : nodes)
        sum += cylinder ? cylinder_hoop(r.mesh.nodes[n], r.stress.values[n]) : sphere_hoop(r.mesh.nodes[n], r.stress.values[n]);
    return {sum / static_cast<double>(nodes.size()), nodes.size()};
}

}  // namespace detail

/// Generated shell under internal pressure compared against the Lame solution.
inline BenchmarkReport run_benchmark(const std::string& kind, const BenchmarkParams& p) {
    if (kind != "cylinder" && kind != "sphere") fail(ErrorCode::UnknownBenchmark, "'" + kind + "'");
    AnalysisConfig c;
    c.name = kind + "_benchmark";
    c.generator = GeneratorSpec{kind, p.a, p.b, p.L, p.h};
    c.pressure_value = p.pressure;
    c.pressure_unit = PressureUnit::MPa;
    c.E = p.E;
    c.nu = p.nu;
    c.rel_tol = p.rel_tol;
    c.preconditioner = p.preconditioner;
    c.quadrature = p.quadrature;
    c.deterministic = p.deterministic;
    c.out_dir = p.out_dir;
    ResultBundle r = run_and_write(c);

    const bool cyl = kind == "cylinder";
    BenchmarkReport b;
    b.kind = kind;
    b.params = p;
    b.reference = cyl ? lame_cylinder(p.a, p.b, p.pressure) : lame_sphere(p.a, p.b, p.pressure);
    std::tie(b.inner_hoop, b.inner_samples) = detail::mean_hoop(r, PatchKind::Interior, cyl, 0.5 * p.L);
    std::tie(b.outer_hoop, b.outer_samples) = detail::mean_hoop(r, PatchKind::Exterior, cyl, 0.5 * p.L);
    b.inner_rel_error = std::abs(b.inner_hoop - b.reference.inner_hoop) / b.reference.inner_hoop;
    b.outer_rel_error = std::abs(b.outer_hoop - b.reference.outer_hoop) / b.reference.outer_hoop;
    b.passed = b.inner_rel_error < b.tolerance && b.outer_rel_error < b.tolerance;
    b.nodes = r.mesh.node_count();
    b.elements = r.mesh.element_count();
    b.dofs = r.free_dofs;
    b.iterations = r.iterations;
    b.p99 = r.p99;
    b.timing = r.timing;
    return b;
}

inline nlohmann::ordered_json benchmark_json(const BenchmarkReport& b) {
    nlohmann::ordered_json j;
    j["kind"] = b.kind;
    j["params"] = {{"a", b.params.a}, {"b", b.params.b}, {"L", b.params.L}, {"pressureMPa", b.params.pressure},
                   {"h", b.params.h}, {"E", b.params.E}, {"nu", b.params.nu}};
    j["reference"] = {{"innerHoopMPa", b.reference.inner_hoop}, {"outerHoopMPa", b.reference.outer_hoop}};
    j["computed"] = {{"innerHoopMPa", b.inner_hoop}, {"outerHoopMPa", b.outer_hoop},
                     {"innerSamples", b.inner_samples}, {"outerSamples", b.outer_samples}};
    j["relError"] = {{"inner", b.inner_rel_error}, {"outer", b.outer_rel_error}};
    j["tolerance"] = b.tolerance;
    j["passed"] = b.passed;
    j["mesh"] = {{"nodes", b.nodes}, {"elements", b.elements}, {"dofs", b.dofs}};
    j["solver"] = {{"iterations", b.iterations}};
    j["p99MPa"] = b.p99;
    j["totalSeconds"] = b.timing.total;
    return j;
}

// -------------------------------------------------------------- convergence

struct ConvergenceLevel {
    double h = 0.0;
    std::size_t nodes = 0;
    std::size_t elements = 0;
    std::size_t dofs = 0;
    std::size_t iterations = 0;
    double seconds = 0.0;
    double p99 = 0.0;
    PercentileCurve curve{};
};

struct ConvergencePair {
    double h_coarse = 0.0;
    double h_fine = 0.0;
    CurveComparison metrics;
};

struct ConvergenceReport {
    std::vector<ConvergenceLevel> levels;
    std::vector<ConvergencePair> pairs;
    double threshold = 0.03;
    /// relDiffAt99 shrinks from each pair to the next.
    bool monotone = false;
    /// relDiffAt99 of the finest pair below the threshold.
    bool converged = false;
};

/// Runs the generated geometry of `base` at each size (descending) and
/// compares exterior MPS percentile curves of successive sizes.
inline ConvergenceReport run_convergence(const AnalysisConfig& base, const std::vector<double>& sizes) {
    if (sizes.size() < 2) fail(ErrorCode::NeedTwoSizes, std::to_string(sizes.size()) + " size(s) given");
    if (!base.generator) fail(ErrorCode::ConfigInvalid, "convergence study needs a generator input");
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (!(sizes[i] > 0.0)) fail(ErrorCode::ConfigInvalid, "sizes must be positive");
        if (i > 0 && !(sizes[i] < sizes[i - 1])) fail(ErrorCode::ConfigInvalid, "sizes must be strictly descending");
    }
    ConvergenceReport rep;
    for (double h : sizes) {
        AnalysisConfig c = base;
        c.generator->h = h;
        std::ostringstream name;
        name << (base.name.empty() ? "convergence" : base.name) << "_h" << h;
        c.name = name.str();
        const ResultBundle r = run_and_write(c);
        rep.levels.push_back({h, r.mesh.node_count(), r.mesh.element_count(), r.free_dofs, r.iterations,
                              r.timing.total, r.p99, r.exterior_curve});
    }
    for (std::size_t i = 1; i < rep.levels.size(); ++i)
        rep.pairs.push_back({rep.levels[i - 1].h, rep.levels[i].h,
                             compare_curves(rep.levels[i - 1].curve, rep.levels[i].curve)});
    rep.monotone = true;
    for (std::size_t i = 1; i < rep.pairs.size(); ++i)
        if (!(rep.pairs[i].metrics.rel_diff_at_99 < rep.pairs[i - 1].metrics.rel_diff_at_99)) rep.monotone = false;
    rep.converged = rep.pairs.back().metrics.rel_diff_at_99 < rep.threshold;
    return rep;
}

inline nlohmann::ordered_json convergence_json(const ConvergenceReport& rep) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json levels = nlohmann::ordered_json::array();
    for (const auto& l : rep.levels)
        levels.push_back({{"h", l.h},
                          {"nodes", l.nodes},
                          {"elements", l.elements},
                          {"dofs", l.dofs},
                          {"iterations", l.iterations},
                          {"seconds", l.seconds},
                          {"p99MPa", l.p99},
                          {"percentileCurve", std::vector<double>(l.curve.begin(), l.curve.end())}});
    j["levels"] = levels;
    nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
    for (const auto& p : rep.pairs)
        pairs.push_back({{"hCoarse", p.h_coarse},
                         {"hFine", p.h_fine},
                         {"maxAbsDiff", p.metrics.max_abs_diff},
                         {"maxAbsDiffAtOrAbove95", p.metrics.max_abs_diff_at_or_above_95},
                         {"relDiffAt99", p.metrics.rel_diff_at_99}});
    j["pairs"] = pairs;
    j["threshold"] = rep.threshold;
    j["monotone"] = rep.monotone;
    j["converged"] = rep.converged;
    return j;
}

// ------------------------------------------------------------------- cohort

struct CohortRow {
    std::string name;
    bool ok = false;
    double p99 = 0.0;
    double seconds = 0.0;
    std::string error;
};

struct CohortReport {
    std::vector<CohortRow> rows;
    std::optional<CohortSummary> summary;  // over successful cases
};

/// Runs every case; a failing case is recorded and the rest continue.
inline CohortReport run_cohort(const std::vector<AnalysisConfig>& cases) {
    if (cases.empty()) fail(ErrorCode::EmptyCohort, "no cases");
    CohortReport rep;
    std::vector<CohortCase> good;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        CohortRow row;
        row.name = cases[i].name.empty() ? "case" + std::to_string(i + 1) : cases[i].name;
        try {
            AnalysisConfig c = cases[i];
            c.name = row.name;
            const ResultBundle r = run_and_write(c);
            row.ok = true;
            row.p99 = r.p99;
            row.seconds = r.timing.total;
            good.push_back({row.name, row.p99, row.seconds});
        } catch (const Error& e) {
            row.error = e.what();
        }
        rep.rows.push_back(row);
    }
    if (!good.empty()) rep.summary = cohort_summary(good);
    return rep;
}

/// Cylinder variants with inner radius and wall thickness jittered by up to
/// +-jitter (relative) around the base generator.
inline std::vector<AnalysisConfig> synthetic_cylinder_cohort(const AnalysisConfig& base, int count, double jitter,
                                                             std::uint64_t seed) {
    if (!base.generator || base.generator->kind != "cylinder")
        fail(ErrorCode::ConfigInvalid, "synthetic cohort needs a cylinder generator");
    if (count < 1) fail(ErrorCode::EmptyCohort, "count must be at least 1");
    if (!(jitter >= 0.0 && jitter < 0.5)) fail(ErrorCode::ConfigInvalid, "jitter must be in [0, 0.5)");
    std::mt19937_64 rng(seed);
    auto uniform = [&] { return (static_cast<double>(rng() >> 11) * 0x1.0p-53) * 2.0 - 1.0; };
    std::vector<AnalysisConfig> out;
    const double t0 = base.generator->b - base.generator->a;
    for (int i = 0; i < count; ++i) {
        AnalysisConfig c = base;
        const double a = base.generator->a * (1.0 + jitter * uniform());
        const double t = t0 * (1.0 + jitter * uniform());
        c.generator->a = a;
        c.generator->b = a + t;
        c.name = "case" + std::to_string(i + 1);
        out.push_back(c);
    }
    return out;
}

inline std::string cohort_csv(const CohortReport& rep) {
    std::ostringstream s;
    s.precision(6);
    s << "case,p99MPa,seconds,status\n";
    for (const auto& r : rep.rows) {
        if (r.ok) s << r.name << ',' << r.p99 << ',' << r.seconds << ",ok\n";
        else s << r.name << ",,,failed\n";
    }
    if (rep.summary) {
        const auto& m = *rep.summary;
        s << "Minimum," << m.min << ",,\n";
        s << "Maximum," << m.max << ",,\n";
        s << "Average," << m.mean << ",,\n";
        s << "Standard deviation,";
        if (m.std_dev) s << *m.std_dev;
        s << ",,\n";
    }
    return s.str();
}

inline nlohmann::ordered_json cohort_json(const CohortReport& rep) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : rep.rows) {
        nlohmann::ordered_json row;
        row["case"] = r.name;
        row["ok"] = r.ok;
        if (r.ok) {
            row["p99MPa"] = r.p99;
            row["seconds"] = r.seconds;
        } else {
            row["error"] = r.error;
        }
        rows.push_back(row);
    }
    j["cases"] = rows;
    if (rep.summary) {
        const auto& m = *rep.summary;
        j["summary"] = {{"count", m.cases.size()}, {"min", m.min}, {"max", m.max}, {"mean", m.mean}};
        if (m.std_dev) j["summary"]["std"] = *m.std_dev;
        else j["summary"]["std"] = nullptr;
    } else {
        j["summary"] = nullptr;
    }
    return j;
}

}  // namespace vesselstress
