#pragma once

#include "vesselstress/core/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vesselstress {

/// v[k] is the k-th percentile, k = 0..100.
using PercentileCurve = std::array<double, 101>;

namespace detail {

inline double percentile_sorted(std::span<const double> sorted, double p) {
    const double pos = p / 100.0 * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    if (frac == 0.0) return sorted[lo];
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline std::vector<double> sorted_sample(std::span<const double> values) {
    if (values.empty()) fail(ErrorCode::EmptySample, "no values");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace detail

/// Linear interpolation between order statistics at position (p/100)(n-1).
inline double percentile(std::span<const double> values, double p) {
    if (!(p >= 0.0 && p <= 100.0)) fail(ErrorCode::BadRank, "rank " + std::to_string(p));
    const auto v = detail::sorted_sample(values);
    return detail::percentile_sorted(v, p);
}

inline PercentileCurve percentile_curve(std::span<const double> values) {
    const auto v = detail::sorted_sample(values);
    PercentileCurve c;
    for (int k = 0; k <= 100; ++k) c[k] = detail::percentile_sorted(v, k);
    return c;
}

struct CurveComparison {
    double max_abs_diff = 0.0;
    double max_abs_diff_at_or_above_95 = 0.0;
    double rel_diff_at_99 = 0.0;
};

inline CurveComparison compare_curves(const PercentileCurve& a, const PercentileCurve& b) {
    constexpr double kEps = 1e-30;
    CurveComparison m;
    for (int k = 0; k <= 100; ++k) {
        const double d = std::abs(a[k] - b[k]);
        m.max_abs_diff = std::max(m.max_abs_diff, d);
        if (k >= 95) m.max_abs_diff_at_or_above_95 = std::max(m.max_abs_diff_at_or_above_95, d);
    }
    m.rel_diff_at_99 = std::abs(a[99] - b[99]) / std::max(std::abs(a[99]), kEps);
    return m;
}

struct CohortCase {
    std::string name;
    double p99 = 0.0;      // MPa
    double seconds = 0.0;
};

struct CohortSummary {
    std::vector<CohortCase> cases;
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    /// Sample standard deviation (n - 1); absent for a single case.
    std::optional<double> std_dev;
};

inline CohortSummary cohort_summary(std::vector<CohortCase> cases) {
    if (cases.empty()) fail(ErrorCode::EmptyCohort, "no cases");
    CohortSummary s;
    s.cases = std::move(cases);
    const auto n = static_cast<double>(s.cases.size());
    s.min = s.max = s.cases.front().p99;
    double sum = 0.0;
    for (const auto& c : s.cases) {
        s.min = std::min(s.min, c.p99);
        s.max = std::max(s.max, c.p99);
        sum += c.p99;
    }
    s.mean = sum / n;
    if (s.cases.size() >= 2) {
        double ss = 0.0;
        for (const auto& c : s.cases) ss += (c.p99 - s.mean) * (c.p99 - s.mean);
        s.std_dev = std::sqrt(ss / (n - 1.0));
    }
    return s;
}

inline CohortSummary cohort_summary(std::span<const double> p99_values) {
    std::vector<CohortCase> cases;
    for (std::size_t i = 0; i < p99_values.size(); ++i)
        cases.push_back({"case" + std::to_string(i + 1), p99_values[i], 0.0});
    return cohort_summary(std::move(cases));
}

}  // namespace vesselstress
