#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <limits>
#include <numeric>

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

double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

}  // namespace

TEST(Percentile, SmallExamples) {
    const std::vector<double> v{5, 1, 4, 2, 3};
    EXPECT_EQ(percentile(v, 0), 1.0);
    EXPECT_EQ(percentile(v, 25), 2.0);
    EXPECT_EQ(percentile(v, 50), 3.0);
    EXPECT_EQ(percentile(v, 100), 5.0);
    EXPECT_DOUBLE_EQ(percentile(v, 90), 4.6);
    const std::vector<double> one{7.5};
    EXPECT_EQ(percentile(one, 0), 7.5);
    EXPECT_EQ(percentile(one, 99), 7.5);
}

TEST(Percentile, Errors) {
    const std::vector<double> v{1, 2};
    EXPECT_EQ(code_of([&] { percentile(v, -1); }), ErrorCode::BadRank);
    EXPECT_EQ(code_of([&] { percentile(v, 101); }), ErrorCode::BadRank);
    EXPECT_EQ(code_of([&] { percentile(v, std::numeric_limits<double>::quiet_NaN()); }), ErrorCode::BadRank);
    EXPECT_EQ(code_of([] { percentile(std::vector<double>{}, 50); }), ErrorCode::EmptySample);
    EXPECT_EQ(code_of([] { percentile_curve(std::vector<double>{}); }), ErrorCode::EmptySample);
}

TEST(Percentile, CurveProperties) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> v(1 + rng() % 500);
        for (auto& x : v) x = uniform(rng, -3, 10);
        const auto c = percentile_curve(v);
        EXPECT_EQ(c[0], *std::min_element(v.begin(), v.end()));
        EXPECT_EQ(c[100], *std::max_element(v.begin(), v.end()));
        for (int k = 1; k <= 100; ++k) EXPECT_LE(c[k - 1], c[k]);
        for (int k : {1, 37, 50, 99}) EXPECT_EQ(c[k], percentile(v, k));
        // Permutation invariance.
        std::shuffle(v.begin(), v.end(), rng);
        EXPECT_EQ(percentile_curve(v), c);
    }
}

TEST(Percentile, ScalesAndShiftsWithData) {
    std::mt19937_64 rng(12);
    std::vector<double> v(200);
    for (auto& x : v) x = uniform(rng);
    std::vector<double> w(v.size());
    std::transform(v.begin(), v.end(), w.begin(), [](double x) { return 2.0 * x + 1.0; });
    const auto a = percentile_curve(v), b = percentile_curve(w);
    for (int k = 0; k <= 100; ++k) EXPECT_NEAR(b[k], 2.0 * a[k] + 1.0, 1e-14);
}

TEST(Compare, Metrics) {
    PercentileCurve a, b;
    for (int k = 0; k <= 100; ++k) {
        a[k] = k;
        b[k] = k;
    }
    b[10] += 0.5;
    b[97] -= 0.25;
    b[99] = 99 * 1.02;
    const auto m = compare_curves(a, b);
    EXPECT_NEAR(m.max_abs_diff, 1.98, 1e-12);
    EXPECT_NEAR(m.max_abs_diff_at_or_above_95, 1.98, 1e-12);
    EXPECT_NEAR(m.rel_diff_at_99, 0.02, 1e-12);
    EXPECT_EQ(compare_curves(a, a).max_abs_diff, 0.0);
    b[99] = 99;
    EXPECT_NEAR(compare_curves(a, b).max_abs_diff_at_or_above_95, 0.25, 1e-12);
    EXPECT_NEAR(compare_curves(a, b).max_abs_diff, 0.5, 1e-12);
}

TEST(Cohort, ReferenceValuesMatchDirectComputation) {
    const auto& v = reference_cohort_p99();
    const CohortSummary s = cohort_summary(std::span<const double>(v));
    ASSERT_EQ(s.cases.size(), 10u);
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / 10.0;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    EXPECT_EQ(s.min, 0.320);
    EXPECT_EQ(s.max, 0.522);
    EXPECT_NEAR(s.mean, mean, 1e-15);
    ASSERT_TRUE(s.std_dev.has_value());
    EXPECT_NEAR(*s.std_dev, std::sqrt(ss / 9.0), 1e-15);
    EXPECT_EQ(round3(s.mean), 0.397);
    EXPECT_EQ(s.cases[5].name, "case6");
}

TEST(Cohort, SingleCaseAndEmpty) {
    const CohortSummary s = cohort_summary(std::vector<CohortCase>{{"only", 0.25, 3.0}});
    EXPECT_EQ(s.min, 0.25);
    EXPECT_EQ(s.max, 0.25);
    EXPECT_EQ(s.mean, 0.25);
    EXPECT_FALSE(s.std_dev.has_value());
    EXPECT_EQ(code_of([] { cohort_summary(std::vector<CohortCase>{}); }), ErrorCode::EmptyCohort);
}

TEST(Cohort, OrderInvariantSummary) {
    std::vector<double> v = reference_cohort_p99();
    const auto a = cohort_summary(std::span<const double>(v));
    std::mt19937_64 rng(13);
    std::shuffle(v.begin(), v.end(), rng);
    const auto b = cohort_summary(std::span<const double>(v));
    EXPECT_EQ(a.min, b.min);
    EXPECT_EQ(a.max, b.max);
    EXPECT_NEAR(a.mean, b.mean, 1e-15);
    EXPECT_NEAR(*a.std_dev, *b.std_dev, 1e-15);
}
