#pragma once

#include <array>
#include <string>
#include <vector>

namespace vesselstress {

/// Quadrature on the reference simplex. Points are barycentric; weights sum to
/// the reference measure (1/6 for the tetrahedron, 1/2 for the triangle).
template <int NBary>
struct QuadratureRule {
    std::vector<std::array<double, NBary>> points;
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }
};

using TetRule = QuadratureRule<4>;
using TriRule = QuadratureRule<3>;

enum class StiffnessQuadrature { Degree2, Degree4 };

inline std::string to_string(StiffnessQuadrature q) {
    return q == StiffnessQuadrature::Degree2 ? "degree2" : "degree4";
}

namespace detail {

inline void add_tet_orbit_1111(TetRule& r, double w) {
    r.points.push_back({0.25, 0.25, 0.25, 0.25});
    r.weights.push_back(w);
}

inline void add_tet_orbit_31(TetRule& r, double a, double w) {
    const double b = 1.0 - 3.0 * a;
    for (int i = 0; i < 4; ++i) {
        std::array<double, 4> p{a, a, a, a};
        p[i] = b;
        r.points.push_back(p);
        r.weights.push_back(w);
    }
}

inline void add_tet_orbit_22(TetRule& r, double a, double w) {
    const double b = 0.5 - a;
    constexpr int pairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    for (const auto& pr : pairs) {
        std::array<double, 4> p{b, b, b, b};
        p[pr[0]] = a;
        p[pr[1]] = a;
        r.points.push_back(p);
        r.weights.push_back(w);
    }
}

}  // namespace detail

/// 4-point rule, exact for degree 2.
inline const TetRule& tet_rule_degree2() {
    static const TetRule rule = [] {
        TetRule r;
        const double a = 0.1381966011250105151795413165634361882280;
        detail::add_tet_orbit_31(r, a, 1.0 / 24.0);
        return r;
    }();
    return rule;
}

/// 14-point rule with positive weights, exact for degree 5.
inline const TetRule& tet_rule_degree5() {
    static const TetRule rule = [] {
        TetRule r;
        detail::add_tet_orbit_31(r, 0.0927352503108912264023345, 0.01224884051939365826930);
        detail::add_tet_orbit_31(r, 0.3108859192633006097581474, 0.01878132095300264180351);
        detail::add_tet_orbit_22(r, 0.0455037041256496494918805, 0.00709100346284691107301);
        return r;
    }();
    return rule;
}

inline const TetRule& tet_rule(StiffnessQuadrature q) {
    return q == StiffnessQuadrature::Degree2 ? tet_rule_degree2() : tet_rule_degree5();
}

/// 7-point rule on the triangle, exact for degree 5.
inline const TriRule& tri_rule_degree5() {
    static const TriRule rule = [] {
        TriRule r;
        r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
        r.weights.push_back(0.225 / 2.0);
        const double a1 = 0.0597158717897698204929721, b1 = 0.4701420641051150897535139;
        const double w1 = 0.1323941527885061807376493 / 2.0;
        const double a2 = 0.7974269853530873223980253, b2 = 0.1012865073234563388009874;
        const double w2 = 0.1259391805448271525956839 / 2.0;
        for (int i = 0; i < 3; ++i) {
            std::array<double, 3> p{b1, b1, b1};
            p[i] = a1;
            r.points.push_back(p);
            r.weights.push_back(w1);
        }
        for (int i = 0; i < 3; ++i) {
            std::array<double, 3> p{b2, b2, b2};
            p[i] = a2;
            r.points.push_back(p);
            r.weights.push_back(w2);
        }
        return r;
    }();
    return rule;
}

}  // namespace vesselstress
