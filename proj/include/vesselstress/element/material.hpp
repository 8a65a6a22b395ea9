#pragma once

#include "vesselstress/core/error.hpp"
#include "vesselstress/core/types.hpp"

#include <cmath>
#include <string>

namespace vesselstress {

/// Isotropic constitutive matrix, Voigt order (xx, yy, zz, xy, yz, zx) with
/// engineering shear strains.
inline Mat6 material_matrix(double E, double nu) {
    if (!std::isfinite(E) || !std::isfinite(nu) || E <= 0.0 || nu <= -1.0)
        fail(ErrorCode::NonPhysical, "E=" + std::to_string(E) + ", nu=" + std::to_string(nu));
    if (nu >= 0.5) fail(ErrorCode::IncompressibleLimit, "nu=" + std::to_string(nu));

    const double f = E / ((1.0 + nu) * (1.0 - 2.0 * nu));
    const double d11 = f * (1.0 - nu);
    const double d12 = f * nu;
    const double g = E / (2.0 * (1.0 + nu));

    Mat6 D = Mat6::Zero();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) D(i, j) = (i == j) ? d11 : d12;
    for (int i = 3; i < 6; ++i) D(i, i) = g;
    return D;
}

struct ElasticMaterial {
    double E = 100000.0;  // MPa
    double nu = 0.49;
    Mat6 D = material_matrix(100000.0, 0.49);

    static ElasticMaterial make(double E, double nu) { return {E, nu, material_matrix(E, nu)}; }
};

/// Uniform internal pressure on the Interior patch. Traction is -p * n_out, so
/// p > 0 inflates the wall.
struct LoadSpec {
    double pressure = 0.013;  // MPa
};

}  // namespace vesselstress
