#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>

namespace vesselstress {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
/// Symmetric tensor in Voigt order (xx, yy, zz, xy, yz, zx).
using Voigt6 = Eigen::Matrix<double, 6, 1>;

using NodeId = std::int32_t;

inline Mat3 voigt_to_matrix(const Voigt6& v) {
    Mat3 m;
    m << v[0], v[3], v[5],
         v[3], v[1], v[4],
         v[5], v[4], v[2];
    return m;
}

inline Voigt6 matrix_to_voigt(const Mat3& m) {
    Voigt6 v;
    v << m(0, 0), m(1, 1), m(2, 2), m(0, 1), m(1, 2), m(2, 0);
    return v;
}

}  // namespace vesselstress
