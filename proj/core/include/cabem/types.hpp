#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace cabem {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using MatX = Eigen::MatrixXd;
using VecX = Eigen::VectorXd;

/// Mesh-scale entity id (nodes, edges, faces, elements, auxiliary nodes).
using Index = std::int32_t;

inline constexpr Index kInvalidIndex = -1;

} // namespace cabem
