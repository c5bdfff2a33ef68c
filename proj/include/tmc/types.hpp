#pragma once

#include <Eigen/Core>
#include <Eigen/Dense>

namespace tmc {

using Eigen::Matrix2d;
using Eigen::Matrix3d;
using Eigen::Matrix4d;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::Vector4d;
using Eigen::VectorXd;

using Vector8d = Eigen::Matrix<double, 8, 1>;
using Matrix8d = Eigen::Matrix<double, 8, 8>;
using Matrix84d = Eigen::Matrix<double, 8, 4>;

}  // namespace tmc
