#pragma once

#include <Eigen/Dense>
#include <complex>

namespace rpa {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

inline constexpr double kEps = 2.220446049250313e-16;  // DBL_EPSILON

}  // namespace rpa
