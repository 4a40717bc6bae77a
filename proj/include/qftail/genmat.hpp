#pragma once

#include <Eigen/Dense>

namespace qftail {

/// M[i][j] = base^|i-j|; positive definite for 0 < base < 1.
Eigen::MatrixXd toeplitz_power(Eigen::Index n, double base);

Eigen::VectorXd constant_mean(Eigen::Index n, double value);

}  // namespace qftail
