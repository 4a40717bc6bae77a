#include "qftail/genmat.hpp"

#include "qftail/error.hpp"

#include <fmt/core.h>

#include <cmath>

namespace qftail {

Eigen::MatrixXd toeplitz_power(Eigen::Index n, double base) {
    if (!(base > 0.0 && base < 1.0)) {
        throw Error(Errc::BaseOutOfRange, fmt::format("Toeplitz base must lie in (0, 1), got {}", base));
    }
    if (n < 1) throw Error(Errc::InvalidArgument, "dimension must be at least 1");
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            m(i, j) = std::pow(base, static_cast<double>(std::abs(i - j)));
        }
    }
    return m;
}

Eigen::VectorXd constant_mean(Eigen::Index n, double value) {
    if (n < 1) throw Error(Errc::InvalidArgument, "dimension must be at least 1");
    return Eigen::VectorXd::Constant(n, value);
}

}  // namespace qftail
