#pragma once

#include <complex>
#include <string>

#include <Eigen/Dense>

namespace mesochaos {

struct LogDet {
    double log_abs = 0.0;   // log |det|
    double phase = 0.0;     // arg det, in (-pi, pi]
    double rcond = 1.0;     // reciprocal condition estimate of the factorized matrix
    std::string method;     // "llt" or "lu"

    bool positive(double tol = 1e-8) const { return std::abs(phase) < tol; }
};

// Cholesky when the matrix is numerically Hermitian positive definite, partial-pivot LU otherwise.
LogDet log_det(const Eigen::MatrixXcd& a);
LogDet log_det(const Eigen::MatrixXd& a);

}  // namespace mesochaos
