#include "mesochaos/linalg.hpp"

#include <cmath>

#include "mesochaos/common.hpp"

namespace mesochaos {

namespace {

template <class Matrix>
bool is_hermitian(const Matrix& a) {
    double scale = a.cwiseAbs().maxCoeff();
    return (a - a.adjoint()).cwiseAbs().maxCoeff() <= 1e-13 * std::max(scale, 1e-300);
}

template <class Matrix>
LogDet log_det_impl(const Matrix& a) {
    LogDet out;
    if (a.rows() == 0) return out;
    if (is_hermitian(a)) {
        Eigen::LLT<Matrix> llt(a);
        if (llt.info() == Eigen::Success) {
            const auto& l = llt.matrixLLT();
            double s = 0.0;
            for (Eigen::Index i = 0; i < a.rows(); ++i) s += std::log(std::abs(l(i, i)));
            out.log_abs = 2.0 * s;
            out.rcond = llt.rcond();
            out.method = "llt";
            return out;
        }
    }
    Eigen::PartialPivLU<Matrix> lu(a);
    const auto& m = lu.matrixLU();
    double s = 0.0, phase = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        std::complex<double> d = m(i, i);
        s += std::log(std::abs(d));
        phase += std::arg(d);
    }
    if (lu.permutationP().determinant() < 0) phase += kPi;
    out.log_abs = s;
    out.phase = std::remainder(phase, kTwoPi);
    out.rcond = lu.rcond();
    out.method = "lu";
    return out;
}

}  // namespace

LogDet log_det(const Eigen::MatrixXcd& a) { return log_det_impl(a); }
LogDet log_det(const Eigen::MatrixXd& a) { return log_det_impl(a); }

}  // namespace mesochaos
