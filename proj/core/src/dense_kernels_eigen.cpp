#include <Eigen/Cholesky>

#include "arrowqp/dense_kernels.hpp"

namespace arrowqp::kernels
{

const char* implementation() { return "eigen"; }

isize potrf(MatRef S)
{
    const isize n = S.rows();
    const double tol = pivot_tolerance * (n > 0 ? S.diagonal().maxCoeff() : 0.0);
    for (isize j = 0; j < n; j++) {
        if (!(S(j, j) > 0.0) || S(j, j) <= tol) return j;
    }
    const Eigen::Index info = Eigen::internal::llt_inplace<double, Eigen::Lower>::blocked(S);
    if (info >= 0) return info;
    for (isize j = 0; j < n; j++) {
        if (S(j, j) * S(j, j) <= tol) return j;
    }
    S.triangularView<Eigen::StrictlyUpper>().setZero();
    return -1;
}

void trsm(MatRef A, const CMatRef& L)
{
    L.triangularView<Eigen::Lower>().transpose().solveInPlace<Eigen::OnTheRight>(A);
}

void gemm(double alpha, const CMatRef& A, const CMatRef& B, double beta, MatRef C)
{
    if (beta == 0.0) {
        C.setZero();
    } else if (beta != 1.0) {
        C *= beta;
    }
    C.noalias() += alpha * A * B;
}

void gemm_nt(double alpha, const CMatRef& A, const CMatRef& B, double beta, MatRef C)
{
    if (beta == 0.0) {
        C.setZero();
    } else if (beta != 1.0) {
        C *= beta;
    }
    C.noalias() += alpha * A * B.transpose();
}

void syrk(double alpha, const CMatRef& A, double beta, MatRef C)
{
    if (beta == 0.0) {
        C.triangularView<Eigen::Lower>().setZero();
    } else if (beta != 1.0) {
        C.triangularView<Eigen::Lower>() *= beta;
    }
    C.selfadjointView<Eigen::Lower>().rankUpdate(A, alpha);
}

} // namespace arrowqp::kernels
