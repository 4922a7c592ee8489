#include <algorithm>
#include <cmath>

#include "arrowqp/dense_kernels.hpp"

namespace arrowqp::kernels
{

const char* implementation() { return "native"; }

isize potrf(MatRef S)
{
    const isize n = S.rows();
    double max_diag = 0.0;
    for (isize j = 0; j < n; j++) max_diag = std::max(max_diag, S(j, j));
    const double tol = pivot_tolerance * max_diag;

    for (isize j = 0; j < n; j++) {
        const double d = S(j, j);
        if (!(d > 0.0) || d <= tol) return j;
        const double ljj = std::sqrt(d);
        S(j, j) = ljj;
        for (isize i = j + 1; i < n; i++) S(i, j) /= ljj;
        for (isize k = j + 1; k < n; k++) {
            const double lkj = S(k, j);
            for (isize i = k; i < n; i++) S(i, k) -= S(i, j) * lkj;
        }
    }
    for (isize j = 1; j < n; j++) {
        for (isize i = 0; i < j; i++) S(i, j) = 0.0;
    }
    return -1;
}

void trsm(MatRef A, const CMatRef& L)
{
    const isize m = A.rows();
    const isize n = A.cols();
    for (isize j = 0; j < n; j++) {
        for (isize k = 0; k < j; k++) {
            const double ljk = L(j, k);
            if (ljk == 0.0) continue;
            for (isize i = 0; i < m; i++) A(i, j) -= A(i, k) * ljk;
        }
        const double inv = 1.0 / L(j, j);
        for (isize i = 0; i < m; i++) A(i, j) *= inv;
    }
}

namespace
{

void scale(double beta, MatRef C)
{
    if (beta == 0.0) {
        C.setZero();
    } else if (beta != 1.0) {
        C *= beta;
    }
}

} // namespace

void gemm(double alpha, const CMatRef& A, const CMatRef& B, double beta, MatRef C)
{
    scale(beta, C);
    for (isize j = 0; j < C.cols(); j++) {
        for (isize k = 0; k < A.cols(); k++) {
            const double b = alpha * B(k, j);
            for (isize i = 0; i < C.rows(); i++) C(i, j) += b * A(i, k);
        }
    }
}

void gemm_nt(double alpha, const CMatRef& A, const CMatRef& B, double beta, MatRef C)
{
    scale(beta, C);
    for (isize j = 0; j < C.cols(); j++) {
        for (isize k = 0; k < A.cols(); k++) {
            const double b = alpha * B(j, k);
            for (isize i = 0; i < C.rows(); i++) C(i, j) += b * A(i, k);
        }
    }
}

void syrk(double alpha, const CMatRef& A, double beta, MatRef C)
{
    const isize m = C.rows();
    for (isize j = 0; j < m; j++) {
        for (isize i = j; i < m; i++) C(i, j) = beta == 0.0 ? 0.0 : beta * C(i, j);
        for (isize k = 0; k < A.cols(); k++) {
            const double a = alpha * A(j, k);
            for (isize i = j; i < m; i++) C(i, j) += a * A(i, k);
        }
    }
}

} // namespace arrowqp::kernels
