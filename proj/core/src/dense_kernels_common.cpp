#include "arrowqp/dense_kernels.hpp"

namespace arrowqp::kernels
{

void trsv(const CMatRef& L, VecRef x)
{
    const isize n = L.rows();
    for (isize j = 0; j < n; j++) {
        const double xj = x[j] / L(j, j);
        x[j] = xj;
        for (isize i = j + 1; i < n; i++) x[i] -= L(i, j) * xj;
    }
}

void trsv_t(const CMatRef& L, VecRef x)
{
    const isize n = L.rows();
    for (isize i = n - 1; i >= 0; i--) {
        double acc = x[i];
        for (isize k = i + 1; k < n; k++) acc -= L(k, i) * x[k];
        x[i] = acc / L(i, i);
    }
}

void gemv(double alpha, const CMatRef& A, const CVecRef& x, VecRef y)
{
    for (isize k = 0; k < A.cols(); k++) {
        const double a = alpha * x[k];
        for (isize i = 0; i < A.rows(); i++) y[i] += a * A(i, k);
    }
}

void gemv_t(double alpha, const CMatRef& A, const CVecRef& x, VecRef y)
{
    for (isize j = 0; j < A.cols(); j++) {
        double acc = 0.0;
        for (isize i = 0; i < A.rows(); i++) acc += A(i, j) * x[i];
        y[j] += alpha * acc;
    }
}

} // namespace arrowqp::kernels
