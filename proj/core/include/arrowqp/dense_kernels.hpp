#ifndef ARROWQP_DENSE_KERNELS_HPP
#define ARROWQP_DENSE_KERNELS_HPP

#include "arrowqp/typedefs.hpp"

// Small dense kernel layer used by the block factorization. Two
// implementations exist (plain loops and Eigen-backed); the build selects one
// through ARROWQP_KERNELS. Only the lower triangle of symmetric operands is
// read or written.
namespace arrowqp::kernels
{

const char* implementation();

// In-place Cholesky of the lower triangle of S; the strict upper triangle is
// zeroed. Returns -1 on success, otherwise the index of the failing pivot
// (pivot <= 0 or pivot <= 1e-13 * max diagonal of S).
isize potrf(MatRef S);

// A <- A * L^{-T}, L lower triangular.
void trsm(MatRef A, const CMatRef& L);

// C <- alpha * A * B + beta * C
void gemm(double alpha, const CMatRef& A, const CMatRef& B, double beta, MatRef C);

// C <- alpha * A * B^T + beta * C
void gemm_nt(double alpha, const CMatRef& A, const CMatRef& B, double beta, MatRef C);

// lower(C) <- alpha * A * A^T + beta * lower(C)
void syrk(double alpha, const CMatRef& A, double beta, MatRef C);

// x <- L^{-1} x
void trsv(const CMatRef& L, VecRef x);

// x <- L^{-T} x
void trsv_t(const CMatRef& L, VecRef x);

// y <- y + alpha * A * x
void gemv(double alpha, const CMatRef& A, const CVecRef& x, VecRef y);

// y <- y + alpha * A^T * x
void gemv_t(double alpha, const CMatRef& A, const CVecRef& x, VecRef y);

inline constexpr double pivot_tolerance = 1e-13;

} // namespace arrowqp::kernels

#endif
