#ifndef ARROWQP_QP_MODEL_HPP
#define ARROWQP_QP_MODEL_HPP

#include <string>
#include <utility>
#include <vector>

#include "arrowqp/block_structure.hpp"
#include "arrowqp/typedefs.hpp"

namespace arrowqp
{

// Data of stage i < N. Row/column conventions:
//   Q: n_i x n_i, S: n_{i+1} x n_i, T: n_g x n_i
//   A: p_i x n_i, B: p_i x n_{i+1}, E: p_i x n_g
//   C: m_i x n_i, D: m_i x n_{i+1}, F: m_i x n_g
struct Stage
{
    Mat Q, S, T;
    Vec c;
    Mat A, B, E;
    Vec b;
    Mat C, D, F;
    Vec h;
};

// Terminal stage N. D acts on x_N alone.
struct TerminalStage
{
    Mat Q, T;
    Vec c;
    Mat A, E;
    Vec b;
    Mat D, F;
    Vec h;
};

// min  sum_i l_i(x_i, x_{i+1}, g) + l_N(x_N, g)
// s.t. A_i x_i + B_i x_{i+1} + E_i g  = b_i
//      C_i x_i + D_i x_{i+1} + F_i g <= h_i
//      A_N x_N + E_N g = b_N,  D_N x_N + F_N g <= h_N
struct MultistageProblem
{
    isize N = 0;
    std::vector<isize> stage_dims; // n_0..n_N
    isize n_g = 0;
    std::vector<Stage> stages; // 0..N-1
    TerminalStage terminal;
    Mat Q_g;
    Vec c_g;

    // Zero-filled, dimensionally consistent problem. eq_dims/ineq_dims have
    // N+1 entries (last one is the terminal stage).
    static MultistageProblem zeros(const std::vector<isize>& stage_dims,
                                   isize n_g,
                                   const std::vector<isize>& eq_dims,
                                   const std::vector<isize>& ineq_dims);

    isize num_variables() const;
    isize num_equalities() const;
    isize num_inequalities() const;
};

struct DimensionError
{
    isize stage; // -1 for problem-level and global-cost fields
    std::string field;
    std::string message;
};

// Returns every dimension inconsistency; empty means valid. With check_psd the
// assembled cost matrix is also tested for positive semi-definiteness.
std::vector<DimensionError> validate(const MultistageProblem& problem, bool check_psd = false);

// min 1/2 x'Px + c'x  s.t.  Ax = b,  Gx <= h   (P stores its lower triangle)
struct GeneralQP
{
    isize n = 0;
    isize p = 0;
    isize m = 0;
    SparseMat P;
    Vec c;
    SparseMat A;
    Vec b;
    SparseMat G;
    Vec h;

    GeneralQP() = default;
    GeneralQP(SparseMat P, Vec c, SparseMat A, Vec b, SparseMat G, Vec h);

    // Throws InvalidProblem when dimensions, index order or triangularity fail.
    void check() const;
};

std::pair<GeneralQP, BlockStructure> to_general_qp(const MultistageProblem& problem);

double objective(const GeneralQP& qp, const CVecRef& x);

// y = P x with the implied symmetric upper triangle.
Vec symmetric_product(const SparseMat& P_lower, const CVecRef& x);

enum class SolveStatus
{
    Solved,
    MaxIter,
    PrimalInfeasibleSuspect,
    DualInfeasibleSuspect,
    NumericalError,
};

std::string to_string(SolveStatus status);

struct SolveTimings
{
    double setup = 0.0;
    double assembly = 0.0;
    double factorize = 0.0;
    double kkt_solve = 0.0;
    double other = 0.0;
    double total = 0.0;
};

struct Solution
{
    Vec x, s, y, z;
    SolveStatus status = SolveStatus::NumericalError;
    int iterations = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double objective = 0.0;
    SolveTimings timings;
};

} // namespace arrowqp

#endif
