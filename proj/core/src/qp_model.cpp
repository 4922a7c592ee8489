#include "arrowqp/qp_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "arrowqp/errors.hpp"

namespace arrowqp
{

MultistageProblem MultistageProblem::zeros(const std::vector<isize>& stage_dims,
                                           isize n_g,
                                           const std::vector<isize>& eq_dims,
                                           const std::vector<isize>& ineq_dims)
{
    MultistageProblem pb;
    pb.N = static_cast<isize>(stage_dims.size()) - 1;
    pb.stage_dims = stage_dims;
    pb.n_g = n_g;
    for (isize i = 0; i < pb.N; i++) {
        const isize ni = stage_dims[i];
        const isize nj = stage_dims[i + 1];
        const isize p = eq_dims[i];
        const isize m = ineq_dims[i];
        Stage st;
        st.Q = Mat::Zero(ni, ni);
        st.S = Mat::Zero(nj, ni);
        st.T = Mat::Zero(n_g, ni);
        st.c = Vec::Zero(ni);
        st.A = Mat::Zero(p, ni);
        st.B = Mat::Zero(p, nj);
        st.E = Mat::Zero(p, n_g);
        st.b = Vec::Zero(p);
        st.C = Mat::Zero(m, ni);
        st.D = Mat::Zero(m, nj);
        st.F = Mat::Zero(m, n_g);
        st.h = Vec::Zero(m);
        pb.stages.push_back(std::move(st));
    }
    const isize nN = stage_dims.back();
    const isize pN = eq_dims.back();
    const isize mN = ineq_dims.back();
    pb.terminal.Q = Mat::Zero(nN, nN);
    pb.terminal.T = Mat::Zero(n_g, nN);
    pb.terminal.c = Vec::Zero(nN);
    pb.terminal.A = Mat::Zero(pN, nN);
    pb.terminal.E = Mat::Zero(pN, n_g);
    pb.terminal.b = Vec::Zero(pN);
    pb.terminal.D = Mat::Zero(mN, nN);
    pb.terminal.F = Mat::Zero(mN, n_g);
    pb.terminal.h = Vec::Zero(mN);
    pb.Q_g = Mat::Zero(n_g, n_g);
    pb.c_g = Vec::Zero(n_g);
    return pb;
}

isize MultistageProblem::num_variables() const
{
    isize n = n_g;
    for (isize d : stage_dims) n += d;
    return n;
}

isize MultistageProblem::num_equalities() const
{
    isize p = terminal.A.rows();
    for (const auto& st : stages) p += st.A.rows();
    return p;
}

isize MultistageProblem::num_inequalities() const
{
    isize m = terminal.D.rows();
    for (const auto& st : stages) m += st.C.rows();
    return m;
}

namespace
{

class DimensionChecker
{
public:
    explicit DimensionChecker(std::vector<DimensionError>& errors) : errors_(errors) {}

    void matrix(isize stage, const char* name, const Mat& M, isize rows, isize cols)
    {
        if (M.rows() != rows || M.cols() != cols) {
            std::ostringstream os;
            os << name << " is " << M.rows() << "x" << M.cols() << ", expected " << rows << "x" << cols;
            errors_.push_back({stage, name, os.str()});
        }
    }

    void vector(isize stage, const char* name, const Vec& v, isize size)
    {
        if (v.size() != size) {
            std::ostringstream os;
            os << name << " has length " << v.size() << ", expected " << size;
            errors_.push_back({stage, name, os.str()});
        }
    }

    void symmetric(isize stage, const char* name, const Mat& M)
    {
        if (M.rows() != M.cols() || M.size() == 0) return;
        const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
        if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
            errors_.push_back({stage, name, std::string(name) + " is not symmetric"});
        }
    }

private:
    std::vector<DimensionError>& errors_;
};

} // namespace

std::vector<DimensionError> validate(const MultistageProblem& pb, bool check_psd)
{
    std::vector<DimensionError> errors;
    if (pb.N < 1) {
        errors.push_back({-1, "N", "stage count must be at least 1"});
        return errors;
    }
    if (static_cast<isize>(pb.stage_dims.size()) != pb.N + 1) {
        errors.push_back({-1, "stage_dims", "expected N+1 stage dimensions"});
        return errors;
    }
    if (static_cast<isize>(pb.stages.size()) != pb.N) {
        errors.push_back({-1, "stages", "expected N stage records"});
        return errors;
    }
    if (pb.n_g < 0) {
        errors.push_back({-1, "n_g", "global dimension must be non-negative"});
        return errors;
    }
    for (isize i = 0; i <= pb.N; i++) {
        if (pb.stage_dims[i] < 1) {
            errors.push_back({i, "stage_dims", "stage dimension must be at least 1"});
        }
    }
    if (!errors.empty()) return errors;

    DimensionChecker check(errors);
    const isize ng = pb.n_g;
    for (isize i = 0; i < pb.N; i++) {
        const Stage& st = pb.stages[i];
        const isize ni = pb.stage_dims[i];
        const isize nj = pb.stage_dims[i + 1];
        const isize p = st.A.rows();
        const isize m = st.C.rows();
        check.matrix(i, "Q", st.Q, ni, ni);
        check.symmetric(i, "Q", st.Q);
        check.matrix(i, "S", st.S, nj, ni);
        check.matrix(i, "T", st.T, ng, ni);
        check.vector(i, "c", st.c, ni);
        check.matrix(i, "A", st.A, p, ni);
        check.matrix(i, "B", st.B, p, nj);
        check.matrix(i, "E", st.E, p, ng);
        check.vector(i, "b", st.b, p);
        check.matrix(i, "C", st.C, m, ni);
        check.matrix(i, "D", st.D, m, nj);
        check.matrix(i, "F", st.F, m, ng);
        check.vector(i, "h", st.h, m);
    }
    const TerminalStage& t = pb.terminal;
    const isize N = pb.N;
    const isize nN = pb.stage_dims[N];
    check.matrix(N, "Q_N", t.Q, nN, nN);
    check.symmetric(N, "Q_N", t.Q);
    check.matrix(N, "T_N", t.T, ng, nN);
    check.vector(N, "c_N", t.c, nN);
    check.matrix(N, "A_N", t.A, t.A.rows(), nN);
    check.matrix(N, "E_N", t.E, t.A.rows(), ng);
    check.vector(N, "b_N", t.b, t.A.rows());
    check.matrix(N, "D_N", t.D, t.D.rows(), nN);
    check.matrix(N, "F_N", t.F, t.D.rows(), ng);
    check.vector(N, "h_N", t.h, t.D.rows());
    check.matrix(-1, "Q_g", pb.Q_g, ng, ng);
    check.symmetric(-1, "Q_g", pb.Q_g);
    check.vector(-1, "c_g", pb.c_g, ng);

    if (errors.empty() && check_psd) {
        const auto [qp, structure] = to_general_qp(pb);
        const SparseMat P_full = qp.P.selfadjointView<Eigen::Lower>();
        const Mat P = Mat(P_full);
        if (P.size() > 0) {
            Eigen::SelfAdjointEigenSolver<Mat> eig(P, Eigen::EigenvaluesOnly);
            const double scale = std::max(1.0, P.cwiseAbs().maxCoeff());
            if (eig.eigenvalues().minCoeff() < -1e-9 * scale) {
                errors.push_back({-1, "P", "assembled cost matrix is not positive semi-definite"});
            }
        }
    }
    return errors;
}

GeneralQP::GeneralQP(SparseMat P_, Vec c_, SparseMat A_, Vec b_, SparseMat G_, Vec h_)
  : n(P_.rows()), p(A_.rows()), m(G_.rows()),
    P(std::move(P_)), c(std::move(c_)), A(std::move(A_)), b(std::move(b_)),
    G(std::move(G_)), h(std::move(h_))
{
    P.makeCompressed();
    A.makeCompressed();
    G.makeCompressed();
}

namespace
{

void check_sparse(const SparseMat& M, isize rows, isize cols, const char* name)
{
    if (M.rows() != rows || M.cols() != cols) {
        throw InvalidProblem(std::string(name) + " has wrong dimensions");
    }
    if (!M.isCompressed()) {
        throw InvalidProblem(std::string(name) + " must be compressed");
    }
    for (isize j = 0; j < M.outerSize(); j++) {
        const int begin = M.outerIndexPtr()[j];
        const int end = M.outerIndexPtr()[j + 1];
        for (int k = begin; k < end; k++) {
            const int i = M.innerIndexPtr()[k];
            if (i < 0 || i >= rows) {
                throw InvalidProblem(std::string(name) + " has a row index out of range");
            }
            if (k > begin && M.innerIndexPtr()[k - 1] >= i) {
                throw InvalidProblem(std::string(name) + " has unsorted or duplicate indices");
            }
        }
    }
}

} // namespace

void GeneralQP::check() const
{
    check_sparse(P, n, n, "P");
    check_sparse(A, p, n, "A");
    check_sparse(G, m, n, "G");
    for (isize j = 0; j < P.outerSize(); j++) {
        for (SparseMat::InnerIterator it(P, j); it; ++it) {
            if (it.row() < j) throw InvalidProblem("P must store its lower triangle only");
        }
    }
    if (c.size() != n) throw InvalidProblem("c has wrong length");
    if (b.size() != p) throw InvalidProblem("b has wrong length");
    if (h.size() != m) throw InvalidProblem("h has wrong length");
}

namespace
{

void push_block(std::vector<Triplet>& out, const Mat& M, isize row0, isize col0, bool lower_only)
{
    for (isize j = 0; j < M.cols(); j++) {
        for (isize i = lower_only ? j : 0; i < M.rows(); i++) {
            const double v = M(i, j);
            if (v != 0.0) out.emplace_back(static_cast<int>(row0 + i), static_cast<int>(col0 + j), v);
        }
    }
}

SparseMat from_triplets(isize rows, isize cols, const std::vector<Triplet>& triplets)
{
    SparseMat M(rows, cols);
    M.setFromTriplets(triplets.begin(), triplets.end());
    M.makeCompressed();
    return M;
}

} // namespace

std::pair<GeneralQP, BlockStructure> to_general_qp(const MultistageProblem& pb)
{
    const isize N = pb.N;
    std::vector<isize> offset(static_cast<std::size_t>(N + 1));
    isize n = 0;
    for (isize i = 0; i <= N; i++) {
        offset[i] = n;
        n += pb.stage_dims[i];
    }
    const isize g0 = n;
    n += pb.n_g;
    const isize p = pb.num_equalities();
    const isize m = pb.num_inequalities();

    std::vector<Triplet> Pt, At, Gt;
    Vec c(n), b(p), h(m);
    isize row_eq = 0;
    isize row_in = 0;
    for (isize i = 0; i < N; i++) {
        const Stage& st = pb.stages[i];
        push_block(Pt, st.Q, offset[i], offset[i], true);
        push_block(Pt, st.S, offset[i + 1], offset[i], false);
        push_block(Pt, st.T, g0, offset[i], false);
        c.segment(offset[i], pb.stage_dims[i]) = st.c;

        push_block(At, st.A, row_eq, offset[i], false);
        push_block(At, st.B, row_eq, offset[i + 1], false);
        push_block(At, st.E, row_eq, g0, false);
        b.segment(row_eq, st.b.size()) = st.b;
        row_eq += st.A.rows();

        push_block(Gt, st.C, row_in, offset[i], false);
        push_block(Gt, st.D, row_in, offset[i + 1], false);
        push_block(Gt, st.F, row_in, g0, false);
        h.segment(row_in, st.h.size()) = st.h;
        row_in += st.C.rows();
    }
    const TerminalStage& t = pb.terminal;
    push_block(Pt, t.Q, offset[N], offset[N], true);
    push_block(Pt, t.T, g0, offset[N], false);
    push_block(Pt, pb.Q_g, g0, g0, true);
    c.segment(offset[N], pb.stage_dims[N]) = t.c;
    c.segment(g0, pb.n_g) = pb.c_g;

    push_block(At, t.A, row_eq, offset[N], false);
    push_block(At, t.E, row_eq, g0, false);
    b.segment(row_eq, t.b.size()) = t.b;

    push_block(Gt, t.D, row_in, offset[N], false);
    push_block(Gt, t.F, row_in, g0, false);
    h.segment(row_in, t.h.size()) = t.h;

    GeneralQP qp(from_triplets(n, n, Pt), std::move(c), from_triplets(p, n, At), std::move(b),
                 from_triplets(m, n, Gt), std::move(h));
    return {std::move(qp), BlockStructure(pb.stage_dims, pb.n_g)};
}

Vec symmetric_product(const SparseMat& P_lower, const CVecRef& x)
{
    Vec y = Vec::Zero(P_lower.rows());
    for (isize j = 0; j < P_lower.outerSize(); j++) {
        for (SparseMat::InnerIterator it(P_lower, j); it; ++it) {
            const isize i = it.row();
            y[i] += it.value() * x[j];
            if (i != j) y[j] += it.value() * x[i];
        }
    }
    return y;
}

double objective(const GeneralQP& qp, const CVecRef& x)
{
    return 0.5 * x.dot(symmetric_product(qp.P, x)) + qp.c.dot(x);
}

std::string to_string(SolveStatus status)
{
    switch (status) {
        case SolveStatus::Solved: return "solved";
        case SolveStatus::MaxIter: return "max_iter";
        case SolveStatus::PrimalInfeasibleSuspect: return "primal_infeasible_suspect";
        case SolveStatus::DualInfeasibleSuspect: return "dual_infeasible_suspect";
        case SolveStatus::NumericalError: return "numerical_error";
    }
    return "unknown";
}

} // namespace arrowqp
