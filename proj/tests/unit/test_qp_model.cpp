#include "doctest.h"

#include "arrowqp/btda.hpp"
#include "arrowqp/errors.hpp"
#include "arrowqp/generators.hpp"
#include "arrowqp/structure.hpp"
#include "oracles.hpp"

using namespace arrowqp;

namespace
{

Mat random_symmetric(testing::Rng& rng, isize n)
{
    const Mat B = testing::gaussian(rng, n, n);
    return B + B.transpose();
}

MultistageProblem random_multistage(testing::Rng& rng)
{
    const isize N = testing::uniform_int(rng, 1, 5);
    const isize n_g = testing::uniform_int(rng, 0, 2);
    std::vector<isize> dims, eq, ineq;
    for (isize i = 0; i <= N; i++) {
        dims.push_back(testing::uniform_int(rng, 1, 3));
        eq.push_back(testing::uniform_int(rng, 0, 2));
        ineq.push_back(testing::uniform_int(rng, 0, 2));
    }
    MultistageProblem pb = MultistageProblem::zeros(dims, n_g, eq, ineq);
    for (isize i = 0; i < N; i++) {
        Stage& st = pb.stages[static_cast<std::size_t>(i)];
        st.Q = random_symmetric(rng, st.Q.rows());
        st.S = testing::gaussian(rng, st.S.rows(), st.S.cols());
        st.T = testing::gaussian(rng, st.T.rows(), st.T.cols());
        st.c = testing::gaussian(rng, st.c.size(), 1);
        st.A = testing::gaussian(rng, st.A.rows(), st.A.cols());
        st.B = testing::gaussian(rng, st.B.rows(), st.B.cols());
        st.E = testing::gaussian(rng, st.E.rows(), st.E.cols());
        st.b = testing::gaussian(rng, st.b.size(), 1);
        st.C = testing::gaussian(rng, st.C.rows(), st.C.cols());
        st.D = testing::gaussian(rng, st.D.rows(), st.D.cols());
        st.F = testing::gaussian(rng, st.F.rows(), st.F.cols());
        st.h = testing::gaussian(rng, st.h.size(), 1);
    }
    TerminalStage& t = pb.terminal;
    t.Q = random_symmetric(rng, t.Q.rows());
    t.T = testing::gaussian(rng, t.T.rows(), t.T.cols());
    t.c = testing::gaussian(rng, t.c.size(), 1);
    t.A = testing::gaussian(rng, t.A.rows(), t.A.cols());
    t.E = testing::gaussian(rng, t.E.rows(), t.E.cols());
    t.b = testing::gaussian(rng, t.b.size(), 1);
    t.D = testing::gaussian(rng, t.D.rows(), t.D.cols());
    t.F = testing::gaussian(rng, t.F.rows(), t.F.cols());
    t.h = testing::gaussian(rng, t.h.size(), 1);
    pb.Q_g = random_symmetric(rng, n_g);
    pb.c_g = testing::gaussian(rng, n_g, 1);
    return pb;
}

double max_abs_or_zero(const Vec& v)
{
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

// Row sums accumulated strictly left to right so that two layouts of the same
// entries give bit-identical results.
Vec ordered_residual(const Mat& M, const Vec& x, const Vec& rhs)
{
    Vec r(M.rows());
    for (isize i = 0; i < M.rows(); i++) {
        double acc = 0.0;
        for (isize j = 0; j < M.cols(); j++) acc += M(i, j) * x[j];
        r[i] = acc - rhs[i];
    }
    return r;
}

// Stage rows [X_i | X_{i+1} | X_g] evaluated in the same order.
void append_rows(std::vector<double>& out, std::initializer_list<std::pair<const Mat*, Vec>> blocks, const Vec& rhs)
{
    for (isize i = 0; i < rhs.size(); i++) {
        double acc = 0.0;
        for (const auto& [M, v] : blocks)
            for (isize j = 0; j < M->cols(); j++) acc += (*M)(i, j) * v[j];
        out.push_back(acc - rhs[i]);
    }
}

std::pair<Vec, Vec> stage_residuals(const MultistageProblem& pb, const Vec& x)
{
    std::vector<Vec> xs;
    isize o = 0;
    for (isize d : pb.stage_dims) {
        xs.push_back(x.segment(o, d));
        o += d;
    }
    const Vec g = x.segment(o, pb.n_g);
    std::vector<double> eq, ineq;
    for (isize i = 0; i < pb.N; i++) {
        const Stage& st = pb.stages[static_cast<std::size_t>(i)];
        append_rows(eq, {{&st.A, xs[i]}, {&st.B, xs[i + 1]}, {&st.E, g}}, st.b);
        append_rows(ineq, {{&st.C, xs[i]}, {&st.D, xs[i + 1]}, {&st.F, g}}, st.h);
    }
    const TerminalStage& t = pb.terminal;
    append_rows(eq, {{&t.A, xs[pb.N]}, {&t.E, g}}, t.b);
    append_rows(ineq, {{&t.D, xs[pb.N]}, {&t.F, g}}, t.h);
    return {Eigen::Map<Vec>(eq.data(), static_cast<isize>(eq.size())),
            Eigen::Map<Vec>(ineq.data(), static_cast<isize>(ineq.size()))};
}

} // namespace

TEST_SUITE("qp_model")
{
    TEST_CASE("validate accepts consistent problems")
    {
        const MultistageProblem pb = MultistageProblem::zeros({2, 3}, 0, {1, 0}, {2, 1});
        CHECK(validate(pb).empty());
        CHECK(pb.num_variables() == 5);
        CHECK(pb.num_equalities() == 1);
        CHECK(pb.num_inequalities() == 3);
        CHECK(pb.stages[0].E.cols() == 0);
        CHECK(pb.stages[0].T.rows() == 0);
    }

    TEST_CASE("validate names the offending block")
    {
        MultistageProblem pb = MultistageProblem::zeros({3, 4}, 0, {2, 0}, {0, 0});
        pb.stages[0].B = Mat::Zero(2, 3);
        const auto errors = validate(pb);
        REQUIRE(errors.size() == 1);
        CHECK(errors[0].stage == 0);
        CHECK(errors[0].field == "B");

        MultistageProblem asym = MultistageProblem::zeros({2, 2}, 0, {0, 0}, {0, 0});
        asym.stages[0].Q(1, 0) = 1.0;
        CHECK_FALSE(validate(asym).empty());

        MultistageProblem empty_stage = MultistageProblem::zeros({2, 2}, 0, {0, 0}, {0, 0});
        empty_stage.stage_dims[1] = 0;
        CHECK_FALSE(validate(empty_stage).empty());
    }

    TEST_CASE("validate can test convexity")
    {
        MultistageProblem pb = MultistageProblem::zeros({1, 1}, 0, {0, 0}, {0, 0});
        pb.stages[0].Q(0, 0) = 1.0;
        pb.terminal.Q(0, 0) = 1.0;
        pb.stages[0].S(0, 0) = 3.0;
        CHECK(validate(pb).empty());
        CHECK_FALSE(validate(pb, true).empty());
        pb.stages[0].S(0, 0) = 0.5;
        CHECK(validate(pb, true).empty());
    }

    TEST_CASE("block placement of a two-stage problem")
    {
        MultistageProblem pb = MultistageProblem::zeros({1, 1}, 0, {0, 0}, {0, 0});
        pb.stages[0].Q(0, 0) = 2.0;
        pb.stages[0].S(0, 0) = 3.0;
        pb.terminal.Q(0, 0) = 4.0;
        const auto [qp, s] = to_general_qp(pb);
        Mat expected(2, 2);
        expected << 2.0, 0.0, 3.0, 4.0;
        CHECK(testing::to_dense(qp.P) == expected);
        CHECK(s == BlockStructure({1, 1}, 0));
    }

    TEST_CASE("spring-mass dimension arithmetic")
    {
        SpringMassConfig cfg;
        cfg.M = 2;
        cfg.N = 2;
        const auto [qp, s] = to_general_qp(spring_mass(cfg).problem);
        CHECK(qp.n == 14);
        CHECK(s == BlockStructure({5, 5, 4}, 0));
    }

    TEST_CASE("objective examples")
    {
        SparseMat I(2, 2);
        I.insert(0, 0) = 1.0;
        I.insert(1, 1) = 1.0;
        const GeneralQP a(I, Vec::Zero(2), SparseMat(0, 2), Vec(0), SparseMat(0, 2), Vec(0));
        CHECK(objective(a, Vec::Ones(2)) == 1.0);
        Vec c(2);
        c << 1.0, 2.0;
        Vec x(2);
        x << 3.0, 4.0;
        const GeneralQP b(SparseMat(2, 2), c, SparseMat(0, 2), Vec(0), SparseMat(0, 2), Vec(0));
        CHECK(objective(b, x) == 11.0);

        testing::Rng rng(41);
        for (int trial = 0; trial < 20; trial++) {
            const GeneralQP qp = testing::random_qp(rng, 5, 0, 0, 0.5);
            const Vec v = testing::gaussian(rng, 5, 1);
            const Mat P = testing::symmetric_dense(qp.P);
            double ref = 0.0;
            for (isize i = 0; i < 5; i++) {
                ref += qp.c[i] * v[i];
                for (isize j = 0; j < 5; j++) ref += 0.5 * v[i] * P(i, j) * v[j];
            }
            CHECK(objective(qp, v) == doctest::Approx(ref).epsilon(1e-12));
            CHECK((symmetric_product(qp.P, v) - testing::naive_gemm(P, v)).cwiseAbs().maxCoeff() < 1e-12);
        }
    }

    TEST_CASE("flattening agrees with the stagewise definition")
    {
        testing::Rng rng(42);
        for (int trial = 0; trial < 100; trial++) {
            const MultistageProblem pb = random_multistage(rng);
            REQUIRE(validate(pb).empty());
            const auto [qp, s] = to_general_qp(pb);
            REQUIRE(qp.n == pb.num_variables());
            REQUIRE(s.n() == qp.n);
            REQUIRE(s.arrow_width() == pb.n_g);
            CHECK_NOTHROW(qp.check());

            const Vec x = testing::gaussian(rng, qp.n, 1);
            const double ref = testing::stagewise_objective(pb, x);
            CHECK(objective(qp, x) == doctest::Approx(ref).epsilon(1e-12));

            const Vec eq = testing::stagewise_equality_residual(pb, x);
            const Vec ineq = testing::stagewise_inequality_residual(pb, x);
            const Vec eq_flat = testing::to_dense(qp.A) * x - qp.b;
            const Vec ineq_flat = testing::to_dense(qp.G) * x - qp.h;
            REQUIRE(eq.size() == eq_flat.size());
            REQUIRE(ineq.size() == ineq_flat.size());
            CHECK(max_abs_or_zero(eq - eq_flat) <= 1e-12 * (1.0 + max_abs_or_zero(eq)));
            CHECK(max_abs_or_zero(ineq - ineq_flat) <= 1e-12 * (1.0 + max_abs_or_zero(ineq)));

            const auto [eq_stage, ineq_stage] = stage_residuals(pb, x);
            CHECK(ordered_residual(testing::to_dense(qp.A), x, qp.b) == eq_stage);
            CHECK(ordered_residual(testing::to_dense(qp.G), x, qp.h) == ineq_stage);

            CHECK_FALSE(verify_cover(detection_pattern(qp), s).has_value());
            CHECK_NOTHROW((void)BtdaMatrix::from_dense(s, testing::symmetric_dense(qp.P)));
        }
    }

    TEST_CASE("general form checks")
    {
        SparseMat upper(2, 2);
        upper.insert(0, 1) = 1.0;
        CHECK_THROWS_AS(GeneralQP(upper, Vec::Zero(2), SparseMat(0, 2), Vec(0), SparseMat(0, 2), Vec(0)).check(),
                        InvalidProblem);
        CHECK_THROWS_AS(GeneralQP(SparseMat(2, 2), Vec::Zero(3), SparseMat(0, 2), Vec(0), SparseMat(0, 2), Vec(0)).check(),
                        InvalidProblem);
        CHECK_THROWS_AS(GeneralQP(SparseMat(2, 2), Vec::Zero(2), SparseMat(1, 3), Vec(1), SparseMat(0, 2), Vec(0)).check(),
                        InvalidProblem);
        CHECK_THROWS_AS(GeneralQP(SparseMat(2, 2), Vec::Zero(2), SparseMat(0, 2), Vec(0), SparseMat(1, 2), Vec(2)).check(),
                        InvalidProblem);
        CHECK(to_string(SolveStatus::Solved) == "solved");
        CHECK(to_string(SolveStatus::MaxIter) == "max_iter");
    }
}
