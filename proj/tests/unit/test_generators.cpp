#include "doctest.h"

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "arrowqp/errors.hpp"
#include "arrowqp/generators.hpp"
#include "arrowqp/structure.hpp"
#include "oracles.hpp"

using namespace arrowqp;

namespace
{

bool same_problem(const MultistageProblem& a, const MultistageProblem& b)
{
    if (a.N != b.N || a.stage_dims != b.stage_dims || a.n_g != b.n_g) return false;
    for (isize i = 0; i < a.N; i++) {
        const Stage& s = a.stages[i];
        const Stage& t = b.stages[i];
        if (s.Q != t.Q || s.S != t.S || s.T != t.T || s.c != t.c || s.A != t.A || s.B != t.B || s.E != t.E ||
            s.b != t.b || s.C != t.C || s.D != t.D || s.F != t.F || s.h != t.h)
            return false;
    }
    const TerminalStage& s = a.terminal;
    const TerminalStage& t = b.terminal;
    return s.Q == t.Q && s.T == t.T && s.c == t.c && s.A == t.A && s.E == t.E && s.b == t.b && s.D == t.D &&
           s.F == t.F && s.h == t.h && a.Q_g == b.Q_g && a.c_g == b.c_g;
}

double riccati_residual(const Mat& A, const Mat& B, const Mat& Q, const Mat& R, const Mat& X)
{
    const Mat BtX = B.transpose() * X;
    const Mat rhs = Q + A.transpose() * X * A - A.transpose() * X * B * (R + BtX * B).ldlt().solve(BtX * A);
    return (X - rhs).cwiseAbs().maxCoeff() / (1.0 + X.cwiseAbs().maxCoeff());
}

} // namespace

TEST_SUITE("generators")
{
    TEST_CASE("counter-based generator")
    {
        CounterRng a(42), b(42), c(42, 1), d(43);
        const auto first = a.next_u64();
        CHECK(first == b.next_u64());
        CHECK(first != c.next_u64());
        CHECK(first != d.next_u64());

        CounterRng u(7);
        double sum = 0.0, sq = 0.0, lo = 1.0, hi = 0.0;
        const int count = 20000;
        for (int i = 0; i < count; i++) {
            const double v = u.uniform();
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            sum += v;
        }
        CHECK(lo >= 0.0);
        CHECK(hi < 1.0);
        CHECK(sum / count == doctest::Approx(0.5).epsilon(0.02));

        CounterRng g(8);
        sum = 0.0;
        for (int i = 0; i < count; i++) {
            const double v = g.normal();
            sum += v;
            sq += v * v;
        }
        CHECK(std::abs(sum / count) < 0.03);
        CHECK(sq / count == doctest::Approx(1.0).epsilon(0.05));
        CounterRng r(9);
        for (int i = 0; i < 100; i++) {
            const double v = r.uniform(-2.0, 3.0);
            CHECK(v >= -2.0);
            CHECK(v < 3.0);
        }
    }

    TEST_CASE("matrix exponential")
    {
        CHECK(expm(Mat::Zero(3, 3)) == Mat::Identity(3, 3));
        Mat D = Mat::Zero(2, 2);
        D(0, 0) = 1.0;
        D(1, 1) = -2.0;
        const Mat eD = expm(D);
        CHECK(eD(0, 0) == doctest::Approx(std::exp(1.0)).epsilon(1e-13));
        CHECK(eD(1, 1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-13));

        testing::Rng rng(51);
        for (int trial = 0; trial < 20; trial++) {
            const isize n = testing::uniform_int(rng, 1, 8);
            const Mat A = testing::gaussian(rng, n, n) * testing::uniform_real(rng, 0.1, 4.0);
            const Mat ref = A.exp();
            CHECK((expm(A) - ref).cwiseAbs().maxCoeff() <= 1e-11 * (1.0 + ref.cwiseAbs().maxCoeff()));
        }
    }

    TEST_CASE("zero-order hold of a double integrator")
    {
        Mat Ac = Mat::Zero(2, 2);
        Ac(0, 1) = 1.0;
        Mat Bc = Mat::Zero(2, 1);
        Bc(1, 0) = 1.0;
        const DiscreteDynamics d = zoh(Ac, Bc, 0.5);
        CHECK(d.A(0, 1) == doctest::Approx(0.5));
        CHECK(d.A(0, 0) == doctest::Approx(1.0));
        CHECK(d.B(0, 0) == doctest::Approx(0.125));
        CHECK(d.B(1, 0) == doctest::Approx(0.5));
    }

    TEST_CASE("Riccati solutions")
    {
        const Mat Q = Mat::Identity(2, 2) * 3.0;
        const Mat R = Mat::Identity(1, 1);
        CHECK((dare(Mat::Zero(2, 2), Mat::Ones(2, 1), Q, R) - Q).cwiseAbs().maxCoeff() < 1e-14);

        // p = 1 + p/4 - p^2 / (4 (p + 1))  <=>  p^2 - p/4 - 1 = 0
        const double p = dare(Mat::Constant(1, 1, 0.5), Mat::Ones(1, 1), Mat::Ones(1, 1), Mat::Ones(1, 1))(0, 0);
        CHECK(p == doctest::Approx((0.25 + std::sqrt(0.0625 + 4.0)) / 2.0).epsilon(1e-10));
        CHECK(p == doctest::Approx(1.1327822185373186).epsilon(1e-10));

        for (isize M = 2; M <= 6; M++) {
            SpringMassConfig cfg;
            cfg.M = M;
            cfg.N = 2;
            const SpringMassInstance inst = spring_mass(cfg);
            CHECK(riccati_residual(inst.dynamics.A, inst.dynamics.B, inst.Q, inst.R, inst.Q_N) <= 1e-9);
            CHECK((inst.Q_N - inst.Q_N.transpose()).cwiseAbs().maxCoeff() < 1e-9);
            CHECK(Eigen::SelfAdjointEigenSolver<Mat>(inst.Q_N).eigenvalues().minCoeff() >= 0.0);
        }

        // unstabilizable: unstable mode with no input
        Mat A = Mat::Identity(1, 1) * 2.0;
        CHECK_THROWS_AS(dare(A, Mat::Zero(1, 1), Mat::Ones(1, 1), Mat::Ones(1, 1), 500), NoConvergence);
    }

    TEST_CASE("spring-mass family")
    {
        SpringMassConfig cfg;
        cfg.M = 2;
        cfg.seed = 3;
        const SpringMassInstance inst = spring_mass(cfg);
        CHECK(inst.n_x == 4);
        CHECK(inst.n_u == 1);
        CHECK(inst.problem.N == cfg.N);
        CHECK(inst.Q == 1e3 * Mat::Identity(4, 4));
        CHECK(inst.R == 0.1 * Mat::Identity(1, 1));
        CHECK(validate(inst.problem, true).empty());
        CHECK(same_problem(inst.problem, spring_mass(cfg).problem));

        for (isize M = 2; M <= 10; M++) {
            const Mat A = spring_mass_dynamics(std::vector<double>(static_cast<std::size_t>(M + 1), 1.0)).A;
            CHECK(A.eigenvalues().cwiseAbs().maxCoeff() < 1.0);
        }

        cfg.R_d = 0.0;
        const SpringMassInstance free = spring_mass(cfg);
        for (const Stage& st : free.problem.stages) CHECK(st.S.isZero());
        cfg.R_d = 0.1;
        const SpringMassInstance coupled = spring_mass(cfg);
        CHECK_FALSE(coupled.problem.stages[0].S.isZero());

        const Vec x0 = inst.sampler(5);
        CHECK(x0 == inst.sampler(5));
        CHECK(x0 != inst.sampler(6));
        CHECK(x0.cwiseAbs().maxCoeff() <= 1.5);
        CHECK(inst.x0 == inst.sampler(0));
    }

    TEST_CASE("generated problems validate and are covered by detection")
    {
        for (isize M = 2; M <= 5; M++) {
            SpringMassConfig cfg;
            cfg.M = M;
            cfg.N = 6;
            const auto [qp, stages] = to_general_qp(spring_mass(cfg).problem);
            const SparsityPattern pat = detection_pattern(qp);
            CHECK_FALSE(verify_cover(pat, detect(pat)).has_value());
            CHECK_FALSE(verify_cover(pat, stages).has_value());
        }
        for (isize Ns = 1; Ns <= 3; Ns++) {
            ScenarioConfig cfg;
            cfg.M = 3;
            cfg.N = 5;
            cfg.N_s = Ns;
            const ScenarioInstance inst = scenario(cfg);
            CHECK(validate(inst.problem, true).empty());
            const auto [qp, stages] = to_general_qp(inst.problem);
            CHECK(qp.n == Ns * (cfg.N * (inst.n_x + inst.n_u) - inst.n_u) + inst.n_x + inst.n_u);
            const SparsityPattern pat = detection_pattern(qp);
            CHECK_FALSE(verify_cover(pat, detect(pat)).has_value());
            CHECK(same_problem(inst.problem, scenario(cfg).problem));
        }
        for (isize ng = 0; ng <= 3; ng++) {
            LqcConfig cfg;
            cfg.n_g = ng;
            cfg.input_bounds = true;
            const MultistageProblem pb = extended_lqc(cfg);
            CHECK(validate(pb, true).empty());
            const auto [qp, stages] = to_general_qp(pb);
            const SparsityPattern pat = detection_pattern(qp);
            CHECK_FALSE(verify_cover(pat, detect(pat)).has_value());
        }
    }

    TEST_CASE("scenario spring constants")
    {
        ScenarioConfig cfg;
        cfg.M = 3;
        cfg.N_s = 4;
        cfg.N = 3;
        const ScenarioInstance inst = scenario(cfg);
        REQUIRE(inst.dynamics.size() == 4);
        CHECK_FALSE(inst.dynamics[0].A == inst.dynamics[1].A);
        CHECK(inst.n_x == 6);
        CHECK(inst.n_u == 2);
    }

    TEST_CASE("single scenario matches the nominal problem")
    {
        SpringMassConfig cfg;
        cfg.M = 3;
        cfg.N = 8;
        cfg.R_d = 0.0;
        cfg.seed = 4;
        const SpringMassInstance nominal = spring_mass(cfg);
        const ScenarioInstance one = scenario_from_dynamics({nominal.dynamics}, cfg.N, nominal.Q, nominal.R, nominal.x0);
        Solver a(nominal.problem);
        Solver b(one.problem);
        const Solution& sa = a.solve();
        const Solution& sb = b.solve();
        REQUIRE(sa.status == SolveStatus::Solved);
        REQUIRE(sb.status == SolveStatus::Solved);
        const isize d = nominal.n_x + nominal.n_u;
        const isize rest = sa.x.size() - d;
        REQUIRE(sb.x.size() == sa.x.size());
        CHECK((sa.x.head(d) - sb.x.tail(d)).cwiseAbs().maxCoeff() <= 1e-5);
        CHECK((sa.x.tail(rest) - sb.x.head(rest)).cwiseAbs().maxCoeff() <= 1e-5);
        CHECK(sa.objective == doctest::Approx(sb.objective).epsilon(1e-6));
    }

    TEST_CASE("identical scenarios give identical chains")
    {
        SpringMassConfig cfg;
        cfg.M = 2;
        cfg.N = 6;
        const SpringMassInstance nominal = spring_mass(cfg);
        const ScenarioInstance two =
            scenario_from_dynamics({nominal.dynamics, nominal.dynamics}, cfg.N, nominal.Q, nominal.R, nominal.x0);
        Solver solver(two.problem);
        const Solution& sol = solver.solve();
        REQUIRE(sol.status == SolveStatus::Solved);
        const isize chain = cfg.N * (two.n_x + two.n_u) - two.n_u;
        CHECK((sol.x.segment(0, chain) - sol.x.segment(chain, chain)).cwiseAbs().maxCoeff() <= 1e-6);
    }

    TEST_CASE("extended control family")
    {
        for (std::uint64_t seed = 0; seed < 5; seed++) {
            LqcConfig cfg;
            cfg.N = 6;
            cfg.n_x = 3;
            cfg.n_u = 2;
            cfg.n_g = static_cast<isize>(seed % 3);
            cfg.seed = seed;
            const MultistageProblem pb = extended_lqc(cfg);
            for (const Stage& st : pb.stages) {
                const auto dyn = st.B.bottomRows(3);
                CHECK(dyn.leftCols(3) == -Mat::Identity(3, 3));
                CHECK(dyn.rightCols(dyn.cols() - 3).isZero());
                CHECK(st.S.isZero());
            }
            CHECK(pb.stages[0].B.cols() == 5);
            CHECK(pb.stages.back().B.cols() == 3);
            CHECK(pb.stages[0].B.topRows(3).isZero());
            CHECK(same_problem(pb, extended_lqc(cfg)));

            // roll the dynamics forward from the pinned initial state
            const auto [qp, structure] = to_general_qp(pb);
            testing::Rng rng(seed);
            Vec x = Vec::Zero(qp.n);
            const Vec g = testing::gaussian(rng, cfg.n_g, 1);
            x.tail(cfg.n_g) = g;
            x.head(3) = pb.stages[0].b.head(3);
            for (isize i = 0; i < cfg.N; i++) {
                const Stage& st = pb.stages[i];
                const isize o = structure.block_start(i);
                x.segment(o + 3, 2) = testing::gaussian(rng, 2, 1);
                const Vec xi = x.segment(o, 5);
                x.segment(structure.block_start(i + 1), 3) =
                    st.A.bottomRows(3) * xi + st.E.bottomRows(3) * g - st.b.tail(3);
            }
            const Vec r = testing::to_dense(qp.A) * x - qp.b;
            CHECK(r.cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + x.cwiseAbs().maxCoeff()));

            if (cfg.n_g == 0) CHECK(detect(detection_pattern(qp)).arrow_width() == 0);
        }
    }

    TEST_CASE("warm start helpers")
    {
        SpringMassConfig cfg;
        cfg.M = 2;
        cfg.N = 5;
        SpringMassInstance inst = spring_mass(cfg);
        const Vec traj = zero_input_trajectory(inst, inst.x0);
        const auto [qp, stages] = to_general_qp(inst.problem);
        REQUIRE(traj.size() == qp.n);
        CHECK((testing::to_dense(qp.A) * traj - qp.b).cwiseAbs().maxCoeff() < 1e-12);

        Solver solver(inst.problem);
        const Solution& prev = solver.solve();
        const Vec next = inst.sampler(1);
        const WarmStart ws = shifted_warm_start(inst, prev, next, 1.0);
        REQUIRE(ws.x.size() == qp.n);
        CHECK(ws.x.head(inst.n_x) == next);
        REQUIRE(ws.z.has_value());
        REQUIRE(ws.s.has_value());
        CHECK(ws.z->minCoeff() >= 1.0);
        CHECK(ws.s->minCoeff() >= 1.0);
        CHECK(ws.y->size() == qp.p);
    }
}
