#include "doctest.h"

#include <cmath>

#include "arrowqp/errors.hpp"
#include "arrowqp/generators.hpp"
#include "arrowqp/ipm.hpp"
#include "arrowqp/verify.hpp"
#include "oracles.hpp"

using namespace arrowqp;

namespace
{

SparseMat scalar(double v)
{
    SparseMat M(1, 1);
    M.insert(0, 0) = v;
    M.makeCompressed();
    return M;
}

SparseMat column(std::initializer_list<double> values)
{
    SparseMat M(static_cast<isize>(values.size()), 1);
    int i = 0;
    for (double v : values) M.insert(i++, 0) = v;
    M.makeCompressed();
    return M;
}

Vec vec1(double v)
{
    return Vec::Constant(1, v);
}

GeneralQP scalar_qp(double p, double c, std::optional<std::pair<double, double>> ineq)
{
    SparseMat G = ineq ? scalar(ineq->first) : SparseMat(0, 1);
    Vec h = ineq ? vec1(ineq->second) : Vec(0);
    return GeneralQP(scalar(p), vec1(c), SparseMat(0, 1), Vec(0), G, h);
}

double max_diff(const Vec& a, const Vec& b)
{
    return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

} // namespace

TEST_SUITE("ipm")
{
    TEST_CASE("residuals collapse on zero data")
    {
        const GeneralQP qp(SparseMat(3, 3), Vec::Zero(3), SparseMat(2, 3), Vec::Zero(2), SparseMat(2, 3), Vec::Zero(2));
        IterateState st;
        st.x = Vec::Constant(3, 0.7);
        st.xi = st.x;
        st.y = Vec::Constant(2, -0.3);
        st.lambda = st.y;
        st.z = Vec::Constant(2, 2.0);
        st.nu = st.z;
        st.s = Vec::Constant(2, 1.5);
        st.rho = 0.1;
        st.delta = 0.2;
        st.mu = 0.0;
        const Residuals r = compute_residuals(qp, st);
        CHECK(r.r_x.isZero());
        CHECK(r.r_y.isZero());
        CHECK(r.r_z == -st.s);
        CHECK(r.r_s == Vec::Constant(2, -3.0));
    }

    TEST_CASE("residuals on a scalar instance")
    {
        const GeneralQP qp(scalar(2.0), vec1(1.0), scalar(3.0), vec1(2.0), scalar(1.0), vec1(4.0));
        IterateState st;
        st.x = vec1(1.0);
        st.xi = vec1(0.5);
        st.y = vec1(0.5);
        st.lambda = vec1(1.0);
        st.z = vec1(2.0);
        st.nu = vec1(1.0);
        st.s = vec1(1.5);
        st.rho = 0.1;
        st.delta = 0.5;
        st.mu = 0.6;
        st.sigma = 0.5;
        const Residuals r = compute_residuals(qp, st);
        CHECK(r.r_x[0] == doctest::Approx(-6.55));
        CHECK(r.r_y[0] == doctest::Approx(-1.25));
        CHECK(r.r_z[0] == doctest::Approx(2.0));
        CHECK(r.r_s[0] == doctest::Approx(-2.7));
        CHECK(r.rbar_z[0] == doctest::Approx(3.35));
    }

    TEST_CASE("fraction to the boundary")
    {
        IterateState st;
        st.s = Vec::Ones(3);
        st.z = Vec::Ones(3);
        StepDirection d(0, 0, 3);
        d.ds = Vec::Constant(3, 0.5);
        d.dz = Vec::Zero(3);
        auto [ap, ad] = step_lengths(st, d, 0.99);
        CHECK(ap == 1.0);
        CHECK(ad == 1.0);

        st.s = vec1(1.0);
        st.z = vec1(1.0);
        StepDirection one(0, 0, 1);
        one.ds = vec1(-2.0);
        one.dz = vec1(1.0);
        std::tie(ap, ad) = step_lengths(st, one, 0.99);
        CHECK(ap == doctest::Approx(0.495));
        CHECK(ad == 1.0);

        st.s = Vec(3);
        st.s << 1.0, 2.0, 4.0;
        st.z = Vec::Ones(3);
        StepDirection mixed(0, 0, 3);
        mixed.ds << 3.0, -1.0, -8.0;
        mixed.dz << -4.0, 1.0, -0.5;
        std::tie(ap, ad) = step_lengths(st, mixed, 0.9);
        CHECK(ap == doctest::Approx(0.45));
        CHECK(ad == doctest::Approx(0.225));
    }

    TEST_CASE("zero residuals give a zero direction")
    {
        // unconstrained-in-effect point: x = 0 minimizes, equality holds, s z = sigma mu
        const GeneralQP qp(scalar(1.0), vec1(0.0), scalar(1.0), vec1(0.0), scalar(0.0), vec1(1.0));
        GeneralQP clean = qp;
        clean.G = SparseMat(1, 1);
        IterateState st;
        st.x = vec1(0.0);
        st.xi = st.x;
        st.y = vec1(0.0);
        st.lambda = st.y;
        st.s = vec1(1.0);
        st.z = vec1(1.0);
        st.nu = st.z;
        st.rho = 1e-3;
        st.delta = 1e-2;
        st.mu = 1.0;
        st.sigma = 1.0;
        auto backend = make_backend(Backend::btda, clean, BlockStructure::single_block(1));
        const StepDirection d = newton_step(clean, *backend, st);
        CHECK(d.dx.isZero());
        CHECK(d.dy.isZero());
        CHECK(d.dz.isZero());
        CHECK(d.ds.isZero());
    }

    TEST_CASE("predictor direction on a scalar QP")
    {
        // min x^2 + x  s.t.  x = 0.5,  x <= 1
        const GeneralQP qp(scalar(2.0), vec1(1.0), scalar(1.0), vec1(0.5), scalar(1.0), vec1(1.0));
        IterateState st = IterateState::cold(qp, Settings{});
        st.sigma = 0.0;
        st.mu = 1.0;
        const double rho = st.rho, delta = st.delta;

        // unknowns (dx, dy, dz, ds)
        Eigen::Matrix4d J;
        J << 2.0 + rho, 1.0, 1.0, 0.0,
             1.0, -delta, 0.0, 0.0,
             1.0, 0.0, -delta, 1.0,
             0.0, 0.0, 1.0, 1.0;
        Eigen::Vector4d r;
        r << -(0.0 + 1.0 + 0.0 + 0.0 + 1.0), -(0.0 - 0.5), -(0.0 + delta * (0.0 - 1.0) - 1.0 + 1.0), -1.0;
        const Eigen::Vector4d ref = J.partialPivLu().solve(r);

        for (Backend b : {Backend::btda, Backend::dense}) {
            auto backend = make_backend(b, qp, BlockStructure::single_block(1));
            const StepDirection d = newton_step(qp, *backend, st);
            CHECK(d.dx[0] == doctest::Approx(ref[0]).epsilon(1e-9));
            CHECK(d.dy[0] == doctest::Approx(ref[1]).epsilon(1e-9));
            CHECK(d.dz[0] == doctest::Approx(ref[2]).epsilon(1e-9));
            CHECK(d.ds[0] == doctest::Approx(ref[3]).epsilon(1e-9));
        }
    }

    TEST_CASE("unconstrained scalar")
    {
        Solver solver(scalar_qp(1.0, 0.0, std::nullopt));
        const Solution& sol = solver.solve();
        CHECK(sol.status == SolveStatus::Solved);
        CHECK(std::abs(sol.x[0]) < 1e-6);
        CHECK(sol.iterations <= 2);
    }

    TEST_CASE("scalar box QP")
    {
        // min 1/2 (x - 2)^2  s.t.  x <= 1
        for (Backend b : {Backend::btda, Backend::dense}) {
            Settings settings;
            settings.backend = b;
            Solver solver(scalar_qp(1.0, -2.0, std::make_pair(1.0, 1.0)), settings);
            const Solution& sol = solver.solve();
            REQUIRE(sol.status == SolveStatus::Solved);
            CHECK(sol.x[0] == doctest::Approx(1.0).epsilon(1e-5));
            CHECK(sol.z[0] == doctest::Approx(1.0).epsilon(1e-5));
            CHECK(certify(solver.problem(), sol).accept(1e-6, 1e-6));
        }
    }

    TEST_CASE("spring-mass instances against the dense backend")
    {
        for (std::uint64_t seed = 0; seed < 5; seed++) {
            SpringMassConfig cfg;
            cfg.M = 2;
            cfg.N = 15;
            cfg.seed = seed;
            const SpringMassInstance inst = spring_mass(cfg);
            Solver fast(inst.problem);
            Settings dense_settings;
            dense_settings.backend = Backend::dense;
            Solver ref(inst.problem, dense_settings);
            const Solution& a = fast.solve();
            const Solution& b = ref.solve();
            REQUIRE(a.status == SolveStatus::Solved);
            REQUIRE(b.status == SolveStatus::Solved);
            CHECK(max_diff(a.x, b.x) <= 1e-5);
            CHECK(certify(fast.problem(), a).accept(1e-6, 1e-6));
        }
    }

    TEST_CASE("iterates stay interior and penalties shrink monotonically")
    {
        for (std::uint64_t seed = 0; seed < 5; seed++) {
            SpringMassConfig cfg;
            cfg.M = 3;
            cfg.N = 10;
            cfg.seed = seed;
            Solver solver(spring_mass(cfg).problem);
            solver.record_trace(true);
            const Solution& sol = solver.solve();
            CHECK(sol.status == SolveStatus::Solved);
            REQUIRE(solver.trace().size() == static_cast<std::size_t>(sol.iterations));
            for (const IterateState& st : solver.trace()) {
                CHECK(st.s.minCoeff() > 0.0);
                CHECK(st.z.minCoeff() > 0.0);
            }
            const auto& log = solver.log();
            for (std::size_t k = 1; k < log.size(); k++) {
                CHECK(log[k].rho <= log[k - 1].rho);
                CHECK(log[k].delta <= log[k - 1].delta);
                CHECK(log[k].rho >= solver.settings().rho_min);
                CHECK(log[k].delta >= solver.settings().delta_min);
            }
        }
    }

    TEST_CASE("backends follow the same trajectory")
    {
        for (std::uint64_t seed = 0; seed < 10; seed++) {
            LqcConfig cfg;
            cfg.N = 4;
            cfg.n_x = 3;
            cfg.n_u = 2;
            cfg.n_g = seed % 3;
            cfg.input_bounds = true;
            cfg.seed = seed;
            const MultistageProblem pb = extended_lqc(cfg);
            Settings dense_settings;
            dense_settings.backend = Backend::dense;
            Solver a(pb);
            Solver b(pb, dense_settings);
            a.record_trace(true);
            b.record_trace(true);
            a.solve();
            b.solve();
            REQUIRE(a.trace().size() == b.trace().size());
            for (std::size_t k = 0; k < a.trace().size(); k++) {
                const IterateState& u = a.trace()[k];
                const IterateState& v = b.trace()[k];
                const double scale = 1.0 + u.x.cwiseAbs().maxCoeff() + (u.y.size() ? u.y.cwiseAbs().maxCoeff() : 0.0) +
                                     (u.z.size() ? u.z.cwiseAbs().maxCoeff() : 0.0);
                CHECK(max_diff(u.x, v.x) <= 1e-9 * scale);
                CHECK(max_diff(u.y, v.y) <= 1e-9 * scale);
                CHECK(max_diff(u.z, v.z) <= 1e-9 * scale);
                CHECK(max_diff(u.s, v.s) <= 1e-9 * scale);
            }
        }
    }

    TEST_CASE("update with identical data reproduces the trace")
    {
        SpringMassConfig cfg;
        cfg.M = 2;
        cfg.N = 8;
        Solver solver(spring_mass(cfg).problem);
        solver.record_trace(true);
        solver.solve();
        const auto first = solver.trace();
        const int iters = solver.solution().iterations;
        solver.update(solver.problem());
        solver.solve();
        REQUIRE(solver.solution().iterations == iters);
        for (std::size_t k = 0; k < first.size(); k++) {
            CHECK(solver.trace()[k].x == first[k].x);
            CHECK(solver.trace()[k].z == first[k].z);
        }
    }

    TEST_CASE("update rejects a changed pattern")
    {
        SpringMassConfig cfg;
        cfg.M = 2;
        cfg.N = 5;
        Solver solver(spring_mass(cfg).problem);
        GeneralQP changed = solver.problem();
        changed.P.coeffRef(changed.n - 1, 0) = 1e-3;
        changed.P.makeCompressed();
        CHECK_THROWS_AS(solver.update(changed), SparsityChanged);
        GeneralQP fewer = solver.problem();
        fewer.G = SparseMat(fewer.m, fewer.n);
        CHECK_THROWS_AS(solver.update(fewer), SparsityChanged);
        CHECK_THROWS_AS(solver.update_vectors(Vec::Zero(3), std::nullopt, std::nullopt), InvalidProblem);
    }

    TEST_CASE("vector update solves the new problem")
    {
        SpringMassConfig cfg;
        cfg.M = 3;
        cfg.N = 10;
        SpringMassInstance inst = spring_mass(cfg);
        Solver session(inst.problem);
        session.solve();
        set_initial_state(inst, inst.sampler(1));
        Vec b = session.problem().b;
        b.head(inst.n_x) = inst.sampler(1);
        session.update_vectors(std::nullopt, b, std::nullopt);
        const Solution& updated = session.solve();
        Solver fresh(inst.problem);
        const Solution& ref = fresh.solve();
        REQUIRE(updated.status == SolveStatus::Solved);
        CHECK(max_diff(updated.x, ref.x) <= 1e-8);
    }

    TEST_CASE("indefinite cost ends in a numerical error status")
    {
        Solver solver(scalar_qp(-1.0, 1.0, std::nullopt));
        Solution sol;
        CHECK_NOTHROW(sol = solver.solve());
        CHECK(sol.status == SolveStatus::NumericalError);
    }

    TEST_CASE("infeasible box does not report success")
    {
        // x <= -1 and x >= 1
        const GeneralQP qp(scalar(1.0), vec1(0.0), SparseMat(0, 1), Vec(0), column({1.0, -1.0}), Vec::Constant(2, -1.0));
        Settings settings;
        settings.max_iter = 200;
        Solver solver(qp, settings);
        Solution sol;
        CHECK_NOTHROW(sol = solver.solve());
        CHECK(sol.status != SolveStatus::Solved);
    }

    TEST_CASE("callback sees every iteration")
    {
        SpringMassConfig cfg;
        cfg.M = 2;
        cfg.N = 6;
        Solver solver(spring_mass(cfg).problem);
        int calls = 0;
        int last = -1;
        solver.set_callback([&](const IterationLog& entry) {
            calls++;
            CHECK(entry.k > last);
            last = entry.k;
        });
        const Solution& sol = solver.solve();
        CHECK(calls == sol.iterations);
        CHECK(solver.log().size() == static_cast<std::size_t>(sol.iterations));
    }

    TEST_CASE("settings validation")
    {
        Settings s;
        CHECK_NOTHROW(s.check());
        s.tau = 1.0;
        CHECK_THROWS_AS(s.check(), InvalidProblem);
        s = Settings{};
        s.eps_abs = 0.0;
        CHECK_THROWS_AS(s.check(), InvalidProblem);
        s = Settings{};
        s.delta_init = -1.0;
        CHECK_THROWS_AS(s.check(), InvalidProblem);
        CHECK(std::string(to_string(Backend::dense)) == "dense");
    }

    TEST_CASE("multistage session uses the stage partition")
    {
        LqcConfig cfg;
        cfg.N = 3;
        cfg.n_g = 2;
        const MultistageProblem pb = extended_lqc(cfg);
        Solver solver(pb);
        CHECK(solver.structure() == to_general_qp(pb).second);
        CHECK(solver.solve().status == SolveStatus::Solved);
    }

    TEST_CASE("cold start satisfies the initialization rules")
    {
        testing::Rng rng(31);
        const GeneralQP qp = testing::random_qp(rng, 5, 2, 3);
        const Settings settings;
        const IterateState st = IterateState::cold(qp, settings);
        CHECK(st.x.isZero());
        CHECK(st.xi.isZero());
        CHECK(st.s == Vec::Ones(3));
        CHECK(st.z == Vec::Ones(3));
        CHECK(st.lambda.isZero());
        CHECK(st.nu.isZero());
        CHECK(st.rho == settings.rho_init);
        CHECK(st.delta == settings.delta_init);
    }
}
