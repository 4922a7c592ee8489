#include "arrowqp/generators.hpp"

#include <cmath>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "arrowqp/errors.hpp"

namespace arrowqp
{

namespace
{

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
  : key_(splitmix64(splitmix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL)))
{}

std::uint64_t CounterRng::next_u64()
{
    return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * counter_++);
}

double CounterRng::uniform()
{
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::uniform(double lo, double hi)
{
    return lo + (hi - lo) * uniform();
}

double CounterRng::normal()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * M_PI * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
}

Mat expm(const Mat& A)
{
    const isize n = A.rows();
    if (n == 0) return Mat(0, 0);
    const double norm = A.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm > 0.5) squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / 0.5))));
    const Mat X = A / std::ldexp(1.0, squarings);

    constexpr int q = 6;
    double c = 1.0;
    Mat term = Mat::Identity(n, n);
    Mat num = Mat::Identity(n, n);
    Mat den = Mat::Identity(n, n);
    for (int k = 1; k <= q; k++) {
        c *= static_cast<double>(q - k + 1) / static_cast<double>(k * (2 * q - k + 1));
        term = term * X;
        num += c * term;
        den += ((k % 2 == 0) ? c : -c) * term;
    }
    Mat E = den.partialPivLu().solve(num);
    for (int i = 0; i < squarings; i++) E = E * E;
    return E;
}

DiscreteDynamics zoh(const Mat& Ac, const Mat& Bc, double Ts)
{
    const isize n = Ac.rows();
    const isize m = Bc.cols();
    Mat aug = Mat::Zero(n + m, n + m);
    aug.topLeftCorner(n, n) = Ac * Ts;
    aug.topRightCorner(n, m) = Bc * Ts;
    const Mat E = expm(aug);
    return {E.topLeftCorner(n, n), E.topRightCorner(n, m)};
}

Mat dare(const Mat& A, const Mat& B, const Mat& Q, const Mat& R, int max_iter, double tol)
{
    Mat P = Q;
    for (int it = 0; it < max_iter; it++) {
        const Mat BtP = B.transpose() * P;
        const Mat K = (R + BtP * B).ldlt().solve(BtP * A);
        Mat next = Q + A.transpose() * P * A - A.transpose() * P.transpose() * B * K;
        next = 0.5 * (next + next.transpose()).eval();
        const double change = (next - P).stableNorm();
        P = std::move(next);
        if (!P.allFinite()) throw NoConvergence("Riccati iteration diverged");
        if (change <= tol * std::max(1.0, P.stableNorm())) return P;
    }
    throw NoConvergence("Riccati iteration did not converge");
}

DiscreteDynamics spring_mass_dynamics(const std::vector<double>& k, double Ts, double damping)
{
    const isize M = static_cast<isize>(k.size()) - 1;
    if (M < 2) throw InvalidProblem("spring-mass chain needs at least two masses");
    Mat K = Mat::Zero(M, M);
    for (isize i = 0; i < M; i++) {
        K(i, i) = k[i] + k[i + 1];
        if (i + 1 < M) {
            K(i, i + 1) = -k[i + 1];
            K(i + 1, i) = -k[i + 1];
        }
    }
    Mat F = Mat::Zero(M, M - 1);
    for (isize a = 0; a + 1 < M; a++) {
        F(a, a) = 1.0;
        F(a + 1, a) = -1.0;
    }
    Mat Ac = Mat::Zero(2 * M, 2 * M);
    Ac.topRightCorner(M, M).setIdentity();
    Ac.bottomLeftCorner(M, M) = -K;
    Ac.bottomRightCorner(M, M) = -damping * Mat::Identity(M, M);
    Mat Bc = Mat::Zero(2 * M, M - 1);
    Bc.bottomRows(M) = F;
    return zoh(Ac, Bc, Ts);
}

Vec InitialStateSampler::operator()(std::uint64_t index) const
{
    CounterRng rng(seed_, 0x5eed0000ULL + index);
    const double gamma = rng.uniform(0.5, 1.5);
    Vec x0(n_x_);
    for (isize i = 0; i < n_x_; i++) x0[i] = rng.uniform(-gamma, gamma);
    return x0;
}

namespace
{

constexpr double state_bound = 4.0;
constexpr double input_bound = 0.5;

// Rows  [ I; -I ] v <= bound
void box_rows(Mat& C, Vec& h, isize row, isize col, isize count, double bound)
{
    for (isize i = 0; i < count; i++) {
        C(row + i, col + i) = 1.0;
        C(row + count + i, col + i) = -1.0;
    }
    h.segment(row, 2 * count).setConstant(bound);
}

} // namespace

SpringMassInstance spring_mass(const SpringMassConfig& cfg)
{
    if (cfg.M < 2 || cfg.N < 1 || cfg.R_d < 0.0) throw InvalidProblem("invalid spring-mass configuration");
    SpringMassInstance inst;
    inst.config = cfg;
    const isize M = cfg.M;
    const isize N = cfg.N;
    const isize nx = 2 * M;
    const isize nu = M - 1;
    const isize d = nx + nu;
    inst.n_x = nx;
    inst.n_u = nu;
    inst.dynamics = spring_mass_dynamics(std::vector<double>(static_cast<std::size_t>(M + 1), 1.0));
    inst.Q = 1e3 * Mat::Identity(nx, nx);
    inst.R = 1e-1 * Mat::Identity(nu, nu);
    inst.R_d = cfg.R_d * Mat::Identity(nu, nu);
    inst.Q_N = dare(inst.dynamics.A, inst.dynamics.B, inst.Q, inst.R);
    inst.sampler = InitialStateSampler(nx, cfg.seed);
    inst.x0 = inst.sampler(0);

    std::vector<isize> dims(static_cast<std::size_t>(N), d);
    dims.push_back(nx);
    std::vector<isize> eq(static_cast<std::size_t>(N), nx);
    eq[0] = 2 * nx;
    eq.push_back(0);
    std::vector<isize> ineq(static_cast<std::size_t>(N), 2 * d);
    ineq.push_back(2 * nx);
    MultistageProblem pb = MultistageProblem::zeros(dims, 0, eq, ineq);

    const Mat& Ad = inst.dynamics.A;
    const Mat& Bd = inst.dynamics.B;
    for (isize i = 0; i < N; i++) {
        Stage& st = pb.stages[i];
        st.Q.topLeftCorner(nx, nx) = 2.0 * inst.Q;
        st.Q.bottomRightCorner(nu, nu) = 2.0 * inst.R;
        // (u_i - u_{i+1})' R_d (u_i - u_{i+1}) for consecutive inputs
        if (cfg.R_d > 0.0) {
            if (i + 1 < N) {
                st.Q.bottomRightCorner(nu, nu) += 2.0 * inst.R_d;
                st.S.bottomRightCorner(nu, nu) = -2.0 * inst.R_d;
            }
            if (i > 0) st.Q.bottomRightCorner(nu, nu) += 2.0 * inst.R_d;
        }
        isize r = 0;
        if (i == 0) {
            st.A.topLeftCorner(nx, nx).setIdentity();
            st.b.head(nx) = inst.x0;
            r = nx;
        }
        st.A.block(r, 0, nx, nx) = Ad;
        st.A.block(r, nx, nx, nu) = Bd;
        st.B.block(r, 0, nx, nx) = -Mat::Identity(nx, nx);
        box_rows(st.C, st.h, 0, 0, nx, state_bound);
        box_rows(st.C, st.h, 2 * nx, nx, nu, input_bound);
    }
    pb.terminal.Q = 2.0 * inst.Q_N;
    box_rows(pb.terminal.D, pb.terminal.h, 0, 0, nx, state_bound);
    inst.problem = std::move(pb);
    return inst;
}

void set_initial_state(SpringMassInstance& inst, const Vec& x0)
{
    if (x0.size() != inst.n_x) throw InvalidProblem("initial state has the wrong length");
    inst.x0 = x0;
    inst.problem.stages[0].b.head(inst.n_x) = x0;
}

Vec zero_input_trajectory(const SpringMassInstance& inst, const Vec& x0)
{
    const isize nx = inst.n_x;
    const isize nu = inst.n_u;
    const isize N = inst.config.N;
    Vec x = Vec::Zero(N * (nx + nu) + nx);
    Vec z = x0;
    for (isize i = 0; i <= N; i++) {
        x.segment(i * (nx + nu), nx) = z;
        z = inst.dynamics.A * z;
    }
    return x;
}

WarmStart shifted_warm_start(const SpringMassInstance& inst, const Solution& prev, const Vec& x0, double floor)
{
    const isize nx = inst.n_x;
    const isize d = nx + inst.n_u;
    const isize N = inst.config.N;
    const isize ni = 2 * d; // inequality rows per stage

    WarmStart w;
    Vec x = prev.x;
    for (isize i = 0; i + 1 < N; i++) x.segment(i * d, d) = prev.x.segment((i + 1) * d, d);
    x.segment((N - 1) * d, nx) = prev.x.tail(nx);
    x.tail(nx) = inst.dynamics.A * prev.x.tail(nx);
    x.head(nx) = x0;
    w.x = std::move(x);

    // equality rows: [z_0 = x0 | dynamics 0 | ... | dynamics N-1]
    Vec y = prev.y;
    for (isize i = 0; i + 1 < N; i++) y.segment(nx + i * nx, nx) = prev.y.segment(nx + (i + 1) * nx, nx);
    Vec z = prev.z;
    Vec s = prev.s;
    for (isize i = 0; i + 1 < N; i++) {
        z.segment(i * ni, ni) = prev.z.segment((i + 1) * ni, ni);
        s.segment(i * ni, ni) = prev.s.segment((i + 1) * ni, ni);
    }
    w.y = std::move(y);
    w.z = z.cwiseMax(floor);
    w.s = s.cwiseMax(floor);
    return w;
}

ScenarioInstance scenario_from_dynamics(const std::vector<DiscreteDynamics>& dyn, isize N, const Mat& Q,
                                        const Mat& R, const Vec& x0)
{
    const isize Ns = static_cast<isize>(dyn.size());
    if (Ns < 1 || N < 1) throw InvalidProblem("invalid scenario configuration");
    const isize nx = Q.rows();
    const isize nu = R.rows();
    const isize d = nx + nu;
    const isize ng = d;
    const double w = 1.0 / static_cast<double>(Ns);

    ScenarioInstance inst;
    inst.config.N = N;
    inst.config.N_s = Ns;
    inst.n_x = nx;
    inst.n_u = nu;
    inst.dynamics = dyn;
    inst.Q = Q;
    inst.R = R;
    inst.x0 = x0;

    // Per scenario: N-1 stages (z_t, u_t) and one stage z_N.
    std::vector<isize> dims, eq, ineq;
    for (isize j = 0; j < Ns; j++) {
        for (isize t = 1; t < N; t++) {
            dims.push_back(d);
            eq.push_back((t == 1 ? nx : 0) + nx);
            ineq.push_back(2 * d);
        }
        dims.push_back(nx);
        eq.push_back(N == 1 ? nx : 0);
        ineq.push_back(2 * nx);
    }
    eq[0] += nx;
    ineq[0] += 2 * ng;
    MultistageProblem pb = MultistageProblem::zeros(dims, ng, eq, ineq);

    Mat no_next;
    auto stage_eq = [&](isize s) -> std::tuple<Mat&, Mat&, Mat&, Vec&> {
        if (s < pb.N) return {pb.stages[s].A, pb.stages[s].B, pb.stages[s].E, pb.stages[s].b};
        return {pb.terminal.A, no_next, pb.terminal.E, pb.terminal.b};
    };
    auto stage_ineq = [&](isize s) -> std::tuple<Mat&, Vec&> {
        if (s < pb.N) return {pb.stages[s].C, pb.stages[s].h};
        return {pb.terminal.D, pb.terminal.h};
    };
    auto stage_Q = [&](isize s) -> Mat& { return s < pb.N ? pb.stages[s].Q : pb.terminal.Q; };

    for (isize j = 0; j < Ns; j++) {
        const Mat Q_N = dare(dyn[j].A, dyn[j].B, Q, R);
        const isize first = j * N;
        for (isize t = 1; t <= N; t++) {
            const isize s = first + t - 1;
            auto [A, B, E, b] = stage_eq(s);
            auto [C, h] = stage_ineq(s);
            isize r = 0;
            if (s == 0) {
                // z_0 = x0 on the global variable
                E.block(0, 0, nx, nx).setIdentity();
                b.head(nx) = x0;
                r = nx;
            }
            if (t == 1) {
                // z_1 = A^j z_0 + B^j u_0
                A.block(r, 0, nx, nx).setIdentity();
                E.block(r, 0, nx, nx) = -dyn[j].A;
                E.block(r, nx, nx, nu) = -dyn[j].B;
                r += nx;
            }
            if (t < N) {
                A.block(r, 0, nx, nx) = dyn[j].A;
                A.block(r, nx, nx, nu) = dyn[j].B;
                B.block(r, 0, nx, nx) = -Mat::Identity(nx, nx);
                stage_Q(s).topLeftCorner(nx, nx) = 2.0 * w * Q;
                stage_Q(s).bottomRightCorner(nu, nu) = 2.0 * w * R;
                box_rows(C, h, 0, 0, nx, state_bound);
                box_rows(C, h, 2 * nx, nx, nu, input_bound);
            } else {
                stage_Q(s) = 2.0 * w * Q_N;
                box_rows(C, h, 0, 0, nx, state_bound);
            }
            if (s == 0) {
                auto& F = pb.stages[0].F;
                const isize row = C.rows() - 2 * ng;
                box_rows(F, h, row, 0, nx, state_bound);
                box_rows(F, h, row + 2 * nx, nx, nu, input_bound);
            }
        }
    }
    pb.Q_g.topLeftCorner(nx, nx) = 2.0 * Q;
    pb.Q_g.bottomRightCorner(nu, nu) = 2.0 * R;
    inst.problem = std::move(pb);
    return inst;
}

ScenarioInstance scenario(const ScenarioConfig& cfg)
{
    if (cfg.M < 2 || cfg.N < 1 || cfg.N_s < 1) throw InvalidProblem("invalid scenario configuration");
    const isize nx = 2 * cfg.M;
    const isize nu = cfg.M - 1;
    std::vector<DiscreteDynamics> dyn;
    for (isize j = 0; j < cfg.N_s; j++) {
        CounterRng rng(cfg.seed, 0x5ce0000ULL + static_cast<std::uint64_t>(j));
        std::vector<double> springs(static_cast<std::size_t>(cfg.M + 1));
        for (double& k : springs) k = rng.uniform(1.0, 2.0);
        dyn.push_back(spring_mass_dynamics(springs));
    }
    const Vec x0 = InitialStateSampler(nx, cfg.seed)(0);
    ScenarioInstance inst = scenario_from_dynamics(dyn, cfg.N, 1e3 * Mat::Identity(nx, nx),
                                                   1e-1 * Mat::Identity(nu, nu), x0);
    inst.config = cfg;
    return inst;
}

MultistageProblem extended_lqc(const LqcConfig& cfg)
{
    if (cfg.N < 1 || cfg.n_x < 1 || cfg.n_u < 0 || cfg.n_g < 0) throw InvalidProblem("invalid LQC configuration");
    const isize N = cfg.N;
    const isize nx = cfg.n_x;
    const isize nu = cfg.n_u;
    const isize ng = cfg.n_g;
    const isize d = nx + nu;
    CounterRng rng(cfg.seed, 0x19c0000ULL);
    auto gaussian = [&](isize r, isize c) {
        Mat M(r, c);
        for (isize j = 0; j < c; j++)
            for (isize i = 0; i < r; i++) M(i, j) = rng.normal();
        return M;
    };
    auto spd = [&](isize n) {
        const Mat M = gaussian(n, n);
        return Mat(M.transpose() * M + 1e-3 * Mat::Identity(n, n));
    };

    std::vector<isize> dims(static_cast<std::size_t>(N), d);
    dims.push_back(nx);
    std::vector<isize> eq(static_cast<std::size_t>(N), nx);
    eq[0] += nx;
    eq.push_back(0);
    std::vector<isize> ineq(static_cast<std::size_t>(N), cfg.input_bounds ? 2 * nu : 0);
    ineq.push_back(0);
    MultistageProblem pb = MultistageProblem::zeros(dims, ng, eq, ineq);

    for (isize i = 0; i < N; i++) {
        Stage& st = pb.stages[i];
        Mat Ad = gaussian(nx, nx);
        const double radius = Ad.eigenvalues().cwiseAbs().maxCoeff();
        if (radius > 0.0) Ad *= 0.9 / radius;
        const Mat Bd = gaussian(nx, nu);
        st.Q = spd(d);
        for (isize j = 0; j < d; j++) st.c[j] = rng.normal();
        isize r = 0;
        if (i == 0) {
            st.A.topLeftCorner(nx, nx).setIdentity();
            for (isize j = 0; j < nx; j++) st.b[j] = rng.normal();
            r = nx;
        }
        st.A.block(r, 0, nx, nx) = Ad;
        st.A.block(r, nx, nx, nu) = Bd;
        st.B.block(r, 0, nx, nx) = -Mat::Identity(nx, nx);
        for (isize j = 0; j < nx; j++) st.b[r + j] = -0.1 * rng.normal();
        if (ng > 0) st.E.middleRows(r, nx) = gaussian(nx, ng);
        if (cfg.input_bounds && nu > 0) box_rows(st.C, st.h, 0, nx, nu, 10.0);
    }
    pb.terminal.Q = spd(nx);
    for (isize j = 0; j < nx; j++) pb.terminal.c[j] = rng.normal();
    if (ng > 0) {
        pb.Q_g = spd(ng);
        for (isize j = 0; j < ng; j++) pb.c_g[j] = rng.normal();
    }
    return pb;
}

} // namespace arrowqp
