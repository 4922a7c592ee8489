#ifndef ARROWQP_GENERATORS_HPP
#define ARROWQP_GENERATORS_HPP

#include <cstdint>
#include <vector>

#include "arrowqp/ipm.hpp"
#include "arrowqp/qp_model.hpp"

namespace arrowqp
{

// Counter-based generator: draw k of stream `seed` is a pure function of
// (seed, k), so independent streams never share state.
class CounterRng
{
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next_u64();
    // Uniform in [0, 1).
    double uniform();
    double uniform(double lo, double hi);
    double normal();

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Matrix exponential, scaling and squaring with a [6/6] Pade approximant.
Mat expm(const Mat& A);

struct DiscreteDynamics
{
    Mat A;
    Mat B;
};

// Zero-order-hold discretization of x' = Ac x + Bc u with sampling time Ts.
DiscreteDynamics zoh(const Mat& Ac, const Mat& Bc, double Ts);

// Stabilizing solution of the discrete algebraic Riccati equation by
// fixed-point iteration. Throws NoConvergence after max_iter sweeps.
Mat dare(const Mat& A, const Mat& B, const Mat& Q, const Mat& R, int max_iter = 100000, double tol = 1e-10);

// Chain of M unit masses between two walls. springs holds the M+1 spring
// constants (wall, between masses, wall). Actuator a pushes mass a with +u
// and mass a+1 with -u. State is (positions, velocities).
DiscreteDynamics spring_mass_dynamics(const std::vector<double>& springs, double Ts = 0.5, double damping = 0.1);

struct SpringMassConfig
{
    isize M = 2;
    isize N = 15;
    double R_d = 0.1;
    std::uint64_t seed = 0;
};

// Samples gamma ~ U[0.5, 1.5], x0 ~ U[-gamma, gamma]^{n_x}. Sample i depends
// only on (seed, i).
class InitialStateSampler
{
public:
    InitialStateSampler(isize n_x, std::uint64_t seed) : n_x_(n_x), seed_(seed) {}
    Vec operator()(std::uint64_t index) const;

private:
    isize n_x_;
    std::uint64_t seed_;
};

struct SpringMassInstance
{
    SpringMassConfig config;
    isize n_x = 0;
    isize n_u = 0;
    DiscreteDynamics dynamics;
    Mat Q, R, R_d, Q_N;
    Vec x0;
    MultistageProblem problem;
    InitialStateSampler sampler{0, 0};
};

// Stage i < N holds x_i = (z_i, u_i), stage N holds z_N. Stage 0 carries
// the rows z_0 = x0 first, then its dynamics; every later stage its
// dynamics only. The problem is built around sampler(0).
SpringMassInstance spring_mass(const SpringMassConfig& cfg);

// Rebuilds the problem for another initial state. In the flattened problem
// the initial state occupies b[0 .. n_x).
void set_initial_state(SpringMassInstance& inst, const Vec& x0);

// Flattened x of the zero-input trajectory z_{i+1} = A z_i from z_0 = x0.
Vec zero_input_trajectory(const SpringMassInstance& inst, const Vec& x0);

// Receding-horizon warm start: the previous solution shifted by one stage,
// the new last stage filled by a zero-input step, z_0 replaced by x0, and
// slacks and multipliers lifted to at least `floor`.
WarmStart shifted_warm_start(const SpringMassInstance& inst, const Solution& previous, const Vec& x0,
                             double floor = 1.0);

struct ScenarioConfig
{
    isize M = 2;
    isize N = 15;
    isize N_s = 2;
    std::uint64_t seed = 0;
};

struct ScenarioInstance
{
    ScenarioConfig config;
    isize n_x = 0;
    isize n_u = 0;
    std::vector<DiscreteDynamics> dynamics; // one per scenario
    Mat Q, R;
    Vec x0;
    MultistageProblem problem;
};

// Robust scenario problem. Variables are the scenario chains
// (z_1, u_1), ..., (z_{N-1}, u_{N-1}), z_N for each scenario in turn,
// followed by the global g = (z_0, u_0). Each chain's first stage carries
// z_1 = A^j z_0 + B^j u_0 through its E block; stage 0 also pins z_0 = x0
// and bounds g. Costs are averaged over scenarios.
ScenarioInstance scenario(const ScenarioConfig& cfg);

// Scenario problem with given per-scenario dynamics and weights.
ScenarioInstance scenario_from_dynamics(const std::vector<DiscreteDynamics>& dynamics, isize N, const Mat& Q,
                                        const Mat& R, const Vec& x0);

struct LqcConfig
{
    isize N = 10;
    isize n_x = 4;
    isize n_u = 2;
    isize n_g = 0;
    bool input_bounds = false;
    std::uint64_t seed = 0;
};

// Extended linear-quadratic control problem with x_i = (z_i, u_i), x_N = z_N,
// A_i = [Ad_i Bd_i], B_i = [-I 0] and S_i = 0. Dynamics rows read
// Ad_i z_i + Bd_i u_i - z_{i+1} + E_i g = -d_i with random stable Ad_i; stage 0
// also pins z_0 to a random initial state.
MultistageProblem extended_lqc(const LqcConfig& cfg);

} // namespace arrowqp

#endif
