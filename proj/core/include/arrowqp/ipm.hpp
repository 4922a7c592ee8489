#ifndef ARROWQP_IPM_HPP
#define ARROWQP_IPM_HPP

#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "arrowqp/btda.hpp"
#include "arrowqp/kkt.hpp"
#include "arrowqp/qp_model.hpp"

namespace arrowqp
{

enum class Backend
{
    btda,
    dense,
};

const char* to_string(Backend backend);

struct Settings
{
    double eps_abs = 1e-6;
    double eps_rel = 1e-6;
    int max_iter = 100;

    double rho_init = 1e-6;
    double delta_init = 1e-4;
    double rho_min = 1e-10;
    double delta_min = 1e-12;
    double penalty_shrink = 0.1;
    // residual reduction that triggers a penalty shrink
    double penalty_trigger = 10.0;
    int regularization_retries = 3;
    double regularization_boost = 100.0;

    double tau = 0.99;
    // lower bound on slacks and multipliers built from a warm start
    double warm_start_floor = 1.0;

    Backend backend = Backend::btda;
    int verbosity = 0;

    // Throws InvalidProblem on out-of-range values.
    void check() const;
};

struct IterateState
{
    Vec x, s, y, z;
    Vec xi, lambda, nu;
    double rho = 0.0;
    double delta = 0.0;
    double mu = 0.0;
    double sigma = 1.0;
    int k = 0;

    static IterateState cold(const GeneralQP& qp, const Settings& settings);
};

struct Residuals
{
    Vec r_x, r_y, r_z, r_s, rbar_z;
};

// Right-hand side of the regularized Newton system at `state`, with the
// centering target sigma * mu.
Residuals compute_residuals(const GeneralQP& qp, const IterateState& state);

// Largest steps in (0, 1] keeping s and z above (1 - tau) times their
// current values.
std::pair<double, double> step_lengths(const IterateState& state, const StepDirection& dir, double tau);

struct IterationLog
{
    int k = 0;
    double mu = 0.0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double alpha_primal = 0.0;
    double alpha_dual = 0.0;
    double sigma = 0.0;
    double rho = 0.0;
    double delta = 0.0;
};

// Linear solver for Psi dx = rbar.
class NewtonBackend
{
public:
    virtual ~NewtonBackend() = default;
    // Throws NotPositiveDefinite.
    virtual void factorize(const GeneralQP& qp, double rho, double delta, const CVecRef& w) = 0;
    virtual void solve(VecRef rhs) const = 0;
    virtual void refresh(const GeneralQP& qp) = 0;

    double assembly_seconds = 0.0;
    double factorize_seconds = 0.0;
};

std::unique_ptr<NewtonBackend> make_backend(Backend kind, const GeneralQP& qp, const BlockStructure& structure);

// One Newton direction with an already factorized backend. W = s / z.
StepDirection newton_step(const GeneralQP& qp, const NewtonBackend& backend, const IterateState& state,
                          const Residuals& res);

// Factorizes at the current iterate and returns the direction for
// residuals computed from `state`.
StepDirection newton_step(const GeneralQP& qp, NewtonBackend& backend, const IterateState& state);

struct WarmStart
{
    Vec x;
    std::optional<Vec> y;
    std::optional<Vec> z;
    std::optional<Vec> s;
};

// Solver session. Owns the problem data, the detected structure and the
// assembly workspace; movable across threads, not shareable.
class Solver
{
public:
    // Without an explicit structure one is detected from the sparsity pattern.
    explicit Solver(GeneralQP qp, Settings settings = {}, std::optional<BlockStructure> structure = std::nullopt);
    explicit Solver(const MultistageProblem& problem, Settings settings = {});

    const Solution& solve();
    const Solution& solve(const WarmStart& warm);

    // Replaces the numerical data. Throws SparsityChanged if any pattern
    // differs from the one the session was built with.
    void update(const GeneralQP& qp);
    void update_vectors(const std::optional<Vec>& c, const std::optional<Vec>& b, const std::optional<Vec>& h);

    void set_callback(std::function<void(const IterationLog&)> callback) { callback_ = std::move(callback); }

    const GeneralQP& problem() const { return qp_; }
    const BlockStructure& structure() const { return structure_; }
    const Settings& settings() const { return settings_; }
    const Solution& solution() const { return solution_; }
    const std::vector<IterationLog>& log() const { return log_; }
    // Iterate after each accepted step of the last solve (x, s, y, z).
    const std::vector<IterateState>& trace() const { return trace_; }
    void record_trace(bool on) { record_trace_ = on; }

private:
    const Solution& run(IterateState state);

    GeneralQP qp_;
    Settings settings_;
    BlockStructure structure_;
    std::unique_ptr<NewtonBackend> backend_;
    double setup_seconds_ = 0.0;
    Solution solution_;
    std::vector<IterationLog> log_;
    std::vector<IterateState> trace_;
    bool record_trace_ = false;
    std::function<void(const IterationLog&)> callback_;
};

} // namespace arrowqp

#endif
