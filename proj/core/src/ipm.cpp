#include "arrowqp/ipm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>

#include "arrowqp/errors.hpp"
#include "arrowqp/structure.hpp"

namespace arrowqp
{

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double inf_norm(const CVecRef& v)
{
    return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
}

bool same_pattern(const SparseMat& a, const SparseMat& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.nonZeros() != b.nonZeros()) return false;
    return std::equal(a.outerIndexPtr(), a.outerIndexPtr() + a.outerSize() + 1, b.outerIndexPtr()) &&
           std::equal(a.innerIndexPtr(), a.innerIndexPtr() + a.nonZeros(), b.innerIndexPtr());
}

class BtdaBackend final : public NewtonBackend
{
public:
    BtdaBackend(const GeneralQP& qp, const BlockStructure& structure)
      : workspace_(qp, structure), factor_(structure)
    {}

    void factorize(const GeneralQP&, double rho, double delta, const CVecRef& w) override
    {
        auto t0 = Clock::now();
        const BtdaMatrix& psi = workspace_.assemble_psi(rho, delta, w);
        assembly_seconds += seconds_since(t0);
        t0 = Clock::now();
        try {
            factorize_into(psi, factor_);
        } catch (...) {
            factorize_seconds += seconds_since(t0);
            throw;
        }
        factorize_seconds += seconds_since(t0);
    }

    void solve(VecRef rhs) const override { solve_in_place(factor_, rhs); }

    void refresh(const GeneralQP& qp) override { workspace_.refresh(qp); }

private:
    KktWorkspace workspace_;
    BtdaFactor factor_;
};

class DenseBackend final : public NewtonBackend
{
public:
    void factorize(const GeneralQP& qp, double rho, double delta, const CVecRef& w) override
    {
        auto t0 = Clock::now();
        const Mat psi = assemble_psi_dense(qp, rho, delta, w);
        assembly_seconds += seconds_since(t0);
        t0 = Clock::now();
        llt_.compute(psi);
        factorize_seconds += seconds_since(t0);
        if (llt_.info() != Eigen::Success) throw NotPositiveDefinite(0, -1);
        const double max_diag = psi.size() > 0 ? psi.diagonal().maxCoeff() : 0.0;
        const auto L = llt_.matrixLLT().diagonal();
        for (isize i = 0; i < L.size(); i++) {
            if (L[i] * L[i] <= kernels_pivot_tolerance * max_diag) throw NotPositiveDefinite(0, i);
        }
    }

    void solve(VecRef rhs) const override { llt_.solveInPlace(rhs); }

    void refresh(const GeneralQP&) override {}

private:
    static constexpr double kernels_pivot_tolerance = 1e-13;
    Eigen::LLT<Mat> llt_;
};

struct Convergence
{
    double primal = 0.0;
    double dual = 0.0;
    double primal_scale = 0.0;
    double dual_scale = 0.0;
};

Convergence measure(const GeneralQP& qp, const IterateState& st)
{
    Convergence c;
    const Vec Px = symmetric_product(qp.P, st.x);
    const Vec Ax = qp.A * st.x;
    const Vec Gx = qp.G * st.x;
    const Vec Aty = qp.A.transpose() * st.y;
    const Vec Gtz = qp.G.transpose() * st.z;
    c.primal = std::max(inf_norm(Ax - qp.b), inf_norm(Gx + st.s - qp.h));
    c.dual = inf_norm(Px + qp.c + Aty + Gtz);
    c.primal_scale = std::max({inf_norm(Ax), inf_norm(qp.b), inf_norm(Gx), inf_norm(st.s), inf_norm(qp.h)});
    c.dual_scale = std::max({inf_norm(Px), inf_norm(qp.c), inf_norm(Aty), inf_norm(Gtz)});
    return c;
}

double barrier_mu(const IterateState& st)
{
    return st.s.size() == 0 ? 0.0 : st.s.dot(st.z) / static_cast<double>(st.s.size());
}

bool finite(const IterateState& st)
{
    return st.x.allFinite() && st.s.allFinite() && st.y.allFinite() && st.z.allFinite();
}

} // namespace

const char* to_string(Backend backend)
{
    return backend == Backend::btda ? "btda" : "dense";
}

void Settings::check() const
{
    auto fail = [](const char* what) { throw InvalidProblem(std::string("invalid setting: ") + what); };
    if (!(eps_abs > 0.0) || !(eps_rel >= 0.0)) fail("tolerances must be positive");
    if (max_iter < 0) fail("max_iter must be non-negative");
    if (!(rho_init > 0.0) || !(delta_init > 0.0)) fail("initial penalties must be positive");
    if (!(rho_min > 0.0) || !(delta_min > 0.0) || rho_min > rho_init || delta_min > delta_init) {
        fail("penalty floors must be positive and below the initial values");
    }
    if (!(penalty_shrink > 0.0 && penalty_shrink < 1.0)) fail("penalty_shrink must lie in (0, 1)");
    if (!(tau > 0.0 && tau < 1.0)) fail("tau must lie in (0, 1)");
    if (!(warm_start_floor > 0.0)) fail("warm_start_floor must be positive");
    if (regularization_retries < 0 || !(regularization_boost > 1.0)) fail("bad regularization retry settings");
}

IterateState IterateState::cold(const GeneralQP& qp, const Settings& settings)
{
    IterateState st;
    st.x = Vec::Zero(qp.n);
    st.s = Vec::Ones(qp.m);
    st.y = Vec::Zero(qp.p);
    st.z = Vec::Ones(qp.m);
    st.xi = st.x;
    st.lambda = Vec::Zero(qp.p);
    st.nu = Vec::Zero(qp.m);
    st.rho = settings.rho_init;
    st.delta = settings.delta_init;
    st.mu = barrier_mu(st);
    st.sigma = 1.0;
    return st;
}

Residuals compute_residuals(const GeneralQP& qp, const IterateState& st)
{
    Residuals r;
    r.r_x = -(symmetric_product(qp.P, st.x) + qp.c + st.rho * (st.x - st.xi));
    r.r_x.noalias() -= qp.A.transpose() * st.y;
    r.r_x.noalias() -= qp.G.transpose() * st.z;

    r.r_y = qp.b - st.delta * (st.lambda - st.y);
    r.r_y.noalias() -= qp.A * st.x;

    r.r_z = qp.h - st.s - st.delta * (st.nu - st.z);
    r.r_z.noalias() -= qp.G * st.x;

    r.r_s = (-(st.s.array() * st.z.array()) + st.sigma * st.mu).matrix();
    r.rbar_z = r.r_z - (r.r_s.array() / st.z.array()).matrix();
    return r;
}

std::pair<double, double> step_lengths(const IterateState& st, const StepDirection& dir, double tau)
{
    auto ratio = [tau](const Vec& v, const Vec& dv) {
        double alpha = 1.0;
        for (isize i = 0; i < v.size(); i++) {
            if (dv[i] < 0.0) alpha = std::min(alpha, -tau * v[i] / dv[i]);
        }
        return alpha;
    };
    return {ratio(st.s, dir.ds), ratio(st.z, dir.dz)};
}

std::unique_ptr<NewtonBackend> make_backend(Backend kind, const GeneralQP& qp, const BlockStructure& structure)
{
    if (kind == Backend::dense) return std::make_unique<DenseBackend>();
    return std::make_unique<BtdaBackend>(qp, structure);
}

StepDirection newton_step(const GeneralQP& qp, const NewtonBackend& backend, const IterateState& st,
                          const Residuals& res)
{
    const Vec w = (st.s.array() / st.z.array()).matrix();
    StepDirection dir;
    dir.dx = assemble_rbar(qp, res.r_x, res.r_y, res.rbar_z, st.delta, w);
    backend.solve(dir.dx);
    dir.dy = recover_dy(qp.A, dir.dx, res.r_y, st.delta);
    dir.dz = recover_dz(qp.G, dir.dx, res.rbar_z, st.delta, w);
    dir.ds = recover_ds(res.r_s, st.s, st.z, dir.dz);
    return dir;
}

StepDirection newton_step(const GeneralQP& qp, NewtonBackend& backend, const IterateState& st)
{
    const Vec w = (st.s.array() / st.z.array()).matrix();
    backend.factorize(qp, st.rho, st.delta, w);
    return newton_step(qp, static_cast<const NewtonBackend&>(backend), st, compute_residuals(qp, st));
}

Solver::Solver(GeneralQP qp, Settings settings, std::optional<BlockStructure> structure)
  : qp_(std::move(qp)), settings_(settings)
{
    const auto t0 = Clock::now();
    settings_.check();
    qp_.check();
    if (structure) {
        if (structure->n() != qp_.n) throw InvalidProblem("structure size does not match problem");
        structure_ = std::move(*structure);
    } else {
        structure_ = detect(detection_pattern(qp_));
    }
    backend_ = make_backend(settings_.backend, qp_, structure_);
    setup_seconds_ = seconds_since(t0);
}

namespace
{

GeneralQP checked_general(const MultistageProblem& problem)
{
    const auto errors = validate(problem);
    if (!errors.empty()) {
        const auto& e = errors.front();
        throw InvalidProblem("stage " + std::to_string(e.stage) + ": " + e.message);
    }
    return to_general_qp(problem).first;
}

} // namespace

Solver::Solver(const MultistageProblem& problem, Settings settings)
  : Solver(checked_general(problem), settings, to_general_qp(problem).second)
{}

void Solver::update(const GeneralQP& qp)
{
    qp.check();
    if (qp.n != qp_.n || qp.p != qp_.p || qp.m != qp_.m || !same_pattern(qp.P, qp_.P) ||
        !same_pattern(qp.A, qp_.A) || !same_pattern(qp.G, qp_.G)) {
        throw SparsityChanged("problem sparsity differs from the session's pattern");
    }
    qp_ = qp;
    backend_->refresh(qp_);
}

void Solver::update_vectors(const std::optional<Vec>& c, const std::optional<Vec>& b, const std::optional<Vec>& h)
{
    if ((c && c->size() != qp_.n) || (b && b->size() != qp_.p) || (h && h->size() != qp_.m)) {
        throw InvalidProblem("vector update has the wrong length");
    }
    if (c) qp_.c = *c;
    if (b) qp_.b = *b;
    if (h) qp_.h = *h;
}

const Solution& Solver::solve()
{
    return run(IterateState::cold(qp_, settings_));
}

const Solution& Solver::solve(const WarmStart& warm)
{
    if (warm.x.size() != qp_.n) throw InvalidProblem("warm start x has the wrong length");
    IterateState st = IterateState::cold(qp_, settings_);
    const double floor = settings_.warm_start_floor;
    st.x = warm.x;
    if (warm.y && warm.y->size() == qp_.p) st.y = *warm.y;
    if (warm.s && warm.s->size() == qp_.m) {
        st.s = warm.s->cwiseMax(floor);
    } else {
        st.s = (qp_.h - qp_.G * st.x).cwiseMax(floor);
    }
    if (warm.z && warm.z->size() == qp_.m) st.z = warm.z->cwiseMax(floor);
    st.xi = st.x;
    st.lambda = st.y;
    st.nu = st.z;
    st.mu = barrier_mu(st);
    return run(std::move(st));
}

const Solution& Solver::run(IterateState st)
{
    const auto t_start = Clock::now();
    backend_->assembly_seconds = 0.0;
    backend_->factorize_seconds = 0.0;
    double kkt_seconds = 0.0;
    log_.clear();
    trace_.clear();

    const Settings& cfg = settings_;
    const isize m = qp_.m;
    SolveStatus status = SolveStatus::MaxIter;

    Convergence conv = measure(qp_, st);
    double primal_ref = conv.primal;
    double dual_ref = conv.dual;

    if (cfg.verbosity >= 1) {
        std::clog << "iter        mu      primal        dual   alpha_p   alpha_d     sigma       rho     delta\n";
    }

    int k = 0;
    for (;; k++) {
        st.k = k;
        st.mu = barrier_mu(st);
        conv = measure(qp_, st);
        if (!finite(st)) {
            status = SolveStatus::NumericalError;
            break;
        }
        const bool primal_ok = conv.primal <= cfg.eps_abs + cfg.eps_rel * conv.primal_scale;
        const bool dual_ok = conv.dual <= cfg.eps_abs + cfg.eps_rel * conv.dual_scale;
        const double comp = m == 0 ? 0.0 : st.s.cwiseProduct(st.z).cwiseAbs().maxCoeff();
        const bool comp_ok = comp <= cfg.eps_abs + cfg.eps_rel * std::max(conv.primal_scale, conv.dual_scale);
        if (primal_ok && dual_ok && comp_ok) {
            status = SolveStatus::Solved;
            break;
        }
        const double big = 1e12;
        if (k > 0 && !primal_ok && std::max(inf_norm(st.y), inf_norm(st.z)) > big) {
            status = SolveStatus::PrimalInfeasibleSuspect;
            break;
        }
        if (k > 0 && !dual_ok && inf_norm(st.x) > big) {
            status = SolveStatus::DualInfeasibleSuspect;
            break;
        }
        if (k >= cfg.max_iter) {
            status = SolveStatus::MaxIter;
            break;
        }

        const Vec w = (st.s.array() / st.z.array()).matrix();
        bool factored = false;
        for (int attempt = 0; attempt <= cfg.regularization_retries; attempt++) {
            try {
                backend_->factorize(qp_, st.rho, st.delta, w);
                factored = true;
                break;
            } catch (const NotPositiveDefinite&) {
                st.rho *= cfg.regularization_boost;
                st.delta *= cfg.regularization_boost;
            }
        }
        if (!factored) {
            status = SolveStatus::NumericalError;
            break;
        }

        const auto t_kkt = Clock::now();
        // predictor
        st.sigma = 0.0;
        Residuals res = compute_residuals(qp_, st);
        StepDirection dir = newton_step(qp_, *backend_, st, res);

        if (m > 0) {
            const auto [ap_aff, ad_aff] = step_lengths(st, dir, 1.0);
            const double mu_aff =
                (st.s + ap_aff * dir.ds).dot(st.z + ad_aff * dir.dz) / static_cast<double>(m);
            st.sigma = std::clamp(std::pow(mu_aff / st.mu, 3), 0.0, 1.0);

            // corrector
            res.r_s = (-(st.s.array() * st.z.array()) + st.sigma * st.mu - dir.ds.array() * dir.dz.array()).matrix();
            res.rbar_z = res.r_z - (res.r_s.array() / st.z.array()).matrix();
            dir = newton_step(qp_, *backend_, st, res);
        }
        kkt_seconds += seconds_since(t_kkt);

        const auto [alpha_p, alpha_d] = step_lengths(st, dir, cfg.tau);
        st.x += alpha_p * dir.dx;
        st.s += alpha_p * dir.ds;
        st.y += alpha_d * dir.dy;
        st.z += alpha_d * dir.dz;
        st.xi = st.x;
        st.lambda = st.y;
        st.nu = st.z;

        IterationLog entry;
        entry.k = k;
        entry.mu = st.mu;
        entry.primal_residual = conv.primal;
        entry.dual_residual = conv.dual;
        entry.alpha_primal = alpha_p;
        entry.alpha_dual = alpha_d;
        entry.sigma = st.sigma;
        entry.rho = st.rho;
        entry.delta = st.delta;
        log_.push_back(entry);
        if (record_trace_) trace_.push_back(st);
        if (cfg.verbosity >= 1) {
            char line[160];
            std::snprintf(line, sizeof(line), "%4d %9.2e %11.3e %11.3e %9.3f %9.3f %9.2e %9.2e %9.2e\n", k,
                          entry.mu, entry.primal_residual, entry.dual_residual, alpha_p, alpha_d, entry.sigma,
                          entry.rho, entry.delta);
            std::clog << line;
        }
        if (callback_) callback_(entry);

        // penalty schedule
        const Convergence next = measure(qp_, st);
        const bool primal_done = next.primal <= cfg.eps_abs + cfg.eps_rel * next.primal_scale;
        const bool dual_done = next.dual <= cfg.eps_abs + cfg.eps_rel * next.dual_scale;
        primal_ref = std::max(primal_ref, next.primal);
        dual_ref = std::max(dual_ref, next.dual);
        if (primal_done || next.primal * cfg.penalty_trigger <= primal_ref) {
            st.delta = std::max(cfg.delta_min, cfg.penalty_shrink * st.delta);
            primal_ref = next.primal;
        }
        if (dual_done || next.dual * cfg.penalty_trigger <= dual_ref) {
            st.rho = std::max(cfg.rho_min, cfg.penalty_shrink * st.rho);
            dual_ref = next.dual;
        }
    }

    solution_.x = st.x;
    solution_.s = st.s;
    solution_.y = st.y;
    solution_.z = st.z;
    solution_.status = status;
    solution_.iterations = k;
    solution_.primal_residual = conv.primal;
    solution_.dual_residual = conv.dual;
    solution_.objective = objective(qp_, st.x);

    SolveTimings& t = solution_.timings;
    t.setup = setup_seconds_;
    t.assembly = backend_->assembly_seconds;
    t.factorize = backend_->factorize_seconds;
    t.kkt_solve = kkt_seconds;
    t.total = seconds_since(t_start);
    t.other = std::max(0.0, t.total - t.assembly - t.factorize - t.kkt_solve);
    return solution_;
}

} // namespace arrowqp
