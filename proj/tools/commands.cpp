#include "commands.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "json.hpp"

#include "arrowqp/btda.hpp"
#include "arrowqp/errors.hpp"
#include "arrowqp/flop_model.hpp"
#include "arrowqp/generators.hpp"
#include "arrowqp/io.hpp"
#include "arrowqp/ipm.hpp"
#include "arrowqp/kkt.hpp"
#include "arrowqp/structure.hpp"
#include "arrowqp/verify.hpp"
#include "svg_plot.hpp"

namespace arrowqp::tools
{

namespace
{

using json = nlohmann::json;

struct Instance
{
    ProblemFile file;
    // Dimensions for the closed-form MPC cost, when the family has them.
    std::optional<std::array<isize, 4>> mpc_dims;
};

Instance build_instance(const GenerateOptions& o)
{
    Instance inst;
    ProblemMeta& meta = inst.file.meta;
    meta.family = o.family;
    meta.seed = o.seed;
    if (o.family == "spring-mass") {
        SpringMassConfig cfg{o.M, o.N, o.R_d, o.seed};
        SpringMassInstance sm = spring_mass(cfg);
        set_initial_state(sm, sm.sampler(o.sample));
        auto [qp, structure] = to_general_qp(sm.problem);
        inst.file.qp = std::move(qp);
        inst.file.structure = std::move(structure);
        meta.config = {{"M", double(o.M)}, {"N", double(o.N)}, {"R_d", o.R_d}, {"sample", double(o.sample)}};
        inst.mpc_dims = std::array<isize, 4>{o.N, sm.n_x, sm.n_u, 0};
    } else if (o.family == "scenario") {
        ScenarioConfig cfg{o.M, o.N, o.N_s, o.seed};
        ScenarioInstance sc = scenario(cfg);
        auto [qp, structure] = to_general_qp(sc.problem);
        inst.file.qp = std::move(qp);
        inst.file.structure = std::move(structure);
        meta.config = {{"M", double(o.M)}, {"N", double(o.N)}, {"N_s", double(o.N_s)}};
    } else if (o.family == "lqc") {
        LqcConfig cfg{o.N, o.n_x, o.n_u, o.n_g, o.input_bounds, o.seed};
        auto [qp, structure] = to_general_qp(extended_lqc(cfg));
        inst.file.qp = std::move(qp);
        inst.file.structure = std::move(structure);
        meta.config = {{"N", double(o.N)},     {"n_x", double(o.n_x)}, {"n_u", double(o.n_u)},
                       {"n_g", double(o.n_g)}, {"input_bounds", o.input_bounds ? 1.0 : 0.0}};
        inst.mpc_dims = std::array<isize, 4>{o.N, o.n_x, o.n_u, o.n_g};
    } else {
        throw InvalidProblem("unknown family '" + o.family + "' (expected spring-mass, scenario or lqc)");
    }
    return inst;
}

std::ostream& open_output(const std::string& path, std::ofstream& file)
{
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw InvalidProblem("cannot write '" + path + "'");
    return file;
}

json flops_json(Flops f)
{
    return json{{"value", f.rounded()}, {"thirds", f.in_thirds()}};
}

} // namespace

int run_generate(const GenerateOptions& opt)
{
    const Instance inst = build_instance(opt);
    std::ofstream file;
    std::ostream& out = open_output(opt.output, file);
    write_problem(out, inst.file);
    return exit_ok;
}

int run_detect(const DetectOptions& opt)
{
    const ProblemFile pf = read_problem_file(opt.input);
    const SparsityPattern pattern = detection_pattern(pf.qp);
    const BlockStructure structure = detect(pattern);
    const auto violation = verify_cover(pattern, structure);
    const Flops stored = predict_factorization(structure);
    const Flops coupled = estimate_factorization(pattern, structure);

    if (opt.format == "json") {
        json doc{{"n", pf.qp.n},
                 {"block_sizes", structure.block_sizes()},
                 {"arrow_width", structure.arrow_width()},
                 {"factorization_flops", flops_json(stored)},
                 {"factorization_flops_coupled", flops_json(coupled)},
                 {"cover", !violation.has_value()}};
        std::cout << doc.dump() << '\n';
    } else {
        std::cout << "n: " << pf.qp.n << '\n';
        std::cout << "block_sizes: [";
        for (isize k = 0; k < structure.num_blocks(); k++) std::cout << (k ? ", " : "") << structure.block_size(k);
        std::cout << "]\n";
        std::cout << "arrow_width: " << structure.arrow_width() << '\n';
        std::cout << "factorization_flops: " << stored.to_string() << '\n';
        std::cout << "factorization_flops_coupled: " << coupled.to_string() << '\n';
        std::cout << "cover: " << (violation ? "violated" : "ok") << '\n';
    }
    if (opt.render) std::cout << render_pattern(pattern, structure);
    if (violation) {
        std::cerr << "structure does not cover entry (" << violation->row << ", " << violation->col << ")\n";
        return exit_internal_error;
    }
    return exit_ok;
}

namespace
{

Backend parse_backend(const std::string& name)
{
    if (name == "btda") return Backend::btda;
    if (name == "dense") return Backend::dense;
    throw InvalidProblem("unknown backend '" + name + "' (expected btda or dense)");
}

} // namespace

int run_solve(const SolveOptions& opt)
{
    ProblemFile pf = read_problem_file(opt.input);
    Settings settings;
    settings.eps_abs = opt.tol;
    settings.eps_rel = opt.tol;
    settings.max_iter = opt.max_iter;
    settings.backend = parse_backend(opt.backend);
    settings.verbosity = opt.verbosity;

    std::optional<BlockStructure> structure;
    if (opt.use_file_structure) structure = pf.structure;
    Solver solver(std::move(pf.qp), settings, structure);

    Solution sol;
    if (!opt.warm_start.empty()) {
        const Solution prev = read_solution_file(opt.warm_start);
        WarmStart warm;
        warm.x = prev.x;
        if (prev.y.size()) warm.y = prev.y;
        if (prev.z.size()) warm.z = prev.z;
        if (prev.s.size()) warm.s = prev.s;
        if (warm.x.size() != solver.problem().n) throw InvalidProblem("warm start does not match the problem size");
        sol = solver.solve(warm);
    } else {
        sol = solver.solve();
    }

    std::ofstream file;
    std::ostream& out = open_output(opt.output, file);
    write_solution(out, sol, !opt.compare_mode);

    const KktCertificate cert = certify(solver.problem(), sol);
    std::cerr << "status: " << to_string(sol.status) << ", iterations: " << sol.iterations
              << ", objective: " << sol.objective << '\n';
    std::cerr << "certificate: " << cert.to_string() << '\n';
    if (sol.status != SolveStatus::Solved) return exit_not_converged;
    return exit_ok;
}

namespace
{

struct Sweep
{
    std::string param;
    std::vector<isize> values;
};

Sweep parse_sweep(const std::string& text)
{
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw InvalidProblem("sweep must look like PARAM=a..b or PARAM=a,b,c");
    Sweep sw;
    sw.param = text.substr(0, eq);
    if (sw.param != "M" && sw.param != "N" && sw.param != "N_s" && sw.param != "n_x") {
        throw InvalidProblem("sweep parameter must be one of M, N, N_s, n_x");
    }
    const std::string range = text.substr(eq + 1);
    try {
        const auto dots = range.find("..");
        if (dots != std::string::npos) {
            const isize lo = std::stoll(range.substr(0, dots));
            const isize hi = std::stoll(range.substr(dots + 2));
            for (isize v = lo; v <= hi; v++) sw.values.push_back(v);
        } else {
            std::stringstream ss(range);
            std::string item;
            while (std::getline(ss, item, ',')) sw.values.push_back(std::stoll(item));
        }
    } catch (const std::logic_error&) {
        throw InvalidProblem("cannot parse sweep range '" + range + "'");
    }
    if (sw.values.empty()) throw InvalidProblem("empty sweep range");
    return sw;
}

void apply(GenerateOptions& o, const std::string& param, isize v)
{
    if (param == "M") o.M = v;
    else if (param == "N") o.N = v;
    else if (param == "N_s") o.N_s = v;
    else o.n_x = v;
}

struct PlotPoint
{
    double total = 0.0;
    double factorize = 0.0;
    double kkt_solve = 0.0;
    double other = 0.0;
    int count = 0;
};

} // namespace

int run_bench(const BenchOptions& opt)
{
    const Sweep sweep = parse_sweep(opt.sweep);
    if (opt.repeats < 1) throw InvalidProblem("repeats must be at least 1");
    std::vector<Backend> backends;
    if (opt.backend == "both") backends = {Backend::btda, Backend::dense};
    else backends = {parse_backend(opt.backend)};

    std::ofstream file;
    std::ostream& out = open_output(opt.output, file);

    std::map<isize, std::map<Backend, PlotPoint>> plot;
    for (isize value : sweep.values) {
        GenerateOptions g;
        g.family = opt.family;
        g.M = opt.M;
        g.N = opt.N;
        g.N_s = opt.N_s;
        g.R_d = opt.R_d;
        g.seed = opt.seed;
        apply(g, sweep.param, value);
        const Instance inst = build_instance(g);

        json descriptor{{"family", g.family}, {"seed", g.seed}};
        for (const auto& [key, v] : inst.file.meta.config) descriptor[key] = v;

        json flops;
        if (opt.flops) {
            const SparsityPattern pattern = detection_pattern(inst.file.qp);
            const BlockStructure structure = detect(pattern);
            KktWorkspace ws(inst.file.qp, structure);
            const BtdaMatrix& psi = ws.assemble_psi(1.0, 1.0, Vec::Ones(inst.file.qp.m));
            FlopTally tally;
            factorize(psi, &tally);
            flops = json{{"block_sizes", structure.block_sizes()},
                         {"arrow_width", structure.arrow_width()},
                         {"predicted_factorization", flops_json(predict_factorization(structure))},
                         {"instrumented_factorization", flops_json(tally.total)},
                         {"coupled_factorization", flops_json(estimate_factorization(pattern, structure))},
                         {"construct_psi_cold", ws.cold_assembly_flops()},
                         {"construct_psi_warm", ws.warm_assembly_flops()}};
            if (inst.mpc_dims) {
                const auto [N, nx, nu, ng] = *inst.mpc_dims;
                const FlopReport cf = mpc_closed_form(N, nx, nu, ng);
                flops["closed_form"] = json{{"construct_psi", flops_json(cf.construct_psi)},
                                            {"factorize", flops_json(cf.factorize)},
                                            {"construct_rbar", flops_json(cf.construct_rbar)},
                                            {"solve", flops_json(cf.solve)},
                                            {"recover_dy", flops_json(cf.recover_dy)},
                                            {"total", flops_json(cf.total())}};
            }
        }

        for (Backend backend : backends) {
            for (int r = 0; r < opt.repeats; r++) {
                Settings settings;
                settings.backend = backend;
                Solver solver(inst.file.qp, settings);
                const Solution& sol = solver.solve();
                json rec{{"instance", descriptor},
                         {"backend", to_string(backend)},
                         {"repeat", r},
                         {"status", to_string(sol.status)},
                         {"iterations", sol.iterations},
                         {"primal_residual", sol.primal_residual},
                         {"dual_residual", sol.dual_residual},
                         {"objective", sol.objective}};
                if (opt.flops) rec["flops"] = flops;
                if (!opt.compare_mode) {
                    const SolveTimings& t = sol.timings;
                    rec["timings"] = json{{"setup", t.setup},         {"assembly", t.assembly},
                                          {"factorize", t.factorize}, {"kkt_solve", t.kkt_solve},
                                          {"other", t.other},         {"total", t.total}};
                }
                out << rec.dump() << '\n';

                PlotPoint& p = plot[value][backend];
                p.total += sol.timings.total;
                p.factorize += sol.timings.factorize;
                p.kkt_solve += sol.timings.kkt_solve;
                p.other += sol.timings.total - sol.timings.factorize - sol.timings.kkt_solve;
                p.count++;
            }
        }
    }

    if (!opt.plot.empty()) {
        std::vector<double> xs;
        std::vector<std::string> cats;
        Series fact{"factorization", {}}, kkt{"KKT solve", {}}, other{"other", {}};
        Series speedup{"dense / btda", {}};
        for (const auto& [value, by_backend] : plot) {
            xs.push_back(static_cast<double>(value));
            cats.push_back(std::to_string(value));
            const PlotPoint& b = by_backend.begin()->second;
            fact.values.push_back(1e3 * b.factorize / b.count);
            kkt.values.push_back(1e3 * b.kkt_solve / b.count);
            other.values.push_back(1e3 * b.other / b.count);
            const auto bt = by_backend.find(Backend::btda);
            const auto de = by_backend.find(Backend::dense);
            if (bt != by_backend.end() && de != by_backend.end() && bt->second.total > 0.0) {
                speedup.values.push_back((de->second.total / de->second.count) / (bt->second.total / bt->second.count));
            }
        }
        const std::string backend_name = to_string(plot.begin()->second.begin()->first);
        std::ofstream bars(opt.plot + "_breakdown.svg");
        bars << stacked_bars("Solve time breakdown (" + backend_name + ")", sweep.param, "time [ms]", cats,
                             {fact, kkt, other});
        if (!speedup.values.empty()) {
            std::ofstream line(opt.plot + "_speedup.svg");
            line << line_chart("Speed-up of the block backend", sweep.param, "dense time / btda time", xs, {speedup});
        }
    }
    return exit_ok;
}

} // namespace arrowqp::tools
