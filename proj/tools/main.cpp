#include <exception>
#include <iostream>

#include "CLI11.hpp"

#include "arrowqp/errors.hpp"
#include "commands.hpp"

using namespace arrowqp::tools;

namespace
{

template <typename F>
int guarded(F&& run)
{
    try {
        return run();
    } catch (const arrowqp::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_input_error;
    } catch (const arrowqp::InvalidProblem& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_input_error;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return exit_internal_error;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Interior-point QP solver for block-tri-diagonal-arrow problems"};
    app.require_subcommand(1);

    GenerateOptions gen;
    auto* generate = app.add_subcommand("generate", "Write a generated problem instance");
    generate->add_option("family", gen.family, "spring-mass, scenario or lqc")->required();
    generate->add_option("--M", gen.M, "number of masses")->check(CLI::Range(2, 100000));
    generate->add_option("--N", gen.N, "horizon length")->check(CLI::Range(1, 1000000));
    generate->add_option("--Ns", gen.N_s, "number of scenarios")->check(CLI::Range(1, 100000));
    generate->add_option("--Rd", gen.R_d, "input-rate weight")->check(CLI::NonNegativeNumber);
    generate->add_option("--nx", gen.n_x, "state dimension (lqc)")->check(CLI::Range(1, 100000));
    generate->add_option("--nu", gen.n_u, "input dimension (lqc)")->check(CLI::Range(0, 100000));
    generate->add_option("--ng", gen.n_g, "global dimension (lqc)")->check(CLI::Range(0, 100000));
    generate->add_flag("--input-bounds", gen.input_bounds, "add input bounds (lqc)");
    generate->add_option("--seed", gen.seed, "random seed");
    generate->add_option("--sample", gen.sample, "initial-state sample index (spring-mass)");
    generate->add_option("-o,--output", gen.output, "output file (default: stdout)");

    DetectOptions det;
    auto* detect = app.add_subcommand("detect", "Detect the block structure of a problem file");
    detect->add_option("problem", det.input, "problem file")->required();
    detect->add_flag("--render", det.render, "print the pattern with block boundaries");
    detect->add_option("--format", det.format, "text or json")->check(CLI::IsMember({"text", "json"}));

    SolveOptions sol;
    auto* solve = app.add_subcommand("solve", "Solve a problem file");
    solve->add_option("problem", sol.input, "problem file")->required();
    solve->add_option("--backend", sol.backend, "btda or dense")->check(CLI::IsMember({"btda", "dense"}));
    solve->add_option("--tol", sol.tol, "absolute and relative tolerance")->check(CLI::PositiveNumber);
    solve->add_option("--max-iter", sol.max_iter, "iteration limit")->check(CLI::NonNegativeNumber);
    solve->add_option("--warm-start", sol.warm_start, "solution file to start from");
    solve->add_option("-o,--output", sol.output, "solution file (default: stdout)");
    solve->add_flag("--compare-mode", sol.compare_mode, "omit timings so repeated runs are byte-identical");
    solve->add_flag("--use-file-structure", sol.use_file_structure, "use the partition stored in the file");
    solve->add_flag("-v,--verbose", sol.verbosity, "print the iteration log to stderr");

    BenchOptions bench;
    auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark sweep and write line-delimited records");
    bench_cmd->add_option("family", bench.family, "spring-mass, scenario or lqc")->required();
    bench_cmd->add_option("--sweep", bench.sweep, "PARAM=a..b or PARAM=a,b,c with PARAM in M, N, N_s, n_x");
    bench_cmd->add_option("--M", bench.M, "number of masses when not swept");
    bench_cmd->add_option("--N", bench.N, "horizon length when not swept");
    bench_cmd->add_option("--Ns", bench.N_s, "number of scenarios when not swept");
    bench_cmd->add_option("--Rd", bench.R_d, "input-rate weight")->check(CLI::NonNegativeNumber);
    bench_cmd->add_option("--repeats", bench.repeats, "solves per instance and backend")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--backend", bench.backend, "btda, dense or both")
        ->check(CLI::IsMember({"btda", "dense", "both"}));
    bench_cmd->add_flag("--flops", bench.flops, "add the flop report to every record");
    bench_cmd->add_option("--seed", bench.seed, "random seed");
    bench_cmd->add_option("-o,--output", bench.output, "records file (default: stdout)");
    bench_cmd->add_option("--plot", bench.plot, "write PREFIX_breakdown.svg and PREFIX_speedup.svg");
    bench_cmd->add_flag("--compare-mode", bench.compare_mode, "omit timings from the records");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_input_error;
    }

    if (*generate) return guarded([&] { return run_generate(gen); });
    if (*detect) return guarded([&] { return run_detect(det); });
    if (*solve) return guarded([&] { return run_solve(sol); });
    return guarded([&] { return run_bench(bench); });
}
