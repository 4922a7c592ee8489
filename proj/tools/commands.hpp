#ifndef ARROWQP_TOOLS_COMMANDS_HPP
#define ARROWQP_TOOLS_COMMANDS_HPP

#include <cstdint>
#include <string>

#include "arrowqp/typedefs.hpp"

namespace arrowqp::tools
{

enum ExitCode : int
{
    exit_ok = 0,
    exit_input_error = 2,
    exit_not_converged = 3,
    exit_internal_error = 4,
};

struct GenerateOptions
{
    std::string family;
    isize M = 2;
    isize N = 15;
    isize N_s = 2;
    double R_d = 0.1;
    isize n_x = 4;
    isize n_u = 2;
    isize n_g = 0;
    bool input_bounds = false;
    std::uint64_t seed = 0;
    std::uint64_t sample = 0;
    std::string output;
};

struct DetectOptions
{
    std::string input;
    bool render = false;
    std::string format = "text";
};

struct SolveOptions
{
    std::string input;
    std::string backend = "btda";
    double tol = 1e-6;
    int max_iter = 100;
    std::string warm_start;
    std::string output;
    bool compare_mode = false;
    bool use_file_structure = false;
    int verbosity = 0;
};

struct BenchOptions
{
    std::string family;
    std::string sweep = "M=2..8";
    isize M = 2;
    isize N = 15;
    isize N_s = 2;
    double R_d = 0.1;
    int repeats = 1;
    std::string backend = "both";
    bool flops = false;
    std::uint64_t seed = 0;
    std::string output;
    std::string plot;
    bool compare_mode = false;
};

int run_generate(const GenerateOptions& opt);
int run_detect(const DetectOptions& opt);
int run_solve(const SolveOptions& opt);
int run_bench(const BenchOptions& opt);

} // namespace arrowqp::tools

#endif
