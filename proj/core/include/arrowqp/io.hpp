#ifndef ARROWQP_IO_HPP
#define ARROWQP_IO_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "arrowqp/block_structure.hpp"
#include "arrowqp/qp_model.hpp"

namespace arrowqp
{

// Provenance of a generated problem: generator family, seed and the numeric
// configuration it was called with.
struct ProblemMeta
{
    std::string family;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, double>> config;
};

struct ProblemFile
{
    GeneralQP qp;
    ProblemMeta meta;
    // Partition known to the generator, if recorded.
    std::optional<BlockStructure> structure;
};

// JSON problem document:
//   { "format": "arrowqp-problem", "version": 1, "meta": {...},
//     "n": .., "p": .., "m": ..,
//     "P": {"rows", "cols", "nnz", "triplets": [[i, j, v], ...]}, "c": [...],
//     "A": {...}, "b": [...], "G": {...}, "h": [...],
//     "structure": {"block_sizes": [...], "arrow_width": w} }
// P holds its lower triangle. Doubles are written in shortest round-trip form.
void write_problem(std::ostream& os, const ProblemFile& problem);
// Throws ParseError on malformed input.
ProblemFile read_problem(std::istream& is);
ProblemFile read_problem_file(const std::string& path);
void write_problem_file(const std::string& path, const ProblemFile& problem);

// With include_timings = false the document depends only on the numbers the
// solver produced, so repeated runs compare byte for byte.
void write_solution(std::ostream& os, const Solution& solution, bool include_timings = true);
// Reads x and, when present, s, y, z. Throws ParseError.
Solution read_solution(std::istream& is);
Solution read_solution_file(const std::string& path);

} // namespace arrowqp

#endif
