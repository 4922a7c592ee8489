#ifndef ARROWQP_STRUCTURE_HPP
#define ARROWQP_STRUCTURE_HPP

#include <optional>
#include <string>

#include "arrowqp/block_structure.hpp"
#include "arrowqp/flop_model.hpp"
#include "arrowqp/qp_model.hpp"

namespace arrowqp
{

// Lower-triangular symbolic pattern of P + I + A'A + G'G.
SparsityPattern detection_pattern(const GeneralQP& qp);

// Recovers a block-tri-diagonal-arrow partition from the pattern alone.
//
// Rows are scanned in order. A new diagonal block starts at row i when row i
// only reaches into the current block and i is a natural split point: either
// row i has no entries left of its diagonal, or some later row reaches back
// exactly to column i. A row that reaches further back than the previous block
// forces a choice between turning the remaining rows into the arrow and
// merging blocks until the row is covered; the cheaper completion under the
// flop model wins, ties go to the diagonal blocks. A merging pass follows.
// Deterministic, never permutes variables, and the result always covers the
// pattern.
BlockStructure detect(const SparsityPattern& pattern);

struct CoverViolation
{
    isize row;
    isize col;

    friend bool operator==(const CoverViolation&, const CoverViolation&) = default;
};

// First stored entry (row-major order) not covered by the structure.
std::optional<CoverViolation> verify_cover(const SparsityPattern& pattern, const BlockStructure& structure);

// Merges adjacent diagonal blocks while the estimated factorization cost does
// not increase. Idempotent.
BlockStructure merge_blocks(const BlockStructure& structure, const SparsityPattern& pattern);

// Rows of each diagonal block that reach into the preceding block.
CouplingProfile coupling_profile(const SparsityPattern& pattern, const BlockStructure& structure);

// Factorization cost of `structure` using the pattern's coupling profile.
Flops estimate_factorization(const SparsityPattern& pattern, const BlockStructure& structure);

// Character grid of the pattern with block boundaries; '*' marks an entry.
std::string render_pattern(const SparsityPattern& pattern, const BlockStructure& structure);

} // namespace arrowqp

#endif
