#include "arrowqp/structure.hpp"

#include <algorithm>
#include <sstream>

#include "arrowqp/errors.hpp"

namespace arrowqp
{

BlockStructure::BlockStructure(std::vector<isize> block_sizes, isize arrow_width)
  : sizes_(std::move(block_sizes)), arrow_width_(arrow_width)
{
    if (sizes_.empty()) throw InvalidProblem("block structure needs at least one diagonal block");
    if (arrow_width_ < 0) throw InvalidProblem("arrow width must be non-negative");
    starts_.reserve(sizes_.size());
    for (isize d : sizes_) {
        if (d < 1) throw InvalidProblem("diagonal block sizes must be positive");
        starts_.push_back(n_);
        n_ += d;
    }
    n_ += arrow_width_;
}

isize BlockStructure::block_of(isize i) const
{
    if (i >= arrow_start()) return num_blocks();
    auto it = std::upper_bound(starts_.begin(), starts_.end(), i);
    return static_cast<isize>(it - starts_.begin()) - 1;
}

std::string BlockStructure::to_string() const
{
    std::ostringstream os;
    os << "blocks [";
    for (std::size_t k = 0; k < sizes_.size(); k++) os << (k ? ", " : "") << sizes_[k];
    os << "], arrow " << arrow_width_;
    return os.str();
}

isize SparsityPattern::nnz() const
{
    isize total = 0;
    for (const auto& r : rows) total += static_cast<isize>(r.size());
    return total;
}

bool SparsityPattern::contains(isize i, isize j) const
{
    const auto& r = rows[static_cast<std::size_t>(i)];
    return std::binary_search(r.begin(), r.end(), j);
}

namespace
{

void add_gram_pattern(const SparseMat& M, std::vector<std::vector<isize>>& rows)
{
    const SparseMatRow Mr(M);
    std::vector<isize> cols;
    for (isize r = 0; r < Mr.outerSize(); r++) {
        cols.clear();
        for (SparseMatRow::InnerIterator it(Mr, r); it; ++it) cols.push_back(it.col());
        for (std::size_t a = 0; a < cols.size(); a++) {
            for (std::size_t b = 0; b <= a; b++) rows[cols[a]].push_back(cols[b]);
        }
    }
}

} // namespace

SparsityPattern detection_pattern(const GeneralQP& qp)
{
    SparsityPattern pattern;
    pattern.n = qp.n;
    pattern.rows.assign(static_cast<std::size_t>(qp.n), {});
    for (isize i = 0; i < qp.n; i++) pattern.rows[i].push_back(i);
    for (isize j = 0; j < qp.P.outerSize(); j++) {
        for (SparseMat::InnerIterator it(qp.P, j); it; ++it) {
            if (it.row() >= j) pattern.rows[it.row()].push_back(j);
        }
    }
    add_gram_pattern(qp.A, pattern.rows);
    add_gram_pattern(qp.G, pattern.rows);
    for (auto& r : pattern.rows) {
        std::sort(r.begin(), r.end());
        r.erase(std::unique(r.begin(), r.end()), r.end());
    }
    return pattern;
}

std::optional<CoverViolation> verify_cover(const SparsityPattern& pattern, const BlockStructure& structure)
{
    if (pattern.n != structure.n()) return CoverViolation{-1, -1};
    const isize arrow_start = structure.arrow_start();
    for (isize i = 0; i < arrow_start; i++) {
        const isize bi = structure.block_of(i);
        for (isize j : pattern.rows[i]) {
            if (bi - structure.block_of(j) > 1) return CoverViolation{i, j};
        }
    }
    return std::nullopt;
}

CouplingProfile coupling_profile(const SparsityPattern& pattern, const BlockStructure& structure)
{
    CouplingProfile profile;
    profile.sub_rows.assign(static_cast<std::size_t>(structure.num_blocks()), 0);
    for (isize k = 1; k < structure.num_blocks(); k++) {
        const isize start = structure.block_start(k);
        isize rows = 0;
        for (isize i = start; i < start + structure.block_size(k); i++) {
            if (pattern.reach(i) < start) rows++;
        }
        profile.sub_rows[k] = rows;
    }
    return profile;
}

Flops estimate_factorization(const SparsityPattern& pattern, const BlockStructure& structure)
{
    return predict_factorization(structure, coupling_profile(pattern, structure));
}

namespace
{

isize median(std::vector<isize> v)
{
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

// Diagonal blocks [starts[k], starts[k+1]) with the last one ending at `end`.
std::vector<isize> sizes_from_starts(const std::vector<isize>& starts, isize end)
{
    std::vector<isize> sizes;
    for (std::size_t k = 0; k < starts.size(); k++) {
        const isize stop = k + 1 < starts.size() ? starts[k + 1] : end;
        sizes.push_back(stop - starts[k]);
    }
    return sizes;
}

} // namespace

BlockStructure detect(const SparsityPattern& pattern)
{
    const isize n = pattern.n;
    if (n == 0) throw InvalidProblem("cannot detect structure of an empty pattern");

    // split_point[j]: some later row has its leftmost entry exactly at j.
    std::vector<char> split_point(static_cast<std::size_t>(n), 0);
    for (isize i = 0; i < n; i++) {
        const isize lo = pattern.reach(i);
        if (lo < i) split_point[lo] = 1;
    }

    std::vector<isize> starts{0}; // block starts, last entry is the current block
    isize arrow_start = n;
    for (isize i = 1; i < n; i++) {
        const isize lo = pattern.reach(i);
        const isize cur = starts.back();
        const isize prev = starts.size() > 1 ? starts[starts.size() - 2] : -1;

        if (prev >= 0 && lo < prev) {
            // Candidate (a): rows i.. become the arrow.
            const BlockStructure as_arrow(sizes_from_starts(starts, i), n - i);
            const Flops arrow_cost = estimate_factorization(pattern, as_arrow);

            // Candidate (b): merge until row i reaches only the previous
            // block; remaining rows estimated as median-sized blocks.
            std::vector<isize> merged = starts;
            while (merged.size() > 1 && lo < merged[merged.size() - 2]) merged.pop_back();
            std::vector<isize> sizes = sizes_from_starts(merged, i + 1);
            const isize typical = std::max<isize>(1, median(sizes));
            for (isize r = i + 1; r < n; r += typical) sizes.push_back(std::min(typical, n - r));
            const Flops diag_cost = estimate_factorization(pattern, BlockStructure(sizes, 0));

            if (diag_cost <= arrow_cost) {
                starts = std::move(merged);
            } else {
                arrow_start = i;
                break;
            }
            continue;
        }

        if (lo >= cur && i > cur && (lo == i || split_point[i])) starts.push_back(i);
    }

    BlockStructure detected(sizes_from_starts(starts, arrow_start), n - arrow_start);
    detected = merge_blocks(detected, pattern);
    if (verify_cover(pattern, detected)) return BlockStructure::single_block(n);
    return detected;
}

BlockStructure merge_blocks(const BlockStructure& structure, const SparsityPattern& pattern)
{
    std::vector<isize> sizes = structure.block_sizes();
    const isize w = structure.arrow_width();
    Flops cost = estimate_factorization(pattern, structure);
    bool changed = true;
    while (changed) {
        changed = false;
        std::size_t k = 0;
        while (k + 1 < sizes.size()) {
            std::vector<isize> candidate = sizes;
            candidate[k] += candidate[k + 1];
            candidate.erase(candidate.begin() + static_cast<std::ptrdiff_t>(k) + 1);
            const Flops merged_cost = estimate_factorization(pattern, BlockStructure(candidate, w));
            if (merged_cost <= cost) {
                sizes = std::move(candidate);
                cost = merged_cost;
                changed = true;
            } else {
                k++;
            }
        }
    }
    return BlockStructure(sizes, w);
}

std::string render_pattern(const SparsityPattern& pattern, const BlockStructure& structure)
{
    const isize n = pattern.n;
    std::vector<char> boundary(static_cast<std::size_t>(n), 0);
    for (isize k = 1; k < structure.num_blocks(); k++) boundary[structure.block_start(k)] = 1;
    if (structure.arrow_width() > 0 && structure.arrow_start() < n) boundary[structure.arrow_start()] = 1;

    std::ostringstream os;
    for (isize i = 0; i < n; i++) {
        if (boundary[i]) {
            for (isize j = 0; j < n; j++) os << (boundary[j] ? "+-" : "-");
            os << '\n';
        }
        for (isize j = 0; j < n; j++) {
            if (boundary[j]) os << '|';
            const bool set = (j <= i) ? pattern.contains(i, j) : pattern.contains(j, i);
            os << (set ? '*' : '.');
        }
        os << '\n';
    }
    return os.str();
}

} // namespace arrowqp
