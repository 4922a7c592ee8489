#ifndef ARROWQP_BLOCK_STRUCTURE_HPP
#define ARROWQP_BLOCK_STRUCTURE_HPP

#include <string>
#include <vector>

#include "arrowqp/typedefs.hpp"

namespace arrowqp
{

// Partition of the variables into diagonal blocks d_0..d_K followed by a
// trailing arrow block of width w. Diagonal block k may couple only to block
// k-1 (sub-diagonal) and to the arrow rows.
class BlockStructure
{
public:
    BlockStructure() = default;
    BlockStructure(std::vector<isize> block_sizes, isize arrow_width);

    static BlockStructure single_block(isize n) { return BlockStructure({n}, 0); }

    const std::vector<isize>& block_sizes() const { return sizes_; }
    isize num_blocks() const { return static_cast<isize>(sizes_.size()); }
    isize block_size(isize k) const { return sizes_[static_cast<std::size_t>(k)]; }
    isize block_start(isize k) const { return starts_[static_cast<std::size_t>(k)]; }
    isize arrow_width() const { return arrow_width_; }
    isize arrow_start() const { return n_ - arrow_width_; }
    isize n() const { return n_; }

    // Block index of variable i; arrow variables map to num_blocks().
    isize block_of(isize i) const;

    std::string to_string() const;

    friend bool operator==(const BlockStructure& a, const BlockStructure& b)
    {
        return a.sizes_ == b.sizes_ && a.arrow_width_ == b.arrow_width_;
    }

private:
    std::vector<isize> sizes_;
    std::vector<isize> starts_;
    isize arrow_width_ = 0;
    isize n_ = 0;
};

// Symbolic lower-triangular pattern, one sorted column list per row. Every row
// stores its diagonal.
struct SparsityPattern
{
    isize n = 0;
    std::vector<std::vector<isize>> rows;

    // Smallest column index in row i.
    isize reach(isize i) const { return rows[static_cast<std::size_t>(i)].front(); }
    isize nnz() const;
    bool contains(isize i, isize j) const;

    friend bool operator==(const SparsityPattern&, const SparsityPattern&) = default;
};

} // namespace arrowqp

#endif
