#ifndef ARROWQP_BTDA_HPP
#define ARROWQP_BTDA_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "arrowqp/block_structure.hpp"
#include "arrowqp/flop_model.hpp"
#include "arrowqp/typedefs.hpp"

namespace arrowqp
{

// Dense block storage for a symmetric block-tri-diagonal-arrow matrix
//
//   [ D_0  S_1'              W_0' ]
//   [ S_1  D_1  S_2'         W_1' ]
//   [      S_2  ...   ...    ...  ]
//   [ W_0  W_1  ...   W_K    C    ]
//
// Only D_k, S_k (block k, k-1), W_k (arrow, k) and the corner C are stored.
// The lower triangle of D_k and C is significant. All blocks live in one
// contiguous column-major buffer.
class BtdaStorage
{
public:
    using Block = Eigen::Map<Mat>;
    using ConstBlock = Eigen::Map<const Mat>;

    BtdaStorage() = default;
    explicit BtdaStorage(BlockStructure structure);

    const BlockStructure& structure() const { return structure_; }
    isize n() const { return structure_.n(); }

    Block diag(isize k);
    ConstBlock diag(isize k) const;
    // Block (k, k-1), k >= 1.
    Block sub(isize k);
    ConstBlock sub(isize k) const;
    // Block (arrow, k).
    Block arrow(isize k);
    ConstBlock arrow(isize k) const;
    Block corner();
    ConstBlock corner() const;

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

    // Position of the lower-triangle entry (i, j), i >= j, in data(), or -1
    // when the entry lies outside the pattern.
    std::ptrdiff_t offset(isize i, isize j) const;

    void set_zero();

protected:
    BlockStructure structure_;
    std::vector<double> data_;
    std::vector<std::size_t> diag_off_;
    std::vector<std::size_t> sub_off_;
    std::vector<std::size_t> arrow_off_;
    std::size_t corner_off_ = 0;
};

class BtdaMatrix : public BtdaStorage
{
public:
    using BtdaStorage::BtdaStorage;

    // Takes the lower triangle of a dense symmetric matrix. Throws
    // StructureViolation if a nonzero falls outside the pattern.
    static BtdaMatrix from_dense(const BlockStructure& structure, const Mat& dense);

    // y = Psi x
    Vec multiply(const CVecRef& x) const;
};

// Lower Cholesky factor L with L L^T = Psi, same block layout as BtdaMatrix.
class BtdaFactor : public BtdaStorage
{
public:
    using BtdaStorage::BtdaStorage;
};

// Structure-conforming vector with per-block segments and an arrow segment.
class BlockVector
{
public:
    BlockVector() = default;
    BlockVector(BlockStructure structure, Vec values);
    explicit BlockVector(BlockStructure structure);

    const BlockStructure& structure() const { return structure_; }
    Vec& values() { return values_; }
    const Vec& values() const { return values_; }
    auto segment(isize k) { return values_.segment(structure_.block_start(k), structure_.block_size(k)); }
    auto segment(isize k) const { return values_.segment(structure_.block_start(k), structure_.block_size(k)); }
    auto arrow() { return values_.tail(structure_.arrow_width()); }
    auto arrow() const { return values_.tail(structure_.arrow_width()); }

private:
    BlockStructure structure_;
    Vec values_;
};

// Block Cholesky factorization. Psi is left untouched; the factor is computed
// in place over a copy. Throws NotPositiveDefinite. When `tally` is given,
// every kernel call is recorded with the dimensions it was executed on.
BtdaFactor factorize(const BtdaMatrix& psi, FlopTally* tally = nullptr);

// Same as factorize() but reuses the storage of `L` when the structure matches.
void factorize_into(const BtdaMatrix& psi, BtdaFactor& L, FlopTally* tally = nullptr);

// Solves L L^T x = r by forward then backward block substitution; r is
// overwritten with x.
void solve_in_place(const BtdaFactor& L, VecRef r);
BlockVector solve_in_place(const BtdaFactor& L, BlockVector r);

// Symmetric dense image of Psi.
Mat expand_dense(const BtdaMatrix& psi);
// Lower-triangular dense image of L.
Mat expand_dense(const BtdaFactor& L);

} // namespace arrowqp

#endif
