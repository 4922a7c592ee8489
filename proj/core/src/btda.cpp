#include "arrowqp/btda.hpp"

#include "arrowqp/dense_kernels.hpp"
#include "arrowqp/errors.hpp"

#include <algorithm>

namespace arrowqp
{

BtdaStorage::BtdaStorage(BlockStructure structure) : structure_(std::move(structure))
{
    const isize K = structure_.num_blocks();
    const isize w = structure_.arrow_width();
    std::size_t total = 0;
    diag_off_.resize(static_cast<std::size_t>(K));
    sub_off_.resize(static_cast<std::size_t>(K));
    arrow_off_.resize(static_cast<std::size_t>(K));
    for (isize k = 0; k < K; k++) {
        const isize d = structure_.block_size(k);
        diag_off_[k] = total;
        total += static_cast<std::size_t>(d * d);
        sub_off_[k] = total;
        if (k > 0) total += static_cast<std::size_t>(d * structure_.block_size(k - 1));
        arrow_off_[k] = total;
        total += static_cast<std::size_t>(w * d);
    }
    corner_off_ = total;
    total += static_cast<std::size_t>(w * w);
    data_.assign(total, 0.0);
}

BtdaStorage::Block BtdaStorage::diag(isize k)
{
    const isize d = structure_.block_size(k);
    return Block(data_.data() + diag_off_[k], d, d);
}

BtdaStorage::ConstBlock BtdaStorage::diag(isize k) const
{
    const isize d = structure_.block_size(k);
    return ConstBlock(data_.data() + diag_off_[k], d, d);
}

BtdaStorage::Block BtdaStorage::sub(isize k)
{
    return Block(data_.data() + sub_off_[k], structure_.block_size(k), structure_.block_size(k - 1));
}

BtdaStorage::ConstBlock BtdaStorage::sub(isize k) const
{
    return ConstBlock(data_.data() + sub_off_[k], structure_.block_size(k), structure_.block_size(k - 1));
}

BtdaStorage::Block BtdaStorage::arrow(isize k)
{
    return Block(data_.data() + arrow_off_[k], structure_.arrow_width(), structure_.block_size(k));
}

BtdaStorage::ConstBlock BtdaStorage::arrow(isize k) const
{
    return ConstBlock(data_.data() + arrow_off_[k], structure_.arrow_width(), structure_.block_size(k));
}

BtdaStorage::Block BtdaStorage::corner()
{
    const isize w = structure_.arrow_width();
    return Block(data_.data() + corner_off_, w, w);
}

BtdaStorage::ConstBlock BtdaStorage::corner() const
{
    const isize w = structure_.arrow_width();
    return ConstBlock(data_.data() + corner_off_, w, w);
}

std::ptrdiff_t BtdaStorage::offset(isize i, isize j) const
{
    if (i < j || i >= n() || j < 0) return -1;
    const isize bi = structure_.block_of(i);
    const isize bj = structure_.block_of(j);
    const isize K = structure_.num_blocks();
    const isize cj = j - (bj == K ? structure_.arrow_start() : structure_.block_start(bj));
    if (bi == K) {
        const isize w = structure_.arrow_width();
        const isize ri = i - structure_.arrow_start();
        if (bj == K) return static_cast<std::ptrdiff_t>(corner_off_ + static_cast<std::size_t>(cj * w + ri));
        return static_cast<std::ptrdiff_t>(arrow_off_[bj] + static_cast<std::size_t>(cj * w + ri));
    }
    const isize ri = i - structure_.block_start(bi);
    const isize rows = structure_.block_size(bi);
    if (bi == bj) return static_cast<std::ptrdiff_t>(diag_off_[bi] + static_cast<std::size_t>(cj * rows + ri));
    if (bi == bj + 1) return static_cast<std::ptrdiff_t>(sub_off_[bi] + static_cast<std::size_t>(cj * rows + ri));
    return -1;
}

void BtdaStorage::set_zero()
{
    std::fill(data_.begin(), data_.end(), 0.0);
}

BtdaMatrix BtdaMatrix::from_dense(const BlockStructure& structure, const Mat& dense)
{
    BtdaMatrix psi(structure);
    for (isize j = 0; j < dense.cols(); j++) {
        for (isize i = j; i < dense.rows(); i++) {
            if (dense(i, j) == 0.0) continue;
            const std::ptrdiff_t off = psi.offset(i, j);
            if (off < 0) throw StructureViolation(i, j);
            psi.data_[static_cast<std::size_t>(off)] = dense(i, j);
        }
    }
    return psi;
}

Vec BtdaMatrix::multiply(const CVecRef& x) const
{
    const BlockStructure& s = structure_;
    const isize K = s.num_blocks();
    const isize w = s.arrow_width();
    Vec y = Vec::Zero(n());
    const auto xa = x.tail(w);
    auto ya = y.tail(w);
    for (isize k = 0; k < K; k++) {
        const isize o = s.block_start(k);
        const isize d = s.block_size(k);
        const auto xk = x.segment(o, d);
        y.segment(o, d).noalias() += diag(k).selfadjointView<Eigen::Lower>() * xk;
        if (k > 0) {
            const isize op = s.block_start(k - 1);
            const isize dp = s.block_size(k - 1);
            y.segment(o, d).noalias() += sub(k) * x.segment(op, dp);
            y.segment(op, dp).noalias() += sub(k).transpose() * xk;
        }
        if (w > 0) {
            ya.noalias() += arrow(k) * xk;
            y.segment(o, d).noalias() += arrow(k).transpose() * xa;
        }
    }
    if (w > 0) ya.noalias() += corner().selfadjointView<Eigen::Lower>() * xa;
    return y;
}

BlockVector::BlockVector(BlockStructure structure, Vec values)
  : structure_(std::move(structure)), values_(std::move(values))
{
    if (values_.size() != structure_.n()) throw InvalidProblem("block vector length does not match structure");
}

BlockVector::BlockVector(BlockStructure structure)
  : structure_(std::move(structure)), values_(Vec::Zero(structure_.n()))
{}

namespace
{

void run_potrf(BtdaStorage::Block S, isize block, FlopTally* tally)
{
    const isize pivot = kernels::potrf(S);
    if (tally) tally->record(Kernel::potrf, kernel_cost(Kernel::potrf, S.rows()));
    if (pivot >= 0) throw NotPositiveDefinite(block, pivot);
}

void run_trsm(BtdaStorage::Block A, BtdaStorage::Block L, FlopTally* tally)
{
    kernels::trsm(A, L);
    if (tally) tally->record(Kernel::trsm, kernel_cost(Kernel::trsm, A.rows(), A.cols()));
}

void run_syrk_sub(BtdaStorage::Block A, BtdaStorage::Block C, FlopTally* tally)
{
    kernels::syrk(-1.0, A, 1.0, C);
    if (tally) tally->record(Kernel::syrk, kernel_cost(Kernel::syrk, A.rows(), A.cols()));
}

void run_gemm_nt_sub(BtdaStorage::Block A, BtdaStorage::Block B, BtdaStorage::Block C, FlopTally* tally)
{
    kernels::gemm_nt(-1.0, A, B, 1.0, C);
    if (tally) tally->record(Kernel::gemm, kernel_cost(Kernel::gemm, A.rows(), A.cols(), B.rows()));
}

} // namespace

void factorize_into(const BtdaMatrix& psi, BtdaFactor& L, FlopTally* tally)
{
    const BlockStructure& s = psi.structure();
    if (!(L.structure() == s)) L = BtdaFactor(s);
    std::copy(psi.data().begin(), psi.data().end(), L.data().begin());

    const isize K = s.num_blocks();
    const bool has_arrow = s.arrow_width() > 0;

    run_potrf(L.diag(0), 0, tally);
    if (has_arrow) run_trsm(L.arrow(0), L.diag(0), tally);
    for (isize i = 1; i < K; i++) {
        // L_{i,i-1} = Psi_{i,i-1} L_{i-1,i-1}^{-T}
        run_trsm(L.sub(i), L.diag(i - 1), tally);
        // L_{i,i} = chol(Psi_{i,i} - L_{i,i-1} L_{i,i-1}^T)
        run_syrk_sub(L.sub(i), L.diag(i), tally);
        run_potrf(L.diag(i), i, tally);
        if (has_arrow) {
            // L_{a,i} = (Psi_{a,i} - L_{a,i-1} L_{i,i-1}^T) L_{i,i}^{-T}
            run_gemm_nt_sub(L.arrow(i - 1), L.sub(i), L.arrow(i), tally);
            run_trsm(L.arrow(i), L.diag(i), tally);
        }
    }
    if (has_arrow) {
        for (isize i = 0; i < K; i++) run_syrk_sub(L.arrow(i), L.corner(), tally);
        run_potrf(L.corner(), K, tally);
    }
}

BtdaFactor factorize(const BtdaMatrix& psi, FlopTally* tally)
{
    BtdaFactor L(psi.structure());
    factorize_into(psi, L, tally);
    return L;
}

void solve_in_place(const BtdaFactor& L, VecRef r)
{
    const BlockStructure& s = L.structure();
    const isize K = s.num_blocks();
    const isize w = s.arrow_width();
    std::vector<VecRef> seg;
    seg.reserve(static_cast<std::size_t>(K));
    for (isize k = 0; k < K; k++) seg.emplace_back(r.segment(s.block_start(k), s.block_size(k)));
    VecRef ra(r.tail(w));

    // forward: L y = r
    kernels::trsv(L.diag(0), seg[0]);
    for (isize i = 1; i < K; i++) {
        kernels::gemv(-1.0, L.sub(i), seg[i - 1], seg[i]);
        kernels::trsv(L.diag(i), seg[i]);
    }
    if (w > 0) {
        for (isize j = 0; j < K; j++) kernels::gemv(-1.0, L.arrow(j), seg[j], ra);
        kernels::trsv(L.corner(), ra);
    }

    // backward: L^T x = y
    if (w > 0) kernels::trsv_t(L.corner(), ra);
    for (isize i = K - 1; i >= 0; i--) {
        if (i + 1 < K) kernels::gemv_t(-1.0, L.sub(i + 1), seg[i + 1], seg[i]);
        if (w > 0) kernels::gemv_t(-1.0, L.arrow(i), ra, seg[i]);
        kernels::trsv_t(L.diag(i), seg[i]);
    }
}

BlockVector solve_in_place(const BtdaFactor& L, BlockVector r)
{
    solve_in_place(L, r.values());
    return r;
}

namespace
{

Mat expand_lower(const BtdaStorage& M)
{
    const BlockStructure& s = M.structure();
    const isize K = s.num_blocks();
    const isize w = s.arrow_width();
    const isize a0 = s.arrow_start();
    Mat out = Mat::Zero(s.n(), s.n());
    for (isize k = 0; k < K; k++) {
        const isize o = s.block_start(k);
        const isize d = s.block_size(k);
        out.block(o, o, d, d).triangularView<Eigen::Lower>() = M.diag(k);
        if (k > 0) out.block(o, s.block_start(k - 1), d, s.block_size(k - 1)) = M.sub(k);
        if (w > 0) out.block(a0, o, w, d) = M.arrow(k);
    }
    if (w > 0) out.block(a0, a0, w, w).triangularView<Eigen::Lower>() = M.corner();
    return out;
}

} // namespace

Mat expand_dense(const BtdaMatrix& psi)
{
    Mat lower = expand_lower(psi);
    Mat full = lower.selfadjointView<Eigen::Lower>();
    return full;
}

Mat expand_dense(const BtdaFactor& L)
{
    return expand_lower(L);
}

} // namespace arrowqp
