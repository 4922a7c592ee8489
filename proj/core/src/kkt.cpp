#include "arrowqp/kkt.hpp"

#include <algorithm>

#include "arrowqp/errors.hpp"

namespace arrowqp
{

namespace
{

std::ptrdiff_t checked_offset(const BtdaStorage& M, isize i, isize j)
{
    if (i < j) std::swap(i, j);
    const std::ptrdiff_t off = M.offset(i, j);
    if (off < 0) throw StructureViolation(i, j);
    return off;
}

void scatter_lower(const SparseMat& M, BtdaMatrix& out)
{
    auto data = out.data();
    for (isize j = 0; j < M.outerSize(); j++) {
        for (SparseMat::InnerIterator it(M, j); it; ++it) {
            if (it.row() < j) continue;
            data[static_cast<std::size_t>(checked_offset(out, it.row(), j))] += it.value();
        }
    }
}

} // namespace

KktWorkspace::KktWorkspace(const GeneralQP& qp, BlockStructure structure)
  : structure_(std::move(structure)),
    p_image_(structure_),
    ata_image_(structure_),
    psi_(structure_)
{
    if (structure_.n() != qp.n) throw InvalidProblem("structure size does not match problem");

    diag_offsets_.resize(static_cast<std::size_t>(qp.n));
    for (isize i = 0; i < qp.n; i++) diag_offsets_[i] = checked_offset(psi_, i, i);

    const SparseMatRow G = qp.G;
    g_rows_.resize(static_cast<std::size_t>(qp.m));
    for (isize r = 0; r < qp.m; r++) {
        GRow& row = g_rows_[r];
        for (SparseMatRow::InnerIterator it(G, r); it; ++it) {
            row.cols.push_back(static_cast<int>(it.col()));
            row.vals.push_back(it.value());
        }
        const std::size_t k = row.cols.size();
        row.offsets.reserve(k * (k + 1) / 2);
        for (std::size_t a = 0; a < k; a++) {
            for (std::size_t b = 0; b <= a; b++) {
                row.offsets.push_back(checked_offset(psi_, row.cols[a], row.cols[b]));
            }
        }
    }
    build_images(qp);
}

void KktWorkspace::build_images(const GeneralQP& qp)
{
    p_image_.set_zero();
    ata_image_.set_zero();
    scatter_lower(qp.P, p_image_);

    // A'A column by column: (A'A)_{ij} = sum_r A_ri A_rj
    const SparseMat AtA = SparseMat(qp.A.transpose()) * qp.A;
    scatter_lower(AtA, ata_image_);

    std::int64_t flops = qp.P.nonZeros();
    const SparseMatRow A_rows = qp.A;
    for (isize r = 0; r < A_rows.outerSize(); r++) {
        const std::int64_t k = A_rows.outerIndexPtr()[r + 1] - A_rows.outerIndexPtr()[r];
        flops += k * (k + 1);
    }
    setup_flops_ = flops;
}

void KktWorkspace::refresh(const GeneralQP& qp)
{
    const SparseMatRow G = qp.G;
    for (isize r = 0; r < qp.m; r++) {
        GRow& row = g_rows_[r];
        std::size_t t = 0;
        for (SparseMatRow::InnerIterator it(G, r); it; ++it, ++t) {
            if (t >= row.cols.size() || row.cols[t] != it.col()) throw SparsityChanged("pattern of G changed");
            row.vals[t] = it.value();
        }
        if (t != row.cols.size()) throw SparsityChanged("pattern of G changed");
    }
    build_images(qp);
}

std::int64_t KktWorkspace::warm_assembly_flops() const
{
    std::int64_t flops = 2 * static_cast<std::int64_t>(psi_.data().size()) + structure_.n();
    for (const GRow& row : g_rows_) {
        const std::int64_t k = static_cast<std::int64_t>(row.cols.size());
        flops += 2 + k + k * (k + 1);
    }
    return flops;
}

const BtdaMatrix& KktWorkspace::assemble_psi(double rho, double delta, const CVecRef& w)
{
    auto out = psi_.data();
    const auto P = p_image_.data();
    const auto AtA = ata_image_.data();
    const double inv_delta = 1.0 / delta;
    for (std::size_t t = 0; t < out.size(); t++) out[t] = P[t] + inv_delta * AtA[t];
    for (std::ptrdiff_t off : diag_offsets_) out[static_cast<std::size_t>(off)] += rho;

    for (std::size_t r = 0; r < g_rows_.size(); r++) {
        const GRow& row = g_rows_[r];
        const double scale = 1.0 / (w[static_cast<isize>(r)] + delta);
        const std::size_t k = row.cols.size();
        std::size_t t = 0;
        for (std::size_t a = 0; a < k; a++) {
            const double va = scale * row.vals[a];
            for (std::size_t b = 0; b <= a; b++, t++) {
                out[static_cast<std::size_t>(row.offsets[t])] += va * row.vals[b];
            }
        }
    }
    return psi_;
}

BtdaMatrix assemble_psi(const GeneralQP& qp, const BlockStructure& structure,
                        double rho, double delta, const CVecRef& w)
{
    KktWorkspace ws(qp, structure);
    return ws.assemble_psi(rho, delta, w);
}

Mat assemble_psi_dense(const GeneralQP& qp, double rho, double delta, const CVecRef& w)
{
    const SparseMat P_full = qp.P.selfadjointView<Eigen::Lower>();
    Mat psi = Mat(P_full);
    psi.diagonal().array() += rho;
    const Mat A = Mat(qp.A);
    const Mat G = Mat(qp.G);
    psi.noalias() += (A.transpose() * A) / delta;
    const Vec scale = (w.array() + delta).inverse().matrix();
    psi.noalias() += G.transpose() * scale.asDiagonal() * G;
    return psi;
}

Vec assemble_rbar(const GeneralQP& qp, const CVecRef& r_x, const CVecRef& r_y, const CVecRef& rbar_z,
                  double delta, const CVecRef& w)
{
    Vec rbar = r_x;
    const Vec scaled_z = (rbar_z.array() / (w.array() + delta)).matrix();
    rbar.noalias() += qp.G.transpose() * scaled_z;
    rbar.noalias() += qp.A.transpose() * (r_y / delta);
    return rbar;
}

BlockVector assemble_rbar(const GeneralQP& qp, const BlockStructure& structure, const CVecRef& r_x,
                          const CVecRef& r_y, const CVecRef& rbar_z, double delta, const CVecRef& w)
{
    return BlockVector(structure, assemble_rbar(qp, r_x, r_y, rbar_z, delta, w));
}

Vec recover_dy(const SparseMat& A, const CVecRef& dx, const CVecRef& r_y, double delta)
{
    Vec dy = A * dx;
    dy -= r_y;
    dy /= delta;
    return dy;
}

Vec recover_dz(const SparseMat& G, const CVecRef& dx, const CVecRef& rbar_z, double delta, const CVecRef& w)
{
    Vec dz = G * dx;
    dz -= rbar_z;
    return (dz.array() / (w.array() + delta)).matrix();
}

Vec recover_ds(const CVecRef& r_s, const CVecRef& s, const CVecRef& z, const CVecRef& dz)
{
    return ((r_s.array() - s.array() * dz.array()) / z.array()).matrix();
}

} // namespace arrowqp
