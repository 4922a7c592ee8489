#ifndef ARROWQP_KKT_HPP
#define ARROWQP_KKT_HPP

#include <cstdint>
#include <vector>

#include "arrowqp/btda.hpp"
#include "arrowqp/qp_model.hpp"

namespace arrowqp
{

struct StepDirection
{
    Vec dx, dy, dz, ds;

    StepDirection() = default;
    StepDirection(isize n, isize p, isize m)
      : dx(Vec::Zero(n)), dy(Vec::Zero(p)), dz(Vec::Zero(m)), ds(Vec::Zero(m))
    {}
};

// Assembly workspace for the condensed matrix
//
//   Psi = P + rho I + A'A / delta + G' (W + delta I)^{-1} G.
//
// The block images of P and A'A are computed once; every row of G keeps the
// storage offsets of its outer product so that the iterate-dependent part is
// a scaled scatter.
class KktWorkspace
{
public:
    KktWorkspace() = default;
    KktWorkspace(const GeneralQP& qp, BlockStructure structure);

    // Recomputes the cached images for new values on the same pattern.
    void refresh(const GeneralQP& qp);

    const BtdaMatrix& assemble_psi(double rho, double delta, const CVecRef& w);

    const BlockStructure& structure() const { return structure_; }
    const BtdaMatrix& psi() const { return psi_; }

    // Flop counts of one assembly: `cold` includes forming P and A'A, `warm`
    // only the per-iteration work.
    std::int64_t cold_assembly_flops() const { return setup_flops_ + warm_assembly_flops(); }
    std::int64_t warm_assembly_flops() const;

private:
    struct GRow
    {
        std::vector<int> cols;
        std::vector<double> vals;
        std::vector<std::ptrdiff_t> offsets; // packed lower triangle of the outer product
    };

    void build_images(const GeneralQP& qp);

    BlockStructure structure_;
    BtdaMatrix p_image_;
    BtdaMatrix ata_image_;
    std::vector<std::ptrdiff_t> diag_offsets_;
    std::vector<GRow> g_rows_;
    BtdaMatrix psi_;
    std::int64_t setup_flops_ = 0;
};

// Assembly on a freshly built workspace.
BtdaMatrix assemble_psi(const GeneralQP& qp, const BlockStructure& structure,
                        double rho, double delta, const CVecRef& w);

// Dense Psi, used by the dense reference backend.
Mat assemble_psi_dense(const GeneralQP& qp, double rho, double delta, const CVecRef& w);

// rbar = r_x + G' (W + delta I)^{-1} rbar_z + A' r_y / delta
Vec assemble_rbar(const GeneralQP& qp, const CVecRef& r_x, const CVecRef& r_y, const CVecRef& rbar_z,
                  double delta, const CVecRef& w);
BlockVector assemble_rbar(const GeneralQP& qp, const BlockStructure& structure, const CVecRef& r_x,
                          const CVecRef& r_y, const CVecRef& rbar_z, double delta, const CVecRef& w);

// dy = (A dx - r_y) / delta
Vec recover_dy(const SparseMat& A, const CVecRef& dx, const CVecRef& r_y, double delta);

// dz = (W + delta I)^{-1} (G dx - rbar_z)
Vec recover_dz(const SparseMat& G, const CVecRef& dx, const CVecRef& rbar_z, double delta, const CVecRef& w);

// ds = (r_s - s o dz) / z
Vec recover_ds(const CVecRef& r_s, const CVecRef& s, const CVecRef& z, const CVecRef& dz);

} // namespace arrowqp

#endif
