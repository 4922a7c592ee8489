#include "arrowqp/flop_model.hpp"

#include <sstream>

namespace arrowqp
{

std::string Flops::to_string() const
{
    std::ostringstream os;
    os << thirds_ / 3;
    if (thirds_ % 3 != 0) os << (thirds_ % 3 == 1 || thirds_ % 3 == -2 ? " 1/3" : " 2/3");
    return os.str();
}

Flops kernel_cost(Kernel kind, isize m, isize n, isize p)
{
    switch (kind) {
        case Kernel::gemm: return Flops::whole(2 * m * n * p);
        case Kernel::syrk: return Flops::whole(m * m * n);
        case Kernel::potrf: return Flops::thirds(m * m * m);
        case Kernel::trsm: return Flops::whole(m * n * n);
    }
    return Flops{};
}

const char* kernel_name(Kernel kind)
{
    switch (kind) {
        case Kernel::gemm: return "gemm";
        case Kernel::syrk: return "syrk";
        case Kernel::potrf: return "potrf";
        case Kernel::trsm: return "trsm";
    }
    return "?";
}

CouplingProfile CouplingProfile::dense(const BlockStructure& structure)
{
    return CouplingProfile{structure.block_sizes()};
}

Flops predict_factorization(const BlockStructure& structure)
{
    return predict_factorization(structure, CouplingProfile::dense(structure));
}

Flops predict_factorization(const BlockStructure& s, const CouplingProfile& profile)
{
    const isize w = s.arrow_width();
    Flops total = kernel_cost(Kernel::potrf, s.block_size(0));
    if (w > 0) total += kernel_cost(Kernel::trsm, w, s.block_size(0));
    for (isize k = 1; k < s.num_blocks(); k++) {
        const isize r = profile.sub_rows[static_cast<std::size_t>(k)];
        const isize prev = s.block_size(k - 1);
        const isize d = s.block_size(k);
        total += kernel_cost(Kernel::trsm, r, prev);
        total += kernel_cost(Kernel::syrk, r, prev);
        total += kernel_cost(Kernel::potrf, d);
        if (w > 0) {
            total += kernel_cost(Kernel::gemm, w, prev, r);
            total += kernel_cost(Kernel::trsm, w, d);
        }
    }
    if (w > 0) {
        for (isize k = 0; k < s.num_blocks(); k++) total += kernel_cost(Kernel::syrk, w, s.block_size(k));
        total += kernel_cost(Kernel::potrf, w);
    }
    return total;
}

FlopReport mpc_closed_form(isize N, isize nx, isize nu, isize ng)
{
    FlopReport r;
    r.construct_psi = Flops::whole(N * (4 * nx * nx * nx + 4 * nx * nx * nu + nx * nu * nu)
                                   + N * ng * (ng * nx + nx * nx + nx * nu));
    // N(7/3 nx^3 + 4 nx^2 nu + 2 nx nu^2 + 1/3 nu^3) + N ng (3 nx^2 + 4 nx nu + nu^2) + 1/3 ng^3
    r.factorize = Flops::thirds(N * (7 * nx * nx * nx + 12 * nx * nx * nu + 6 * nx * nu * nu + nu * nu * nu)
                                + 3 * N * ng * (3 * nx * nx + 4 * nx * nu + nu * nu)
                                + ng * ng * ng);
    r.construct_rbar = Flops::whole(N * (2 * nx * nx + nx * nu + nx * ng));
    r.solve = Flops::whole(N * (4 * nx * nx + 6 * nx * nu + 2 * nu * nu) + 2 * N * ng * (nx + nu) + 2 * ng * ng);
    r.recover_dy = Flops::whole(N * (2 * nx * nx + nx * nu + nx * ng));
    return r;
}

Flops augmentation_overhead(isize N, isize nx, isize nu, isize ng)
{
    // N ng (7/3 ng^2 + 7 ng nx + 4 ng nu + 4 nx^2 + 4 nx nu + nu^2) - 1/3 ng^3
    return Flops::thirds(N * ng * (7 * ng * ng + 3 * (7 * ng * nx + 4 * ng * nu + 4 * nx * nx + 4 * nx * nu + nu * nu))
                         - ng * ng * ng);
}

} // namespace arrowqp
