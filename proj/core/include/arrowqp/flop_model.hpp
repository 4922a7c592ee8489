#ifndef ARROWQP_FLOP_MODEL_HPP
#define ARROWQP_FLOP_MODEL_HPP

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "arrowqp/block_structure.hpp"
#include "arrowqp/typedefs.hpp"

namespace arrowqp
{

// Exact flop count stored in units of 1/3 flop, so the n^3/3 Cholesky terms
// compose without rounding.
class Flops
{
public:
    constexpr Flops() = default;

    static constexpr Flops whole(std::int64_t flops) { return Flops(3 * flops); }
    static constexpr Flops thirds(std::int64_t thirds) { return Flops(thirds); }

    constexpr std::int64_t in_thirds() const { return thirds_; }
    // Nearest integer; thirds never sit exactly halfway.
    constexpr std::int64_t rounded() const
    {
        return thirds_ >= 0 ? (thirds_ + 1) / 3 : -((-thirds_ + 1) / 3);
    }
    constexpr double value() const { return static_cast<double>(thirds_) / 3.0; }
    std::string to_string() const;

    constexpr Flops& operator+=(Flops o) { thirds_ += o.thirds_; return *this; }
    constexpr Flops& operator-=(Flops o) { thirds_ -= o.thirds_; return *this; }
    friend constexpr Flops operator+(Flops a, Flops b) { return a += b; }
    friend constexpr Flops operator-(Flops a, Flops b) { return a -= b; }
    friend constexpr Flops operator*(std::int64_t k, Flops a) { return Flops(k * a.thirds_); }
    friend constexpr auto operator<=>(const Flops&, const Flops&) = default;

private:
    constexpr explicit Flops(std::int64_t thirds) : thirds_(thirds) {}
    std::int64_t thirds_ = 0;
};

enum class Kernel
{
    gemm,  // A (m x n) times B (n x p):   2mnp
    syrk,  // A (m x n) times A^T:        m^2 n
    potrf, // Cholesky of n x n:          n^3 / 3
    trsm,  // A (m x n) times L^{-T}:     m n^2
};

Flops kernel_cost(Kernel kind, isize m, isize n = 0, isize p = 0);
const char* kernel_name(Kernel kind);

// Running kernel tally filled by an instrumented factorization.
struct FlopTally
{
    Flops total;
    std::array<std::int64_t, 4> calls{};

    void record(Kernel kind, Flops cost)
    {
        total += cost;
        calls[static_cast<std::size_t>(kind)]++;
    }
};

// Number of rows of diagonal block k that touch block k-1 (entry 0 unused).
// A factorization only has to process those rows of L_{k,k-1}.
struct CouplingProfile
{
    std::vector<isize> sub_rows;

    static CouplingProfile dense(const BlockStructure& structure);
};

// Exact cost of the kernel sequence executed by factorize() on `structure`.
Flops predict_factorization(const BlockStructure& structure);

// Same call sequence with the sub-diagonal blocks restricted to their
// structurally nonzero rows. Equals predict_factorization for a dense profile.
Flops predict_factorization(const BlockStructure& structure, const CouplingProfile& profile);

struct FlopReport
{
    Flops construct_psi;
    Flops factorize;
    Flops construct_rbar;
    Flops solve;
    Flops recover_dy;

    Flops total() const { return construct_psi + factorize + construct_rbar + solve + recover_dy; }
};

// Closed-form costs for the extended linear-quadratic control problem with
// x_i = (z_i, u_i) and B_i = [-I 0].
FlopReport mpc_closed_form(isize N, isize n_x, isize n_u, isize n_g);

// Extra factorization cost of embedding g into an augmented state
// (n_x <- n_x + n_g, n_g <- 0) instead of treating it as an arrow block.
Flops augmentation_overhead(isize N, isize n_x, isize n_u, isize n_g);

} // namespace arrowqp

#endif
