#include "doctest.h"

#include "arrowqp/btda.hpp"
#include "arrowqp/flop_model.hpp"
#include "oracles.hpp"

using namespace arrowqp;

TEST_SUITE("flop_model")
{
    TEST_CASE("kernel costs")
    {
        CHECK(kernel_cost(Kernel::gemm, 2, 3, 4).rounded() == 48);
        CHECK(kernel_cost(Kernel::potrf, 3).rounded() == 9);
        CHECK(kernel_cost(Kernel::syrk, 4, 2).rounded() == 32);
        CHECK(kernel_cost(Kernel::trsm, 3, 2).rounded() == 12);
        CHECK(kernel_cost(Kernel::potrf, 2).in_thirds() == 8);
        CHECK(std::string(kernel_name(Kernel::syrk)) == "syrk");
    }

    TEST_CASE("exact thirds arithmetic")
    {
        const Flops a = Flops::thirds(64);
        CHECK(a.rounded() == 21);
        CHECK(a.to_string() == "21 1/3");
        CHECK(Flops::thirds(65).to_string() == "21 2/3");
        CHECK((a + Flops::thirds(2)).rounded() == 22);
        CHECK((3 * Flops::thirds(1)) == Flops::whole(1));
        CHECK(Flops::whole(5) > Flops::thirds(14));
        CHECK(Flops::thirds(-4).rounded() == -1);
    }

    TEST_CASE("structural prediction on small structures")
    {
        CHECK(predict_factorization(BlockStructure::single_block(6)) == kernel_cost(Kernel::potrf, 6));
        const Flops two = predict_factorization(BlockStructure({2, 2}, 0));
        CHECK(two.in_thirds() == 64);
        CHECK(two.rounded() == 21);

        // one block plus arrow: potrf(d) + trsm(w, d) + syrk(w, d) + potrf(w)
        const Flops arrow = predict_factorization(BlockStructure({3}, 2));
        CHECK(arrow == kernel_cost(Kernel::potrf, 3) + kernel_cost(Kernel::trsm, 2, 3) +
                           kernel_cost(Kernel::syrk, 2, 3) + kernel_cost(Kernel::potrf, 2));
    }

    TEST_CASE("instrumented tally equals prediction on fuzzed structures")
    {
        testing::Rng rng(11);
        for (int trial = 0; trial < 50; trial++) {
            const auto sample = testing::random_btda_spd(rng, 8, 7, 4);
            const BtdaMatrix psi = BtdaMatrix::from_dense(sample.structure, sample.dense);
            FlopTally tally;
            factorize(psi, &tally);
            CHECK(tally.total == predict_factorization(sample.structure));
            const isize K = sample.structure.num_blocks();
            CHECK(tally.calls[static_cast<std::size_t>(Kernel::potrf)] ==
                  K + (sample.structure.arrow_width() > 0 ? 1 : 0));
        }
    }

    TEST_CASE("coupling profile lowers the prediction")
    {
        const BlockStructure s({4, 4, 4}, 1);
        CouplingProfile profile{{4, 2, 1}};
        CHECK(predict_factorization(s, CouplingProfile::dense(s)) == predict_factorization(s));
        CHECK(predict_factorization(s, profile) < predict_factorization(s));
    }

    TEST_CASE("closed-form MPC costs")
    {
        const FlopReport r = mpc_closed_form(15, 4, 1, 0);
        CHECK(r.factorize.in_thirds() == 3 * 3325);
        CHECK(r.total() == r.construct_psi + r.factorize + r.construct_rbar + r.solve + r.recover_dy);

        // no n_g terms when n_g = 0: the pure-N part equals N times the N=1 value
        const FlopReport one = mpc_closed_form(1, 5, 2, 0);
        const FlopReport two = mpc_closed_form(2, 5, 2, 0);
        CHECK(two.construct_psi == 2 * one.construct_psi);
        CHECK(two.factorize == 2 * one.factorize);
        CHECK(two.construct_rbar == 2 * one.construct_rbar);
        CHECK(two.solve == 2 * one.solve);
        CHECK(two.recover_dy == 2 * one.recover_dy);

        // factorization with n_g: N(...) + N n_g (3 n_x^2 + 4 n_x n_u + n_u^2) + n_g^3 / 3
        const FlopReport g = mpc_closed_form(3, 2, 1, 2);
        const Flops expected = mpc_closed_form(3, 2, 1, 0).factorize + Flops::whole(3 * 2 * (12 + 8 + 1)) +
                               Flops::thirds(8);
        CHECK(g.factorize == expected);
    }

    TEST_CASE("augmentation overhead")
    {
        CHECK(augmentation_overhead(7, 3, 2, 0) == Flops{});
        // N=1, n_x=1, n_u=0, n_g=1 evaluated through the substitution identity
        const Flops lhs = augmentation_overhead(1, 1, 0, 1);
        const Flops rhs = mpc_closed_form(1, 2, 0, 0).factorize - mpc_closed_form(1, 1, 0, 1).factorize;
        CHECK(lhs == rhs);
        CHECK(lhs == Flops::whole(13));

        for (isize N = 1; N <= 6; N++)
            for (isize nx = 0; nx <= 5; nx++)
                for (isize nu = 0; nu <= 5; nu++)
                    for (isize ng = 0; ng <= 5; ng++) {
                        const Flops identity = mpc_closed_form(N, nx + ng, nu, 0).factorize -
                                               mpc_closed_form(N, nx, nu, ng).factorize;
                        REQUIRE(augmentation_overhead(N, nx, nu, ng) == identity);
                        if (ng >= 1) REQUIRE(augmentation_overhead(N, nx, nu, ng) > Flops{});
                    }
    }
}
