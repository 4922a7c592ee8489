#include <benchmark/benchmark.h>

#include "arrowqp/btda.hpp"
#include "arrowqp/generators.hpp"
#include "arrowqp/kkt.hpp"
#include "arrowqp/structure.hpp"

using namespace arrowqp;

namespace
{

GeneralQP spring_mass_qp(isize M, isize N)
{
    SpringMassConfig cfg;
    cfg.M = M;
    cfg.N = N;
    return to_general_qp(spring_mass(cfg).problem).first;
}

void factorize_btda(benchmark::State& state)
{
    const GeneralQP qp = spring_mass_qp(state.range(0), state.range(1));
    const BlockStructure s = detect(detection_pattern(qp));
    KktWorkspace ws(qp, s);
    const BtdaMatrix& psi = ws.assemble_psi(1e-6, 1e-4, Vec::Ones(qp.m));
    BtdaFactor L(s);
    for (auto _ : state) {
        factorize_into(psi, L);
        benchmark::DoNotOptimize(L.data().data());
    }
    state.counters["flops"] = benchmark::Counter(predict_factorization(s).value(), benchmark::Counter::kIsIterationInvariantRate);
}

void factorize_dense(benchmark::State& state)
{
    const GeneralQP qp = spring_mass_qp(state.range(0), state.range(1));
    const Mat psi = assemble_psi_dense(qp, 1e-6, 1e-4, Vec::Ones(qp.m));
    for (auto _ : state) {
        Eigen::LLT<Mat> llt(psi);
        benchmark::DoNotOptimize(llt.matrixLLT().data());
    }
}

void assemble_psi_warm(benchmark::State& state)
{
    const GeneralQP qp = spring_mass_qp(state.range(0), state.range(1));
    KktWorkspace ws(qp, detect(detection_pattern(qp)));
    const Vec w = Vec::Ones(qp.m);
    for (auto _ : state) benchmark::DoNotOptimize(ws.assemble_psi(1e-6, 1e-4, w).data().data());
}

void detect_structure(benchmark::State& state)
{
    const GeneralQP qp = spring_mass_qp(state.range(0), state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(detect(detection_pattern(qp)));
}

} // namespace

BENCHMARK(factorize_btda)->ArgsProduct({{2, 8, 16, 32}, {15}})->ArgsProduct({{8}, {16, 32, 64, 128}});
BENCHMARK(factorize_dense)->ArgsProduct({{2, 8, 16}, {15}});
BENCHMARK(assemble_psi_warm)->ArgsProduct({{2, 8, 16, 32}, {15}});
BENCHMARK(detect_structure)->ArgsProduct({{2, 8, 32}, {15}});
