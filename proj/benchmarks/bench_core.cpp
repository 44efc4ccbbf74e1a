#include <benchmark/benchmark.h>

#include "rabi/qrm.hpp"
#include "rabi/scenario.hpp"
#include "rabi/special.hpp"
#include "rabi/srm.hpp"

using namespace rabi;

namespace {

// the hot loop of every quantum run: one banded matvec at fig2:a5e3 scale
void bm_hamiltonian_apply(benchmark::State& state) {
    const Scenario sc = preset("fig2:a5e3");
    const FockWindow w = fock_window(sc.qrm.alpha, sc.qrm.tail_eps);
    const HamiltonianAction h = build_hamiltonian(sc.qrm, w, Frame::rotating);
    const JointState psi = ground_coherent_state(sc.qrm.alpha, w, Frame::rotating);
    const std::size_t size = psi.amp_g.size();
    cvec in(2 * size), out(2 * size);
    std::copy(psi.amp_g.begin(), psi.amp_g.end(), in.begin());
    std::copy(psi.amp_e.begin(), psi.amp_e.end(), in.begin() + size);
    double t = 0.0;
    for (auto _ : state) {
        h.apply_flat(t, in.data(), out.data());
        benchmark::DoNotOptimize(out.data());
        t += 0.05;
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(2 * size));
}
BENCHMARK(bm_hamiltonian_apply);

void bm_exact_drive(benchmark::State& state) {
    const Scenario sc = preset("fig8:a5e3");
    const DerivedSrm d = derive_srm(sc.qrm.srm);
    double t = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(q_exact(sc.qrm.srm, d, 0.0, t));
        t += 0.03;
    }
}
BENCHMARK(bm_exact_drive);

void bm_expand_harmonics(benchmark::State& state) {
    const Scenario sc = preset("fig8:a5e3");
    const DerivedSrm d = derive_srm(sc.qrm.srm);
    for (auto _ : state)
        benchmark::DoNotOptimize(expand_harmonics(sc.qrm.srm, d,
                                                  static_cast<int>(state.range(0))));
}
BENCHMARK(bm_expand_harmonics)->Arg(2)->Arg(4);

void bm_bessel(benchmark::State& state) {
    double x = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(bessel_j(2, 0.1 + x));
        x = x < 5.0 ? x + 1e-3 : 0.0;
    }
}
BENCHMARK(bm_bessel);

void bm_pe_analytic(benchmark::State& state) {
    const SrmAnalytic a = srm_analytic(preset("fig6:a5e3").qrm.srm);
    double t = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(pe_analytic(a, t));
        t += 15.0;
    }
}
BENCHMARK(bm_pe_analytic);

} // namespace

BENCHMARK_MAIN();
