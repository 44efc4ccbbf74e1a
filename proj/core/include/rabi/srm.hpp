#pragma once

#include <functional>
#include <vector>

#include "rabi/harmonics.hpp"
#include "rabi/ode.hpp"
#include "rabi/params.hpp"

namespace rabi {

// Accumulated drive phase
//   T2(t) = phi - Y1 cos(eta_O t) - Y0 sin(2 nu t) + Y2 cos(eta_g t)
//         + Y3 cos((eta_g + 2 nu) t) + Y4 cos((eta_g - 2 nu) t),
// with T2(0) = 0. Tones with zero amplitude are absent (their Upsilon is 0).
double phase_t2(const SrmParams& p, const DerivedSrm& d, double t);

// Q(t) = e^{-itR} e^{iT2} [R- eps_+^*(t) - g~ eps_z(t) - R+ eps_+(t)].
// delta_opt = 0 returns Q(t); otherwise the re-centered q(t) = e^{-2i delta t} Q(t).
std::complex<double> q_exact(const SrmParams& p, const DerivedSrm& d,
                             double delta_opt, double t);

// Slow dressed-basis amplitude pair (A_-, A_+), second picture.
struct SlowAmplitudes {
    std::complex<double> a_minus{0.0, 0.0};
    std::complex<double> a_plus{0.0, 0.0};

    double norm2() const {
        return std::norm(a_minus) + std::norm(a_plus);
    }
};

// Initial amplitudes for |psi(0)> = |g>.
SlowAmplitudes ground_state_amplitudes(const DerivedSrm& d);

// Closed-form solution at exact resonance:
//   A_-(t) = A_-(0) cos|Xi|t - i e^{+i xi} A_+(0) sin|Xi|t
//   A_+(t) = A_+(0) cos|Xi|t - i e^{-i xi} A_-(0) sin|Xi|t
SlowAmplitudes evolve_resonant(const ResonantRate& rate, const SlowAmplitudes& init,
                               double t);

// Generalized two-level closed form for a constant drive with residual
// exponent: q(t) = Xi e^{i e t}. Reduces to evolve_resonant at e = 0.
SlowAmplitudes evolve_two_level(const std::complex<double>& xi, double detuning,
                                const SlowAmplitudes& init, double t);

// P_e from slow amplitudes (either picture-2 amplitudes with the shifted r,
// or picture-1 amplitudes with r = R). Result clamped to [0, 1] against
// last-ulp rounding.
double pe_from_amplitudes(const SrmParams& p, const DerivedSrm& d, double r,
                          const SlowAmplitudes& amps, double t);

// Everything the analytic path needs, bundled once per parameter set.
// The fast (non-resonant) tones are kept so the slow resonant solution can
// be dressed back with its first-order rapid wiggle
//   A_-(t) += -W(t) A_+(t),  A_+(t) += +W(t)^* A_-(t),
//   W(t) = sum_fast (p_j / f_j) e^{i f_j t},
// which is what the exact amplitudes carry on top of the coarse-grained
// ones. Without it P_e misses a fringe of ~|p_1/f_1| amplified by
// 1/sqrt(R+) in the far-dispersive regime.
struct SrmAnalytic {
    SrmParams params;
    DerivedSrm derived;
    FrequencyShift shift;            // widened shift (see srm_analytic)
    ResonantRate rate;               // plain matched-tone sum
    std::complex<double> xi_eff;     // rate with third-order corrections
    double detuning = 0.0;           // residual exponent of the matched tones
    std::vector<HarmonicTerm> terms; // order <= 4 expansion, delta = 0 frequencies
    std::vector<HarmonicTerm> fast;  // terms not matched into the rate
    SlowAmplitudes slow0;            // first-order-corrected initial amplitudes
};

// derive -> expand(order 2) -> shift -> total rate -> dressing setup.
// The shift starts from the default retained triple (joint formula) and is
// widened by the per-tone shifts of every other clearly-fast tone; the
// modulation sidebands of Xi_{-2-R} contribute at the 1e-5 level, which the
// resonant phase accumulates over t ~ 3e4.
SrmAnalytic srm_analytic(const SrmParams& p, double match_tol = 1.0,
                         bool widen_shift = true);

// W(t) of the dressing sum over the fast tones.
std::complex<double> fast_wiggle(const std::vector<HarmonicTerm>& fast, double t);

// Resonant analytic P_e(t) for the atom starting in |g>, fast wiggle
// included; P_e(0) = 0 exactly.
double pe_analytic(const SrmAnalytic& a, double t);

// Bare Eq-(pet) evaluation from undressed slow amplitudes (no wiggle).
double pe_analytic_bare(const SrmParams& p, const DerivedSrm& d,
                        const FrequencyShift& shift, const ResonantRate& rate,
                        double t);

// Exact interaction-picture ODE dA_-/dt = -i Q(t) A_+, dA_+/dt = -i Q^* A_-,
// sampled on the given times; on_sample(i, t, amps). Returns integrator stats.
OdeStats evolve_exact(const SrmParams& p, const DerivedSrm& d,
                      const SlowAmplitudes& init, double t0, double t1,
                      const std::vector<double>& sample_times,
                      const std::function<void(std::size_t, double,
                                               const SlowAmplitudes&)>& on_sample,
                      double rtol = 1e-12, double atol = 1e-12);

// Slow equations dA_-/dt = -i q(t) A_+, dA_+/dt = -i q^* A_- for a caller
// supplied q(t).
OdeStats evolve_slow_numeric(const std::function<std::complex<double>(double)>& q,
                             const SlowAmplitudes& init, double t0, double t1,
                             const std::vector<double>& sample_times,
                             const std::function<void(std::size_t, double,
                                                      const SlowAmplitudes&)>& on_sample,
                             double rtol = 1e-12, double atol = 1e-12);

// q(t) built from the retained slow tones, re-centered by the shift.
std::function<std::complex<double>(double)> slow_drive(
    const std::vector<HarmonicTerm>& retained, const FrequencyShift& shift);

} // namespace rabi
