#pragma once

#include <complex>
#include <string>
#include <vector>

#include "rabi/params.hpp"

namespace rabi {

// One tone of Q(t) = sum_j p_j exp(i t f_j). Frequencies are produced at
// delta = 0 (raw R); re-centering onto r = R + 2 delta is a plain shift of
// every frequency by -2 delta, applied by the consumers.
struct HarmonicTerm {
    std::complex<double> amplitude; // p_j
    double frequency = 0.0;         // f_j = -R + 2 nu w + a eta_omega + b eta_g
    int order = 0;                  // total modulation quanta (0, 1 or 2)
    // structural key: frequency = -R + 2*nu*w + a*eta_omega + b*eta_g
    int w = 0;
    int a = 0;
    int b = 0;
    std::string label; // e.g. "Xi_{-2-R}", "Xi_{-R,+eta_O+eta_g}"
};

// Expands Q(t) into harmonic tones keeping all terms with at most max_order
// modulation quanta (the paper's families are orders 0-2; orders 3-4 refine
// the resonant amplitudes at the 1e-6 level, which matters once the phase
// accumulates over t ~ 3e4). Every coefficient is an exact product of Bessel
// factors J_i(Upsilon_k); tones sharing the same structural key are merged.
// Throws SeriesDivergence if any |Upsilon_k| >= 1.
std::vector<HarmonicTerm> expand_harmonics(const SrmParams& p, const DerivedSrm& d,
                                           int max_order);

// Frequency shift induced by the rapidly oscillating tones.
struct FrequencyShift {
    double delta = 0.0; // sign(f1) (|f1| - sqrt(f1^2 + 4 sum |p_j|^2)) / 2
    double r = 0.0;     // R + 2 delta
    double tau = 0.0;   // coarse-grain timescale 2 pi / |f1|
    std::vector<std::string> retained;
};

// Picks the default retained set {Xi_{-R}, Xi_{-2-R}, Xi_{-4-R}} out of an
// expansion.
std::vector<HarmonicTerm> select_shift_terms(const std::vector<HarmonicTerm>& terms);

// Evaluates the shift from the given retained terms; f1 is the frequency of
// the largest-magnitude one. Throws CoarseGrainViolation when a retained
// term has |p_j| > 0.1 |f_j|.
FrequencyShift frequency_shift(const std::vector<HarmonicTerm>& retained,
                               const DerivedSrm& d);

// Convenience: derive -> expand(order 0) -> shift with the default set.
FrequencyShift frequency_shift_for(const SrmParams& p, const DerivedSrm& d);

// Self-consistent (2k+1)-photon resonance frequency
//   Omega_0 = nu + 2 sqrt((k nu - delta)^2 - g0^2),
// iterated to a fixed point because delta depends on Omega_0. Damped
// fixed-point iteration (relaxation 0.5) with a final undamped polish.
double resonance_omega0(int k, double g0, double nu, double tol = 1e-7,
                        int max_iter = 50);

// Total resonant transition rate Xi = |Xi| e^{i xi}.
struct ResonantRate {
    std::complex<double> xi;
    double magnitude = 0.0;
    double phase = 0.0;
    std::vector<std::string> contributing;
};

// Sums every tone whose re-centered frequency f_j - 2 delta satisfies
// |f_j - 2 delta| <= match_tol |p_j|. An empty match yields Xi = 0.
ResonantRate total_rate(const std::vector<HarmonicTerm>& terms,
                        const FrequencyShift& shift, double match_tol = 1.0);

// Per-term match flags against the grouped rule (aliased tones pool their
// amplitudes before the |f - 2 delta| <= tol |p| test).
std::vector<bool> match_flags(const std::vector<HarmonicTerm>& terms,
                              const FrequencyShift& shift, double match_tol);

// Tones that survive the slow/fast classification |f_j - 2 delta| <= c |p_j|.
std::vector<HarmonicTerm> slow_terms(const std::vector<HarmonicTerm>& terms,
                                     const FrequencyShift& shift, double c = 1.0);

} // namespace rabi
