#pragma once

#include <array>
#include <cstdint>

#include "rabi/errors.hpp"

namespace rabi {

// All frequencies are stored in units of the field frequency nu (nu = 1 by
// convention), times in units of 1/nu, hbar = 1.

// Semiclassical model parameters. The drive is
//   Omega(t) = omega0 + eps_omega * sin(eta_omega * t)
//   g(t)     = g0     + eps_g     * sin(eta_g     * t)
struct SrmParams {
    double nu = 1.0;        // field angular frequency (reference unit)
    double omega0 = 0.0;    // bare qubit transition frequency
    double g0 = 0.0;        // bare atom-field coupling
    double eps_omega = 0.0; // qubit-frequency modulation amplitude
    double eps_g = 0.0;     // coupling modulation amplitude
    double eta_omega = 0.0; // qubit-frequency modulation frequency
    double eta_g = 0.0;     // coupling modulation frequency
};

// Throws on violated invariants (nu > 0, g0 >= 0, eta >= 0, zero-frequency
// modulations must carry zero amplitude).
void validate(const SrmParams& p);

// Constants derived from SrmParams: the dressed splitting of the static
// interaction-picture Hamiltonian and the phase-integral amplitudes
// Upsilon_0..Upsilon_4 entering T2(t).
struct DerivedSrm {
    double R = 0.0;           // sqrt(4 g0^2 + (nu - omega0)^2)
    double delta_tilde = 0.0; // (nu - omega0) / R
    double g_tilde = 0.0;     // g0 / R
    double r_plus = 0.0;      // (1 + delta_tilde) / 2
    double r_minus = 0.0;     // (1 - delta_tilde) / 2
    std::array<double, 5> upsilon{}; // Upsilon_0..Upsilon_4
    double phi = 0.0;         // Upsilon_1 - Upsilon_2 - Upsilon_3 - Upsilon_4
};

// Computes DerivedSrm. A modulation with zero amplitude contributes
// Upsilon = 0 regardless of its frequency; a nonzero amplitude with a
// singular frequency (eta_omega = 0, or eta_g in {0, 2 nu}) throws
// SingularModulation.
DerivedSrm derive_srm(const SrmParams& p);

// Quantum model parameters. The semiclassical correspondence is
// g(t) = alpha * check_g(t), so srm already holds g0 = alpha * check_g0.
struct QrmParams {
    SrmParams srm;           // equivalent semiclassical parameters
    double alpha = 0.0;      // coherent amplitude (real, >= 0)
    double check_g0 = 0.0;   // quantum coupling g0 / alpha
    double check_eps_g = 0.0;// quantum coupling-modulation amplitude
    int k_photon = 3;        // odd resonance order K
    double tail_eps = 1e-18; // coherent-tail truncation threshold
};

// Builds QrmParams from semiclassical parameters and alpha.
QrmParams make_qrm_params(const SrmParams& srm, double alpha, int k_photon = 3,
                          double tail_eps = 1e-18);

void validate(const QrmParams& p);

} // namespace rabi
