#pragma once

#include <cstdint>
#include <vector>

#include "rabi/coherent.hpp"

namespace rabi {

// Reduced 2x2 density operator of the qubit.
struct QubitDensity {
    double rho_gg = 0.0;
    double rho_ee = 0.0;
    cxd rho_ge{0.0, 0.0}; // <g| rho |e>

    double purity() const;
    // eigenvalues via the closed 2x2 formula, clamped to [0, 1]
    std::pair<double, double> eigenvalues() const;
};

QubitDensity qubit_density(const JointState& psi);

// P_e = sum |B_n|^2
double excitation_probability(const JointState& psi);

// <n(psi)> - <n(psi0)>
double mean_photon(const JointState& psi);
double mean_photon_delta(const JointState& psi, const JointState& psi0);

// (von Neumann, linear) entropies of either subsystem; 0 ln 0 = 0.
std::pair<double, double> entropies(const QubitDensity& rho);

// P_in = |<g, alpha(t)|psi>|^2 with alpha(t) = alpha e^{-i nu t}. In the
// rotating frame the free field evolution is already absorbed, so the static
// coherent amplitudes are used there.
double initial_fidelity(const JointState& psi, double alpha, double t,
                        double nu = 1.0);

// P_|alpha> = |<alpha(t)|a>|^2 + |<alpha(t)|b>|^2 over the two field vectors.
double coherent_fidelity(const JointState& psi, double alpha, double t,
                         double nu = 1.0);

// Purity of the field marginal, Tr rho_f^2 = |a|^4 + |b|^4 + 2 |<a|b>|^2.
// Schmidt symmetry makes it equal to the qubit purity.
double field_purity(const JointState& psi);

// Photon-number distribution snapshot p_n and its change against psi0.
struct PhotonDelta {
    FockWindow window;
    std::vector<double> p0;    // p_n at the reference state
    std::vector<double> pt;    // p_n at the snapshot
    std::vector<double> delta; // pt - p0
};

PhotonDelta photon_delta(const JointState& psi, const JointState& psi0);

// One row of every quantity tracked along a run. SRM engines fill only pe;
// the field-side entries stay NaN there.
struct ObservableSample {
    double t = 0.0;
    double pe = 0.0;
    double dn = 0.0;
    double s_vn = 0.0;
    double s_lin = 0.0;
    double p_init = 0.0;
    double p_coh = 0.0;
};

// Full QRM sample at time t.
ObservableSample observe(const JointState& psi, const JointState& psi0,
                         double alpha, double t, double nu = 1.0);

} // namespace rabi
