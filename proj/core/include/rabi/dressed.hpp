#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "rabi/coherent.hpp"
#include "rabi/ode.hpp"
#include "rabi/params.hpp"

namespace rabi {

// One (S_n, A_n) doublet: the near-degenerate eigenpair of the static
// Hamiltonian built on {|g,n>, |e,n-K>}. Energies carry the common shift
// -nu*n_min (pure gauge; only differences enter any observable).
struct DressedPair {
    std::int64_t n = 0;
    double energy_s = 0.0;
    double energy_a = 0.0;
    int col_s = -1; // eigenvector column indices into DressedBasis::evecs
    int col_a = -1;
    double mu = 0.0;          // <g,n|S_n>
    double sigma_small = 0.0; // -<e,n-1|S_n>
    double varpi = 0.0;       // <g,n-2|S_n>
};

// Full eigensystem of the static banded Hamiltonian over a window, with the
// doublet bookkeeping on top. Basis ordering: index 2j for |g, n_min+j>,
// 2j+1 for |e, n_min+j>.
struct DressedBasis {
    FockWindow window;
    int k_photon = 3;
    double energy_shift = 0.0; // subtracted from the diagonal: nu * n_min
    std::int64_t dim = 0;
    std::vector<double> evals;          // dim
    std::vector<double> evecs;          // dim x dim, column-major
    std::vector<DressedPair> pairs;     // ascending in n
    std::vector<int> unpaired;          // leftover eigencolumns (window edges)
    std::vector<std::pair<int, int>> support; // per column [lo, hi) above 1e-14

    const double* vec(int col) const {
        return evecs.data() + static_cast<std::size_t>(col) * dim;
    }
    const DressedPair* find_pair(std::int64_t n) const;
};

// Diagonalizes the static Hamiltonian (modulations off) on the window with a
// banded symmetric solver and pairs eigenvectors into (S_n, A_n) doublets by
// maximal overlap with {|g,n>, |e,n-K>}. The member whose doublet components
// carry the same relative sign is S_n. Throws PairingAmbiguity when the two
// best doublet overlaps of an eigenvector differ by less than 1e-3.
DressedBasis dressed_states(const QrmParams& p, const FockWindow& w);

enum class ModKind { omega, g };

// <a| W^(k) |b> with W^(Omega) = (eps_Omega/2) |e><e| and
// W^(g) = (check_eps_g/2)(a + a^dag)(sigma_+ + sigma_-); exact inner product
// over the eigenvector supports. Real-valued for the real symmetric problem.
double matrix_element(ModKind kind, const QrmParams& p, const DressedBasis& basis,
                      int col_a, int col_b);

// f_k(A,B) = | (|E_A - E_B| - eta_k) / W_{A,B}^(k) |; ZeroCoupling when the
// matrix element vanishes.
double figure_of_merit(ModKind kind, const QrmParams& p, const DressedBasis& basis,
                       int col_a, int col_b, double eta_k);

// Amplitudes over the dressed basis; c_s/c_a follow DressedBasis::pairs
// order, extras follow DressedBasis::unpaired.
struct DressedAmplitudes {
    std::vector<cxd> c_s;
    std::vector<cxd> c_a;
    std::vector<cxd> extras;
};

// Exact projections <S_n|psi>, <A_n|psi> (plus leftover columns, so the
// decomposition is complete). Raw basis amplitudes are used as stored.
DressedAmplitudes project_to_dressed(const JointState& psi, const DressedBasis& basis);

// Inverse of project_to_dressed at t = 0.
JointState reconstruct_from_dressed(const DressedAmplitudes& amps,
                                    const DressedBasis& basis);

// Reduced slow dynamics among dressed states: first order keeps the
// modulation-driven neighbor couplings (m +- 2 for the Omega channel,
// m +- 4 for the g channel, selected by the figure of merit), second order
// adds the eps_Omega*eps_g product channels at the combination frequencies
// eta_Omega +- eta_g. on_sample receives the reconstructed joint state.
// Throws ReductionInvalid when a diagonal element violates |W_AA| << eta.
struct ReducedOptions {
    double f_max = 3.0;     // retention threshold on |exponent| / |coefficient|
    double diag_ratio = 0.1;// ReductionInvalid when |W_AA| > diag_ratio * eta
    double rtol = 1e-10;
    double atol = 1e-12;
    int max_neighbor = 6;   // scan |dn| <= max_neighbor for couplings
};

OdeStats evolve_dressed_slow(
    const DressedBasis& basis, const QrmParams& p, const DressedAmplitudes& amps0,
    int order, double t0, double t1, const std::vector<double>& sample_times,
    const std::function<void(std::size_t, double, const JointState&)>& on_sample,
    const ReducedOptions& opt = {});

} // namespace rabi
