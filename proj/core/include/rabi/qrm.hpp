#pragma once

#include <functional>

#include "rabi/coherent.hpp"
#include "rabi/ode.hpp"
#include "rabi/params.hpp"

namespace rabi {

// Matrix-free action of the quantum Rabi Hamiltonian
//   H = nu n + Omega(t) |e><e| + g(t) (a + a^dag)(sigma_+ + sigma_-)
// on the truncated window. |g,n> couples only to |e,n+-1>, so one
// application costs O(window). In the rotating frame the diagonal nu*n term
// is absent and the coupling bands carry phases e^{+-i nu t}.
class HamiltonianAction {
public:
    HamiltonianAction(const QrmParams& p, const FockWindow& w, Frame frame);

    // out = H(t) in
    void apply(double t, const cvec& in_g, const cvec& in_e, cvec& out_g,
               cvec& out_e) const;

    // Flat layout [A_0..A_{W-1} | B_0..B_{W-1}]; the integrator hot path.
    void apply_flat(double t, const cxd* in, cxd* out) const;

    // out = H0 in, the static Hamiltonian (modulations off) expressed in
    // this frame at time t. For unmodulated parameters this equals apply().
    void apply_static(double t, const cvec& in_g, const cvec& in_e, cvec& out_g,
                      cvec& out_e) const;

    // <psi| H0 |psi> for a state stored in this frame at time t (real up to
    // rounding; the imaginary part is discarded).
    double static_energy(const JointState& psi, double t) const;

    const QrmParams& params() const { return params_; }
    const FockWindow& window() const { return window_; }
    Frame frame() const { return frame_; }
    std::int64_t dim() const { return 2 * window_.size(); }

private:
    void apply_impl(double omega, double coupling, bool diag_nu, double t,
                    const cxd* in_g, const cxd* in_e, cxd* out_g,
                    cxd* out_e) const;

    QrmParams params_;
    FockWindow window_;
    Frame frame_;
    std::vector<double> sq_; // sq_[j] = sqrt(n_min + j), j = 0..size
};

HamiltonianAction build_hamiltonian(const QrmParams& p, const FockWindow& w,
                                    Frame frame);

struct IntegrationResult {
    OdeStats stats;
    double max_norm_drift = 0.0; // max |norm^2 - 1| seen at sample points
};

// Integrates i psi' = H(t) psi from t0 to t1, invoking on_sample at the
// requested times. Norm drift is monitored at samples and never silently
// repaired; drift beyond 1e-6 throws NormDrift.
IntegrationResult integrate_schrodinger(
    const HamiltonianAction& h, const JointState& psi0, double t0, double t1,
    const std::vector<double>& sample_times,
    const std::function<void(std::size_t, double, const JointState&)>& on_sample,
    double rtol = 1e-8, double atol = 1e-10);

// Convenience wrapper storing the sampled trajectory (small problems only).
std::vector<JointState> integrate_schrodinger_trajectory(
    const HamiltonianAction& h, const JointState& psi0, double t0, double t1,
    const std::vector<double>& sample_times, double rtol = 1e-8,
    double atol = 1e-10);

} // namespace rabi
