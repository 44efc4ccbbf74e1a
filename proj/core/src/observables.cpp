#include "rabi/observables.hpp"

#include <algorithm>
#include <cmath>

namespace rabi {

double QubitDensity::purity() const {
    return rho_gg * rho_gg + rho_ee * rho_ee + 2.0 * std::norm(rho_ge);
}

std::pair<double, double> QubitDensity::eigenvalues() const {
    const double mid = 0.5 * (rho_gg + rho_ee);
    const double rad = std::sqrt(0.25 * (rho_gg - rho_ee) * (rho_gg - rho_ee) +
                                 std::norm(rho_ge));
    const double lo = std::clamp(mid - rad, 0.0, 1.0);
    const double hi = std::clamp(mid + rad, 0.0, 1.0);
    return {hi, lo};
}

QubitDensity qubit_density(const JointState& psi) {
    QubitDensity rho;
    KahanSum gg, ee;
    cxd ge{0.0, 0.0};
    for (std::size_t j = 0; j < psi.amp_g.size(); ++j) {
        gg.add(std::norm(psi.amp_g[j]));
        ee.add(std::norm(psi.amp_e[j]));
        ge += psi.amp_g[j] * std::conj(psi.amp_e[j]);
    }
    rho.rho_gg = gg.value();
    rho.rho_ee = ee.value();
    rho.rho_ge = ge;
    return rho;
}

double excitation_probability(const JointState& psi) {
    KahanSum s;
    for (const auto& b : psi.amp_e) s.add(std::norm(b));
    return s.value();
}

double mean_photon(const JointState& psi) {
    KahanSum s;
    for (std::size_t j = 0; j < psi.amp_g.size(); ++j) {
        const double n = static_cast<double>(psi.window.n_min +
                                             static_cast<std::int64_t>(j));
        s.add(n * (std::norm(psi.amp_g[j]) + std::norm(psi.amp_e[j])));
    }
    return s.value();
}

double mean_photon_delta(const JointState& psi, const JointState& psi0) {
    return mean_photon(psi) - mean_photon(psi0);
}

std::pair<double, double> entropies(const QubitDensity& rho) {
    const auto [l1, l2] = rho.eigenvalues();
    auto xlnx = [](double x) { return x > 0.0 ? x * std::log(x) : 0.0; };
    const double s_vn = -xlnx(l1) - xlnx(l2);
    const double s_lin = 1.0 - rho.purity();
    return {std::max(0.0, s_vn), std::max(0.0, s_lin)};
}

namespace {

// <alpha(t)|v> for a field vector v over the window.
cxd coherent_overlap(const cvec& v, const FockWindow& w, double alpha, double t,
                     double nu, Frame frame) {
    // rotating frame: e^{i nu n t} already multiplies the state, cancelling
    // the free coherent phases exactly
    const double phase_t = frame == Frame::rotating ? 0.0 : t;
    cxd acc{0.0, 0.0};
    for (std::int64_t n = w.n_min; n <= w.n_max; ++n) {
        const double mag = std::exp(coherent_log_weight(alpha, n));
        const cxd cn = std::polar(mag, -nu * phase_t * static_cast<double>(n));
        acc += std::conj(cn) * v[static_cast<std::size_t>(n - w.n_min)];
    }
    return acc;
}

} // namespace

double initial_fidelity(const JointState& psi, double alpha, double t, double nu) {
    return std::norm(coherent_overlap(psi.amp_g, psi.window, alpha, t, nu,
                                      psi.frame));
}

double coherent_fidelity(const JointState& psi, double alpha, double t, double nu) {
    return std::norm(coherent_overlap(psi.amp_g, psi.window, alpha, t, nu,
                                      psi.frame)) +
           std::norm(coherent_overlap(psi.amp_e, psi.window, alpha, t, nu,
                                      psi.frame));
}

double field_purity(const JointState& psi) {
    KahanSum na, nb;
    cxd ab{0.0, 0.0};
    for (std::size_t j = 0; j < psi.amp_g.size(); ++j) {
        na.add(std::norm(psi.amp_g[j]));
        nb.add(std::norm(psi.amp_e[j]));
        ab += std::conj(psi.amp_g[j]) * psi.amp_e[j];
    }
    const double a2 = na.value();
    const double b2 = nb.value();
    return a2 * a2 + b2 * b2 + 2.0 * std::norm(ab);
}

PhotonDelta photon_delta(const JointState& psi, const JointState& psi0) {
    if (psi.window.n_min != psi0.window.n_min ||
        psi.window.n_max != psi0.window.n_max)
        throw DomainError("photon_delta: window mismatch");
    PhotonDelta d;
    d.window = psi.window;
    const std::size_t size = psi.amp_g.size();
    d.p0.resize(size);
    d.pt.resize(size);
    d.delta.resize(size);
    // probability distributions of the states as such: divide out the norm,
    // so sum p = 1 and sum delta = 0 hold regardless of integrator drift
    // (the drift itself is reported by the integrator, not hidden here)
    const double s0 = 1.0 / psi0.norm2();
    const double st = 1.0 / psi.norm2();
    for (std::size_t j = 0; j < size; ++j) {
        d.p0[j] = s0 * (std::norm(psi0.amp_g[j]) + std::norm(psi0.amp_e[j]));
        d.pt[j] = st * (std::norm(psi.amp_g[j]) + std::norm(psi.amp_e[j]));
        d.delta[j] = d.pt[j] - d.p0[j];
    }
    return d;
}

ObservableSample observe(const JointState& psi, const JointState& psi0,
                         double alpha, double t, double nu) {
    ObservableSample s;
    s.t = t;
    const QubitDensity rho = qubit_density(psi);
    s.pe = rho.rho_ee;
    s.dn = mean_photon_delta(psi, psi0);
    std::tie(s.s_vn, s.s_lin) = entropies(rho);
    s.p_init = initial_fidelity(psi, alpha, t, nu);
    s.p_coh = coherent_fidelity(psi, alpha, t, nu);
    return s;
}

} // namespace rabi
