#include "rabi/qrm.hpp"

#include <cmath>

namespace rabi {

HamiltonianAction::HamiltonianAction(const QrmParams& p, const FockWindow& w,
                                     Frame frame)
    : params_(p), window_(w), frame_(frame) {
    validate(p);
    if (w.n_min < 0 || w.n_max < w.n_min)
        throw DomainError("HamiltonianAction: invalid Fock window");
    const std::size_t size = static_cast<std::size_t>(w.size());
    sq_.resize(size + 1);
    for (std::size_t j = 0; j <= size; ++j)
        sq_[j] = std::sqrt(static_cast<double>(w.n_min + static_cast<std::int64_t>(j)));
}

void HamiltonianAction::apply_impl(double omega, double coupling, bool diag_nu,
                                   double t, const cxd* in_g, const cxd* in_e,
                                   cxd* out_g, cxd* out_e) const {
    const std::size_t size = static_cast<std::size_t>(window_.size());
    const double nu = params_.srm.nu;

    if (frame_ == Frame::rotating) {
        const cxd u = std::polar(coupling, nu * t); // g(t) e^{+i nu t}
        const cxd uc = std::conj(u);
        // (H psi)_{g,n} = g(t) [ e^{i nu t} sqrt(n) B_{n-1} + e^{-i nu t} sqrt(n+1) B_{n+1} ]
        // (H psi)_{e,n} = Omega(t) B_n + g(t) [ e^{-i nu t} sqrt(n+1) A_{n+1} + e^{i nu t} sqrt(n) A_{n-1} ]
        const std::size_t last = size - 1;
        for (std::size_t j = 0; j < size; ++j) {
            cxd g_acc{0.0, 0.0};
            cxd e_acc = omega * in_e[j];
            if (j > 0) {
                g_acc += (u * sq_[j]) * in_e[j - 1];
                e_acc += (u * sq_[j]) * in_g[j - 1];
            }
            if (j < last) {
                g_acc += (uc * sq_[j + 1]) * in_e[j + 1];
                e_acc += (uc * sq_[j + 1]) * in_g[j + 1];
            }
            out_g[j] = g_acc;
            out_e[j] = e_acc;
        }
    } else {
        const std::size_t last = size - 1;
        for (std::size_t j = 0; j < size; ++j) {
            const double n = static_cast<double>(window_.n_min +
                                                 static_cast<std::int64_t>(j));
            const double diag = diag_nu ? nu * n : 0.0;
            cxd g_acc = diag * in_g[j];
            cxd e_acc = (diag + omega) * in_e[j];
            if (j > 0) {
                g_acc += (coupling * sq_[j]) * in_e[j - 1];
                e_acc += (coupling * sq_[j]) * in_g[j - 1];
            }
            if (j < last) {
                g_acc += (coupling * sq_[j + 1]) * in_e[j + 1];
                e_acc += (coupling * sq_[j + 1]) * in_g[j + 1];
            }
            out_g[j] = g_acc;
            out_e[j] = e_acc;
        }
    }
}

void HamiltonianAction::apply(double t, const cvec& in_g, const cvec& in_e,
                              cvec& out_g, cvec& out_e) const {
    const std::size_t size = static_cast<std::size_t>(window_.size());
    out_g.resize(size);
    out_e.resize(size);
    const SrmParams& s = params_.srm;
    const double omega = s.omega0 + s.eps_omega * std::sin(s.eta_omega * t);
    const double coupling =
        params_.check_g0 + params_.check_eps_g * std::sin(s.eta_g * t);
    apply_impl(omega, coupling, frame_ == Frame::lab, t, in_g.data(), in_e.data(),
               out_g.data(), out_e.data());
}

void HamiltonianAction::apply_flat(double t, const cxd* in, cxd* out) const {
    const std::size_t size = static_cast<std::size_t>(window_.size());
    const SrmParams& s = params_.srm;
    const double omega = s.omega0 + s.eps_omega * std::sin(s.eta_omega * t);
    const double coupling =
        params_.check_g0 + params_.check_eps_g * std::sin(s.eta_g * t);
    apply_impl(omega, coupling, frame_ == Frame::lab, t, in, in + size, out,
               out + size);
}

void HamiltonianAction::apply_static(double t, const cvec& in_g, const cvec& in_e,
                                     cvec& out_g, cvec& out_e) const {
    const std::size_t size = static_cast<std::size_t>(window_.size());
    out_g.resize(size);
    out_e.resize(size);
    // H0 always contains nu*n; in the rotating frame that diagonal piece is
    // added explicitly on top of the phase-dressed coupling.
    apply_impl(params_.srm.omega0, params_.check_g0, frame_ == Frame::lab, t,
               in_g.data(), in_e.data(), out_g.data(), out_e.data());
    if (frame_ == Frame::rotating) {
        const double nu = params_.srm.nu;
        for (std::size_t j = 0; j < size; ++j) {
            const double n = static_cast<double>(window_.n_min +
                                                 static_cast<std::int64_t>(j));
            out_g[j] += nu * n * in_g[j];
            out_e[j] += nu * n * in_e[j];
        }
    }
}

double HamiltonianAction::static_energy(const JointState& psi, double t) const {
    cvec hg, he;
    apply_static(t, psi.amp_g, psi.amp_e, hg, he);
    KahanSum re;
    for (std::size_t j = 0; j < psi.amp_g.size(); ++j) {
        re.add(std::real(std::conj(psi.amp_g[j]) * hg[j]));
        re.add(std::real(std::conj(psi.amp_e[j]) * he[j]));
    }
    return re.value();
}

HamiltonianAction build_hamiltonian(const QrmParams& p, const FockWindow& w,
                                    Frame frame) {
    return HamiltonianAction(p, w, frame);
}

IntegrationResult integrate_schrodinger(
    const HamiltonianAction& h, const JointState& psi0, double t0, double t1,
    const std::vector<double>& sample_times,
    const std::function<void(std::size_t, double, const JointState&)>& on_sample,
    double rtol, double atol) {
    if (psi0.window.n_min != h.window().n_min ||
        psi0.window.n_max != h.window().n_max)
        throw DomainError("integrate_schrodinger: state window mismatch");
    const std::size_t size = psi0.amp_g.size();

    std::vector<cxd> y(2 * size);
    std::copy(psi0.amp_g.begin(), psi0.amp_g.end(), y.begin());
    std::copy(psi0.amp_e.begin(), psi0.amp_e.end(), y.begin() + size);

    auto rhs = [&](double t, const std::vector<cxd>& v, std::vector<cxd>& dv) {
        h.apply_flat(t, v.data(), dv.data());
        for (auto& x : dv) x = cxd{x.imag(), -x.real()}; // multiply by -i
    };

    JointState scratch;
    scratch.window = psi0.window;
    scratch.frame = psi0.frame;
    scratch.amp_g.resize(size);
    scratch.amp_e.resize(size);

    IntegrationResult result;
    OdeOptions opt;
    opt.rtol = rtol;
    opt.atol = atol;
    auto emit = [&](std::size_t i, double t, const std::vector<cxd>& v) {
        std::copy(v.begin(), v.begin() + size, scratch.amp_g.begin());
        std::copy(v.begin() + size, v.end(), scratch.amp_e.begin());
        const double drift = std::abs(scratch.norm2() - 1.0);
        result.max_norm_drift = std::max(result.max_norm_drift, drift);
        if (drift > 1e-6)
            throw NormDrift("integrate_schrodinger: norm drift " +
                            std::to_string(drift));
        if (on_sample) on_sample(i, t, scratch);
    };
    result.stats = integrate_adaptive(rhs, std::move(y), t0, t1, sample_times,
                                      emit, opt);
    return result;
}

std::vector<JointState> integrate_schrodinger_trajectory(
    const HamiltonianAction& h, const JointState& psi0, double t0, double t1,
    const std::vector<double>& sample_times, double rtol, double atol) {
    std::vector<JointState> traj(sample_times.size());
    integrate_schrodinger(
        h, psi0, t0, t1, sample_times,
        [&](std::size_t i, double, const JointState& psi) { traj[i] = psi; },
        rtol, atol);
    return traj;
}

} // namespace rabi
