#include "rabi/params.hpp"

#include <cmath>

namespace rabi {

void validate(const SrmParams& p) {
    if (!(p.nu > 0.0)) throw DomainError("SrmParams: nu must be positive");
    if (p.g0 < 0.0) throw DomainError("SrmParams: g0 must be non-negative");
    if (p.eta_omega < 0.0 || p.eta_g < 0.0)
        throw DomainError("SrmParams: modulation frequencies must be non-negative");
    if (p.eta_omega == 0.0 && p.eps_omega != 0.0)
        throw SingularModulation("SrmParams: eps_omega != 0 requires eta_omega > 0");
    if (p.eta_g == 0.0 && p.eps_g != 0.0)
        throw SingularModulation("SrmParams: eps_g != 0 requires eta_g > 0");
}

DerivedSrm derive_srm(const SrmParams& p) {
    validate(p);
    DerivedSrm d;
    const double det = p.nu - p.omega0;
    d.R = std::hypot(2.0 * p.g0, det);
    if (d.R == 0.0)
        throw DomainError("derive_srm: degenerate dressed splitting (g0 = 0 and omega0 = nu)");
    d.delta_tilde = det / d.R;
    d.g_tilde = p.g0 / d.R;
    d.r_plus = 0.5 * (1.0 + d.delta_tilde);
    d.r_minus = 0.5 * (1.0 - d.delta_tilde);

    d.upsilon[0] = 2.0 * p.g0 * d.g_tilde / p.nu;
    d.upsilon[1] = 0.0;
    if (p.eps_omega != 0.0)
        d.upsilon[1] = p.eps_omega * d.delta_tilde / p.eta_omega;
    d.upsilon[2] = d.upsilon[3] = d.upsilon[4] = 0.0;
    if (p.eps_g != 0.0) {
        if (p.eta_g == 2.0 * p.nu)
            throw SingularModulation("derive_srm: eta_g = 2 nu makes Upsilon_4 divergent");
        d.upsilon[2] = 4.0 * p.eps_g * d.g_tilde / p.eta_g;
        d.upsilon[3] = 2.0 * p.eps_g * d.g_tilde / (p.eta_g + 2.0 * p.nu);
        d.upsilon[4] = 2.0 * p.eps_g * d.g_tilde / (p.eta_g - 2.0 * p.nu);
    }
    d.phi = d.upsilon[1] - d.upsilon[2] - d.upsilon[3] - d.upsilon[4];
    for (double u : d.upsilon)
        if (!std::isfinite(u)) throw SingularModulation("derive_srm: non-finite Upsilon");
    return d;
}

QrmParams make_qrm_params(const SrmParams& srm, double alpha, int k_photon,
                          double tail_eps) {
    QrmParams q;
    q.srm = srm;
    q.alpha = alpha;
    q.check_g0 = alpha > 0.0 ? srm.g0 / alpha : 0.0;
    q.check_eps_g = alpha > 0.0 ? srm.eps_g / alpha : 0.0;
    q.k_photon = k_photon;
    q.tail_eps = tail_eps;
    validate(q);
    return q;
}

void validate(const QrmParams& p) {
    validate(p.srm);
    if (p.alpha < 0.0) throw DomainError("QrmParams: alpha must be non-negative");
    if (p.k_photon < 1 || p.k_photon % 2 == 0)
        throw DomainError("QrmParams: k_photon must be odd and >= 1");
    if (!(p.tail_eps > 0.0 && p.tail_eps < 1.0))
        throw DomainError("QrmParams: tail_eps must lie in (0, 1)");
}

} // namespace rabi
