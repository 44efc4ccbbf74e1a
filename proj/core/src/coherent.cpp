#include "rabi/coherent.hpp"

#include <cmath>

namespace rabi {

double coherent_log_weight(double alpha, std::int64_t n) {
    if (alpha == 0.0) return n == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    return -0.5 * alpha * alpha + static_cast<double>(n) * std::log(alpha)
           - 0.5 * std::lgamma(static_cast<double>(n) + 1.0);
}

FockWindow fock_window(double alpha, double tail_eps) {
    if (alpha < 0.0) throw DomainError("fock_window: alpha must be non-negative");
    if (!(tail_eps > 0.0 && tail_eps < 1.0))
        throw DomainError("fock_window: tail_eps must lie in (0, 1)");
    if (alpha == 0.0) return {0, 0};

    const double log_eps = std::log(tail_eps);
    const auto above = [&](std::int64_t n) {
        return coherent_log_weight(alpha, n) >= log_eps;
    };
    std::int64_t center = static_cast<std::int64_t>(alpha * alpha);
    if (!above(center)) return {center, center}; // sub-threshold everywhere useful

    FockWindow w{center, center};
    while (w.n_min > 0 && above(w.n_min - 1)) --w.n_min;
    while (above(w.n_max + 1)) ++w.n_max;
    return w;
}

cvec coherent_amplitudes(double alpha, const FockWindow& w, double t, double nu) {
    cvec c(static_cast<std::size_t>(w.size()));
    KahanSum norm;
    for (std::int64_t n = w.n_min; n <= w.n_max; ++n) {
        const double mag = std::exp(coherent_log_weight(alpha, n));
        const double phase = -nu * t * static_cast<double>(n);
        c[static_cast<std::size_t>(n - w.n_min)] = std::polar(mag, phase);
        norm.add(mag * mag);
    }
    const double scale = 1.0 / std::sqrt(norm.value());
    for (auto& a : c) a *= scale;
    return c;
}

double JointState::norm2() const {
    KahanSum s;
    for (const auto& a : amp_g) s.add(std::norm(a));
    for (const auto& b : amp_e) s.add(std::norm(b));
    return s.value();
}

JointState ground_coherent_state(double alpha, const FockWindow& w, Frame frame) {
    JointState psi;
    psi.window = w;
    psi.frame = frame;
    psi.amp_g = coherent_amplitudes(alpha, w, 0.0);
    psi.amp_e.assign(psi.amp_g.size(), cxd{0.0, 0.0});
    return psi;
}

} // namespace rabi
