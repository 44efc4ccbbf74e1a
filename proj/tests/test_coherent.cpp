#include <cmath>

#include <doctest.h>

#include "rabi/coherent.hpp"

using namespace rabi;

namespace {

// Independent scan oracle over log-weights.
FockWindow window_oracle(double alpha, double tail_eps) {
    const double log_eps = std::log(tail_eps);
    auto lw = [&](std::int64_t n) {
        return -0.5 * alpha * alpha + n * std::log(alpha) -
               0.5 * std::lgamma(static_cast<double>(n) + 1.0);
    };
    std::int64_t lo = static_cast<std::int64_t>(alpha * alpha);
    std::int64_t hi = lo;
    while (lo > 0 && lw(lo - 1) >= log_eps) --lo;
    while (lw(hi + 1) >= log_eps) ++hi;
    return {lo, hi};
}

} // namespace

TEST_CASE("fock_window vacuum") {
    const FockWindow w = fock_window(0.0, 1e-18);
    CHECK(w.n_min == 0);
    CHECK(w.n_max == 0);
}

TEST_CASE("fock_window boundary straddles the threshold") {
    for (double alpha2 : {5.0e3, 3.0e4}) {
        const double alpha = std::sqrt(alpha2);
        const FockWindow w = fock_window(alpha, 1e-18);
        const FockWindow o = window_oracle(alpha, 1e-18);
        CHECK(w.n_min == o.n_min);
        CHECK(w.n_max == o.n_max);
        CHECK(w.contains(static_cast<std::int64_t>(alpha2)));
        const double log_eps = std::log(1e-18);
        CHECK(coherent_log_weight(alpha, w.n_min) >= log_eps);
        CHECK(coherent_log_weight(alpha, w.n_max) >= log_eps);
        CHECK(coherent_log_weight(alpha, w.n_min - 1) < log_eps);
        CHECK(coherent_log_weight(alpha, w.n_max + 1) < log_eps);
        // amplitude threshold 1e-18 keeps roughly +-12.5 standard deviations
        const double width = static_cast<double>(w.size());
        CHECK(width > 14.0 * alpha);
        CHECK(width < 30.0 * alpha);
    }
}

TEST_CASE("coherent amplitudes: vacuum, phase freedom and norms") {
    CHECK(coherent_amplitudes(0.0, {0, 0}, 3.14).size() == 1);
    CHECK(std::abs(coherent_amplitudes(0.0, {0, 0}, 3.14)[0]) ==
          doctest::Approx(1.0).epsilon(1e-15));

    for (double alpha2 : {10.0, 5.0e3, 3.0e4}) {
        const double alpha = std::sqrt(alpha2);
        const FockWindow w = fock_window(alpha, 1e-18);
        const cvec c0 = coherent_amplitudes(alpha, w, 0.0);
        // all-real positive at t = 0, peaked near alpha^2
        std::size_t peak = 0;
        for (std::size_t j = 0; j < c0.size(); ++j) {
            CHECK(c0[j].imag() == 0.0);
            CHECK(c0[j].real() > 0.0);
            if (std::abs(c0[j]) > std::abs(c0[peak])) peak = j;
        }
        CHECK(std::abs(static_cast<double>(w.n_min + static_cast<std::int64_t>(peak)) -
                       alpha2) <= 1.0);
        // free evolution is a pure phase
        const cvec ct = coherent_amplitudes(alpha, w, 17.3);
        KahanSum norm0, normt;
        for (std::size_t j = 0; j < c0.size(); ++j) {
            CHECK(std::abs(ct[j]) == doctest::Approx(std::abs(c0[j])).epsilon(1e-14));
            norm0.add(std::norm(c0[j]));
            normt.add(std::norm(ct[j]));
        }
        CHECK(std::abs(norm0.value() - 1.0) <= 1e-15);
        CHECK(std::abs(normt.value() - 1.0) <= 1e-15);
    }
}

TEST_CASE("ground coherent state is normalized") {
    const FockWindow w = fock_window(5.0, 1e-18);
    const JointState psi = ground_coherent_state(5.0, w);
    CHECK(std::abs(psi.norm2() - 1.0) <= 1e-15);
    for (const auto& b : psi.amp_e) CHECK(b == cxd{0.0, 0.0});
}
