#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "rabi/errors.hpp"

namespace rabi {

using cxd = std::complex<double>;
using cvec = std::vector<cxd>;

// Contiguous photon-number range [n_min, n_max] keeping every coherent
// amplitude above the tail threshold.
struct FockWindow {
    std::int64_t n_min = 0;
    std::int64_t n_max = 0;

    std::int64_t size() const { return n_max - n_min + 1; }
    bool contains(std::int64_t n) const { return n >= n_min && n <= n_max; }
};

// log |<n|alpha>| = -alpha^2/2 + n ln(alpha) - lgamma(n+1)/2, safe for
// n ~ 3e4 where raw factorials overflow.
double coherent_log_weight(double alpha, std::int64_t n);

// Smallest window such that |<n|alpha>| < tail_eps for every n outside,
// n_min clamped at 0. Linear scan outward from n = alpha^2.
FockWindow fock_window(double alpha, double tail_eps);

// c_n(t) = e^{-alpha^2/2} (alpha e^{-i nu t})^n / sqrt(n!) over the window,
// evaluated in log domain and normalized so that sum |c_n|^2 = 1 exactly
// (the raw log-gamma evaluation carries ~1e-11 relative error at n ~ 3e4).
cvec coherent_amplitudes(double alpha, const FockWindow& w, double t,
                         double nu = 1.0);

enum class Frame {
    lab,      // full Hamiltonian, diagonal nu*n term present
    rotating, // frame rotating at nu*n_hat; coupling carries e^{+-i nu t}
};

// Joint atom-field state over the truncated {|g,n>, |e,n>} basis.
struct JointState {
    FockWindow window;
    cvec amp_g; // A_n
    cvec amp_e; // B_n
    Frame frame = Frame::rotating;

    double norm2() const;
};

// |g> tensor |alpha(t=0)>.
JointState ground_coherent_state(double alpha, const FockWindow& w,
                                 Frame frame = Frame::rotating);

// Compensated (Kahan) accumulation; used wherever 1e-15-level sums matter.
class KahanSum {
public:
    void add(double x) {
        const double y = x - c_;
        const double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

} // namespace rabi
