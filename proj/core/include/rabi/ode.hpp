#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "rabi/errors.hpp"

namespace rabi {

// Embedded Verner 6(5) pair (the 8-stage tableau used by DVERK): the
// 6th-order solution propagates, the 5th-order one drives the error
// estimate. Step size follows a PI controller.

struct OdeOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    double h_init = 0.0; // 0 = choose automatically
    double h_max = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 400'000'000;
};

struct OdeStats {
    std::size_t n_accepted = 0;
    std::size_t n_rejected = 0;
    std::size_t n_rhs = 0;
};

namespace verner65 {

inline constexpr double c2 = 1.0 / 6, c3 = 4.0 / 15, c4 = 2.0 / 3, c5 = 5.0 / 6,
                        c6 = 1.0, c7 = 1.0 / 15, c8 = 1.0;

inline constexpr double a21 = 1.0 / 6;
inline constexpr double a31 = 4.0 / 75, a32 = 16.0 / 75;
inline constexpr double a41 = 5.0 / 6, a42 = -8.0 / 3, a43 = 5.0 / 2;
inline constexpr double a51 = -165.0 / 64, a52 = 55.0 / 6, a53 = -425.0 / 64,
                        a54 = 85.0 / 96;
inline constexpr double a61 = 12.0 / 5, a62 = -8.0, a63 = 4015.0 / 612,
                        a64 = -11.0 / 36, a65 = 88.0 / 255;
inline constexpr double a71 = -8263.0 / 15000, a72 = 124.0 / 75, a73 = -643.0 / 680,
                        a74 = -81.0 / 250, a75 = 2484.0 / 10625;
inline constexpr double a81 = 3501.0 / 1720, a82 = -300.0 / 43,
                        a83 = 297275.0 / 52632, a84 = -319.0 / 2322,
                        a85 = 24068.0 / 84065, a87 = 3850.0 / 26703;

// 6th order weights (stages 1,3,4,5,7,8)
inline constexpr double b1 = 3.0 / 40, b3 = 875.0 / 2244, b4 = 23.0 / 72,
                        b5 = 264.0 / 1955, b7 = 125.0 / 11592, b8 = 43.0 / 616;
// embedded 5th order weights (stages 1,3,4,5,6)
inline constexpr double e1 = 13.0 / 160, e3 = 2375.0 / 5984, e4 = 5.0 / 16,
                        e5 = 12.0 / 85, e6 = 3.0 / 44;

} // namespace verner65

// Integrates y' = f(t, y) from span[0] to span[1], invoking on_sample at
// every requested time (steps land exactly on sample points; sample times
// must be strictly increasing within the span). State is a flat complex
// vector. Throws StepFailure when the controller cannot advance.
template <class Rhs, class OnSample>
OdeStats integrate_adaptive(Rhs&& rhs, std::vector<std::complex<double>> y,
                            double t0, double t1,
                            const std::vector<double>& sample_times,
                            OnSample&& on_sample, const OdeOptions& opt = {}) {
    namespace tb = verner65;
    using cvec = std::vector<std::complex<double>>;
    const std::size_t n = y.size();
    OdeStats stats;

    cvec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), k8(n), work(n), ynew(n);

    auto stage = [&](const cvec& base, cvec& out, double t, double h,
                     std::initializer_list<std::pair<const cvec*, double>> terms) {
        for (std::size_t i = 0; i < n; ++i) {
            std::complex<double> acc = base[i];
            for (const auto& [k, a] : terms) acc += (h * a) * (*k)[i];
            work[i] = acc;
        }
        rhs(t, work, out);
        ++stats.n_rhs;
    };

    double t = t0;
    const double span = t1 - t0;
    double h = opt.h_init > 0.0 ? opt.h_init : std::min(opt.h_max, 1e-2 * span + 1e-12);
    double err_prev = 1.0;
    std::size_t next_sample = 0;

    auto emit_samples_at = [&](double tc, const cvec& yc) {
        while (next_sample < sample_times.size() &&
               std::abs(sample_times[next_sample] - tc) <=
                   1e-9 * (std::abs(tc) + 1.0)) {
            on_sample(next_sample, tc, yc);
            ++next_sample;
        }
    };
    emit_samples_at(t0, y);

    std::size_t steps = 0;
    while (t < t1 - 1e-12 * (std::abs(t1) + 1.0)) {
        if (++steps > opt.max_steps) throw StepFailure("integrate_adaptive: step budget exhausted");
        h = std::min({h, opt.h_max, t1 - t});
        if (next_sample < sample_times.size())
            h = std::min(h, sample_times[next_sample] - t);
        if (!(h > 0.0)) throw StepFailure("integrate_adaptive: step underflow");

        rhs(t, y, k1);
        ++stats.n_rhs;
        stage(y, k2, t + tb::c2 * h, h, {{&k1, tb::a21}});
        stage(y, k3, t + tb::c3 * h, h, {{&k1, tb::a31}, {&k2, tb::a32}});
        stage(y, k4, t + tb::c4 * h, h, {{&k1, tb::a41}, {&k2, tb::a42}, {&k3, tb::a43}});
        stage(y, k5, t + tb::c5 * h, h,
              {{&k1, tb::a51}, {&k2, tb::a52}, {&k3, tb::a53}, {&k4, tb::a54}});
        stage(y, k6, t + tb::c6 * h, h,
              {{&k1, tb::a61}, {&k2, tb::a62}, {&k3, tb::a63}, {&k4, tb::a64}, {&k5, tb::a65}});
        stage(y, k7, t + tb::c7 * h, h,
              {{&k1, tb::a71}, {&k2, tb::a72}, {&k3, tb::a73}, {&k4, tb::a74}, {&k5, tb::a75}});
        stage(y, k8, t + tb::c8 * h, h,
              {{&k1, tb::a81}, {&k2, tb::a82}, {&k3, tb::a83}, {&k4, tb::a84},
               {&k5, tb::a85}, {&k7, tb::a87}});

        double err_sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::complex<double> y6 =
                y[i] + h * (tb::b1 * k1[i] + tb::b3 * k3[i] + tb::b4 * k4[i] +
                            tb::b5 * k5[i] + tb::b7 * k7[i] + tb::b8 * k8[i]);
            const std::complex<double> y5 =
                y[i] + h * (tb::e1 * k1[i] + tb::e3 * k3[i] + tb::e4 * k4[i] +
                            tb::e5 * k5[i] + tb::e6 * k6[i]);
            ynew[i] = y6;
            const double sc =
                opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y6));
            const double e = std::abs(y6 - y5) / sc;
            err_sq += e * e;
        }
        const double err = std::sqrt(err_sq / static_cast<double>(n));

        if (err <= 1.0) {
            t += h;
            y.swap(ynew);
            emit_samples_at(t, y);
            ++stats.n_accepted;
            const double e = std::max(err, 1e-10);
            double fac = 0.9 * std::pow(e, -0.7 / 6.0) * std::pow(err_prev, 0.4 / 6.0);
            fac = std::clamp(fac, 0.2, 5.0);
            h *= fac;
            err_prev = e;
        } else {
            ++stats.n_rejected;
            h *= std::max(0.2, 0.9 * std::pow(err, -1.0 / 6.0));
            if (h < 1e-14 * (std::abs(t) + 1.0))
                throw StepFailure("integrate_adaptive: tolerance unreachable");
        }
    }
    // flush samples that coincide with t1 within roundoff
    emit_samples_at(t, y);
    return stats;
}

} // namespace rabi
