#include <cmath>
#include <complex>
#include <vector>

#include <doctest.h>

#include "rabi/ode.hpp"

using namespace rabi;
using cvec = std::vector<std::complex<double>>;

namespace {

// first-order quadrature conditions sum b_i c_i^k = 1/(k+1)
double weight_moment(const double* b, const double* c, int n, int k) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += b[i] * std::pow(c[i], k);
    return acc;
}

} // namespace

TEST_CASE("Verner tableau consistency") {
    namespace tb = verner65;
    const double c[8] = {0, tb::c2, tb::c3, tb::c4, tb::c5, tb::c6, tb::c7, tb::c8};
    const double b6[8] = {tb::b1, 0, tb::b3, tb::b4, tb::b5, 0, tb::b7, tb::b8};
    const double b5[8] = {tb::e1, 0, tb::e3, tb::e4, tb::e5, tb::e6, 0, 0};

    // row sums equal the nodes
    CHECK(tb::a21 == doctest::Approx(tb::c2).epsilon(1e-15));
    CHECK(tb::a31 + tb::a32 == doctest::Approx(tb::c3).epsilon(1e-14));
    CHECK(tb::a41 + tb::a42 + tb::a43 == doctest::Approx(tb::c4).epsilon(1e-13));
    CHECK(tb::a51 + tb::a52 + tb::a53 + tb::a54 ==
          doctest::Approx(tb::c5).epsilon(1e-13));
    CHECK(tb::a61 + tb::a62 + tb::a63 + tb::a64 + tb::a65 ==
          doctest::Approx(tb::c6).epsilon(1e-12));
    CHECK(tb::a71 + tb::a72 + tb::a73 + tb::a74 + tb::a75 ==
          doctest::Approx(tb::c7).epsilon(1e-12));
    CHECK(tb::a81 + tb::a82 + tb::a83 + tb::a84 + tb::a85 + tb::a87 ==
          doctest::Approx(tb::c8).epsilon(1e-12));

    // quadrature-order conditions for both weight sets
    for (int k = 0; k <= 5; ++k)
        CHECK(weight_moment(b6, c, 8, k) ==
              doctest::Approx(1.0 / (k + 1)).epsilon(1e-12));
    for (int k = 0; k <= 4; ++k)
        CHECK(weight_moment(b5, c, 8, k) ==
              doctest::Approx(1.0 / (k + 1)).epsilon(1e-12));
}

TEST_CASE("empirical convergence order of the propagating solution") {
    // y' = i w y on [0, 2], fixed step via h_init = h_max, huge tolerance
    const std::complex<double> iw{0.0, 2.0};
    auto rhs = [&](double, const cvec& y, cvec& dy) { dy[0] = iw * y[0]; };
    auto err_for = [&](double h) {
        OdeOptions opt;
        opt.rtol = 1.0;
        opt.atol = 1.0;
        opt.h_init = h;
        opt.h_max = h;
        std::complex<double> last;
        integrate_adaptive(rhs, cvec{{1.0, 0.0}}, 0.0, 2.0, {2.0},
                           [&](std::size_t, double, const cvec& y) { last = y[0]; },
                           opt);
        return std::abs(last - std::exp(iw * 2.0));
    };
    const double e1 = err_for(0.05);
    const double e2 = err_for(0.025);
    const double order = std::log2(e1 / e2);
    CHECK(order > 5.7);
    CHECK(order < 6.4);
}

TEST_CASE("adaptive integration meets tolerance and hits samples exactly") {
    const std::complex<double> iw{0.0, 1.0};
    auto rhs = [&](double, const cvec& y, cvec& dy) { dy[0] = iw * y[0]; };
    std::vector<double> samples{7.1, 13.0, 29.999, 50.0};
    std::vector<double> seen;
    OdeOptions opt;
    opt.rtol = 1e-10;
    opt.atol = 1e-10;
    integrate_adaptive(rhs, cvec{{1.0, 0.0}}, 0.0, 50.0, samples,
                       [&](std::size_t i, double t, const cvec& y) {
                           seen.push_back(t);
                           CHECK(i == seen.size() - 1);
                           CHECK(std::abs(y[0] - std::exp(iw * t)) < 1e-8);
                           CHECK(std::abs(std::abs(y[0]) - 1.0) < 1e-10);
                       },
                       opt);
    REQUIRE(seen.size() == samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k)
        CHECK(seen[k] == doctest::Approx(samples[k]).epsilon(1e-12));
}

TEST_CASE("finite-time blow-up raises StepFailure") {
    // y' = y^2 with y(0) = 1 blows up at t = 1
    auto rhs = [](double, const cvec& y, cvec& dy) { dy[0] = y[0] * y[0]; };
    OdeOptions opt;
    CHECK_THROWS_AS(integrate_adaptive(rhs, cvec{{1.0, 0.0}}, 0.0, 2.0, {},
                                       [](std::size_t, double, const cvec&) {}, opt),
                    StepFailure);
}
