#include "rabi/special.hpp"

#include <cmath>
#include <vector>

namespace rabi {

namespace {

// Sum_m (-1)^m (x/2)^(n+2m) / (m! (n+m)!), converges fast for |x| <= 0.5.
double bessel_series(int n, double x) {
    const double h = 0.5 * x;
    double term = 1.0;
    for (int k = 1; k <= n; ++k) term *= h / k;
    double sum = term;
    const double h2 = h * h;
    for (int m = 1; m < 64; ++m) {
        term *= -h2 / (static_cast<double>(m) * (n + m));
        sum += term;
        if (std::abs(term) < 1e-18 * (std::abs(sum) + 1e-30)) break;
    }
    return sum;
}

// Downward recurrence J_{k-1} = (2k/x) J_k - J_{k+1}, normalized with
// J_0 + 2 sum_k J_{2k} = 1.
double bessel_miller(int n, double x) {
    const int start = n + 16 + static_cast<int>(2.0 * std::abs(x));
    std::vector<double> j(start + 2, 0.0);
    j[start + 1] = 0.0;
    j[start] = 1e-30;
    for (int k = start; k > 0; --k)
        j[k - 1] = (2.0 * k / x) * j[k] - j[k + 1];
    double norm = j[0];
    for (int k = 2; k <= start; k += 2) norm += 2.0 * j[k];
    return j[n] / norm;
}

} // namespace

double bessel_j(int n, double x) {
    if (n < 0 || n > 8) throw DomainError("bessel_j: order must lie in [0, 8]");
    if (!(std::abs(x) <= 10.0)) throw DomainError("bessel_j: |x| must be <= 10");
    if (x == 0.0) return n == 0 ? 1.0 : 0.0;
    // J_n(-x) = (-1)^n J_n(x)
    const double sign = (x < 0.0 && n % 2 == 1) ? -1.0 : 1.0;
    const double ax = std::abs(x);
    if (ax <= 0.5) return sign * bessel_series(n, ax);
    return sign * bessel_miller(n, ax);
}

} // namespace rabi
