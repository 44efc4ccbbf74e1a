#pragma once

#include "rabi/errors.hpp"

namespace rabi {

// Bessel function of the first kind J_n(x) for the small arguments this
// library needs (|x| <= 10, n <= 8). Ascending power series for |x| <= 0.5,
// Miller downward recurrence otherwise; absolute accuracy 1e-12 on the
// stated domain. Throws DomainError outside it.
double bessel_j(int n, double x);

} // namespace rabi
