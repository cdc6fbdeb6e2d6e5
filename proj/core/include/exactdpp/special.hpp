#pragma once

namespace exactdpp::special {

// Error function family, from W. J. Cody's rational Chebyshev approximations
// ("Rational Chebyshev approximations for the error function", Math. Comp. 23,
// 1969) as distributed in netlib specfun/erf. Relative error is below 1e-16
// on all three argument ranges in IEEE double.

double erf(double x);
double erfc(double x);

/// erf(x) - erf(y) without catastrophic cancellation when x and y share a sign
/// and lie in the tails.
double erf_diff(double x, double y);

}  // namespace exactdpp::special
