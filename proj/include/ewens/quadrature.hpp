#pragma once

#include <functional>

namespace ewens::quad {

/// Adaptive Gauss-Kronrod (G7,K15) integration of f over [a, b].
/// Subdivides until the local Kronrod-Gauss discrepancy is below the
/// interval's share of abs_tol; throws ResourceError if the interval
/// budget is exhausted.
[[nodiscard]] double integrate(const std::function<double(double)>& f, double a, double b,
                               double abs_tol);

/// integral over [a, c] of g(u) * (c - u)^(theta - 1) du.
/// For theta < 1 the integrable endpoint singularity at u = c is removed by
/// the substitution v = (c - u)^theta before the adaptive rule runs.
[[nodiscard]] double integrate_right_singular(const std::function<double(double)>& g, double a,
                                              double c, double theta, double abs_tol);

}  // namespace ewens::quad
