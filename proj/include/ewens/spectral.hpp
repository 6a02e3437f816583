#pragma once

#include "ewens/core.hpp"

namespace ewens::spectral {

/// Half-open arc [lo, hi) of normalised eigenvalue angles, 0 <= lo < hi <= 1.
struct AngleWindow {
    double lo;
    double hi;
};

/// The same arc with exact rational endpoints lo_num/lo_den and
/// hi_num/hi_den, so boundary angles t/j are classified in integer
/// arithmetic with no rounding at all.
struct RationalWindow {
    long long lo_num;
    long long lo_den;
    long long hi_num;
    long long hi_den;
};

/// log|Z| and the sign of Z for the characteristic polynomial
/// Z(x) = prod_j (1 - x^j)^{s_j} of a permutation matrix with cycle type s.
struct CharPolyValue {
    double log_abs;
    int sign;  // +1 or -1
};

/// Evaluates log|Z(x)| = sum_j s_j log|1 - x^j| plus the sign of Z(x),
/// stably for |x| above and below 1 (|1 - x^j| is never formed for huge
/// x^j).  Evaluation at a root (x^j = 1 for an occupied cycle length j)
/// throws a domain error naming that j.
[[nodiscard]] CharPolyValue char_poly_log_abs(const CycleStructure& s, double x);

/// Number of eigenvalue angles in the window:
///   sum_j s_j * #{0 <= t < j : lo <= t/j < hi}
/// with the per-length count ceil(hi j) - ceil(lo j).  Float endpoints
/// follow the rounding of the products lo*j and hi*j; use the rational
/// overload when boundary angles must be classified exactly.
[[nodiscard]] long long eigen_angle_count(const CycleStructure& s, const AngleWindow& window);
[[nodiscard]] long long eigen_angle_count(const CycleStructure& s,
                                          const RationalWindow& window);

/// The weight spec a_j = #{0 <= t < j : t/j in window}, which makes the
/// angle count an additive statistic: eigen_angle_count(s, window) ==
/// additive_value(window_spec(n, window), s) for every s of degree n.
[[nodiscard]] AdditiveSpec window_spec(int n, const AngleWindow& window);
[[nodiscard]] AdditiveSpec window_spec(int n, const RationalWindow& window);

}  // namespace ewens::spectral
