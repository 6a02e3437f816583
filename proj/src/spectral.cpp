#include "ewens/spectral.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ewens::spectral {

namespace {

void validate(const AngleWindow& w) {
    if (!(w.lo >= 0.0) || !(w.lo < w.hi) || !(w.hi <= 1.0))
        throw std::invalid_argument("AngleWindow: need 0 <= lo < hi <= 1");
}

void validate(const RationalWindow& w) {
    if (w.lo_den < 1 || w.hi_den < 1)
        throw std::invalid_argument("RationalWindow: denominators must be >= 1");
    if (w.lo_num < 0 || w.hi_num > w.hi_den)
        throw std::invalid_argument("RationalWindow: need 0 <= lo and hi <= 1");
    // lo < hi as exact cross-multiplied integers
    const auto lhs = static_cast<__int128>(w.lo_num) * w.hi_den;
    const auto rhs = static_cast<__int128>(w.hi_num) * w.lo_den;
    if (!(lhs < rhs)) throw std::invalid_argument("RationalWindow: need lo < hi");
}

/// #{integers t with t >= num/den * j} restricted to t >= 0, i.e.
/// ceil(num * j / den) in exact integer arithmetic.
long long ceil_scaled(long long num, long long den, int j) {
    const auto p = static_cast<__int128>(num) * j;
    return static_cast<long long>((p + den - 1) / den);
}

long long window_count(int j, const AngleWindow& w) {
    const double lo_edge = std::ceil(w.lo * static_cast<double>(j));
    const double hi_edge = std::ceil(w.hi * static_cast<double>(j));
    return static_cast<long long>(hi_edge) - static_cast<long long>(lo_edge);
}

long long window_count(int j, const RationalWindow& w) {
    return ceil_scaled(w.hi_num, w.hi_den, j) - ceil_scaled(w.lo_num, w.lo_den, j);
}

template <typename Window>
long long count_impl(const CycleStructure& s, const Window& w) {
    validate(w);
    long long total = 0;
    for (const auto& [j, count] : s.pairs()) total += count * window_count(j, w);
    return total;
}

template <typename Window>
AdditiveSpec spec_impl(int n, const Window& w) {
    validate(w);
    std::map<int, long long> weights;
    for (int j = 1; j <= n; ++j) {
        const long long c = window_count(j, w);
        if (c != 0) weights[j] = c;
    }
    return AdditiveSpec::from_weights(n, weights);
}

[[noreturn]] void throw_root(int j) {
    throw std::domain_error("char_poly_log_abs: x is a root of the factor for cycle length " +
                            std::to_string(j));
}

}  // namespace

CharPolyValue char_poly_log_abs(const CycleStructure& s, double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("char_poly_log_abs: x must be finite");
    double log_abs = 0.0;
    int sign = 1;
    const double ax = std::abs(x);
    for (const auto& [j, count] : s.pairs()) {
        double factor_log;
        int factor_sign;
        if (ax < 1.0) {
            // |x^j| < 1: the factor 1 - x^j stays in (0, 2)
            const double xj = std::pow(x, j);
            factor_log = std::log1p(-xj);
            factor_sign = 1;
        } else if (ax == 1.0) {
            // x = 1 kills every factor; x = -1 kills even cycle lengths
            if (x > 0.0 || j % 2 == 0) throw_root(j);
            factor_log = std::log(2.0);
            factor_sign = 1;
        } else {
            // |x^j| > 1: factor = -x^j (1 - x^-j); take logs of both parts
            const double xmj = std::pow(1.0 / x, j);
            factor_log = static_cast<double>(j) * std::log(ax) + std::log1p(-xmj);
            const bool xj_positive = x > 0.0 || j % 2 == 0;
            factor_sign = xj_positive ? -1 : 1;
        }
        log_abs += static_cast<double>(count) * factor_log;
        if (factor_sign < 0 && count % 2 != 0) sign = -sign;
    }
    return CharPolyValue{log_abs, sign};
}

long long eigen_angle_count(const CycleStructure& s, const AngleWindow& window) {
    return count_impl(s, window);
}

long long eigen_angle_count(const CycleStructure& s, const RationalWindow& window) {
    return count_impl(s, window);
}

AdditiveSpec window_spec(int n, const AngleWindow& window) { return spec_impl(n, window); }

AdditiveSpec window_spec(int n, const RationalWindow& window) { return spec_impl(n, window); }

}  // namespace ewens::spectral
