#include "ewens/laws.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "ewens/quadrature.hpp"

namespace ewens::laws {

namespace {

std::string format_name(const char* fmt, ...) {
    char buf[128];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    return buf;
}

/// Truncation point for a nonnegative series with remaining mass `tail(i)`;
/// keeps appending until the tail drops below 1e-14.
constexpr double kTailCut = 1e-14;

}  // namespace

DiscreteLaw::DiscreteLaw(std::string name, std::vector<double> pmf, double tail_bound)
    : name_(std::move(name)), pmf_(std::move(pmf)), tail_bound_(tail_bound) {
    if (pmf_.empty()) throw std::invalid_argument("law '" + name_ + "': empty pmf");
    if (!(tail_bound_ >= 0.0) || !(tail_bound_ <= 1.0 + 1e-9))
        throw std::invalid_argument("law '" + name_ + "': tail bound outside [0, 1]");
    double sum = 0.0;
    for (double& e : pmf_) {
        if (!std::isfinite(e) || e < -1e-9 || e > 1.0 + 1e-9)
            throw std::invalid_argument("law '" + name_ + "': entry outside [0, 1]");
        if (e < 0.0) e = 0.0;
        sum += e;
    }
    if (std::abs(sum + tail_bound_ - 1.0) > 1e-9)
        throw std::invalid_argument("law '" + name_ + "': mass plus tail is not 1");
    while (pmf_.size() > 1 && pmf_.back() == 0.0) pmf_.pop_back();
}

double DiscreteLaw::mass(long long i) const {
    if (i < 0 || i >= static_cast<long long>(pmf_.size())) return 0.0;
    return pmf_[static_cast<size_t>(i)];
}

double DiscreteLaw::mean() const {
    double m = 0.0;
    for (size_t i = 1; i < pmf_.size(); ++i) m += static_cast<double>(i) * pmf_[i];
    return m;
}

moments::FactorialMomentVector DiscreteLaw::factorial_moments(int L) const {
    if (L < 1) throw std::invalid_argument("factorial_moments: order must be >= 1");
    moments::FactorialMomentVector out;
    out.order = L;
    out.provenance = moments::Provenance::TargetLaw;
    out.values.assign(static_cast<size_t>(L), 0.0);
    for (int l = 1; l <= L; ++l) {
        double acc = 0.0;
        for (size_t i = static_cast<size_t>(l); i < pmf_.size(); ++i)
            acc += pmf_[i] * moments::falling_factorial(static_cast<double>(i), l);
        out.values[static_cast<size_t>(l - 1)] = acc;
    }
    return out;
}

DiscreteLaw poisson_law(double mu, int support_cut) {
    if (!(mu > 0.0)) throw std::domain_error("poisson_law: mu must be positive");
    std::vector<double> pmf;
    double term = std::exp(-mu);
    double cum = 0.0;
    int i = 0;
    while (true) {
        pmf.push_back(term);
        cum += term;
        if (support_cut >= 0 && i == support_cut) break;
        if (1.0 - cum < kTailCut && i >= static_cast<int>(mu)) break;
        ++i;
        term *= mu / i;
        if (i > 100000) throw ResourceError("poisson_law: support would exceed 100000");
    }
    return DiscreteLaw(format_name("Poisson(%g)", mu), std::move(pmf), std::max(0.0, 1.0 - cum));
}

DiscreteLaw quasi_poisson_law(int k, double lambda) {
    if (k < 1) throw std::domain_error("quasi_poisson_law: k must be >= 1");
    if (!(lambda > 0.0) || lambda > 1.0)
        throw std::domain_error("quasi_poisson_law: lambda must lie in (0, 1]");
    moments::FactorialMomentVector moms;
    moms.order = k;
    moms.provenance = moments::Provenance::TargetLaw;
    moms.values.assign(static_cast<size_t>(k), 0.0);
    double p = 1.0;
    for (int l = 1; l <= k; ++l) {
        p *= lambda;
        moms.values[static_cast<size_t>(l - 1)] = p;
    }
    DiscreteLaw law = factorial_moments_to_pmf(moms, k);
    return DiscreteLaw(format_name("QuasiPoisson(%d,%g)", k, lambda), law.pmf(), 0.0);
}

DiscreteLaw bernoulli_law(double p) {
    if (!(p >= 0.0) || p > 1.0) throw std::domain_error("bernoulli_law: p must lie in [0, 1]");
    return DiscreteLaw(format_name("Bernoulli(%g)", p), {1.0 - p, p}, 0.0);
}

DiscreteLaw binomial_law(int m, double p) {
    if (m < 0) throw std::domain_error("binomial_law: m must be >= 0");
    if (!(p >= 0.0) || p > 1.0) throw std::domain_error("binomial_law: p must lie in [0, 1]");
    std::vector<double> pmf(static_cast<size_t>(m) + 1, 0.0);
    for (int i = 0; i <= m; ++i) {
        double lg = std::lgamma(m + 1.0) - std::lgamma(i + 1.0) - std::lgamma(m - i + 1.0);
        double lp = (i > 0 ? i * std::log(p) : 0.0) +
                    (m - i > 0 ? (m - i) * std::log1p(-p) : 0.0);
        pmf[static_cast<size_t>(i)] = std::exp(lg + lp);
    }
    return DiscreteLaw(format_name("Binomial(%d,%g)", m, p), std::move(pmf), 0.0);
}

DiscreteLaw geometric_law(double p) {
    if (!(p > 0.0) || p > 1.0) throw std::domain_error("geometric_law: p must lie in (0, 1]");
    const double q = 1.0 - p;
    std::vector<double> pmf;
    double term = p;
    double tail = q;  // mass strictly above the entries pushed so far
    while (true) {
        pmf.push_back(term);
        if (tail < kTailCut) break;
        term *= q;
        tail *= q;
        if (pmf.size() > 100000) throw ResourceError("geometric_law: support would exceed 100000");
    }
    return DiscreteLaw(format_name("Geometric(%g)", p), std::move(pmf), tail);
}

DiscreteLaw mixed_poisson_law(double beta, double lambda, double tau) {
    if (!(beta > 0.0) || !(beta < 1.0))
        throw std::domain_error("mixed_poisson_law: beta must lie in (0, 1)");
    if (lambda == tau) throw std::domain_error("mixed_poisson_law: the two rates must differ");
    DiscreteLaw a = poisson_law(lambda);
    DiscreteLaw b = poisson_law(tau);
    size_t len = std::max(a.pmf().size(), b.pmf().size());
    std::vector<double> pmf(len, 0.0);
    for (size_t i = 0; i < len; ++i)
        pmf[i] = beta * a.mass(static_cast<long long>(i)) +
                 (1.0 - beta) * b.mass(static_cast<long long>(i));
    double tail = beta * a.tail_bound() + (1.0 - beta) * b.tail_bound();
    return DiscreteLaw(format_name("Mix(%g;%g,%g)", beta, lambda, tau), std::move(pmf), tail);
}

DiscreteLaw factorial_moments_to_pmf(const moments::FactorialMomentVector& moments, int support) {
    if (support < 0) throw std::invalid_argument("factorial_moments_to_pmf: negative support");
    const int L = moments.order;
    if (L < support)
        throw std::invalid_argument("factorial_moments_to_pmf: need moments up to the support size");
    if (L > 150) throw ResourceError("factorial_moments_to_pmf: order above 150");
    std::vector<double> fact(static_cast<size_t>(L) + 1, 1.0);
    for (int i = 1; i <= L; ++i) fact[static_cast<size_t>(i)] = fact[static_cast<size_t>(i - 1)] * i;
    std::vector<double> pmf(static_cast<size_t>(support) + 1, 0.0);
    double sum = 0.0;
    for (int i = 0; i <= support; ++i) {
        double acc = 0.0;
        for (int j = i; j <= L; ++j) {
            const double mj = (j == 0) ? 1.0 : moments.value(j);
            const double term = mj / (fact[static_cast<size_t>(i)] * fact[static_cast<size_t>(j - i)]);
            acc += ((j - i) % 2 == 0) ? term : -term;
        }
        if (acc < -1e-9)
            throw std::domain_error("factorial_moments_to_pmf: inversion produced a negative mass");
        if (acc < 0.0) acc = 0.0;
        pmf[static_cast<size_t>(i)] = acc;
        sum += acc;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::domain_error("factorial_moments_to_pmf: inverted masses do not sum to 1");
    // Normalise away the validated rounding slack so the law ctor's unit-mass
    // check sees an exact sum.
    for (double& e : pmf) e /= sum;
    return DiscreteLaw("moment-inversion", std::move(pmf), 0.0);
}

MembershipResult membership_necessary_check(const moments::FactorialMomentVector& moments) {
    const double m1 = moments.value(1);
    double bound = m1;
    for (int l = 2; l <= moments.order; ++l) {
        bound *= m1;
        if (moments.value(l) > bound * (1.0 + 1e-9) + 1e-12) return {false, l};
    }
    return {true, 0};
}

ThetaTransform::ThetaTransform(double theta) : theta_(theta), t1_(0.0) {
    if (!(theta >= 1.0)) throw std::domain_error("ThetaTransform: theta must be >= 1");
    t1_ = value(1.0);
}

double ThetaTransform::value(double x) const {
    if (!(x >= 0.5 - 1e-12) || !(x <= 1.0 + 1e-12))
        throw std::domain_error("ThetaTransform::value: x must lie in [1/2, 1]");
    x = std::clamp(x, 0.5, 1.0);
    if (theta_ == 1.0) return std::log(2.0 * x);
    if (theta_ == 2.0) return 2.0 * (std::log(2.0 * x) - x + 0.5);
    const double th = theta_;
    auto f = [th](double u) { return th * std::pow(1.0 - u, th - 1.0) / u; };
    return quad::integrate(f, 0.5, x, 1e-12);
}

double ThetaTransform::inverse(double y) const {
    if (!(y >= -1e-12) || !(y <= t1_ + 1e-12))
        throw std::domain_error("ThetaTransform::inverse: y outside [0, t(1)]");
    y = std::clamp(y, 0.0, t1_);
    if (theta_ == 1.0) return std::clamp(0.5 * std::exp(y), 0.5, 1.0);
    double lo = 0.5, hi = 1.0;
    for (int it = 0; it < 100 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (value(mid) < y)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

TvResult tv_distance(const DiscreteLaw& p, const DiscreteLaw& q) {
    const long long len = std::max(p.max_value(), q.max_value());
    double acc = 0.0;
    for (long long i = 0; i <= len; ++i) acc += std::abs(p.mass(i) - q.mass(i));
    return {0.5 * acc, 0.5 * (p.tail_bound() + q.tail_bound())};
}

Instance build_poisson_longcycle_spec(const EwensParams& params, double mu) {
    const ThetaTransform t(params.theta());
    const double t1 = t.max_value();
    const double mu_max = -std::log1p(-t1);
    if (!(mu > 0.0) || mu > mu_max + 1e-12)
        throw std::domain_error("build_poisson_longcycle_spec: mu outside (0, -log(1 - t(1))]");
    const int n = params.n();
    std::map<std::string, double> info;
    info["mu"] = mu;
    info["mu_max"] = mu_max;
    info["t1"] = t1;

    std::map<int, long long> weights;
    // Thresholds d_m solve t(d_m) = e^-mu sum_{k=1..m} mu^k/k!, d_0 = 1/2;
    // level m occupies (n d_{m-1}, n d_m].
    double term = std::exp(-mu);
    double target = 0.0;
    int levels = 0;
    long long prev_edge = n / 2;  // floor(n * d_0)
    for (int m = 1; m <= 500; ++m) {
        term *= mu / m;
        target += term;
        if (target > t1 - 1e-12) break;
        if (term < 1e-18) break;  // further targets are numerically constant
        const double d_m = t.inverse(target);
        const long long edge = std::min<long long>(static_cast<long long>(std::floor(d_m * n)), n);
        if (edge > prev_edge) {
            for (long long j = prev_edge + 1; j <= edge; ++j)
                weights[static_cast<int>(j)] = m;
            levels = m;
            info["d_" + std::to_string(m)] = d_m;
            prev_edge = edge;
        }
        if (1.0 - d_m < 1.0 / n) break;
    }
    info["levels"] = static_cast<double>(levels);
    // Mass of the target law strictly above the highest assigned level.
    double leftover = 1.0;
    double tm = std::exp(-mu);
    for (int k = 0; k <= levels; ++k) {
        leftover -= tm;
        tm *= mu / (k + 1);
    }
    info["leftover_mass"] = std::max(0.0, leftover);

    AdditiveSpec spec = AdditiveSpec::from_weights(n, weights);
    return Instance{std::move(spec), poisson_law(mu), std::move(info)};
}

Instance build_bernoulli_subset(const EwensParams& params, double p) {
    const ThetaTransform t(params.theta());
    if (!(p > 0.0) || p > t.max_value() + 1e-12)
        throw std::domain_error("build_bernoulli_subset: p outside (0, t(1)]");
    const double alpha = t.inverse(std::min(p, t.max_value()));
    AdditiveSpec spec = AdditiveSpec::from_intervals(
        params.n(), {WeightInterval{0.5, alpha, 1}});
    std::map<std::string, double> info{{"p", p}, {"alpha", alpha}, {"t1", t.max_value()}};
    return Instance{std::move(spec), bernoulli_law(p), std::move(info)};
}

Instance build_binomial2_subset(const EwensParams& params, double p) {
    if (std::abs(params.theta() - 1.0) > 1e-12)
        throw std::domain_error("build_binomial2_subset: requires theta == 1");
    const double p_max = 0.5 * std::log(3.0);
    if (!(p > 0.0) || p > p_max + 1e-15)
        throw std::domain_error("build_binomial2_subset: p outside (0, (1/2) log 3]");
    const double alpha = std::sqrt(2.0) * p;
    const double beta = (2.0 - std::sqrt(2.0)) * p;
    if (alpha > std::log(2.0) + 1e-15)
        throw std::domain_error("build_binomial2_subset: first interval exceeds its block");
    if (beta > std::log(1.5) + 1e-15)
        throw std::domain_error("build_binomial2_subset: second interval exceeds its block");
    const double third = 1.0 / 3.0;
    AdditiveSpec spec = AdditiveSpec::from_intervals(
        params.n(), {WeightInterval{third, third * std::exp(alpha), 1},
                     WeightInterval{2.0 * third, 2.0 * third * std::exp(beta), 1}});
    std::map<std::string, double> info{{"p", p}, {"alpha", alpha}, {"beta", beta}};
    return Instance{std::move(spec), binomial_law(2, p), std::move(info)};
}

LugoInstance build_lugo_interval(const EwensParams& params, double gamma_lo, double delta_hi) {
    if (!(gamma_lo > 0.0) || !(gamma_lo < delta_hi) || !(delta_hi <= 1.0))
        throw std::domain_error("build_lugo_interval: need 0 < gamma < delta <= 1");
    const double th = params.theta();
    const double inner_tol = 1e-11;
    const double outer_tol = 1e-10;

    auto first_integrand = [th](double u) { return std::pow(1.0 - u, th - 1.0) / u; };
    double first;
    if (th < 1.0 && delta_hi > 1.0 - 1e-12) {
        first = th * quad::integrate_right_singular([](double u) { return 1.0 / u; }, gamma_lo,
                                                    1.0, th, outer_tol);
    } else {
        first = th * quad::integrate(first_integrand, gamma_lo, delta_hi, outer_tol);
    }

    // inner(u) = int_{gamma}^{min(delta, 1-u)} (1-u-v)^(theta-1) / v dv
    auto inner = [&](double u) -> double {
        const double c = 1.0 - u;
        const double hi = std::min(delta_hi, c);
        if (hi <= gamma_lo) return 0.0;
        if (hi >= c - 1e-14) {
            // The weight vanishes (theta > 1) or blows up (theta < 1) at v = c;
            // route through the substitution-based panel either way.
            return quad::integrate_right_singular([](double v) { return 1.0 / v; }, gamma_lo, c,
                                                  th, inner_tol);
        }
        return quad::integrate([&](double v) { return std::pow(c - v, th - 1.0) / v; }, gamma_lo,
                               hi, inner_tol);
    };
    const double outer_hi = std::min(delta_hi, 1.0 - gamma_lo);
    double second = 0.0;
    if (outer_hi > gamma_lo) {
        second = th * th *
                 quad::integrate([&](double u) { return inner(u) / u; }, gamma_lo, outer_hi,
                                 outer_tol);
    }

    AdditiveSpec spec =
        AdditiveSpec::from_intervals(params.n(), {WeightInterval{gamma_lo, delta_hi, 1}});
    return LugoInstance{std::move(spec), first, second, first * first - second};
}

double negative_support_sum(const EwensParams& params, const AdditiveSpec& spec) {
    const int n = params.n();
    const double th = params.theta();
    double acc = 0.0;
    for (const auto& [j, a] : spec.support())
        if (j < n && a <= -1) acc += std::pow(1.0 - static_cast<double>(j) / n, th - 1.0) / j;
    return acc;
}

double short_cycle_support_sum(const AdditiveSpec& spec) {
    const int n = spec.n();
    double acc = 0.0;
    for (const auto& [j, a] : spec.support()) {
        (void)a;
        if (2 * static_cast<long long>(j) <= n) acc += 1.0 / j;
    }
    return acc;
}

double poisson_level_sum(const EwensParams& params, const AdditiveSpec& spec, long long k) {
    if (k == 0)
        throw std::invalid_argument("poisson_level_sum: level must be a nonzero weight value");
    const int n = params.n();
    const double th = params.theta();
    double acc = 0.0;
    for (const auto& [j, a] : spec.support())
        if (2 * static_cast<long long>(j) > n && j < n && a == k)
            acc += std::pow(1.0 - static_cast<double>(j) / n, th - 1.0) / j;
    return th * acc;
}

double bounded_tail_sum(const EwensParams& params, const AdditiveSpec& spec, long long K) {
    if (K < 1) throw std::invalid_argument("bounded_tail_sum: threshold must be >= 1");
    const int n = params.n();
    const double th = params.theta();
    double acc = 0.0;
    for (const auto& [j, a] : spec.support())
        if (j < n && a >= K) acc += std::pow(1.0 - static_cast<double>(j) / n, th - 1.0) / j;
    return acc;
}

double moment_series_bound(const moments::FactorialMomentVector& moments, double radius) {
    double acc = 0.0;
    double fact = 1.0;
    double pow_r = 1.0;
    for (int l = 1; l <= moments.order; ++l) {
        fact *= l;
        pow_r *= radius;
        acc += moments.value(l) * pow_r / fact;
    }
    return acc;
}

}  // namespace ewens::laws
