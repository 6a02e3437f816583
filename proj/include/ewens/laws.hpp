#pragma once

#include <map>
#include <string>
#include <vector>

#include "ewens/core.hpp"
#include "ewens/moments.hpp"

namespace ewens::laws {

/// Probability law on {0, 1, ..., |pmf|-1} with an explicit bound on the
/// truncated-away tail mass (0 for genuinely finite-support laws).
class DiscreteLaw {
  public:
    DiscreteLaw(std::string name, std::vector<double> pmf, double tail_bound);

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] const std::vector<double>& pmf() const { return pmf_; }
    [[nodiscard]] double tail_bound() const { return tail_bound_; }
    [[nodiscard]] int max_value() const { return static_cast<int>(pmf_.size()) - 1; }
    [[nodiscard]] double mass(long long i) const;
    [[nodiscard]] double mean() const;

    [[nodiscard]] moments::FactorialMomentVector factorial_moments(int L) const;

  private:
    std::string name_;
    std::vector<double> pmf_;
    double tail_bound_;
};

/// pmf e^edge-mu mu^i/i!, truncated where the remaining tail drops below
/// 1e-14 (tail recorded, no renormalisation).  support_cut >= 0 caps the
/// support explicitly.
[[nodiscard]] DiscreteLaw poisson_law(double mu, int support_cut = -1);

/// The law on {0..k} whose factorial moments are (lambda, lambda^2, ...,
/// lambda^k, 0, ...), built by moment inversion.
[[nodiscard]] DiscreteLaw quasi_poisson_law(int k, double lambda);

[[nodiscard]] DiscreteLaw bernoulli_law(double p);
[[nodiscard]] DiscreteLaw binomial_law(int m, double p);
/// P(i) = p (1-p)^i on i >= 0, truncated at tail < 1e-14.
[[nodiscard]] DiscreteLaw geometric_law(double p);
/// beta * Poisson(lambda) + (1 - beta) * Poisson(tau).
[[nodiscard]] DiscreteLaw mixed_poisson_law(double beta, double lambda, double tau);

/// Invert factorial moments into a pmf on {0..support}:
///   P(i) = sum_{j=i}^{L} (-1)^(j-i) M(j) / (i! (j-i)!),  M(0) = 1.
/// Requires moments.order >= support; validates nonnegativity and unit sum.
[[nodiscard]] DiscreteLaw factorial_moments_to_pmf(const moments::FactorialMomentVector& moments,
                                                   int support);

struct MembershipResult {
    bool admissible;
    int first_violation;  // smallest l with M(l) > M(1)^l, or 0
};

/// Necessary condition for a law to arise as a limit of cycle-counting
/// statistics with theta >= 1: factorial moments must satisfy
/// M(l) <= M(1)^l for every available order.
[[nodiscard]] MembershipResult membership_necessary_check(
    const moments::FactorialMomentVector& moments);

/// t(x) = theta * integral from 1/2 to x of (1-u)^(theta-1) du/u, the mass
/// transform for long-cycle constructions; strictly increasing on [1/2, 1]
/// with t(1) < 1 whenever theta >= 1.
class ThetaTransform {
  public:
    explicit ThetaTransform(double theta);

    [[nodiscard]] double theta() const { return theta_; }
    [[nodiscard]] double value(double x) const;
    /// Unique x in [1/2, 1] with t(x) = y, by bisection.
    [[nodiscard]] double inverse(double y) const;
    [[nodiscard]] double max_value() const { return t1_; }

  private:
    double theta_;
    double t1_;
};

struct TvResult {
    double value;
    double error_bound;  // un-enumerated tail mass, at most this much more
};

/// (1/2) sum_i |p_i - q_i| over the enumerated supports.
[[nodiscard]] TvResult tv_distance(const DiscreteLaw& p, const DiscreteLaw& q);

/// A constructed weight spec together with its predicted limit law and the
/// construction's named constants.
struct Instance {
    AdditiveSpec spec;
    DiscreteLaw target;
    std::map<std::string, double> info;
};

/// Step-function weights on long cycles with a_j = m on (n d_{m-1}, n d_m],
/// where t(d_m) = e^-mu * sum_{k<=m} mu^k/k!; the counting statistic then
/// approaches Poisson(mu).  Requires theta >= 1 and
/// 0 < mu <= -log(1 - t(1)).
[[nodiscard]] Instance build_poisson_longcycle_spec(const EwensParams& params, double mu);

/// 0/1 weights on (n/2, alpha n] with t(alpha) = p; the count of such long
/// cycles is 0/1-valued and approaches Bernoulli(p).  Requires theta >= 1
/// and 0 < p <= t(1).
[[nodiscard]] Instance build_bernoulli_subset(const EwensParams& params, double p);

/// Two-interval 0/1 weights (n/3, (n/3)e^alpha] plus (2n/3, (2n/3)e^beta]
/// with alpha = sqrt(2) p, beta = (2 - sqrt(2)) p, approaching
/// Binomial(2, p).  Requires theta == 1 and 0 < p <= (1/2) log 3, with the
/// interval-validity checks alpha <= log 2 and beta <= log(3/2).
[[nodiscard]] Instance build_binomial2_subset(const EwensParams& params, double p);

struct LugoInstance {
    AdditiveSpec spec;
    double predicted_first;   // theta * int (1-u)^(theta-1) du/u over (gamma, delta]
    double predicted_second;  // theta^2 * double integral with (1-u-v)^(theta-1)
    double predicted_gap;     // predicted_first^2 - predicted_second
};

/// 0/1 weights on (gamma n, delta n] with the first two limiting factorial
/// moments computed by quadrature (absolute error <= 1e-8).  The gap
/// first^2 - second is strictly positive for theta > 1: the limit law is
/// then not determined by its first moment alone.
[[nodiscard]] LugoInstance build_lugo_interval(const EwensParams& params, double gamma_lo,
                                               double delta_hi);

// Numeric evaluators of the finite-n convergence conditions: each returns
// the left side of one criterion at the given n so tests and reports can
// exhibit the trend across an n-grid.  None of them claims a limit.

/// sum over j < n with a_j <= -1 of (1/j)(1 - j/n)^(theta-1).
[[nodiscard]] double negative_support_sum(const EwensParams& params, const AdditiveSpec& spec);
/// sum over the nonzero support with 2j <= n of 1/j.
[[nodiscard]] double short_cycle_support_sum(const AdditiveSpec& spec);
/// theta * sum over n/2 < j < n with a_j = k of (1/j)(1 - j/n)^(theta-1).
[[nodiscard]] double poisson_level_sum(const EwensParams& params, const AdditiveSpec& spec,
                                       long long k);
/// sum over j < n with a_j >= K of (1/j)(1 - j/n)^(theta-1).
[[nodiscard]] double bounded_tail_sum(const EwensParams& params, const AdditiveSpec& spec,
                                      long long K);
/// sum_l M(l) radius^l / l! over the available orders.
[[nodiscard]] double moment_series_bound(const moments::FactorialMomentVector& moments,
                                         double radius);

}  // namespace ewens::laws
