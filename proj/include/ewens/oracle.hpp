#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <vector>

#include "ewens/core.hpp"
#include "ewens/laws.hpp"

namespace ewens::oracle {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// theta given as an exact fraction num/den for the rational evaluation
/// paths (num, den > 0).
struct RationalTheta {
    long long num = 1;
    long long den = 1;

    [[nodiscard]] Rational value() const;
};

/// Enumerates every integer partition of n exactly once, exposed both as a
/// descending part list and as a cycle-count structure.
class PartitionIterator {
  public:
    explicit PartitionIterator(int n);

    [[nodiscard]] bool done() const { return done_; }
    /// Current partition, parts descending.
    [[nodiscard]] const std::vector<int>& parts() const { return parts_; }
    [[nodiscard]] CycleStructure current() const;
    void next();

  private:
    int n_;
    bool done_;
    std::vector<int> parts_;
};

/// Number of integer partitions of n (pentagonal-number recurrence);
/// n <= 400 so the count fits in 64 bits.
[[nodiscard]] unsigned long long partition_count(int n);

/// Coefficients c_0..c_N of a formal power series, linear scale.
using SeriesCoeffs = std::vector<double>;

/// Coefficients of exp(sum_j p_j w^j) up to degree N via the recurrence
/// e_m = (1/m) sum_{k=1}^{m} k p_k e_{m-k}, e_0 = 1.
[[nodiscard]] SeriesCoeffs exp_series(const std::map<int, double>& p, int N);

/// Exact law of h(sigma) by summation over all partitions of n weighted by
/// the sampling formula.  Requires nonnegative weights (the law type indexes
/// from 0) and n <= 60.
[[nodiscard]] laws::DiscreteLaw exact_law(const EwensParams& params, const AdditiveSpec& spec);

/// Exact law of h as rationals, P(h = v) keyed by v; any integer weights.
/// Requires n <= 12.
[[nodiscard]] std::map<long long, Rational> exact_law_rational(int n, RationalTheta theta,
                                                               const AdditiveSpec& spec);

/// The strictest oracle: iterates all n! permutations, decomposes each into
/// cycles and accumulates the theta^(#cycles)-weighted histogram of h.
/// Requires nonnegative weights and n <= 9.
[[nodiscard]] laws::DiscreteLaw brute_force_permutations(const EwensParams& params,
                                                         const AdditiveSpec& spec);

/// Permutation-level histogram in exact rationals; any integer weights,
/// n <= 9.
[[nodiscard]] std::map<long long, Rational> brute_force_rational(int n, RationalTheta theta,
                                                                 const AdditiveSpec& spec);

/// sum over all n! permutations of theta^(#cycles), in exact integer
/// arithmetic; n <= 9 and the result must fit in 64 bits.
[[nodiscard]] unsigned long long permutation_weight_sum_int(int n, long long theta);

/// k-th factorial moment of h under the weighted measure, exact rationals,
/// by the same order-by-order recurrence as the floating-point path but with
/// no rounding; n <= 12, k <= 8.
[[nodiscard]] Rational factorial_moment_rational(int n, RationalTheta theta,
                                                 const AdditiveSpec& spec, int k);

/// E prod_i (k_{j_i})_(e_i) in exact rationals for distinct cycle lengths;
/// multi holds (length, order) pairs.
[[nodiscard]] Rational watterson_moment_rational(int n, RationalTheta theta,
                                                 const std::vector<std::pair<int, int>>& multi);

/// k-th factorial moment of sum_i k_{j_i} over distinct lengths, in exact
/// rationals, by composition of joint moments.
[[nodiscard]] Rational watterson_composed_rational(int n, RationalTheta theta,
                                                   const std::vector<int>& lengths, int k);

/// k-th factorial moment sum_v P(v) v(v-1)...(v-k+1) of a rational law.
[[nodiscard]] Rational law_factorial_moment(const std::map<long long, Rational>& law, int k);

/// Exact total-variation distance between the joint law of the cycle counts
/// (k_1..k_r) under the weighted measure and independent Poisson(theta/j),
/// computed by grouping states over the total length sum_{j<=r} j s_j:
/// the measure-to-product ratio depends on a state only through that total,
/// so the full state-space sum collapses to one pass over totals 0..n with
/// generating-series coefficients supplying both factors.  n <= 20000.
[[nodiscard]] double exact_tv_short_cycles(const EwensParams& params, int r);

}  // namespace ewens::oracle
