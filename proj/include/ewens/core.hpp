#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ewens {

/// Thrown when a computation would exceed a hard size/time guard
/// (e.g. full enumeration for n past the supported range).
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A weight or probability kept on the natural-log scale.  Linearisation
/// happens only at API boundaries so that quantities like theta^(n) for
/// n in the tens of thousands never leave the representable range.
struct LogWeight {
    double log_value;

    [[nodiscard]] double value() const;
    static LogWeight from_linear(double v);
};

/// log of the rising factorial theta^(m) = theta (theta+1) ... (theta+m-1).
[[nodiscard]] double rising_factorial_log(double theta, int m);

/// Model parameters: population size n and the weight parameter theta > 0.
/// Caches log m! and log theta^(m) for m = 0..n; all probability-scale
/// arithmetic elsewhere runs off these tables.
class EwensParams {
  public:
    EwensParams(int n, double theta);

    [[nodiscard]] int n() const { return n_; }
    [[nodiscard]] double theta() const { return theta_; }

    /// log theta^(m), 0 <= m <= n.
    [[nodiscard]] double log_rising(int m) const;
    /// log m!, 0 <= m <= n.
    [[nodiscard]] double log_fact(int m) const;

    /// psi_n(m) = (n! / theta^(n)) * (theta^(m) / m!), the ratio that
    /// converts truncated weighted counts into probabilities.
    [[nodiscard]] double psi(int m) const;
    [[nodiscard]] double psi_log(int m) const;

  private:
    int n_;
    double theta_;
    std::vector<double> log_rising_;
    std::vector<double> log_fact_;
};

/// Cycle-count vector of a permutation of n elements, stored sparsely as
/// (length j, count s_j) pairs with s_j > 0 and sum of j*s_j == n.
class CycleStructure {
  public:
    /// dense[i] = number of cycles of length i+1; trailing zeros optional.
    static CycleStructure from_dense(int n, const std::vector<long long>& dense);
    /// pairs of (cycle length, count); zero counts are dropped.
    static CycleStructure from_pairs(int n, std::vector<std::pair<int, long long>> pairs);

    [[nodiscard]] int n() const { return n_; }
    [[nodiscard]] const std::vector<std::pair<int, long long>>& pairs() const { return pairs_; }
    [[nodiscard]] long long count(int j) const;
    [[nodiscard]] long long num_cycles() const;
    [[nodiscard]] std::vector<long long> dense() const;

    friend bool operator==(const CycleStructure& a, const CycleStructure& b) = default;
    friend auto operator<=>(const CycleStructure& a, const CycleStructure& b) = default;

  private:
    CycleStructure(int n, std::vector<std::pair<int, long long>> pairs);
    int n_;
    std::vector<std::pair<int, long long>> pairs_;
};

/// One half-open weight interval (lo*n, hi*n] with a constant integer weight,
/// endpoints given as fractions of n.
struct WeightInterval {
    double lo = 0.0;
    double hi = 0.0;
    long long value = 0;
};

/// Integer weights a_1..a_n defining the additive statistic
/// h(sigma) = sum_j a_j * k_j(sigma).  Weights default to zero; only the
/// nonzero support is stored.
class AdditiveSpec {
  public:
    explicit AdditiveSpec(int n);
    static AdditiveSpec from_weights(int n, const std::map<int, long long>& weights);
    /// Intervals resolve to integer ranges (floor(lo*n), floor(hi*n)];
    /// two intervals covering the same j raise std::invalid_argument.
    static AdditiveSpec from_intervals(int n, const std::vector<WeightInterval>& intervals);
    /// Accepts {"explicit": {"j": a_j, ...}} or {"intervals": [{"lo":..,
    /// "hi":.., "value":..}, ...]}; exactly one of the two keys.
    static AdditiveSpec from_json(int n, const std::string& json_text);

    [[nodiscard]] std::string to_json() const;

    [[nodiscard]] int n() const { return n_; }
    [[nodiscard]] long long weight(int j) const;
    /// Sorted nonzero (j, a_j) pairs.
    [[nodiscard]] const std::vector<std::pair<int, long long>>& support() const { return support_; }
    [[nodiscard]] bool all_nonnegative() const;
    [[nodiscard]] bool all_zero_one() const;
    [[nodiscard]] long long max_abs_weight() const;
    /// Dense weight row a_1..a_n as doubles (index 0 unused).
    [[nodiscard]] std::vector<double> dense_weights() const;
    [[nodiscard]] std::vector<long long> dense_weights_int() const;

  private:
    int n_;
    std::vector<std::pair<int, long long>> support_;
    std::vector<WeightInterval> intervals_;  // kept for serialisation when interval-built
};

/// log of the sampling-formula probability of a cycle-count vector.
[[nodiscard]] LogWeight esf_log_probability(const EwensParams& params, const CycleStructure& s);
/// Probability of observing cycle counts s under the weighted measure.
[[nodiscard]] double esf_probability(const EwensParams& params, const CycleStructure& s);

/// h(sigma) = sum_j a_j * k_j for a realised cycle structure.
[[nodiscard]] long long additive_value(const AdditiveSpec& spec, const CycleStructure& s);

/// Cap every weight at m: a_j -> min(a_j, m).
[[nodiscard]] AdditiveSpec truncate_weights(const AdditiveSpec& spec, long long m);

/// sum over the nonzero support of 1/j; the series whose boundedness in n
/// governs whether the support is "sparse" in the short-cycle range.
[[nodiscard]] double support_harmonic_sum(const AdditiveSpec& spec);

}  // namespace ewens
