#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ewens/core.hpp"
#include "ewens/laws.hpp"
#include "ewens/moments.hpp"

namespace ewens::sampler {

enum class Method { Crp, ConditionedPoisson };

[[nodiscard]] std::string method_name(Method m);

/// A reproducible batch of cycle structures: identical (params, seed, method,
/// count) always regenerates the identical draw list, because every draw owns
/// its own counter-derived RNG substream (independent of threading or batch
/// splits).
struct SampleBatch {
    EwensParams params;
    std::uint64_t seed;
    Method method;
    std::vector<CycleStructure> draws;
};

/// Sequential-insertion sampler: element i+1 opens a new cycle with
/// probability theta/(theta+i), otherwise joins the cycle of a uniformly
/// chosen earlier element.  O(n) per draw.
[[nodiscard]] SampleBatch sample_crp(const EwensParams& params, long long count,
                                     std::uint64_t seed);

/// Rejection sampler: independent xi_j ~ Poisson(theta/j) for j <= n,
/// accepted when sum j xi_j = n (larger j can never appear in an accepted
/// draw, so the truncation at n is exact).  Throws ResourceError naming the
/// observed acceptance rate once a single draw burns max_rejects rejections.
[[nodiscard]] SampleBatch sample_conditioned_poisson(const EwensParams& params, long long count,
                                                     std::uint64_t seed,
                                                     long long max_rejects = 1000000);

/// Histogram of an integer statistic over a batch, kept both pooled and as
/// 50 interleaved sub-histograms so jackknife standard errors can be formed
/// later without re-sampling.
struct EmpiricalLaw {
    std::map<long long, long long> counts;
    long long total = 0;
    std::vector<std::map<long long, long long>> batches;

    [[nodiscard]] double mean() const;
    /// Requires all observed values in Z+; mass i = count(i)/total.
    [[nodiscard]] laws::DiscreteLaw to_discrete_law(const std::string& name) const;
};

/// Histogram of additive_value(spec, draw) over the batch.
[[nodiscard]] EmpiricalLaw empirical_law(const SampleBatch& batch, const AdditiveSpec& spec);

/// Streaming equivalent of empirical_law(sample_*(...), spec): same substream
/// per draw index, so the resulting histogram is bit-identical, but no draw
/// list is materialised (use for large n * count).
[[nodiscard]] EmpiricalLaw sample_additive_histogram(const EwensParams& params,
                                                     const AdditiveSpec& spec, long long count,
                                                     std::uint64_t seed, Method method,
                                                     long long max_rejects = 1000000);

/// Monte Carlo factorial moments with delete-one-batch jackknife standard
/// errors over the law's 50 sub-histograms.
[[nodiscard]] moments::FactorialMomentVector empirical_factorial_moments(const EmpiricalLaw& law,
                                                                         int L);

/// Histogram over full cycle types, for whole-law goodness-of-fit checks.
struct TypeHistogram {
    std::map<CycleStructure, long long> counts;
    long long total = 0;
};

[[nodiscard]] TypeHistogram type_histogram(const SampleBatch& batch);

struct ChiSquare {
    double statistic;
    int dof;
    double p_value;
};

/// Pearson chi-square of a type histogram against the exact measure, cells
/// with expected count below 5 pooled into a rest cell.
[[nodiscard]] ChiSquare chi_square_types_vs_exact(const TypeHistogram& hist,
                                                  const EwensParams& params);

/// Two-sample Pearson chi-square over the union of observed types, cells
/// pooled until every pooled expected count is at least 5.
[[nodiscard]] ChiSquare chi_square_two_types(const TypeHistogram& a, const TypeHistogram& b);

/// Pearson chi-square of a value histogram against a target law (tail mass
/// beyond the law's support forms the rest cell).
[[nodiscard]] ChiSquare chi_square_vs_law(const EmpiricalLaw& hist, const laws::DiscreteLaw& law);

}  // namespace ewens::sampler
