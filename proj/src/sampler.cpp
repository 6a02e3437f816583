#include "ewens/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "ewens/oracle.hpp"

namespace ewens::sampler {

namespace {

constexpr int kJackknifeBatches = 50;

/// Counter-based 64-bit generator: tiny state, full-period stream per seed,
/// and cheap enough to give every draw its own decorrelated substream.
struct SplitMix64 {
    std::uint64_t state;

    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Unbiased uniform integer in [0, range) (Lemire's multiply-shift with
    /// the exact rejection refinement).
    std::uint64_t bounded(std::uint64_t range) {
        unsigned __int128 m = static_cast<unsigned __int128>(next()) * range;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < range) {
            const std::uint64_t t = (0 - range) % range;
            while (lo < t) {
                m = static_cast<unsigned __int128>(next()) * range;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }
};

/// Full-avalanche 64-bit finaliser (bijective).
std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// The substream for one draw index: reproducible independently of batching
/// or thread count.  The index must pass through a full avalanche before it
/// touches the generator state; anything affine in the index places
/// consecutive draws a single generator step apart, which makes their output
/// streams overlap almost entirely.
SplitMix64 substream(std::uint64_t seed, std::uint64_t draw_index) {
    const std::uint64_t a = mix64(draw_index + 0x9e3779b97f4a7c15ull);
    return SplitMix64{mix64(seed ^ (a + 0x632be59bd9b4e019ull))};
}

/// floor(p * 2^64) clamped into the representable range, so a u64 draw below
/// the threshold has probability p up to one part in 2^53.
std::uint64_t probability_threshold(double p) {
    const long double scaled = static_cast<long double>(p) * 18446744073709551616.0L;
    if (scaled <= 0.0L) return 0;
    if (scaled >= 18446744073709551615.0L) return ~0ull;
    return static_cast<std::uint64_t>(scaled);
}

/// One sequential-insertion draw; fills `sizes` with the cycle sizes.
void draw_crp(SplitMix64& rng, int n, const std::vector<std::uint64_t>& new_cycle_threshold,
              std::vector<std::uint32_t>& cycle_of, std::vector<int>& sizes) {
    sizes.clear();
    sizes.push_back(1);
    cycle_of[0] = 0;
    for (int i = 1; i < n; ++i) {
        if (rng.next() < new_cycle_threshold[static_cast<size_t>(i)]) {
            cycle_of[static_cast<size_t>(i)] = static_cast<std::uint32_t>(sizes.size());
            sizes.push_back(1);
        } else {
            const auto u = static_cast<size_t>(rng.bounded(static_cast<std::uint64_t>(i)));
            const std::uint32_t c = cycle_of[u];
            cycle_of[static_cast<size_t>(i)] = c;
            ++sizes[c];
        }
    }
}

/// Knuth's product-of-uniforms Poisson sampler; fine for the small rates
/// theta/j used here.
long long draw_poisson(SplitMix64& rng, double exp_neg_rate) {
    long long k = 0;
    double p = 1.0;
    do {
        ++k;
        p *= rng.uniform();
    } while (p > exp_neg_rate);
    return k - 1;
}

/// One rejection trial; returns true and fills `counts` (map length -> count)
/// when sum j * xi_j lands exactly on n.
bool trial_conditioned_poisson(SplitMix64& rng, int n, const std::vector<double>& exp_neg_rate,
                               std::map<int, long long>& counts) {
    counts.clear();
    long long weighted = 0;
    for (int j = 1; j <= n; ++j) {
        const long long xi = draw_poisson(rng, exp_neg_rate[static_cast<size_t>(j)]);
        if (xi > 0) {
            weighted += static_cast<long long>(j) * xi;
            if (weighted > n) return false;
            counts[j] = xi;
        }
    }
    return weighted == n;
}

CycleStructure structure_from_sizes(int n, const std::vector<int>& sizes,
                                    std::map<int, long long>& scratch) {
    scratch.clear();
    for (int s : sizes) ++scratch[s];
    return CycleStructure::from_pairs(
        n, std::vector<std::pair<int, long long>>(scratch.begin(), scratch.end()));
}

std::vector<std::uint64_t> crp_thresholds(const EwensParams& params) {
    const int n = params.n();
    const double theta = params.theta();
    std::vector<std::uint64_t> thr(static_cast<size_t>(n), 0);
    for (int i = 1; i < n; ++i)
        thr[static_cast<size_t>(i)] = probability_threshold(theta / (theta + i));
    return thr;
}

std::vector<double> poisson_rates_exp(const EwensParams& params) {
    const int n = params.n();
    const double theta = params.theta();
    if (theta > 700.0)
        throw ResourceError(
            "sample_conditioned_poisson: exp(-theta) underflows; theta must be <= 700");
    std::vector<double> e(static_cast<size_t>(n) + 1, 1.0);
    for (int j = 1; j <= n; ++j) e[static_cast<size_t>(j)] = std::exp(-theta / j);
    return e;
}

void check_count(long long count) {
    if (count < 1) throw std::invalid_argument("sampler: count must be >= 1");
}

[[noreturn]] void throw_acceptance_exhausted(long long accepted, long long trials,
                                             long long max_rejects) {
    char buf[160];
    const double rate =
        trials > 0 ? static_cast<double>(accepted) / static_cast<double>(trials) : 0.0;
    std::snprintf(buf, sizeof(buf),
                  "sample_conditioned_poisson: a draw exhausted %lld rejections "
                  "(acceptance rate ~ %.3g over %lld trials)",
                  static_cast<long long>(max_rejects), rate, static_cast<long long>(trials));
    throw ResourceError(buf);
}

/// Shared driver for both the batch builders and the streaming histogram:
/// calls sink(draw_index, sizes) for every accepted draw, in index order.
template <typename Sink>
void generate(const EwensParams& params, long long count, std::uint64_t seed, Method method,
              long long max_rejects, Sink&& sink) {
    const int n = params.n();
    if (method == Method::Crp) {
        const auto thresholds = crp_thresholds(params);
        std::vector<std::uint32_t> cycle_of(static_cast<size_t>(n), 0);
        std::vector<int> sizes;
        sizes.reserve(64);
        for (long long idx = 0; idx < count; ++idx) {
            SplitMix64 rng = substream(seed, static_cast<std::uint64_t>(idx));
            draw_crp(rng, n, thresholds, cycle_of, sizes);
            sink(idx, sizes);
        }
        return;
    }
    const auto exp_neg = poisson_rates_exp(params);
    std::map<int, long long> counts;
    std::vector<int> sizes;
    long long accepted = 0;
    long long trials = 0;
    for (long long idx = 0; idx < count; ++idx) {
        SplitMix64 rng = substream(seed, static_cast<std::uint64_t>(idx));
        long long rejects = 0;
        while (true) {
            ++trials;
            if (trial_conditioned_poisson(rng, n, exp_neg, counts)) break;
            if (++rejects >= max_rejects) throw_acceptance_exhausted(accepted, trials, max_rejects);
        }
        ++accepted;
        sizes.clear();
        for (const auto& [len, cnt] : counts)
            for (long long c = 0; c < cnt; ++c) sizes.push_back(len);
        sink(idx, sizes);
    }
}

void accumulate(EmpiricalLaw& law, long long draw_index, long long value) {
    ++law.counts[value];
    ++law.batches[static_cast<size_t>(draw_index % kJackknifeBatches)][value];
    ++law.total;
}

}  // namespace

std::string method_name(Method m) {
    return m == Method::Crp ? "crp" : "conditioned-poisson";
}

SampleBatch sample_crp(const EwensParams& params, long long count, std::uint64_t seed) {
    check_count(count);
    SampleBatch batch{params, seed, Method::Crp, {}};
    batch.draws.reserve(static_cast<size_t>(count));
    std::map<int, long long> scratch;
    generate(params, count, seed, Method::Crp, 0,
             [&](long long, const std::vector<int>& sizes) {
                 batch.draws.push_back(structure_from_sizes(params.n(), sizes, scratch));
             });
    return batch;
}

SampleBatch sample_conditioned_poisson(const EwensParams& params, long long count,
                                       std::uint64_t seed, long long max_rejects) {
    check_count(count);
    if (max_rejects < 1)
        throw std::invalid_argument("sample_conditioned_poisson: max_rejects must be >= 1");
    SampleBatch batch{params, seed, Method::ConditionedPoisson, {}};
    batch.draws.reserve(static_cast<size_t>(count));
    std::map<int, long long> scratch;
    generate(params, count, seed, Method::ConditionedPoisson, max_rejects,
             [&](long long, const std::vector<int>& sizes) {
                 batch.draws.push_back(structure_from_sizes(params.n(), sizes, scratch));
             });
    return batch;
}

double EmpiricalLaw::mean() const {
    if (total <= 0) return 0.0;
    double acc = 0.0;
    for (const auto& [v, c] : counts)
        acc += static_cast<double>(v) * static_cast<double>(c);
    return acc / static_cast<double>(total);
}

laws::DiscreteLaw EmpiricalLaw::to_discrete_law(const std::string& name) const {
    if (total <= 0) throw std::domain_error("EmpiricalLaw: no draws");
    if (counts.begin()->first < 0)
        throw std::domain_error("EmpiricalLaw: negative values cannot form a discrete law");
    const long long maxv = counts.rbegin()->first;
    if (maxv > 5000000) throw ResourceError("EmpiricalLaw: support too large for a dense law");
    std::vector<double> pmf(static_cast<size_t>(maxv) + 1, 0.0);
    for (const auto& [v, c] : counts)
        pmf[static_cast<size_t>(v)] = static_cast<double>(c) / static_cast<double>(total);
    return laws::DiscreteLaw(name, std::move(pmf), 0.0);
}

EmpiricalLaw empirical_law(const SampleBatch& batch, const AdditiveSpec& spec) {
    if (spec.n() != batch.params.n())
        throw std::domain_error("empirical_law: spec size != batch size");
    EmpiricalLaw law;
    law.batches.assign(kJackknifeBatches, {});
    long long idx = 0;
    for (const auto& draw : batch.draws) accumulate(law, idx++, additive_value(spec, draw));
    return law;
}

EmpiricalLaw sample_additive_histogram(const EwensParams& params, const AdditiveSpec& spec,
                                       long long count, std::uint64_t seed, Method method,
                                       long long max_rejects) {
    check_count(count);
    if (spec.n() != params.n())
        throw std::domain_error("sample_additive_histogram: spec size != n");
    const auto dense = spec.dense_weights_int();
    EmpiricalLaw law;
    law.batches.assign(kJackknifeBatches, {});
    generate(params, count, seed, method, max_rejects,
             [&](long long idx, const std::vector<int>& sizes) {
                 long long value = 0;
                 for (int s : sizes) value += dense[static_cast<size_t>(s)];
                 accumulate(law, idx, value);
             });
    return law;
}

moments::FactorialMomentVector empirical_factorial_moments(const EmpiricalLaw& law, int L) {
    if (L < 1) throw std::invalid_argument("empirical_factorial_moments: order must be >= 1");
    if (law.total <= 0) throw std::domain_error("empirical_factorial_moments: no draws");
    moments::FactorialMomentVector out;
    out.order = L;
    out.provenance = moments::Provenance::MonteCarlo;
    out.values.assign(static_cast<size_t>(L), 0.0);
    out.std_errors.assign(static_cast<size_t>(L), 0.0);

    const double total = static_cast<double>(law.total);
    std::vector<double> full(static_cast<size_t>(L) + 1, 0.0);  // full[l] = sum of v_(l)
    for (const auto& [v, c] : law.counts)
        for (int l = 1; l <= L; ++l)
            full[static_cast<size_t>(l)] +=
                static_cast<double>(c) * moments::falling_factorial(static_cast<double>(v), l);
    for (int l = 1; l <= L; ++l)
        out.values[static_cast<size_t>(l - 1)] = full[static_cast<size_t>(l)] / total;

    std::vector<const std::map<long long, long long>*> live;
    for (const auto& b : law.batches)
        if (!b.empty()) live.push_back(&b);
    const auto B = static_cast<int>(live.size());
    if (B < 2) return out;  // too few batches for a jackknife spread

    for (int l = 1; l <= L; ++l) {
        std::vector<double> leave_out;
        leave_out.reserve(static_cast<size_t>(B));
        for (const auto* b : live) {
            double s = 0.0;
            long long nb = 0;
            for (const auto& [v, c] : *b) {
                s += static_cast<double>(c) *
                     moments::falling_factorial(static_cast<double>(v), l);
                nb += c;
            }
            leave_out.push_back((full[static_cast<size_t>(l)] - s) /
                                (total - static_cast<double>(nb)));
        }
        double mean = 0.0;
        for (double e : leave_out) mean += e;
        mean /= B;
        double ss = 0.0;
        for (double e : leave_out) ss += (e - mean) * (e - mean);
        out.std_errors[static_cast<size_t>(l - 1)] =
            std::sqrt(ss * static_cast<double>(B - 1) / static_cast<double>(B));
    }
    return out;
}

TypeHistogram type_histogram(const SampleBatch& batch) {
    TypeHistogram hist;
    for (const auto& draw : batch.draws) ++hist.counts[draw];
    hist.total = static_cast<long long>(batch.draws.size());
    return hist;
}

namespace {

/// Pearson statistic over (observed, expected) cells: pools every cell with
/// expected count below 5 into a single rest cell, then requires at least two
/// cells.  Returns {0, 0, 1} when pooling leaves nothing to test.
ChiSquare pearson(const std::vector<std::pair<double, double>>& obs_exp) {
    double rest_obs = 0.0, rest_exp = 0.0;
    double stat = 0.0;
    int cells = 0;
    for (const auto& [obs, exp] : obs_exp) {
        if (exp < 5.0) {
            rest_obs += obs;
            rest_exp += exp;
        } else {
            stat += (obs - exp) * (obs - exp) / exp;
            ++cells;
        }
    }
    if (rest_exp > 0.0) {
        stat += (rest_obs - rest_exp) * (rest_obs - rest_exp) / rest_exp;
        ++cells;
    } else if (rest_obs > 0.0) {
        // observed values the reference assigns zero mass: reject outright
        return ChiSquare{std::numeric_limits<double>::infinity(),
                         cells > 0 ? cells : 1, 0.0};
    }
    if (cells < 2) return ChiSquare{0.0, 0, 1.0};
    const int dof = cells - 1;
    const double p = boost::math::gamma_q(0.5 * dof, 0.5 * stat);
    return ChiSquare{stat, dof, p};
}

}  // namespace

ChiSquare chi_square_types_vs_exact(const TypeHistogram& hist, const EwensParams& params) {
    if (hist.total <= 0) throw std::domain_error("chi_square_types_vs_exact: empty histogram");
    if (params.n() > 64)
        throw ResourceError("chi_square_types_vs_exact: full type enumeration capped at n = 64");
    const double total = static_cast<double>(hist.total);
    std::vector<std::pair<double, double>> cells;
    oracle::PartitionIterator it(params.n());
    while (!it.done()) {
        const CycleStructure s = it.current();
        const auto found = hist.counts.find(s);
        const double obs =
            found == hist.counts.end() ? 0.0 : static_cast<double>(found->second);
        cells.emplace_back(obs, total * esf_probability(params, s));
        it.next();
    }
    return pearson(cells);
}

ChiSquare chi_square_two_types(const TypeHistogram& a, const TypeHistogram& b) {
    if (a.total <= 0 || b.total <= 0)
        throw std::domain_error("chi_square_two_types: empty histogram");
    const double na = static_cast<double>(a.total);
    const double nb = static_cast<double>(b.total);
    std::map<CycleStructure, std::pair<long long, long long>> joint;
    for (const auto& [s, c] : a.counts) joint[s].first = c;
    for (const auto& [s, c] : b.counts) joint[s].second = c;

    // Pool cells until the pooled expected count is workable in BOTH samples,
    // then sum the two-sample Pearson statistic; dof = cells - 1.
    double stat = 0.0;
    int cells = 0;
    double rest_a = 0.0, rest_b = 0.0;
    const double scale_a = na / (na + nb), scale_b = nb / (na + nb);
    auto add_cell = [&](double ca, double cb) {
        const double m = ca + cb;
        const double ea = m * scale_a, eb = m * scale_b;
        stat += (ca - ea) * (ca - ea) / ea + (cb - eb) * (cb - eb) / eb;
        ++cells;
    };
    for (const auto& [s, c] : joint) {
        const double m = static_cast<double>(c.first + c.second);
        if (m * std::min(scale_a, scale_b) < 5.0) {
            rest_a += static_cast<double>(c.first);
            rest_b += static_cast<double>(c.second);
        } else {
            add_cell(static_cast<double>(c.first), static_cast<double>(c.second));
        }
    }
    if (rest_a + rest_b > 0.0) add_cell(rest_a, rest_b);
    if (cells < 2) return ChiSquare{0.0, 0, 1.0};
    const int dof = cells - 1;
    return ChiSquare{stat, dof, boost::math::gamma_q(0.5 * dof, 0.5 * stat)};
}

ChiSquare chi_square_vs_law(const EmpiricalLaw& hist, const laws::DiscreteLaw& law) {
    if (hist.total <= 0) throw std::domain_error("chi_square_vs_law: empty histogram");
    const double total = static_cast<double>(hist.total);
    std::vector<std::pair<double, double>> cells;
    double seen_mass = 0.0;
    double outside_obs = 0.0;
    for (const auto& [v, c] : hist.counts)
        if (v < 0 || v > law.max_value()) outside_obs += static_cast<double>(c);
    for (int i = 0; i <= law.max_value(); ++i) {
        const auto found = hist.counts.find(i);
        const double obs =
            found == hist.counts.end() ? 0.0 : static_cast<double>(found->second);
        cells.emplace_back(obs, total * law.mass(i));
        seen_mass += law.mass(i);
    }
    const double rest_mass = std::max(0.0, 1.0 - seen_mass);
    if (rest_mass > 0.0 || outside_obs > 0.0)
        cells.emplace_back(outside_obs, total * rest_mass);
    return pearson(cells);
}

}  // namespace ewens::sampler
