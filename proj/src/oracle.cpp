#include "ewens/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ewens::oracle {

namespace {

void check_spec_matches(int n, const AdditiveSpec& spec, const char* where) {
    if (spec.n() != n)
        throw std::invalid_argument(std::string(where) + ": spec sized for a different n");
}

BigInt factorial_big(int n) {
    BigInt f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

Rational rising_rational(const Rational& theta, int m) {
    Rational acc = 1;
    for (int i = 0; i < m; ++i) acc *= theta + i;
    return acc;
}

/// Falling factorial x(x-1)...(x-r+1) over the integers.
long long falling_int(long long x, int r) {
    long long acc = 1;
    for (int i = 0; i < r; ++i) acc *= x - i;
    return acc;
}

/// Weighted histogram of h over all partitions, as exact rationals.
std::map<long long, Rational> partition_histogram_rational(int n, const Rational& theta,
                                                           const AdditiveSpec& spec) {
    const Rational norm = Rational(factorial_big(n)) / rising_rational(theta, n);
    std::map<long long, Rational> law;
    for (PartitionIterator it(n); !it.done(); it.next()) {
        const CycleStructure s = it.current();
        Rational w = norm;
        long long v = 0;
        for (const auto& [j, sj] : s.pairs()) {
            const Rational base = theta / j;
            BigInt sj_fact = 1;
            for (long long t = 1; t <= sj; ++t) {
                w *= base;
                sj_fact *= t;
            }
            w /= Rational(sj_fact);
            v += spec.weight(j) * sj;
        }
        law[v] += w;
    }
    return law;
}

laws::DiscreteLaw law_from_histogram(const std::string& name,
                                     const std::map<long long, double>& hist) {
    long long maxv = 0;
    for (const auto& [v, p] : hist) {
        (void)p;
        if (v < 0) throw std::domain_error(name + ": negative statistic value");
        maxv = std::max(maxv, v);
    }
    if (maxv > 5000000) throw ResourceError(name + ": value range too large for a dense law");
    std::vector<double> pmf(static_cast<size_t>(maxv) + 1, 0.0);
    for (const auto& [v, p] : hist) pmf[static_cast<size_t>(v)] = p;
    return laws::DiscreteLaw(name, std::move(pmf), 0.0);
}

}  // namespace

Rational RationalTheta::value() const {
    if (num <= 0 || den <= 0) throw std::domain_error("RationalTheta: num and den must be > 0");
    return Rational(num, den);
}

PartitionIterator::PartitionIterator(int n) : n_(n), done_(false) {
    if (n < 1) throw std::domain_error("PartitionIterator: n must be >= 1");
    parts_.assign(1, n);
}

CycleStructure PartitionIterator::current() const {
    if (done_) throw std::logic_error("PartitionIterator: dereferenced past the end");
    std::vector<std::pair<int, long long>> pairs;
    for (size_t i = 0; i < parts_.size();) {
        size_t k = i;
        while (k < parts_.size() && parts_[k] == parts_[i]) ++k;
        pairs.emplace_back(parts_[i], static_cast<long long>(k - i));
        i = k;
    }
    return CycleStructure::from_pairs(n_, std::move(pairs));
}

void PartitionIterator::next() {
    if (done_) return;
    // Rightmost part above 1; everything from there on is redistributed into
    // the lexicographically next descending arrangement.
    int i = static_cast<int>(parts_.size()) - 1;
    while (i >= 0 && parts_[i] == 1) --i;
    if (i < 0) {
        done_ = true;
        return;
    }
    int rem = parts_[i] + (static_cast<int>(parts_.size()) - 1 - i);
    const int v = parts_[i] - 1;
    parts_.resize(static_cast<size_t>(i));
    while (rem > v) {
        parts_.push_back(v);
        rem -= v;
    }
    if (rem > 0) parts_.push_back(rem);
}

unsigned long long partition_count(int n) {
    if (n < 0) throw std::domain_error("partition_count: n must be >= 0");
    if (n > 400) throw ResourceError("partition_count: n above the 64-bit-safe range");
    std::vector<unsigned long long> p(static_cast<size_t>(n) + 1, 0);
    p[0] = 1;
    for (int m = 1; m <= n; ++m) {
        unsigned long long acc = 0;
        for (int k = 1;; ++k) {
            const long long g1 = static_cast<long long>(k) * (3 * k - 1) / 2;
            const long long g2 = static_cast<long long>(k) * (3 * k + 1) / 2;
            if (g1 > m && g2 > m) break;
            const bool plus = (k % 2 == 1);
            if (g1 <= m) acc += plus ? p[static_cast<size_t>(m - g1)] : -p[static_cast<size_t>(m - g1)];
            if (g2 <= m) acc += plus ? p[static_cast<size_t>(m - g2)] : -p[static_cast<size_t>(m - g2)];
        }
        p[static_cast<size_t>(m)] = acc;
    }
    return p[static_cast<size_t>(n)];
}

SeriesCoeffs exp_series(const std::map<int, double>& p, int N) {
    if (N < 0) throw std::invalid_argument("exp_series: N must be >= 0");
    for (const auto& [j, c] : p) {
        (void)c;
        if (j < 1) throw std::invalid_argument("exp_series: coefficient indices start at 1");
    }
    SeriesCoeffs e(static_cast<size_t>(N) + 1, 0.0);
    e[0] = 1.0;
    for (int m = 1; m <= N; ++m) {
        double acc = 0.0;
        for (const auto& [k, pk] : p) {
            if (k > m) break;
            acc += k * pk * e[static_cast<size_t>(m - k)];
        }
        e[static_cast<size_t>(m)] = acc / m;
    }
    return e;
}

laws::DiscreteLaw exact_law(const EwensParams& params, const AdditiveSpec& spec) {
    const int n = params.n();
    check_spec_matches(n, spec, "exact_law");
    if (n > 60) throw ResourceError("exact_law: n above the partition-enumeration guard (60)");
    if (!spec.all_nonnegative())
        throw std::domain_error("exact_law: law output needs nonnegative weights");
    std::map<long long, double> hist;
    for (PartitionIterator it(n); !it.done(); it.next()) {
        const CycleStructure s = it.current();
        hist[additive_value(spec, s)] += esf_probability(params, s);
    }
    return law_from_histogram("exact-partition", hist);
}

std::map<long long, Rational> exact_law_rational(int n, RationalTheta theta,
                                                 const AdditiveSpec& spec) {
    check_spec_matches(n, spec, "exact_law_rational");
    if (n > 12) throw ResourceError("exact_law_rational: n above the rational-mode guard (12)");
    return partition_histogram_rational(n, theta.value(), spec);
}

laws::DiscreteLaw brute_force_permutations(const EwensParams& params, const AdditiveSpec& spec) {
    const int n = params.n();
    check_spec_matches(n, spec, "brute_force_permutations");
    if (n > 9) throw ResourceError("brute_force_permutations: n above the factorial guard (9)");
    if (!spec.all_nonnegative())
        throw std::domain_error("brute_force_permutations: law output needs nonnegative weights");

    std::vector<double> theta_pow(static_cast<size_t>(n) + 1, 1.0);
    for (int i = 1; i <= n; ++i) theta_pow[static_cast<size_t>(i)] = theta_pow[static_cast<size_t>(i - 1)] * params.theta();
    const std::vector<long long> a = spec.dense_weights_int();

    std::map<long long, double> hist;
    std::vector<int> perm(static_cast<size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<char> seen(static_cast<size_t>(n));
    do {
        std::fill(seen.begin(), seen.end(), 0);
        int cycles = 0;
        long long h = 0;
        for (int start = 0; start < n; ++start) {
            if (seen[static_cast<size_t>(start)]) continue;
            int len = 0;
            for (int t = start; !seen[static_cast<size_t>(t)]; t = perm[static_cast<size_t>(t)]) {
                seen[static_cast<size_t>(t)] = 1;
                ++len;
            }
            ++cycles;
            h += a[static_cast<size_t>(len)];
        }
        hist[h] += theta_pow[static_cast<size_t>(cycles)];
    } while (std::next_permutation(perm.begin(), perm.end()));

    const double norm = std::exp(params.log_rising(n));
    for (auto& [v, w] : hist) {
        (void)v;
        w /= norm;
    }
    return law_from_histogram("exact-permutation", hist);
}

std::map<long long, Rational> brute_force_rational(int n, RationalTheta theta,
                                                   const AdditiveSpec& spec) {
    check_spec_matches(n, spec, "brute_force_rational");
    if (n > 9) throw ResourceError("brute_force_rational: n above the factorial guard (9)");
    const Rational th = theta.value();
    std::vector<Rational> theta_pow(static_cast<size_t>(n) + 1, Rational(1));
    for (int i = 1; i <= n; ++i) theta_pow[static_cast<size_t>(i)] = theta_pow[static_cast<size_t>(i - 1)] * th;
    const std::vector<long long> a = spec.dense_weights_int();

    std::map<long long, Rational> hist;
    std::vector<int> perm(static_cast<size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<char> seen(static_cast<size_t>(n));
    do {
        std::fill(seen.begin(), seen.end(), 0);
        int cycles = 0;
        long long h = 0;
        for (int start = 0; start < n; ++start) {
            if (seen[static_cast<size_t>(start)]) continue;
            int len = 0;
            for (int t = start; !seen[static_cast<size_t>(t)]; t = perm[static_cast<size_t>(t)]) {
                seen[static_cast<size_t>(t)] = 1;
                ++len;
            }
            ++cycles;
            h += a[static_cast<size_t>(len)];
        }
        hist[h] += theta_pow[static_cast<size_t>(cycles)];
    } while (std::next_permutation(perm.begin(), perm.end()));

    const Rational norm = rising_rational(th, n);
    for (auto& [v, w] : hist) {
        (void)v;
        w /= norm;
    }
    return hist;
}

unsigned long long permutation_weight_sum_int(int n, long long theta) {
    if (n < 1 || n > 9) throw ResourceError("permutation_weight_sum_int: n must lie in [1, 9]");
    if (theta < 1 || theta > 20)
        throw std::domain_error("permutation_weight_sum_int: integer theta must lie in [1, 20]");
    std::vector<unsigned long long> theta_pow(static_cast<size_t>(n) + 1, 1);
    for (int i = 1; i <= n; ++i)
        theta_pow[static_cast<size_t>(i)] =
            theta_pow[static_cast<size_t>(i - 1)] * static_cast<unsigned long long>(theta);
    std::vector<int> perm(static_cast<size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<char> seen(static_cast<size_t>(n));
    unsigned long long total = 0;
    do {
        std::fill(seen.begin(), seen.end(), 0);
        int cycles = 0;
        for (int start = 0; start < n; ++start) {
            if (seen[static_cast<size_t>(start)]) continue;
            for (int t = start; !seen[static_cast<size_t>(t)]; t = perm[static_cast<size_t>(t)])
                seen[static_cast<size_t>(t)] = 1;
            ++cycles;
        }
        total += theta_pow[static_cast<size_t>(cycles)];
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

Rational factorial_moment_rational(int n, RationalTheta theta, const AdditiveSpec& spec, int k) {
    check_spec_matches(n, spec, "factorial_moment_rational");
    if (n > 12) throw ResourceError("factorial_moment_rational: n above the rational-mode guard");
    if (k < 0 || k > 8)
        throw std::invalid_argument("factorial_moment_rational: order must lie in [0, 8]");
    const Rational th = theta.value();
    if (k == 0) return Rational(1);

    // table[k][m]: same order-by-order recurrence as the floating-point
    // moment engine, exact arithmetic.
    std::vector<std::vector<Rational>> table(static_cast<size_t>(k) + 1,
                                             std::vector<Rational>(static_cast<size_t>(n) + 1, Rational(0)));
    {
        Rational rising = 1;
        BigInt fact = 1;
        table[0][0] = 1;
        for (int m = 1; m <= n; ++m) {
            rising *= th + (m - 1);
            fact *= m;
            table[0][static_cast<size_t>(m)] = rising / Rational(fact);
        }
    }
    std::vector<std::vector<std::pair<int, Rational>>> coeff(static_cast<size_t>(k) + 1);
    for (int r = 1; r <= k; ++r)
        for (const auto& [j, aj] : spec.support()) {
            const long long f = falling_int(aj, r);
            if (f != 0) coeff[static_cast<size_t>(r)].emplace_back(j, Rational(f, j));
        }
    std::vector<std::vector<BigInt>> binom(static_cast<size_t>(k) + 1,
                                           std::vector<BigInt>(static_cast<size_t>(k) + 1, 0));
    for (int a = 0; a <= k; ++a) {
        binom[static_cast<size_t>(a)][0] = 1;
        for (int b = 1; b <= a; ++b)
            binom[static_cast<size_t>(a)][static_cast<size_t>(b)] =
                binom[static_cast<size_t>(a - 1)][static_cast<size_t>(b - 1)] +
                ((a - 1 >= b) ? binom[static_cast<size_t>(a - 1)][static_cast<size_t>(b)] : BigInt(0));
    }
    for (int kk = 1; kk <= k; ++kk)
        for (int r = 1; r <= kk; ++r) {
            const Rational scale = th * Rational(binom[static_cast<size_t>(kk - 1)][static_cast<size_t>(r - 1)]);
            for (const auto& [j, c] : coeff[static_cast<size_t>(r)]) {
                const Rational w = scale * c;
                for (int m = j; m <= n; ++m)
                    table[static_cast<size_t>(kk)][static_cast<size_t>(m)] +=
                        w * table[static_cast<size_t>(kk - r)][static_cast<size_t>(m - j)];
            }
        }
    const Rational norm = Rational(factorial_big(n)) / rising_rational(th, n);
    return norm * table[static_cast<size_t>(k)][static_cast<size_t>(n)];
}

Rational watterson_moment_rational(int n, RationalTheta theta,
                                   const std::vector<std::pair<int, int>>& multi) {
    const Rational th = theta.value();
    long long l = 0;
    std::vector<char> used(static_cast<size_t>(n) + 1, 0);
    for (const auto& [j, e] : multi) {
        if (j < 1 || j > n) throw std::invalid_argument("watterson_moment_rational: length out of range");
        if (e < 1) throw std::invalid_argument("watterson_moment_rational: orders must be >= 1");
        if (used[static_cast<size_t>(j)])
            throw std::invalid_argument("watterson_moment_rational: lengths must be distinct");
        used[static_cast<size_t>(j)] = 1;
        l += static_cast<long long>(j) * e;
    }
    if (l > n) return Rational(0);
    const int m = n - static_cast<int>(l);
    Rational psi = Rational(factorial_big(n)) / rising_rational(th, n) * rising_rational(th, m) /
                   Rational(factorial_big(m));
    for (const auto& [j, e] : multi)
        for (int t = 0; t < e; ++t) psi *= th / j;
    return psi;
}

namespace {

void compose_rational(const std::vector<int>& lengths, size_t idx, int remaining,
                      std::vector<std::pair<int, int>>& chosen, const BigInt& multinomial,
                      int n, const RationalTheta& theta, Rational& acc) {
    if (idx == lengths.size()) {
        if (remaining == 0 && !chosen.empty())
            acc += Rational(multinomial) * watterson_moment_rational(n, theta, chosen);
        else if (remaining == 0 && chosen.empty())
            acc += Rational(multinomial);  // k = 0 edge, all orders zero
        return;
    }
    BigInt fact = 1;
    for (int e = 0; e <= remaining; ++e) {
        if (e > 0) fact *= e;
        if (e > 0) chosen.emplace_back(lengths[idx], e);
        compose_rational(lengths, idx + 1, remaining - e, chosen, multinomial / fact, n, theta,
                         acc);
        if (e > 0) chosen.pop_back();
    }
}

}  // namespace

Rational watterson_composed_rational(int n, RationalTheta theta, const std::vector<int>& lengths,
                                     int k) {
    if (k < 0) throw std::invalid_argument("watterson_composed_rational: order must be >= 0");
    if (k == 0) return Rational(1);
    if (lengths.size() > 16)
        throw ResourceError("watterson_composed_rational: too many lengths to compose");
    std::vector<std::pair<int, int>> chosen;
    Rational acc = 0;
    compose_rational(lengths, 0, k, chosen, factorial_big(k), n, theta, acc);
    return acc;
}

Rational law_factorial_moment(const std::map<long long, Rational>& law, int k) {
    if (k < 0) throw std::invalid_argument("law_factorial_moment: order must be >= 0");
    Rational acc = 0;
    for (const auto& [v, p] : law) {
        BigInt fall = 1;
        for (int i = 0; i < k; ++i) fall *= v - i;
        acc += p * Rational(fall);
    }
    return acc;
}

double exact_tv_short_cycles(const EwensParams& params, int r) {
    const int n = params.n();
    if (r < 1 || r > n) throw std::domain_error("exact_tv_short_cycles: r must lie in [1, n]");
    if (n > 20000) throw ResourceError("exact_tv_short_cycles: n above the series guard (20000)");
    const double theta = params.theta();
    double harmonic_n = 0.0;
    for (int j = 1; j <= n; ++j) harmonic_n += 1.0 / j;
    if (theta * harmonic_n > 600.0)
        throw ResourceError("exact_tv_short_cycles: weights exceed the linear-scale budget");

    std::map<int, double> short_side, long_side;
    double harmonic_r = 0.0;
    for (int j = 1; j <= r; ++j) {
        short_side[j] = theta / j;
        harmonic_r += 1.0 / j;
    }
    for (int j = r + 1; j <= n; ++j) long_side[j] = theta / j;

    // q(L)   = P(sum_{j<=r} j xi_j = L) for independent Poisson(theta/j):
    //          e^(-theta H_r) * [w^L] exp(theta sum_{j<=r} w^j/j).
    // ratio F(L) = measure(total = L state) / product(total = L state):
    //          (n!/theta^(n)) e^(theta H_r) * [w^(n-L)] exp(theta sum_{r<j<=n} w^j/j).
    // |measure - product| summed over all states collapses to totals.
    const SeriesCoeffs h = exp_series(short_side, n);
    const SeriesCoeffs g = exp_series(long_side, n);
    const double neg_T = -theta * harmonic_r;
    const double log_c = params.log_fact(n) - params.log_rising(n) + theta * harmonic_r;

    double sum_abs = 0.0, mass = 0.0, identity = 0.0;
    for (int L = 0; L <= n; ++L) {
        const double q = std::exp(neg_T) * h[static_cast<size_t>(L)];
        const double f = std::exp(log_c) * g[static_cast<size_t>(n - L)];
        sum_abs += q * std::abs(f - 1.0);
        mass += q;
        identity += q * f;
    }
    if (std::abs(identity - 1.0) > 1e-6)
        throw std::runtime_error("exact_tv_short_cycles: internal normalisation check failed");
    const double tail = std::max(0.0, 1.0 - mass);
    return 0.5 * (sum_abs + tail);
}

}  // namespace ewens::oracle
