#include "ewens/moments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace ewens::moments {

double FactorialMomentVector::value(int l) const {
    if (l < 1 || l > order) throw std::domain_error("FactorialMomentVector: order out of range");
    return values[l - 1];
}

double FactorialMomentVector::std_error(int l) const {
    if (l < 1 || l > order) throw std::domain_error("FactorialMomentVector: order out of range");
    if (std_errors.empty()) throw std::domain_error("FactorialMomentVector: no standard errors");
    return std_errors[l - 1];
}

double falling_factorial(double x, int r) {
    if (r < 0) throw std::domain_error("falling_factorial: r must be >= 0");
    double acc = 1.0;
    for (int i = 0; i < r; ++i) acc *= x - i;
    return acc;
}

double watterson_moment(const EwensParams& params,
                        const std::vector<std::pair<int, int>>& multi) {
    const int n = params.n();
    std::set<int> seen;
    long long l = 0;
    for (const auto& [i, ji] : multi) {
        if (i < 1 || i > n) throw std::domain_error("watterson_moment: cycle length out of range");
        if (ji < 1) throw std::domain_error("watterson_moment: order must be >= 1");
        if (!seen.insert(i).second)
            throw std::domain_error("watterson_moment: repeated cycle length");
        l += static_cast<long long>(i) * ji;
    }
    if (l > n) return 0.0;
    double log_prod = 0.0;
    const double log_theta = std::log(params.theta());
    for (const auto& [i, ji] : multi) log_prod += ji * (log_theta - std::log(static_cast<double>(i)));
    return std::exp(params.psi_log(n - static_cast<int>(l)) + log_prod);
}

double watterson_composed_moment(const EwensParams& params, const std::vector<int>& lengths,
                                 int k) {
    if (k < 1) throw std::domain_error("watterson_composed_moment: k must be >= 1");
    if (lengths.size() > 16)
        throw ResourceError("watterson_composed_moment: too many distinct lengths");
    {
        std::set<int> seen(lengths.begin(), lengths.end());
        if (seen.size() != lengths.size())
            throw std::domain_error("watterson_composed_moment: repeated cycle length");
    }
    // (sum_i k_i)_(k) = sum over weak compositions (e_1..e_r) of k of
    // k!/prod e_i! * prod (k_i)_(e_i), the binomial-type expansion of
    // falling factorials.
    const int r = static_cast<int>(lengths.size());
    double total = 0.0;
    std::vector<std::pair<int, int>> pairs;
    std::function<void(int, int, double)> rec = [&](int idx, int rem, double multinomial) {
        if (idx == r) {
            if (rem == 0) total += multinomial * watterson_moment(params, pairs);
            return;
        }
        for (int e = 0; e <= rem; ++e) {
            if (e > 0) pairs.emplace_back(lengths[idx], e);
            double fact_e = 1.0;
            for (int t = 2; t <= e; ++t) fact_e *= t;
            rec(idx + 1, rem - e, multinomial / fact_e);
            if (e > 0) pairs.pop_back();
        }
    };
    double k_fact = 1.0;
    for (int t = 2; t <= k; ++t) k_fact *= t;
    rec(0, k, k_fact);
    return total;
}

BetaTable::BetaTable(const EwensParams& params, const AdditiveSpec& spec, int max_order)
    : n_(params.n()), max_order_(max_order) {
    if (max_order < 0) throw std::domain_error("BetaTable: max_order must be >= 0");
    if (spec.n() != n_) throw std::domain_error("BetaTable: spec size != n");
    const double theta = params.theta();
    log_w_n_ = params.log_rising(n_) - params.log_fact(n_);
    if (std::abs(log_w_n_) > 690.0)
        throw ResourceError("BetaTable: theta^(n)/n! outside double range; "
                            "reduce n or theta");

    table_.assign(max_order + 1, std::vector<double>(n_ + 1, 0.0));
    for (int m = 0; m <= n_; ++m)
        table_[0][m] = std::exp(params.log_rising(m) - params.log_fact(m));

    // per-order coefficient rows: coeff[r] lists (j, a_j_(r)/j) over the
    // support where the falling factorial is nonzero
    std::vector<std::vector<std::pair<int, double>>> coeff(max_order + 1);
    for (int r = 1; r <= max_order; ++r) {
        for (const auto& [j, a] : spec.support()) {
            const double c = falling_factorial(static_cast<double>(a), r);
            if (c != 0.0) coeff[r].emplace_back(j, c / j);
        }
    }

    // binomial coefficients C(k-1, r-1) for k, r <= max_order
    std::vector<std::vector<double>> binom(max_order + 1, std::vector<double>(max_order + 1, 0.0));
    for (int a = 0; a <= max_order; ++a) {
        binom[a][0] = 1.0;
        for (int b = 1; b <= a; ++b)
            binom[a][b] = binom[a - 1][b - 1] + ((a - 1 >= b) ? binom[a - 1][b] : 0.0);
    }

    for (int k = 1; k <= max_order; ++k) {
        auto& row = table_[k];
        for (int r = 1; r <= k; ++r) {
            const double scale = theta * binom[k - 1][r - 1];
            const auto& prev = table_[k - r];
            for (const auto& [j, c] : coeff[r]) {
                const double w = scale * c;
                // row[m] += w * prev[m - j] for all m >= j
                double* dst = row.data() + j;
                const double* src = prev.data();
                for (int m = j; m <= n_; ++m) *dst++ += w * *src++;
            }
        }
    }

    for (int k = 1; k <= max_order; ++k)
        if (!std::isfinite(table_[k][n_]))
            throw ResourceError("BetaTable: moment overflowed double range");
}

double BetaTable::beta(int m, int k) const {
    if (m < 0 || m > n_ || k < 0 || k > max_order_)
        throw std::domain_error("BetaTable: index out of range");
    return table_[k][m];
}

double BetaTable::gamma(int k) const {
    if (k < 0 || k > max_order_) throw std::domain_error("BetaTable: order out of range");
    if (k == 0) return 1.0;
    return table_[k][n_] * std::exp(-log_w_n_);
}

double exact_factorial_moment(const EwensParams& params, const AdditiveSpec& spec, int k) {
    if (k < 1) throw std::domain_error("exact_factorial_moment: k must be >= 1");
    return BetaTable(params, spec, k).gamma(k);
}

FactorialMomentVector exact_factorial_moments(const EwensParams& params, const AdditiveSpec& spec,
                                              int K) {
    if (K < 1) throw std::domain_error("exact_factorial_moments: K must be >= 1");
    BetaTable table(params, spec, K);
    FactorialMomentVector out;
    out.order = K;
    out.provenance = Provenance::ExactRecurrence;
    for (int l = 1; l <= K; ++l) out.values.push_back(table.gamma(l));
    return out;
}

namespace {

// dense nonnegative vector over indices [1, n-1] with tracked support
struct ConvVec {
    std::vector<double> v;
    int lo = 0, hi = -1;  // empty when lo > hi

    [[nodiscard]] bool empty() const { return lo > hi; }
};

// truncated convolution keeping indices <= cap
ConvVec conv(const ConvVec& a, const ConvVec& b, int cap) {
    ConvVec out;
    if (a.empty() || b.empty() || a.lo + b.lo > cap) {
        out.v.assign(1, 0.0);
        return out;
    }
    out.lo = a.lo + b.lo;
    out.hi = std::min(a.hi + b.hi, cap);
    out.v.assign(out.hi + 1, 0.0);
    for (int x = a.lo; x <= a.hi; ++x) {
        const double ax = a.v[x];
        if (ax == 0.0) continue;
        const int y_hi = std::min(b.hi, cap - x);
        for (int y = b.lo; y <= y_hi; ++y) out.v[x + y] += ax * b.v[y];
    }
    return out;
}

}  // namespace

double upsilon_truncated(const EwensParams& params, const AdditiveSpec& spec, int l, int m) {
    if (l < 1 || m < 1) throw std::domain_error("upsilon_truncated: l and m must be >= 1");
    if (l > 12) throw ResourceError("upsilon_truncated: composition order capped at l = 12");
    if (!spec.all_nonnegative())
        throw std::domain_error("upsilon_truncated: weights must be nonnegative");
    if (spec.n() != params.n()) throw std::domain_error("upsilon_truncated: spec size != n");

    const int n = params.n();
    const int cap = n - 1;  // total cycle length strictly below n
    const double theta = params.theta();

    const int r_max = std::min(m, l);
    std::vector<ConvVec> vr(r_max + 1);
    for (int r = 1; r <= r_max; ++r) {
        vr[r].v.assign(n, 0.0);
        for (const auto& [j, a] : spec.support()) {
            if (j > cap) break;
            const double c = falling_factorial(static_cast<double>(a), r);
            if (c == 0.0) continue;
            vr[r].v[j] = c / j;
            if (vr[r].lo == 0 || vr[r].lo > vr[r].hi) {
                vr[r].lo = j;
                vr[r].hi = j;
            } else {
                vr[r].hi = j;
            }
        }
        if (vr[r].v.empty() || vr[r].lo == 0) {
            vr[r].lo = 1;
            vr[r].hi = 0;
        }
    }

    std::vector<double> tail_weight(n, 1.0);
    for (int J = 1; J <= cap; ++J)
        tail_weight[J] = std::pow(1.0 - static_cast<double>(J) / n, theta - 1.0);

    // binomials C(a, b) for a < l
    std::vector<std::vector<double>> binom(l + 1, std::vector<double>(l + 1, 0.0));
    for (int a = 0; a <= l; ++a) {
        binom[a][0] = 1.0;
        for (int b = 1; b <= a; ++b)
            binom[a][b] = binom[a - 1][b - 1] + ((a - 1 >= b) ? binom[a - 1][b] : 0.0);
    }

    double total = 0.0;
    // depth-first over compositions; prefix convolutions shared along the tree
    std::function<void(int, double, const ConvVec*)> rec = [&](int rem, double coef,
                                                               const ConvVec* cur) {
        if (rem == 0) {
            double dot = 0.0;
            for (int J = cur->lo; J <= cur->hi; ++J) dot += cur->v[J] * tail_weight[J];
            total += coef * dot;
            return;
        }
        for (int r = 1; r <= std::min(r_max, rem); ++r) {
            if (vr[r].empty()) continue;
            const double c = coef * theta * binom[rem - 1][r - 1];
            if (cur == nullptr) {
                rec(rem - r, c, &vr[r]);
            } else {
                ConvVec next = conv(*cur, vr[r], cap);
                if (next.empty()) continue;
                rec(rem - r, c, &next);
            }
        }
    };
    rec(l, 1.0, nullptr);
    return total;
}

double upsilon_restricted(const EwensParams& params, const AdditiveSpec& subset, int l) {
    if (!subset.all_zero_one())
        throw std::domain_error("upsilon_restricted: weights must be 0/1");
    return upsilon_truncated(params, subset, l, 1);
}

double approx_error_bound(const EwensParams& params, int k, [[maybe_unused]] int m) {
    if (k < 1) throw std::domain_error("approx_error_bound: k must be >= 1");
    const double n = params.n();
    return (1.0 + std::pow(std::log(n), k)) / std::pow(n, std::min(1.0, params.theta()));
}

double concentration_D(const AdditiveSpec& spec, double u, double lambda) {
    if (!(u > 0.0)) throw std::domain_error("concentration_D: u must be > 0");
    const double u2 = u * u;
    double acc = 0.0;
    if (lambda == 0.0) {
        for (const auto& [j, a] : spec.support())
            acc += std::min(u2, static_cast<double>(a) * a) / j;
        return acc;
    }
    const auto dense = spec.dense_weights();
    for (int j = 1; j <= spec.n(); ++j) {
        const double d = dense[j] - lambda * j;
        acc += std::min(u2, d * d) / j;
    }
    return acc;
}

ConcentrationMin concentration_D_min(const AdditiveSpec& spec, double u) {
    std::set<double> candidates{0.0};
    const long long amax = spec.max_abs_weight();
    if (amax > 1000000)
        throw ResourceError("concentration_D_min: weight range too large for the candidate scan");
    for (long long v = -amax; v <= amax; ++v) candidates.insert(static_cast<double>(v));
    for (const auto& [j, a] : spec.support())
        candidates.insert(static_cast<double>(a) / static_cast<double>(j));
    ConcentrationMin best{std::numeric_limits<double>::infinity(), 0.0};
    for (double lam : candidates) {
        const double d = concentration_D(spec, u, lam);
        if (d < best.value) best = ConcentrationMin{d, lam};
    }
    return best;
}

}  // namespace ewens::moments
