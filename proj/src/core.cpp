#include "ewens/core.hpp"

#include <algorithm>
#include <climits>
#include <cmath>

#include "json.hpp"

namespace ewens {

double LogWeight::value() const { return std::exp(log_value); }

LogWeight LogWeight::from_linear(double v) {
    if (v < 0.0) throw std::domain_error("LogWeight: negative linear value");
    return LogWeight{std::log(v)};
}

double rising_factorial_log(double theta, int m) {
    if (!(theta > 0.0)) throw std::domain_error("rising_factorial_log: theta must be > 0");
    if (m < 0) throw std::domain_error("rising_factorial_log: m must be >= 0");
    double acc = 0.0;
    for (int i = 0; i < m; ++i) acc += std::log(theta + i);
    return acc;
}

EwensParams::EwensParams(int n, double theta) : n_(n), theta_(theta) {
    if (n < 1) throw std::domain_error("EwensParams: n must be >= 1");
    if (!(theta > 0.0) || !std::isfinite(theta))
        throw std::domain_error("EwensParams: theta must be finite and > 0");
    log_rising_.resize(n + 1);
    log_fact_.resize(n + 1);
    log_rising_[0] = 0.0;
    log_fact_[0] = 0.0;
    for (int m = 1; m <= n; ++m) {
        log_rising_[m] = log_rising_[m - 1] + std::log(theta + (m - 1));
        log_fact_[m] = log_fact_[m - 1] + std::log(static_cast<double>(m));
    }
}

double EwensParams::log_rising(int m) const {
    if (m < 0 || m > n_) throw std::domain_error("log_rising: m out of range");
    return log_rising_[m];
}

double EwensParams::log_fact(int m) const {
    if (m < 0 || m > n_) throw std::domain_error("log_fact: m out of range");
    return log_fact_[m];
}

double EwensParams::psi_log(int m) const {
    if (m < 0 || m > n_) throw std::domain_error("psi: m out of range");
    return (log_fact_[n_] - log_rising_[n_]) + (log_rising_[m] - log_fact_[m]);
}

double EwensParams::psi(int m) const { return std::exp(psi_log(m)); }

CycleStructure::CycleStructure(int n, std::vector<std::pair<int, long long>> pairs)
    : n_(n), pairs_(std::move(pairs)) {}

CycleStructure CycleStructure::from_dense(int n, const std::vector<long long>& dense) {
    std::vector<std::pair<int, long long>> pairs;
    for (std::size_t i = 0; i < dense.size(); ++i) {
        if (dense[i] < 0) throw std::domain_error("CycleStructure: negative count");
        if (dense[i] > 0) pairs.emplace_back(static_cast<int>(i) + 1, dense[i]);
    }
    return from_pairs(n, std::move(pairs));
}

CycleStructure CycleStructure::from_pairs(int n, std::vector<std::pair<int, long long>> pairs) {
    if (n < 0) throw std::domain_error("CycleStructure: n must be >= 0");
    std::erase_if(pairs, [](const auto& p) { return p.second == 0; });
    std::sort(pairs.begin(), pairs.end());
    long long total = 0;
    int prev = 0;
    for (const auto& [j, s] : pairs) {
        if (j < 1) throw std::domain_error("CycleStructure: cycle length must be >= 1");
        if (j == prev) throw std::domain_error("CycleStructure: duplicate cycle length");
        if (s < 0) throw std::domain_error("CycleStructure: negative count");
        prev = j;
        total += static_cast<long long>(j) * s;
    }
    if (total != n)
        throw std::domain_error("CycleStructure: cycle lengths sum to " + std::to_string(total) +
                                ", expected " + std::to_string(n));
    return CycleStructure(n, std::move(pairs));
}

long long CycleStructure::count(int j) const {
    auto it = std::lower_bound(pairs_.begin(), pairs_.end(), std::make_pair(j, 0LL));
    if (it != pairs_.end() && it->first == j) return it->second;
    return 0;
}

long long CycleStructure::num_cycles() const {
    long long c = 0;
    for (const auto& [j, s] : pairs_) c += s;
    return c;
}

std::vector<long long> CycleStructure::dense() const {
    std::vector<long long> d(n_, 0);
    for (const auto& [j, s] : pairs_) d[j - 1] = s;
    return d;
}

AdditiveSpec::AdditiveSpec(int n) : n_(n) {
    if (n < 1) throw std::domain_error("AdditiveSpec: n must be >= 1");
}

AdditiveSpec AdditiveSpec::from_weights(int n, const std::map<int, long long>& weights) {
    AdditiveSpec spec(n);
    for (const auto& [j, a] : weights) {
        if (j < 1 || j > n)
            throw std::domain_error("AdditiveSpec: index " + std::to_string(j) + " outside 1.." +
                                    std::to_string(n));
        if (a != 0) spec.support_.emplace_back(j, a);
    }
    return spec;
}

AdditiveSpec AdditiveSpec::from_intervals(int n, const std::vector<WeightInterval>& intervals) {
    AdditiveSpec spec(n);
    spec.intervals_ = intervals;
    std::vector<std::pair<long long, long long>> ranges;  // resolved (lo_j, hi_j], exclusive lo
    for (const auto& iv : intervals) {
        if (!(iv.lo >= 0.0 && iv.lo <= iv.hi && iv.hi <= 1.0))
            throw std::invalid_argument("AdditiveSpec: interval endpoints must satisfy 0 <= lo <= hi <= 1");
        const auto lo = static_cast<long long>(std::floor(iv.lo * n));
        const auto hi = static_cast<long long>(std::floor(iv.hi * n));
        for (const auto& [plo, phi] : ranges)
            if (lo < phi && plo < hi)
                throw std::invalid_argument("AdditiveSpec: overlapping intervals");
        ranges.emplace_back(lo, hi);
        if (iv.value == 0) continue;
        for (long long j = lo + 1; j <= hi; ++j)
            spec.support_.emplace_back(static_cast<int>(j), iv.value);
    }
    std::sort(spec.support_.begin(), spec.support_.end());
    return spec;
}

AdditiveSpec AdditiveSpec::from_json(int n, const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("AdditiveSpec: malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw std::invalid_argument("AdditiveSpec: top-level JSON must be an object");
    const bool has_explicit = doc.contains("explicit");
    const bool has_intervals = doc.contains("intervals");
    if (has_explicit == has_intervals)
        throw std::invalid_argument(
            "AdditiveSpec: exactly one of \"explicit\" or \"intervals\" is required");
    if (has_explicit) {
        const auto& obj = doc["explicit"];
        if (!obj.is_object()) throw std::invalid_argument("AdditiveSpec: \"explicit\" must be an object");
        std::map<int, long long> weights;
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            int j = 0;
            try {
                std::size_t pos = 0;
                j = std::stoi(it.key(), &pos);
                if (pos != it.key().size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw std::invalid_argument("AdditiveSpec: non-integer index key \"" + it.key() + "\"");
            }
            if (!it.value().is_number_integer())
                throw std::invalid_argument("AdditiveSpec: weight for j=" + it.key() +
                                            " must be an integer");
            if (weights.count(j)) throw std::invalid_argument("AdditiveSpec: duplicate index");
            weights[j] = it.value().get<long long>();
        }
        try {
            return from_weights(n, weights);
        } catch (const std::domain_error& e) {
            throw std::invalid_argument(e.what());
        }
    }
    const auto& arr = doc["intervals"];
    if (!arr.is_array()) throw std::invalid_argument("AdditiveSpec: \"intervals\" must be an array");
    std::vector<WeightInterval> intervals;
    for (const auto& item : arr) {
        if (!item.is_object() || !item.contains("lo") || !item.contains("hi") ||
            !item.contains("value"))
            throw std::invalid_argument("AdditiveSpec: each interval needs lo, hi, value");
        if (!item["lo"].is_number() || !item["hi"].is_number() || !item["value"].is_number_integer())
            throw std::invalid_argument("AdditiveSpec: interval fields have wrong types");
        intervals.push_back(WeightInterval{item["lo"].get<double>(), item["hi"].get<double>(),
                                           item["value"].get<long long>()});
    }
    return from_intervals(n, intervals);
}

std::string AdditiveSpec::to_json() const {
    nlohmann::json doc;
    if (!intervals_.empty()) {
        auto arr = nlohmann::json::array();
        for (const auto& iv : intervals_)
            arr.push_back({{"lo", iv.lo}, {"hi", iv.hi}, {"value", iv.value}});
        doc["intervals"] = arr;
    } else {
        auto obj = nlohmann::json::object();
        for (const auto& [j, a] : support_) obj[std::to_string(j)] = a;
        doc["explicit"] = obj;
    }
    return doc.dump();
}

long long AdditiveSpec::weight(int j) const {
    auto it = std::lower_bound(support_.begin(), support_.end(), std::make_pair(j, LLONG_MIN));
    if (it != support_.end() && it->first == j) return it->second;
    return 0;
}

bool AdditiveSpec::all_nonnegative() const {
    return std::all_of(support_.begin(), support_.end(), [](const auto& p) { return p.second >= 0; });
}

bool AdditiveSpec::all_zero_one() const {
    return std::all_of(support_.begin(), support_.end(),
                       [](const auto& p) { return p.second == 0 || p.second == 1; });
}

long long AdditiveSpec::max_abs_weight() const {
    long long m = 0;
    for (const auto& [j, a] : support_) m = std::max(m, std::abs(a));
    return m;
}

std::vector<double> AdditiveSpec::dense_weights() const {
    std::vector<double> d(n_ + 1, 0.0);
    for (const auto& [j, a] : support_) d[j] = static_cast<double>(a);
    return d;
}

std::vector<long long> AdditiveSpec::dense_weights_int() const {
    std::vector<long long> d(n_ + 1, 0);
    for (const auto& [j, a] : support_) d[j] = a;
    return d;
}

LogWeight esf_log_probability(const EwensParams& params, const CycleStructure& s) {
    if (s.n() != params.n()) throw std::domain_error("esf_probability: structure size != n");
    const double log_theta = std::log(params.theta());
    double acc = params.log_fact(params.n()) - params.log_rising(params.n());
    for (const auto& [j, sj] : s.pairs()) {
        acc += static_cast<double>(sj) * (log_theta - std::log(static_cast<double>(j)));
        acc -= std::lgamma(static_cast<double>(sj) + 1.0);
    }
    return LogWeight{acc};
}

double esf_probability(const EwensParams& params, const CycleStructure& s) {
    return esf_log_probability(params, s).value();
}

long long additive_value(const AdditiveSpec& spec, const CycleStructure& s) {
    if (s.n() != spec.n()) throw std::domain_error("additive_value: structure size != spec size");
    long long acc = 0;
    for (const auto& [j, sj] : s.pairs()) acc += spec.weight(j) * sj;
    return acc;
}

AdditiveSpec truncate_weights(const AdditiveSpec& spec, long long m) {
    if (m < 0) throw std::domain_error("truncate_weights: m must be >= 0");
    std::map<int, long long> weights;
    for (const auto& [j, a] : spec.support()) weights[j] = std::min(a, m);
    return AdditiveSpec::from_weights(spec.n(), weights);
}

double support_harmonic_sum(const AdditiveSpec& spec) {
    double acc = 0.0;
    for (const auto& [j, a] : spec.support()) acc += 1.0 / static_cast<double>(j);
    return acc;
}

}  // namespace ewens
