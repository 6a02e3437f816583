#include "ewens/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ewens/core.hpp"
#include "ewens/laws.hpp"
#include "ewens/moments.hpp"
#include "ewens/oracle.hpp"
#include "ewens/sampler.hpp"
#include "ewens/spectral.hpp"

namespace ewens::cli {
namespace {

using ordered_json = nlohmann::ordered_json;

/// All resolved knobs for one invocation; echoed verbatim into every
/// artifact header so a run can be reproduced from its own output.
struct CliConfig {
    std::string subcommand;
    int n = 0;
    double theta = 1.0;
    std::uint64_t seed = 1;
    std::string format = "csv";
    std::string out_path;
    int threads = 1;

    long long count = 10000;
    std::string method = "crp";
    long long max_rejects = 1000000;
    std::string spec_text;
    int orders = 3;
    int truncation = 0;

    int random_specs = 5;

    std::string kind;
    double mu = 0.5;
    double p = 0.3;
    double gamma_lo = 1.0 / 3.0;
    double delta_hi = 0.5;

    std::vector<int> r_values;

    std::string window_text;
    std::string rational_text;
    double x_point = 0.0;
    bool has_x = false;
    bool exact_mean = false;
};

std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

sampler::Method parse_method(const std::string& name) {
    if (name == "crp") return sampler::Method::Crp;
    if (name == "conditioned-poisson") return sampler::Method::ConditionedPoisson;
    throw std::invalid_argument("method: expected 'crp' or 'conditioned-poisson'");
}

/// Inline JSON, or @path to a file holding it.
std::string load_spec_text(const std::string& arg) {
    if (arg.empty() || arg[0] != '@') return arg;
    std::ifstream f(arg.substr(1));
    if (!f) throw std::invalid_argument("spec: cannot read file '" + arg.substr(1) + "'");
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

AdditiveSpec resolve_spec(const CliConfig& cfg) {
    if (cfg.spec_text.empty()) {
        // default statistic: total number of cycles (every length weighted 1)
        return AdditiveSpec::from_intervals(cfg.n, {{0.0, 1.0, 1}});
    }
    return AdditiveSpec::from_json(cfg.n, load_spec_text(cfg.spec_text));
}

spectral::AngleWindow parse_window(const std::string& text) {
    double lo = 0.0, hi = 0.0;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf%c", &lo, &hi, &tail) != 2)
        throw std::invalid_argument("window: expected 'lo:hi' with numeric endpoints");
    return spectral::AngleWindow{lo, hi};
}

spectral::RationalWindow parse_rational_window(const std::string& text) {
    long long pl = 0, ql = 0, ph = 0, qh = 0;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%lld/%lld:%lld/%lld%c", &pl, &ql, &ph, &qh, &tail) != 4)
        throw std::invalid_argument(
            "rational-window: expected 'p/q:r/s' with integer numerators and denominators");
    return spectral::RationalWindow{pl, ql, ph, qh};
}

/// Exact fraction equal to the given double (binary mantissa over a power
/// of two), for handing float parameters to the rational oracle.
oracle::RationalTheta rational_of_double(double v) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::domain_error("theta must be positive and finite");
    int exp = 0;
    const double mant = std::frexp(v, &exp);
    const auto m = static_cast<long long>(std::ldexp(mant, 53));  // integer mantissa
    const int shift = exp - 53;
    if (shift >= 0) {
        if (shift > 9) throw std::domain_error("theta too large for the rational oracle");
        return {m << shift, 1};
    }
    if (shift < -62) throw std::domain_error("theta too small for the rational oracle");
    return {m, 1ll << (-shift)};
}

ordered_json common_config(const CliConfig& cfg) {
    ordered_json j;
    j["subcommand"] = cfg.subcommand;
    j["n"] = cfg.n;
    j["theta"] = cfg.theta;
    j["seed"] = cfg.seed;
    j["format"] = cfg.format;
    j["out"] = cfg.out_path;
    j["threads"] = cfg.threads;
    return j;
}

ordered_json meta_block() {
    ordered_json m;
    m["timestamp_utc"] = static_cast<long long>(std::time(nullptr));
    return m;
}

/// CSV artifacts carry the config as a single leading comment line and no
/// timestamp, so identical configs yield byte-identical files.
std::string csv_header(const ordered_json& config) {
    return "# config: " + config.dump() + "\n";
}

void emit(const CliConfig& cfg, const std::string& artifact, std::ostream& out) {
    if (cfg.out_path.empty()) {
        out << artifact;
        return;
    }
    std::ofstream f(cfg.out_path, std::ios::binary);
    if (!f) throw std::invalid_argument("out: cannot open '" + cfg.out_path + "' for writing");
    f << artifact;
    if (!f) throw std::invalid_argument("out: write to '" + cfg.out_path + "' failed");
}

// ---------------------------------------------------------------------------
// sample

int run_sample(CliConfig& cfg, std::ostream& out) {
    EwensParams params(cfg.n, cfg.theta);
    const AdditiveSpec spec = resolve_spec(cfg);
    const auto law = sampler::sample_additive_histogram(params, spec, cfg.count, cfg.seed,
                                                        parse_method(cfg.method), cfg.max_rejects);
    const auto fm = sampler::empirical_factorial_moments(law, cfg.orders);

    ordered_json config = common_config(cfg);
    config["count"] = cfg.count;
    config["method"] = cfg.method;
    config["max_rejects"] = cfg.max_rejects;
    config["orders"] = cfg.orders;
    config["spec"] = ordered_json::parse(spec.to_json());

    if (cfg.format == "json") {
        ordered_json doc;
        doc["config"] = config;
        doc["meta"] = meta_block();
        doc["total"] = law.total;
        auto hist = ordered_json::array();
        for (const auto& [v, c] : law.counts) hist.push_back({{"value", v}, {"count", c}});
        doc["histogram"] = hist;
        auto moms = ordered_json::array();
        for (int l = 1; l <= cfg.orders; ++l)
            moms.push_back(
                {{"order", l}, {"value", fm.value(l)}, {"std_error", fm.std_error(l)}});
        doc["factorial_moments"] = moms;
        emit(cfg, doc.dump(2) + "\n", out);
        return 0;
    }
    std::string csv = csv_header(config) + "value,count\n";
    for (const auto& [v, c] : law.counts)
        csv += std::to_string(v) + "," + std::to_string(c) + "\n";
    emit(cfg, csv, out);
    return 0;
}

// ---------------------------------------------------------------------------
// moments

int run_moments(CliConfig& cfg, std::ostream& out) {
    EwensParams params(cfg.n, cfg.theta);
    const AdditiveSpec spec = resolve_spec(cfg);
    const auto exact = moments::exact_factorial_moments(params, spec, cfg.orders);
    std::vector<double> truncated, bounds;
    if (cfg.truncation > 0) {
        for (int l = 1; l <= cfg.orders; ++l) {
            truncated.push_back(moments::upsilon_truncated(params, spec, l, cfg.truncation));
            bounds.push_back(moments::approx_error_bound(params, l, cfg.truncation));
        }
    }

    ordered_json config = common_config(cfg);
    config["orders"] = cfg.orders;
    config["truncation"] = cfg.truncation;
    config["spec"] = ordered_json::parse(spec.to_json());

    if (cfg.format == "json") {
        ordered_json doc;
        doc["config"] = config;
        doc["meta"] = meta_block();
        auto rows = ordered_json::array();
        for (int l = 1; l <= cfg.orders; ++l) {
            ordered_json row;
            row["order"] = l;
            row["exact"] = exact.value(l);
            if (cfg.truncation > 0) {
                row["truncated"] = truncated[static_cast<size_t>(l - 1)];
                row["error_bound"] = bounds[static_cast<size_t>(l - 1)];
            }
            rows.push_back(row);
        }
        doc["factorial_moments"] = rows;
        emit(cfg, doc.dump(2) + "\n", out);
        return 0;
    }
    std::string csv = csv_header(config) + "order,method,value\n";
    for (int l = 1; l <= cfg.orders; ++l) {
        csv += std::to_string(l) + ",exact," + g17(exact.value(l)) + "\n";
        if (cfg.truncation > 0) {
            csv += std::to_string(l) + ",truncated," +
                   g17(truncated[static_cast<size_t>(l - 1)]) + "\n";
            csv += std::to_string(l) + ",error_bound," +
                   g17(bounds[static_cast<size_t>(l - 1)]) + "\n";
        }
    }
    emit(cfg, csv, out);
    return 0;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyRow {
    std::string check;
    int order;
    double lhs;
    double rhs;
    double rel_error;
    bool pass;
};

double rel_diff(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / scale;
}

/// Deterministic pseudo-random weights for the cross-check specs.
AdditiveSpec random_zplus_spec(int n, std::uint64_t seed) {
    std::uint64_t state = seed;
    auto next = [&state]() {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    };
    std::map<int, long long> weights;
    for (int j = 1; j <= n; ++j)
        if (next() % 2 == 0) weights[j] = static_cast<long long>(next() % 5) + 1;
    if (weights.empty()) weights[1] = 1;
    return AdditiveSpec::from_weights(n, weights);
}

int run_verify(CliConfig& cfg, std::ostream& out) {
    if (cfg.n < 1 || cfg.n > 12)
        throw std::invalid_argument("verify: n must lie in [1, 12] (exact-oracle range)");
    if (cfg.orders < 1 || cfg.orders > 6)
        throw std::invalid_argument("verify: orders must lie in [1, 6]");
    EwensParams params(cfg.n, cfg.theta);
    const auto rtheta = rational_of_double(cfg.theta);
    std::vector<VerifyRow> rows;

    {
        // total mass of the sampling formula over all cycle types
        double total = 0.0;
        for (oracle::PartitionIterator it(cfg.n); !it.done(); it.next())
            total += esf_probability(params, it.current());
        rows.push_back({"normalization", 0, total, 1.0, rel_diff(total, 1.0),
                        rel_diff(total, 1.0) <= 1e-10});
    }

    for (int i = 0; i < cfg.random_specs; ++i) {
        const auto spec = random_zplus_spec(cfg.n, cfg.seed + static_cast<std::uint64_t>(i));
        const std::string tag = "spec" + std::to_string(i);
        std::map<long long, oracle::Rational> law;
        if (cfg.n <= 9) law = oracle::brute_force_rational(cfg.n, rtheta, spec);
        for (int k = 1; k <= cfg.orders; ++k) {
            const double rec = moments::exact_factorial_moment(params, spec, k);
            const auto exact_r = oracle::factorial_moment_rational(cfg.n, rtheta, spec, k);
            const double exact_d = exact_r.convert_to<double>();
            {
                const double e = rel_diff(rec, exact_d);
                rows.push_back({tag + "/recurrence_vs_partition_oracle", k, rec, exact_d, e,
                                e <= 1e-9});
            }
            if (cfg.n <= 9) {
                oracle::Rational brute = 0;
                for (const auto& [v, pr] : law) {
                    oracle::Rational ff = 1;
                    for (int t = 0; t < k; ++t) ff *= oracle::Rational(v - t);
                    brute += pr * ff;
                }
                const bool equal = brute == exact_r;
                const double bd = brute.convert_to<double>();
                rows.push_back({tag + "/partition_oracle_vs_enumeration", k, exact_d, bd,
                                equal ? 0.0 : rel_diff(exact_d, bd), equal});
            }
        }
    }

    bool all_pass = true;
    for (const auto& r : rows) all_pass = all_pass && r.pass;

    ordered_json config = common_config(cfg);
    config["orders"] = cfg.orders;
    config["random_specs"] = cfg.random_specs;

    if (cfg.format == "json") {
        ordered_json doc;
        doc["config"] = config;
        doc["meta"] = meta_block();
        auto arr = ordered_json::array();
        for (const auto& r : rows)
            arr.push_back({{"check", r.check},
                           {"order", r.order},
                           {"lhs", r.lhs},
                           {"rhs", r.rhs},
                           {"rel_error", r.rel_error},
                           {"status", r.pass ? "pass" : "FAIL"}});
        doc["checks"] = arr;
        doc["all_pass"] = all_pass;
        emit(cfg, doc.dump(2) + "\n", out);
    } else {
        std::string csv = csv_header(config) + "check,order,lhs,rhs,rel_error,status\n";
        for (const auto& r : rows)
            csv += r.check + "," + std::to_string(r.order) + "," + g17(r.lhs) + "," +
                   g17(r.rhs) + "," + g17(r.rel_error) + "," + (r.pass ? "pass" : "FAIL") +
                   "\n";
        emit(cfg, csv, out);
    }
    return all_pass ? 0 : 3;
}

// ---------------------------------------------------------------------------
// instance

void spec_summary(ordered_json& doc, const AdditiveSpec& spec) {
    ordered_json s;
    s["support_size"] = spec.support().size();
    if (!spec.support().empty()) {
        s["support_min_j"] = spec.support().front().first;
        s["support_max_j"] = spec.support().back().first;
    }
    s["weights"] = ordered_json::parse(spec.to_json());
    doc["spec"] = s;
}

int run_instance(CliConfig& cfg, std::ostream& out) {
    EwensParams params(cfg.n, cfg.theta);
    ordered_json config = common_config(cfg);
    config["kind"] = cfg.kind;
    config["orders"] = cfg.orders;

    ordered_json doc;
    if (cfg.kind == "poisson") {
        config["mu"] = cfg.mu;
        config["truncation"] = cfg.truncation > 0 ? cfg.truncation : 8;
        const int m = cfg.truncation > 0 ? cfg.truncation : 8;
        const auto inst = laws::build_poisson_longcycle_spec(params, cfg.mu);
        doc["config"] = config;
        doc["meta"] = meta_block();
        doc["target"] = inst.target.name();
        doc["info"] = inst.info;
        spec_summary(doc, inst.spec);
        auto rows = ordered_json::array();
        double predicted = 1.0;
        for (int l = 1; l <= cfg.orders; ++l) {
            predicted *= cfg.mu;
            rows.push_back({{"order", l},
                            {"measured", moments::upsilon_truncated(params, inst.spec, l, m)},
                            {"predicted", predicted}});
        }
        doc["factorial_moments"] = rows;
    } else if (cfg.kind == "bernoulli" || cfg.kind == "binomial2") {
        config["p"] = cfg.p;
        const auto inst = cfg.kind == "bernoulli" ? laws::build_bernoulli_subset(params, cfg.p)
                                                  : laws::build_binomial2_subset(params, cfg.p);
        doc["config"] = config;
        doc["meta"] = meta_block();
        doc["target"] = inst.target.name();
        doc["info"] = inst.info;
        spec_summary(doc, inst.spec);
        const auto target_fm = inst.target.factorial_moments(cfg.orders);
        auto rows = ordered_json::array();
        for (int l = 1; l <= cfg.orders; ++l)
            rows.push_back({{"order", l},
                            {"measured", moments::upsilon_restricted(params, inst.spec, l)},
                            {"predicted", target_fm.value(l)}});
        doc["factorial_moments"] = rows;
    } else if (cfg.kind == "lugo") {
        config["gamma"] = cfg.gamma_lo;
        config["delta"] = cfg.delta_hi;
        const auto inst = laws::build_lugo_interval(params, cfg.gamma_lo, cfg.delta_hi);
        const double u1 = moments::upsilon_restricted(params, inst.spec, 1);
        const double u2 = moments::upsilon_restricted(params, inst.spec, 2);
        doc["config"] = config;
        doc["meta"] = meta_block();
        spec_summary(doc, inst.spec);
        doc["upsilon_1_measured"] = u1;
        doc["upsilon_2_measured"] = u2;
        doc["gap_measured"] = u1 * u1 - u2;
        doc["upsilon_1_predicted"] = inst.predicted_first;
        doc["upsilon_2_predicted"] = inst.predicted_second;
        doc["gap_predicted"] = inst.predicted_gap;
    } else {
        throw std::invalid_argument(
            "kind: expected 'poisson', 'bernoulli', 'binomial2', or 'lugo'");
    }

    if (cfg.format == "json") {
        emit(cfg, doc.dump(2) + "\n", out);
        return 0;
    }
    // key,value rows; nested blocks flattened with '.' separators
    std::string csv = csv_header(doc["config"]) + "key,value\n";
    const std::function<void(const std::string&, const ordered_json&)> flatten =
        [&](const std::string& prefix, const ordered_json& node) {
            if (node.is_object()) {
                for (const auto& [k, v] : node.items())
                    flatten(prefix.empty() ? k : prefix + "." + k, v);
            } else if (node.is_array()) {
                for (size_t i = 0; i < node.size(); ++i)
                    flatten(prefix + "." + std::to_string(i), node[i]);
            } else if (node.is_number_float()) {
                csv += prefix + "," + g17(node.get<double>()) + "\n";
            } else {
                csv += prefix + "," + node.dump() + "\n";
            }
        };
    for (const auto& [k, v] : doc.items())
        if (k != "config" && k != "meta") flatten(k, v);
    emit(cfg, csv, out);
    return 0;
}

// ---------------------------------------------------------------------------
// tv

int run_tv(CliConfig& cfg, std::ostream& out) {
    EwensParams params(cfg.n, cfg.theta);
    if (cfg.r_values.empty()) throw std::invalid_argument("tv: give at least one --r");
    std::vector<double> values;
    values.reserve(cfg.r_values.size());
    for (int r : cfg.r_values) values.push_back(oracle::exact_tv_short_cycles(params, r));

    ordered_json config = common_config(cfg);
    config["r"] = cfg.r_values;

    if (cfg.format == "json") {
        ordered_json doc;
        doc["config"] = config;
        doc["meta"] = meta_block();
        auto rows = ordered_json::array();
        for (size_t i = 0; i < values.size(); ++i)
            rows.push_back({{"r", cfg.r_values[i]}, {"tv", values[i]}});
        doc["tv"] = rows;
        emit(cfg, doc.dump(2) + "\n", out);
        return 0;
    }
    std::string csv = csv_header(config) + "n,theta,r,tv\n";
    for (size_t i = 0; i < values.size(); ++i)
        csv += std::to_string(cfg.n) + "," + g17(cfg.theta) + "," +
               std::to_string(cfg.r_values[i]) + "," + g17(values[i]) + "\n";
    emit(cfg, csv, out);
    return 0;
}

// ---------------------------------------------------------------------------
// spectral

int run_spectral(CliConfig& cfg, std::ostream& out, std::ostream& err) {
    const bool has_float_window = !cfg.window_text.empty();
    const bool has_rational_window = !cfg.rational_text.empty();
    if (!has_float_window && !has_rational_window && !cfg.has_x) {
        err << "spectral: provide --window, --rational-window, or --x\n";
        return 2;
    }
    EwensParams params(cfg.n, cfg.theta);
    spectral::AngleWindow wf{0.0, 1.0};
    spectral::RationalWindow wr{0, 1, 1, 1};
    if (has_float_window) wf = parse_window(cfg.window_text);
    if (has_rational_window) wr = parse_rational_window(cfg.rational_text);

    const auto batch = cfg.method == "crp"
                           ? sampler::sample_crp(params, cfg.count, cfg.seed)
                           : sampler::sample_conditioned_poisson(params, cfg.count, cfg.seed,
                                                                 cfg.max_rejects);

    struct Row {
        long long draw;
        std::string stat;
        double value;
    };
    std::vector<Row> rows;
    double count_sum = 0.0, count_sq = 0.0, logabs_sum = 0.0;
    for (size_t i = 0; i < batch.draws.size(); ++i) {
        const auto idx = static_cast<long long>(i);
        if (has_float_window || has_rational_window) {
            const long long c = has_float_window
                                    ? spectral::eigen_angle_count(batch.draws[i], wf)
                                    : spectral::eigen_angle_count(batch.draws[i], wr);
            rows.push_back({idx, "angle_count", static_cast<double>(c)});
            count_sum += static_cast<double>(c);
            count_sq += static_cast<double>(c) * static_cast<double>(c);
        }
        if (cfg.has_x) {
            const auto v = spectral::char_poly_log_abs(batch.draws[i], cfg.x_point);
            rows.push_back({idx, "log_abs", v.log_abs});
            rows.push_back({idx, "sign", static_cast<double>(v.sign)});
            logabs_sum += v.log_abs;
        }
    }

    ordered_json config = common_config(cfg);
    config["count"] = cfg.count;
    config["method"] = cfg.method;
    if (has_float_window) config["window"] = cfg.window_text;
    if (has_rational_window) config["rational_window"] = cfg.rational_text;
    if (cfg.has_x) config["x"] = cfg.x_point;
    config["exact_mean"] = cfg.exact_mean;

    ordered_json summary;
    const auto nn = static_cast<double>(batch.draws.size());
    if (has_float_window || has_rational_window) {
        const double mean = count_sum / nn;
        const double var = std::max(0.0, count_sq / nn - mean * mean);
        summary["angle_count_mean"] = mean;
        summary["angle_count_std_error"] = std::sqrt(var / nn);
        if (cfg.exact_mean) {
            const auto spec = has_float_window ? spectral::window_spec(cfg.n, wf)
                                               : spectral::window_spec(cfg.n, wr);
            summary["angle_count_exact_mean"] =
                moments::exact_factorial_moment(params, spec, 1);
        }
    }
    if (cfg.has_x) summary["log_abs_mean"] = logabs_sum / nn;

    if (cfg.format == "json") {
        ordered_json doc;
        doc["config"] = config;
        doc["meta"] = meta_block();
        auto arr = ordered_json::array();
        for (const auto& r : rows)
            arr.push_back({{"draw", r.draw}, {"statistic", r.stat}, {"value", r.value}});
        doc["draws"] = arr;
        doc["summary"] = summary;
        emit(cfg, doc.dump(2) + "\n", out);
        return 0;
    }
    std::string csv = csv_header(config) + "draw,statistic,value\n";
    for (const auto& r : rows)
        csv += std::to_string(r.draw) + "," + r.stat + "," + g17(r.value) + "\n";
    emit(cfg, csv, out);
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CliConfig cfg;
    CLI::App app{"Weighted random permutation statistics: exact moments, samplers, "
                 "limit-law instances, and spectral counts"};
    app.require_subcommand(1);
    app.fallthrough();

    app.add_option("--n", cfg.n, "population size")->check(CLI::PositiveNumber);
    app.add_option("--theta", cfg.theta, "cycle-weight parameter (> 0)");
    app.add_option("--seed", cfg.seed, "random seed");
    auto* fmt_opt = app.add_option("--format", cfg.format,
                                   "artifact format (tabular commands default to csv, "
                                   "instance summaries to json)")
                        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", cfg.out_path, "write the artifact to this path instead of stdout");
    app.add_option("--threads", cfg.threads,
                   "worker thread budget (reserved; execution is currently sequential)")
        ->envname("EWENS_THREADS")
        ->check(CLI::PositiveNumber);

    auto* sample = app.add_subcommand(
        "sample", "draw cycle structures and histogram an additive statistic");
    sample->add_option("--count", cfg.count, "number of draws")->check(CLI::PositiveNumber);
    sample->add_option("--method", cfg.method, "sampling algorithm")
        ->check(CLI::IsMember({"crp", "conditioned-poisson"}));
    sample->add_option("--max-rejects", cfg.max_rejects,
                       "per-draw rejection budget (conditioned-poisson)")
        ->check(CLI::PositiveNumber);
    sample->add_option("--spec", cfg.spec_text,
                       "weight spec as inline JSON or @file (default: all weights 1)");
    sample->add_option("--orders", cfg.orders, "factorial-moment orders to report")
        ->check(CLI::Range(1, 12));

    auto* momentsc = app.add_subcommand(
        "moments", "exact factorial moments of an additive statistic, with optional "
                   "truncated approximations");
    momentsc->add_option("--spec", cfg.spec_text,
                         "weight spec as inline JSON or @file (default: all weights 1)");
    momentsc->add_option("--orders", cfg.orders, "highest order to compute")
        ->check(CLI::Range(1, 12));
    momentsc->add_option("--truncation", cfg.truncation,
                         "weight cap m for the truncated approximation (0 = off)")
        ->check(CLI::Range(0, 12));

    auto* verify = app.add_subcommand(
        "verify", "cross-check the moment recurrence against exact enumeration oracles");
    verify->add_option("--orders", cfg.orders, "highest moment order checked")
        ->check(CLI::Range(1, 6));
    verify->add_option("--specs", cfg.random_specs, "number of seeded random weight specs")
        ->check(CLI::Range(1, 50));

    auto* instance = app.add_subcommand(
        "instance", "build a named limit-law construction and report predicted vs "
                    "measured moments");
    instance->add_option("--kind", cfg.kind, "poisson | bernoulli | binomial2 | lugo")
        ->required();
    instance->add_option("--mu", cfg.mu, "target Poisson mean (kind=poisson)");
    instance->add_option("--p", cfg.p, "target success probability (bernoulli, binomial2)");
    instance->add_option("--gamma", cfg.gamma_lo, "interval lower endpoint fraction (lugo)");
    instance->add_option("--delta", cfg.delta_hi, "interval upper endpoint fraction (lugo)");
    instance->add_option("--orders", cfg.orders, "moment orders to report")
        ->check(CLI::Range(1, 6));
    instance->add_option("--truncation", cfg.truncation,
                         "weight cap m for measured moments (kind=poisson; default 8)")
        ->check(CLI::Range(0, 12));

    auto* tv = app.add_subcommand(
        "tv", "exact total variation distance between short-cycle counts and independent "
              "Poisson levels");
    tv->add_option("--r", cfg.r_values, "cycle-length cutoff; repeatable")
        ->required()
        ->check(CLI::PositiveNumber);

    auto* spectralc = app.add_subcommand(
        "spectral", "per-draw eigenvalue-angle counts and characteristic-polynomial "
                    "magnitudes for sampled permutations");
    spectralc->add_option("--count", cfg.count, "number of draws")->check(CLI::PositiveNumber);
    spectralc->add_option("--method", cfg.method, "sampling algorithm")
        ->check(CLI::IsMember({"crp", "conditioned-poisson"}));
    spectralc->add_option("--max-rejects", cfg.max_rejects,
                          "per-draw rejection budget (conditioned-poisson)")
        ->check(CLI::PositiveNumber);
    auto* wopt = spectralc->add_option("--window", cfg.window_text,
                                       "angle window 'lo:hi', fractions of a full turn "
                                       "in [0, 1]");
    spectralc->add_option("--rational-window", cfg.rational_text, "exact angle window 'p/q:r/s'")
        ->excludes(wopt);
    auto* xopt = spectralc->add_option("--x", cfg.x_point,
                                       "evaluate the characteristic polynomial at this point");
    spectralc->add_flag("--exact-mean", cfg.exact_mean,
                        "also compute the exact mean angle count (costs O(n * support))");

    // subcommands that draw or enumerate need n; default it per command where
    // the contract fixes one
    std::vector<std::string> argv_store;
    argv_store.reserve(args.size() + 1);
    argv_store.emplace_back("ewens");
    for (const auto& a : args) argv_store.push_back(a);
    std::vector<const char*> argv;
    argv.reserve(argv_store.size());
    for (const auto& s : argv_store) argv.push_back(s.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    cfg.has_x = xopt->count() > 0;

    try {
        const auto subs = app.get_subcommands();
        cfg.subcommand = subs.front()->get_name();
        if (cfg.subcommand == "instance" && fmt_opt->count() == 0) cfg.format = "json";
        if (cfg.n <= 0) throw std::invalid_argument("--n is required and must be positive");
        if (cfg.subcommand == "sample") return run_sample(cfg, out);
        if (cfg.subcommand == "moments") return run_moments(cfg, out);
        if (cfg.subcommand == "verify") return run_verify(cfg, out);
        if (cfg.subcommand == "instance") return run_instance(cfg, out);
        if (cfg.subcommand == "tv") return run_tv(cfg, out);
        if (cfg.subcommand == "spectral") return run_spectral(cfg, out, err);
        err << "usage error: unknown subcommand '" << cfg.subcommand << "'\n";
        return 2;
    } catch (const ResourceError& e) {
        err << "resource error: " << e.what() << "\n";
        return 5;
    } catch (const std::domain_error& e) {
        err << "domain error: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        err << "validation error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace ewens::cli
