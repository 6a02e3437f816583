#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ewens/cli.hpp"
#include "ewens/core.hpp"
#include "ewens/moments.hpp"
#include "ewens/oracle.hpp"
#include "ewens/sampler.hpp"
#include "ewens/spectral.hpp"

using namespace ewens;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& artifact) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(artifact);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string f;
        while (std::getline(ls, f, ',')) fields.push_back(f);
        rows.push_back(fields);
    }
    return rows;
}

}  // namespace

TEST_CASE("usage and exit codes") {
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    {
        auto r = run({"--help"});
        CHECK(r.code == 0);
        CHECK(r.out.find("Usage") != std::string::npos);
        for (const char* sub : {"sample", "moments", "verify", "instance", "tv", "spectral"})
            CHECK(r.out.find(sub) != std::string::npos);
    }
    {
        // malformed spec JSON: validation error with a field-level message
        auto r = run({"sample", "--n", "8", "--theta", "1", "--spec", "{oops"});
        CHECK(r.code == 3);
        CHECK(r.err.find("validation error") != std::string::npos);
        CHECK(r.err.find("JSON") != std::string::npos);
    }
    {
        // mathematical precondition violations map to the domain code
        CHECK(run({"moments", "--n", "8", "--theta", "-1"}).code == 4);
        CHECK(run({"tv", "--n", "100", "--theta", "1", "--r", "150"}).code == 4);
        CHECK(run({"instance", "--kind", "binomial2", "--theta", "2", "--n", "100",
                   "--p", "0.3"})
                  .code == 4);
        CHECK(run({"instance", "--kind", "bernoulli", "--theta", "1", "--n", "100",
                   "--p", "0.8"})
                  .code == 4);
        CHECK(run({"instance", "--kind", "poisson", "--theta", "1", "--n", "100",
                   "--mu", "1.19"})
                  .code == 4);
    }
    {
        // guarded resource limits map to their own code
        CHECK(run({"tv", "--n", "25000", "--theta", "1", "--r", "10"}).code == 5);
        CHECK(run({"sample", "--n", "5", "--theta", "701", "--method",
                   "conditioned-poisson", "--count", "10"})
                  .code == 5);
    }
    CHECK(run({"verify", "--n", "13", "--theta", "1"}).code == 3);
    CHECK(run({"sample", "--theta", "1"}).code == 3);  // --n missing
}

TEST_CASE("sample artifact: reproducible histogram and moments") {
    const std::vector<std::string> args = {"sample", "--n", "10",    "--theta", "1.5",
                                           "--seed", "42", "--count", "800",    "--orders", "2"};
    auto r1 = run(args);
    auto r2 = run(args);
    CHECK(r1.code == 0);
    CHECK(r1.out == r2.out);  // byte-for-byte
    CHECK(r1.out.rfind("# config: {\"subcommand\":\"sample\"", 0) == 0);

    auto rows = parse_csv(r1.out);
    REQUIRE(rows.size() >= 2);
    CHECK(rows[0] == std::vector<std::string>{"value", "count"});
    long long total = 0;
    for (size_t i = 1; i < rows.size(); ++i) total += std::stoll(rows[i][1]);
    CHECK(total == 800);

    // json variant carries the same data plus jackknife moment estimates,
    // bit-identical to calling the library directly
    auto args_json = args;
    args_json.insert(args_json.end(), {"--format", "json"});
    auto rj = run(args_json);
    CHECK(rj.code == 0);
    auto doc = nlohmann::json::parse(rj.out);
    CHECK(doc["total"] == 800);
    long long hist_total = 0;
    for (const auto& cell : doc["histogram"]) hist_total += cell["count"].get<long long>();
    CHECK(hist_total == 800);

    EwensParams params(10, 1.5);
    const auto spec = AdditiveSpec::from_intervals(10, {{0.0, 1.0, 1}});
    const auto law = sampler::sample_additive_histogram(params, spec, 800, 42,
                                                        sampler::Method::Crp);
    const auto fm = sampler::empirical_factorial_moments(law, 2);
    REQUIRE(doc["factorial_moments"].size() == 2);
    CHECK(doc["factorial_moments"][0]["value"].get<double>() == fm.value(1));
    CHECK(doc["factorial_moments"][1]["std_error"].get<double>() == fm.std_error(2));

    // rerunning the json config reproduces everything except the timestamp
    auto rj2 = run(args_json);
    auto doc2 = nlohmann::json::parse(rj2.out);
    doc.erase("meta");
    doc2.erase("meta");
    CHECK(doc == doc2);

    CHECK(run({"sample", "--n", "10", "--theta", "1", "--count", "200", "--method",
               "conditioned-poisson"})
              .code == 0);
}

TEST_CASE("moments artifact matches the library at full precision") {
    auto r = run({"moments", "--n", "20", "--theta", "1.5", "--spec",
                  R"({"explicit":{"1":2,"3":1}})", "--orders", "3", "--truncation", "6"});
    REQUIRE(r.code == 0);
    auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 1 + 3 * 3);  // header + (exact, truncated, error_bound) per order
    CHECK(rows[0] == std::vector<std::string>{"order", "method", "value"});

    EwensParams params(20, 1.5);
    const auto spec = AdditiveSpec::from_json(20, R"({"explicit":{"1":2,"3":1}})");
    const auto exact = moments::exact_factorial_moments(params, spec, 3);
    for (int l = 1; l <= 3; ++l) {
        const auto& row = rows[static_cast<size_t>(1 + (l - 1) * 3)];
        CHECK(row[0] == std::to_string(l));
        CHECK(row[1] == "exact");
        CHECK(row[2] == g17(exact.value(l)));  // 17-digit contract, exact string
        const auto& trow = rows[static_cast<size_t>(2 + (l - 1) * 3)];
        CHECK(trow[1] == "truncated");
        CHECK(trow[2] == g17(moments::upsilon_truncated(params, spec, l, 6)));
    }

    // without --truncation only the exact rows appear
    auto r2 = run({"moments", "--n", "20", "--theta", "1.5", "--spec",
                   R"({"explicit":{"1":2,"3":1}})", "--orders", "3"});
    CHECK(parse_csv(r2.out).size() == 1 + 3);
}

TEST_CASE("verify subcommand cross-checks the oracles") {
    {
        auto r = run({"verify", "--n", "8", "--theta", "2", "--orders", "4"});
        CHECK(r.code == 0);
        CHECK(r.out.find("FAIL") == std::string::npos);
        auto rows = parse_csv(r.out);
        // header + normalization + 5 specs x 4 orders x 2 comparisons
        CHECK(rows.size() == 2 + 5 * 4 * 2);
        for (size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].back() == "pass");
    }
    {
        // above the enumeration range only the partition-oracle comparison runs
        auto r = run({"verify", "--n", "11", "--theta", "0.5", "--orders", "3", "--specs",
                      "2"});
        CHECK(r.code == 0);
        CHECK(parse_csv(r.out).size() == 2 + 2 * 3);
    }
}

TEST_CASE("instance artifacts report predictions against measurements") {
    {
        auto r = run({"instance", "--kind", "lugo", "--theta", "2", "--n", "20000",
                      "--gamma", "0.3333333333333333", "--delta", "0.5"});
        REQUIRE(r.code == 0);
        auto doc = nlohmann::json::parse(r.out);  // summaries default to json
        CHECK(doc["upsilon_1_predicted"].get<double>() ==
              doctest::Approx(0.47759688288).epsilon(1e-9));
        CHECK(doc["gap_predicted"].get<double>() ==
              doctest::Approx(1.0 / 9.0).epsilon(1e-6));
        CHECK(std::abs(doc["gap_measured"].get<double>() -
                       doc["gap_predicted"].get<double>()) <= 0.01);
        CHECK(doc["spec"]["support_min_j"] == 6667);
        CHECK(doc["spec"]["support_max_j"] == 10000);
    }
    {
        auto r = run({"instance", "--kind", "lugo", "--theta", "2", "--n", "20000",
                      "--gamma", "0.3333333333333333", "--delta", "0.5", "--format", "csv"});
        REQUIRE(r.code == 0);
        CHECK(r.out.rfind("# config: ", 0) == 0);
        CHECK(r.out.find("key,value") != std::string::npos);
        CHECK(r.out.find("gap_predicted,") != std::string::npos);
    }
    {
        auto r = run({"instance", "--kind", "poisson", "--theta", "1", "--n", "2000",
                      "--mu", "0.5", "--orders", "2"});
        REQUIRE(r.code == 0);
        auto doc = nlohmann::json::parse(r.out);
        for (const char* key : {"mu", "mu_max", "t1", "d_1", "levels"})
            CHECK(doc["info"].contains(key));
        CHECK(doc["factorial_moments"][0]["predicted"].get<double>() == 0.5);
        CHECK(std::abs(doc["factorial_moments"][0]["measured"].get<double>() - 0.5) <= 0.1);
    }
    {
        auto r = run({"instance", "--kind", "bernoulli", "--theta", "1.5", "--n", "5000",
                      "--p", "0.3", "--orders", "2"});
        REQUIRE(r.code == 0);
        auto doc = nlohmann::json::parse(r.out);
        CHECK(doc["target"].get<std::string>().find("Bernoulli") != std::string::npos);
        CHECK(doc["factorial_moments"][0]["predicted"].get<double>() == 0.3);
        CHECK(doc["factorial_moments"][1]["predicted"].get<double>() == 0.0);
    }
}

TEST_CASE("tv artifact is ordered and full precision") {
    auto r = run({"tv", "--n", "200", "--theta", "1", "--r", "5", "--r", "150"});
    REQUIRE(r.code == 0);
    auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == std::vector<std::string>{"n", "theta", "r", "tv"});
    const double tv5 = std::stod(rows[1][3]);
    const double tv150 = std::stod(rows[2][3]);
    CHECK(tv5 >= 0.0);
    CHECK(tv150 <= 1.0);
    CHECK(tv5 < tv150);
    EwensParams params(200, 1.0);
    CHECK(rows[1][3] == g17(oracle::exact_tv_short_cycles(params, 5)));
    CHECK(rows[2][3] == g17(oracle::exact_tv_short_cycles(params, 150)));
}

TEST_CASE("spectral artifact: per-draw angle counts and polynomial values") {
    {
        auto r = run({"spectral", "--n", "12", "--theta", "1", "--count", "40", "--seed",
                      "3", "--window", "0:0.5", "--x", "2.0"});
        REQUIRE(r.code == 0);
        auto rows = parse_csv(r.out);
        REQUIRE(rows.size() == 1 + 40 * 3);
        CHECK(rows[0] == std::vector<std::string>{"draw", "statistic", "value"});

        // rows must equal direct library evaluation on the same batch
        EwensParams params(12, 1.0);
        auto batch = sampler::sample_crp(params, 40, 3);
        for (int i = 0; i < 40; ++i) {
            const auto& s = batch.draws[static_cast<size_t>(i)];
            const auto& crow = rows[static_cast<size_t>(1 + 3 * i)];
            CHECK(crow[1] == "angle_count");
            CHECK(std::stoll(crow[2].substr(0, crow[2].find('.'))) ==
                  spectral::eigen_angle_count(s, spectral::AngleWindow{0.0, 0.5}));
            const auto v = spectral::char_poly_log_abs(s, 2.0);
            CHECK(rows[static_cast<size_t>(2 + 3 * i)][2] == g17(v.log_abs));
            CHECK(rows[static_cast<size_t>(3 + 3 * i)][2] ==
                  g17(static_cast<double>(v.sign)));
        }
    }
    {
        auto r = run({"spectral", "--n", "15", "--theta", "2", "--count", "30", "--seed",
                      "8", "--rational-window", "1/3:2/3", "--format", "json",
                      "--exact-mean"});
        REQUIRE(r.code == 0);
        auto doc = nlohmann::json::parse(r.out);
        CHECK(doc["draws"].size() == 30);
        CHECK(doc["summary"].contains("angle_count_mean"));
        CHECK(doc["summary"].contains("angle_count_std_error"));
        EwensParams params(15, 2.0);
        const auto spec = spectral::window_spec(15, spectral::RationalWindow{1, 3, 2, 3});
        CHECK(doc["summary"]["angle_count_exact_mean"].get<double>() ==
              moments::exact_factorial_moment(params, spec, 1));
    }
    CHECK(run({"spectral", "--n", "10", "--theta", "1", "--count", "3"}).code == 2);
    CHECK(run({"spectral", "--n", "10", "--theta", "1", "--count", "3", "--window",
               "abc"})
              .code == 3);
    CHECK(run({"spectral", "--n", "10", "--theta", "1", "--count", "3", "--window",
               "0.9:0.2"})
              .code == 3);
    CHECK(run({"spectral", "--n", "10", "--theta", "1", "--count", "3", "--x", "1.0"})
              .code == 4);
    CHECK(run({"spectral", "--n", "10", "--theta", "1", "--count", "3", "--window",
               "0:0.5", "--rational-window", "0/1:1/2"})
              .code == 2);
}

TEST_CASE("output redirection and environment plumbing") {
    const std::string path = "/tmp/ewens_cli_test_artifact.csv";
    std::remove(path.c_str());
    auto direct = run({"tv", "--n", "100", "--theta", "1", "--r", "4"});
    auto redirected =
        run({"tv", "--n", "100", "--theta", "1", "--r", "4", "--out", path});
    REQUIRE(redirected.code == 0);
    CHECK(redirected.out.empty());
    std::ifstream f(path);
    std::stringstream buf;
    buf << f.rdbuf();
    // identical except for the echoed --out path inside the config line
    auto strip_config = [](const std::string& s) { return s.substr(s.find('\n') + 1); };
    CHECK(strip_config(buf.str()) == strip_config(direct.out));
    CHECK(buf.str().find("\"out\":\"" + path + "\"") != std::string::npos);
    std::remove(path.c_str());

    // a spec given as @file resolves to the same artifact as inline json
    const std::string spec_path = "/tmp/ewens_cli_test_spec.json";
    {
        std::ofstream sf(spec_path);
        sf << R"({"explicit":{"2":1,"5":3}})";
    }
    auto inline_run = run({"moments", "--n", "12", "--theta", "2", "--spec",
                           R"({"explicit":{"2":1,"5":3}})"});
    auto file_run = run({"moments", "--n", "12", "--theta", "2", "--spec", "@" + spec_path});
    CHECK(inline_run.code == 0);
    CHECK(inline_run.out == file_run.out);
    std::remove(spec_path.c_str());
    CHECK(run({"moments", "--n", "12", "--theta", "2", "--spec", "@/nonexistent/x.json"})
              .code == 3);

    // EWENS_THREADS feeds the --threads default and is echoed in the header
    setenv("EWENS_THREADS", "7", 1);
    auto env_run = run({"tv", "--n", "50", "--theta", "1", "--r", "3"});
    unsetenv("EWENS_THREADS");
    CHECK(env_run.out.find("\"threads\":7") != std::string::npos);
}
