#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "ewens/core.hpp"
#include "ewens/moments.hpp"
#include "ewens/sampler.hpp"
#include "ewens/spectral.hpp"

using namespace ewens;
using spectral::AngleWindow;
using spectral::RationalWindow;

namespace {

CycleStructure merge_structures(const CycleStructure& a, const CycleStructure& b) {
    std::map<int, long long> counts;
    for (const auto& [j, c] : a.pairs()) counts[j] += c;
    for (const auto& [j, c] : b.pairs()) counts[j] += c;
    return CycleStructure::from_pairs(
        a.n() + b.n(), std::vector<std::pair<int, long long>>(counts.begin(), counts.end()));
}

}  // namespace

TEST_CASE("characteristic polynomial magnitude and sign") {
    {
        // Z(0) = 1 for every cycle type
        auto s = CycleStructure::from_pairs(7, {{1, 3}, {2, 2}});
        auto v = spectral::char_poly_log_abs(s, 0.0);
        CHECK(v.log_abs == 0.0);
        CHECK(v.sign == 1);
    }
    {
        // single cycle: one factor 1 - x^n
        auto s = CycleStructure::from_pairs(5, {{5, 1}});
        auto v = spectral::char_poly_log_abs(s, 0.3);
        CHECK(v.log_abs == doctest::Approx(std::log(1.0 - std::pow(0.3, 5))).epsilon(1e-14));
        CHECK(v.sign == 1);
    }
    {
        // two fixed points at x = 1/2: (1 - x)^2
        auto s = CycleStructure::from_pairs(2, {{1, 2}});
        auto v = spectral::char_poly_log_abs(s, 0.5);
        CHECK(v.log_abs == doctest::Approx(2.0 * std::log(0.5)).epsilon(1e-14));
        CHECK(v.sign == 1);
    }
    {
        // signs outside the unit disc
        auto c3 = CycleStructure::from_pairs(3, {{3, 1}});
        auto v = spectral::char_poly_log_abs(c3, 2.0);  // 1 - 8 = -7
        CHECK(v.log_abs == doctest::Approx(std::log(7.0)).epsilon(1e-13));
        CHECK(v.sign == -1);

        auto two2 = CycleStructure::from_pairs(4, {{2, 2}});
        auto w = spectral::char_poly_log_abs(two2, 2.0);  // (1 - 4)^2 = 9
        CHECK(w.log_abs == doctest::Approx(2.0 * std::log(3.0)).epsilon(1e-13));
        CHECK(w.sign == 1);

        auto c2 = CycleStructure::from_pairs(2, {{2, 1}});
        auto u = spectral::char_poly_log_abs(c2, -2.0);  // 1 - 4 = -3
        CHECK(u.log_abs == doctest::Approx(std::log(3.0)).epsilon(1e-13));
        CHECK(u.sign == -1);

        auto odd = spectral::char_poly_log_abs(c3, -2.0);  // 1 + 8 = 9
        CHECK(odd.log_abs == doctest::Approx(std::log(9.0)).epsilon(1e-13));
        CHECK(odd.sign == 1);
    }
    {
        // long cycle far outside the disc: no overflow, log-scale answer
        auto s = CycleStructure::from_pairs(400, {{400, 1}});
        auto v = spectral::char_poly_log_abs(s, 1.5);
        CHECK(std::isfinite(v.log_abs));
        CHECK(v.log_abs == doctest::Approx(400.0 * std::log(1.5)).epsilon(1e-12));
        CHECK(v.sign == -1);
    }
    {
        // unit-circle roots: x = 1 always, x = -1 on even lengths only
        auto c4 = CycleStructure::from_pairs(4, {{4, 1}});
        CHECK_THROWS_AS(static_cast<void>(spectral::char_poly_log_abs(c4, 1.0)),
                        std::domain_error);
        try {
            static_cast<void>(spectral::char_poly_log_abs(c4, 1.0));
        } catch (const std::domain_error& e) {
            CHECK(std::string(e.what()).find('4') != std::string::npos);
        }
        CHECK_THROWS_AS(static_cast<void>(spectral::char_poly_log_abs(c4, -1.0)),
                        std::domain_error);
        auto c3 = CycleStructure::from_pairs(3, {{3, 1}});
        auto v = spectral::char_poly_log_abs(c3, -1.0);  // 1 - (-1)^3 = 2
        CHECK(v.log_abs == doctest::Approx(std::log(2.0)).epsilon(1e-14));
        CHECK(v.sign == 1);
        CHECK_THROWS_AS(static_cast<void>(spectral::char_poly_log_abs(
                            c3, std::numeric_limits<double>::infinity())),
                        std::invalid_argument);
    }
    {
        // log of a product: concatenation adds log-magnitudes, multiplies signs
        EwensParams pa(20, 1.0), pb(15, 2.0);
        auto ba = sampler::sample_crp(pa, 40, 5);
        auto bb = sampler::sample_crp(pb, 40, 6);
        for (double x : {0.4, -0.8, 1.7, -2.5}) {
            for (size_t i = 0; i < ba.draws.size(); ++i) {
                const auto va = spectral::char_poly_log_abs(ba.draws[i], x);
                const auto vb = spectral::char_poly_log_abs(bb.draws[i], x);
                const auto vm =
                    spectral::char_poly_log_abs(merge_structures(ba.draws[i], bb.draws[i]), x);
                CHECK(vm.log_abs ==
                      doctest::Approx(va.log_abs + vb.log_abs).epsilon(1e-11));
                CHECK(vm.sign == va.sign * vb.sign);
            }
        }
    }
}

TEST_CASE("eigenvalue angle counting") {
    {
        // the full circle sees all n angles
        EwensParams p(30, 1.2);
        auto batch = sampler::sample_crp(p, 100, 9);
        for (const auto& s : batch.draws) {
            CHECK(spectral::eigen_angle_count(s, AngleWindow{0.0, 1.0}) == 30);
            CHECK(spectral::eigen_angle_count(s, RationalWindow{0, 1, 1, 1}) == 30);
        }
    }
    {
        // quarter roots of unity in the upper half-plane: t = 0, 1 of 4
        auto c4 = CycleStructure::from_pairs(4, {{4, 1}});
        CHECK(spectral::eigen_angle_count(c4, AngleWindow{0.0, 0.5}) == 2);
        CHECK(spectral::eigen_angle_count(c4, RationalWindow{0, 1, 1, 2}) == 2);
    }
    {
        // disjoint windows partitioning the circle always sum to n
        EwensParams p(25, 0.7);
        auto batch = sampler::sample_crp(p, 100, 15);
        for (const auto& s : batch.draws) {
            const long long a = spectral::eigen_angle_count(s, AngleWindow{0.0, 1.0 / 3.0});
            const long long b =
                spectral::eigen_angle_count(s, AngleWindow{1.0 / 3.0, 2.0 / 3.0});
            const long long c = spectral::eigen_angle_count(s, AngleWindow{2.0 / 3.0, 1.0});
            CHECK(a + b + c == 25);
            const long long ar = spectral::eigen_angle_count(s, RationalWindow{0, 1, 1, 3});
            const long long br = spectral::eigen_angle_count(s, RationalWindow{1, 3, 2, 3});
            const long long cr = spectral::eigen_angle_count(s, RationalWindow{2, 3, 1, 1});
            CHECK(ar + br + cr == 25);
        }
    }
    {
        // rational boundary handling against a literal integer scan
        for (auto [pl, ql, ph, qh] :
             {std::array<long long, 4>{1, 3, 2, 3}, {0, 1, 1, 2}, {1, 4, 3, 4},
              {1, 10, 7, 10}, {1, 7, 5, 7}, {5, 12, 11, 12}}) {
            for (int j = 1; j <= 60; ++j) {
                long long literal = 0;
                for (long long t = 0; t < j; ++t)
                    if (t * ql >= pl * j && t * qh < ph * j) ++literal;
                auto s = CycleStructure::from_pairs(j, {{j, 1}});
                CHECK(spectral::eigen_angle_count(s, RationalWindow{pl, ql, ph, qh}) ==
                      literal);
            }
        }
    }
    {
        // invalid windows
        auto s = CycleStructure::from_pairs(3, {{3, 1}});
        CHECK_THROWS_AS(
            static_cast<void>(spectral::eigen_angle_count(s, AngleWindow{-0.1, 0.5})),
            std::invalid_argument);
        CHECK_THROWS_AS(
            static_cast<void>(spectral::eigen_angle_count(s, AngleWindow{0.5, 0.5})),
            std::invalid_argument);
        CHECK_THROWS_AS(
            static_cast<void>(spectral::eigen_angle_count(s, AngleWindow{0.2, 1.1})),
            std::invalid_argument);
        CHECK_THROWS_AS(
            static_cast<void>(spectral::eigen_angle_count(s, RationalWindow{1, 0, 1, 2})),
            std::invalid_argument);
        CHECK_THROWS_AS(
            static_cast<void>(spectral::eigen_angle_count(s, RationalWindow{1, 2, 1, 2})),
            std::invalid_argument);
        CHECK_THROWS_AS(
            static_cast<void>(spectral::eigen_angle_count(s, RationalWindow{1, 2, 3, 2})),
            std::invalid_argument);
    }
}

TEST_CASE("angle statistics are additive statistics") {
    // bit-exact identity between the spectral count and additive_value of
    // the induced weights, over random structures
    EwensParams p(50, 1.0);
    auto batch = sampler::sample_crp(p, 100, 21);
    const AngleWindow wf{0.13, 0.77};
    const RationalWindow wr{2, 7, 5, 6};
    auto spec_f = spectral::window_spec(50, wf);
    auto spec_r = spectral::window_spec(50, wr);
    for (const auto& s : batch.draws) {
        CHECK(spectral::eigen_angle_count(s, wf) == additive_value(spec_f, s));
        CHECK(spectral::eigen_angle_count(s, wr) == additive_value(spec_r, s));
    }
    CHECK_THROWS_AS(static_cast<void>(spectral::window_spec(10, AngleWindow{0.5, 0.2})),
                    std::invalid_argument);
}

TEST_CASE("sampled angle counts match the exact first moment") {
    // Monte Carlo mean of the window count at n = 10^4 against the exact
    // factorial-moment recurrence applied to the induced weights
    const int n = 10000;
    EwensParams p(n, 1.0);
    const AngleWindow w{0.0, 0.1};
    auto spec = spectral::window_spec(n, w);

    auto batch = sampler::sample_crp(p, 2000, 33);
    sampler::EmpiricalLaw law;
    law.batches.assign(50, {});
    long long idx = 0;
    for (const auto& s : batch.draws) {
        const long long v = spectral::eigen_angle_count(s, w);
        ++law.counts[v];
        ++law.batches[static_cast<size_t>(idx % 50)][v];
        ++law.total;
        ++idx;
    }
    auto fm = sampler::empirical_factorial_moments(law, 1);
    const double exact = moments::exact_factorial_moment(p, spec, 1);
    CHECK(fm.std_error(1) > 0.0);
    CHECK(std::abs(fm.value(1) - exact) <= 3.0 * fm.std_error(1));
}
