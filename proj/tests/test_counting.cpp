#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "spdc/counting.hpp"

using namespace spdc;
using Catch::Approx;

TEST_CASE("the efficiency chain multiplies out to the partner-detection ratio") {
    EfficiencyChain chain;  // 0.70 * 0.65 * 0.55
    CHECK(chain.product() == Approx(0.25025).margin(1e-15));
    CHECK(expected_ratio(chain) == Approx(0.25025).margin(1e-15));

    EfficiencyChain lossy = chain;
    lossy.misc_optical = 0.48;
    CHECK(expected_ratio(lossy) == Approx(0.12012).margin(1e-15));
}

TEST_CASE("efficiencies outside (0, 1] are rejected") {
    EfficiencyChain c;
    c.detector = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.detector = -0.2;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.detector = 1.2;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.detector = 1.0;
    CHECK_NOTHROW(c.validate());

    CountingConfig cfg;
    cfg.duration_s = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = CountingConfig{};
    cfg.window_ns = -1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = CountingConfig{};
    cfg.pair_rate_hz = -5.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("accidental rate is the singles product times the window") {
    CHECK(accidental_rate(1e4, 1e4, 7.3) == Approx(0.73).epsilon(1e-14));
    CHECK(accidental_rate(0.0, 1e4, 7.3) == 0.0);
    CHECK(accidental_rate(2e4, 5e3, 10.0) == Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(accidental_rate(-1.0, 1e4, 7.3), std::invalid_argument);
    CHECK_THROWS_AS(accidental_rate(1e4, 1e4, -7.3), std::invalid_argument);
}

TEST_CASE("the same seed reproduces the same counts; a new seed moves them") {
    CountingConfig cfg;
    EfficiencyChain chain;
    auto a = simulate_counts(cfg, chain, chain);
    auto b = simulate_counts(cfg, chain, chain);
    CHECK(a.pairs == b.pairs);
    CHECK(a.singles1 == b.singles1);
    CHECK(a.singles2 == b.singles2);
    CHECK(a.true_coinc == b.true_coinc);
    CHECK(a.accidental_coinc == b.accidental_coinc);

    cfg.seed = 98765;
    auto c = simulate_counts(cfg, chain, chain);
    CHECK((a.pairs != c.pairs || a.singles1 != c.singles1 || a.true_coinc != c.true_coinc));
}

TEST_CASE("count hierarchy: coincidences never exceed singles, singles never exceed pairs") {
    CountingConfig cfg;
    EfficiencyChain chain;
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        cfg.seed = seed;
        auto s = simulate_counts(cfg, chain, chain);
        REQUIRE(s.true_coinc <= std::min(s.singles1, s.singles2));
        REQUIRE(s.singles1 <= s.pairs);
        REQUIRE(s.singles2 <= s.pairs);
        REQUIRE(s.accidental_coinc >= 0);
    }
}

TEST_CASE("measured coincidence-to-singles ratios track the partner chain product") {
    CountingConfig cfg;  // 1e5 pairs/s for 5 s
    EfficiencyChain chain1;
    EfficiencyChain chain2;
    chain2.misc_optical = 0.5;  // make the two arms distinct
    double sum_r1 = 0.0, sum_r2 = 0.0;
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
        cfg.seed = seed;
        auto s = simulate_counts(cfg, chain1, chain2);
        double ratio1 = double(s.true_coinc) / double(s.singles1);  // limited by arm 2
        double ratio2 = double(s.true_coinc) / double(s.singles2);
        REQUIRE(ratio1 == Approx(expected_ratio(chain2)).margin(5e-3));
        REQUIRE(ratio2 == Approx(expected_ratio(chain1)).margin(5e-3));
        sum_r1 += ratio1;
        sum_r2 += ratio2;
    }
    CHECK(sum_r1 / 20.0 == Approx(expected_ratio(chain2)).margin(1e-3));
    CHECK(sum_r2 / 20.0 == Approx(expected_ratio(chain1)).margin(1e-3));
}

TEST_CASE("accidental draws follow the measured-singles rate product") {
    CountingConfig cfg;
    cfg.window_ns = 100.0;  // widen the window for usable statistics
    EfficiencyChain chain;
    double total_mean = 0.0;
    std::int64_t total_acc = 0;
    for (std::uint64_t seed = 500; seed < 520; ++seed) {
        cfg.seed = seed;
        auto s = simulate_counts(cfg, chain, chain);
        double r1 = s.singles1 / cfg.duration_s;
        double r2 = s.singles2 / cfg.duration_s;
        total_mean += accidental_rate(r1, r2, cfg.window_ns) * cfg.duration_s;
        total_acc += s.accidental_coinc;
    }
    CHECK(std::abs(total_acc - total_mean) < 5.0 * std::sqrt(total_mean) + 1.0);
}

TEST_CASE("independent-oracle check of the accidental-rate formula") {
    // two independent Poisson streams, coincidence = |t1 - t2| < w/2
    std::mt19937_64 rng(424242);
    double rate1 = 2e4, rate2 = 2e4, T = 1.0, w_s = 500e-9;
    auto draw_stream = [&](double rate) {
        std::vector<double> t;
        std::exponential_distribution<double> gap(rate);
        for (double x = gap(rng); x < T; x += gap(rng)) t.push_back(x);
        return t;
    };
    auto s1 = draw_stream(rate1);
    auto s2 = draw_stream(rate2);
    std::int64_t coinc = 0;
    size_t j0 = 0;
    for (double t1 : s1) {
        while (j0 < s2.size() && s2[j0] < t1 - 0.5 * w_s) ++j0;
        for (size_t j = j0; j < s2.size() && s2[j] <= t1 + 0.5 * w_s; ++j) ++coinc;
    }
    double predicted = accidental_rate(rate1, rate2, w_s * 1e9) * T;  // 200
    CHECK(double(coinc) == Approx(predicted).margin(5.0 * std::sqrt(predicted)));
}

TEST_CASE("astronomically large expected counts are refused, not mangled") {
    CountingConfig cfg;
    cfg.pair_rate_hz = 1e16;
    cfg.duration_s = 10.0;
    EfficiencyChain chain;
    CHECK_THROWS_AS(simulate_counts(cfg, chain, chain), std::runtime_error);
}
