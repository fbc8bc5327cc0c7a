#pragma once

// Detection-efficiency budget and seeded coincidence-counting simulation.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace spdc {

struct EfficiencyChain {
    double detector = 0.70;
    double fiber_coupling = 0.65;
    double filter_peak = 0.55;
    double misc_optical = 1.0;

    void validate() const {
        for (double e : {detector, fiber_coupling, filter_peak, misc_optical})
            if (!(e > 0.0 && e <= 1.0))
                throw std::invalid_argument("efficiency outside (0, 1]");
    }

    double product() const { return detector * fiber_coupling * filter_peak * misc_optical; }
};

struct CountingConfig {
    double pair_rate_hz = 1e5;
    double duration_s = 5.0;
    double window_ns = 7.3;
    std::uint64_t seed = 12345;

    void validate() const {
        if (!(pair_rate_hz >= 0.0)) throw std::invalid_argument("pair rate must be nonnegative");
        if (!(duration_s > 0.0)) throw std::invalid_argument("duration must be positive");
        if (!(window_ns > 0.0)) throw std::invalid_argument("window must be positive");
    }
};

// probability the partner photon is detected given this arm fired
inline double expected_ratio(const EfficiencyChain& partner) {
    partner.validate();
    return partner.product();
}

// R1 R2 tau_w with the window in nanoseconds, result in counts/s
inline double accidental_rate(double r1_hz, double r2_hz, double window_ns) {
    if (r1_hz < 0.0 || r2_hz < 0.0 || window_ns < 0.0)
        throw std::invalid_argument("accidental_rate: negative argument");
    return r1_hz * r2_hz * window_ns * 1e-9;
}

struct CountSummary {
    std::int64_t pairs;
    std::int64_t singles1, singles2;
    std::int64_t true_coinc;
    std::int64_t accidental_coinc;
};

// Poisson pair emission, independent Bernoulli thinning per arm, accidentals
// drawn against the measured singles rates. One PRNG stream per run.
inline CountSummary simulate_counts(const CountingConfig& cfg, const EfficiencyChain& chain1,
                                    const EfficiencyChain& chain2) {
    cfg.validate();
    chain1.validate();
    chain2.validate();
    double mean_pairs = cfg.pair_rate_hz * cfg.duration_s;
    if (mean_pairs > 9.007199254740992e15)  // 2^53
        throw std::runtime_error("simulate_counts: expected count too large");

    std::mt19937_64 rng(cfg.seed);
    std::poisson_distribution<std::int64_t> pair_draw(mean_pairs);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double p1 = chain1.product(), p2 = chain2.product();

    CountSummary out{};
    out.pairs = pair_draw(rng);
    for (std::int64_t i = 0; i < out.pairs; ++i) {
        bool d1 = u(rng) < p1;
        bool d2 = u(rng) < p2;
        out.singles1 += d1;
        out.singles2 += d2;
        out.true_coinc += d1 && d2;
    }
    double r1 = out.singles1 / cfg.duration_s;
    double r2 = out.singles2 / cfg.duration_s;
    double acc_mean = accidental_rate(r1, r2, cfg.window_ns) * cfg.duration_s;
    std::poisson_distribution<std::int64_t> acc_draw(acc_mean);
    out.accidental_coinc = acc_mean > 0.0 ? acc_draw(rng) : 0;
    return out;
}

}  // namespace spdc
