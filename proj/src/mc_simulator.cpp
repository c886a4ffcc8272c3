#include "recap/mc_simulator.hpp"
#include "recap/errors.hpp"

#include <algorithm>
#include <cmath>

namespace recap {

namespace rng {

namespace {
inline uint64_t splitmix(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
} // namespace

uint64_t mix(uint64_t a, uint64_t b) {
    return splitmix(a * 0xda942042e4dd58b5ULL ^ splitmix(b));
}

double uniform01(uint64_t seed, uint64_t trial, uint64_t draw) {
    return (mix(mix(seed, trial), draw) >> 11) * 0x1.0p-53;
}

} // namespace rng

namespace {

// Flattened exit distribution of one mode, ordered by descending probability
// so the common outcomes exit the CDF scan first.
struct ModeOutcomes {
    std::vector<double> cdf;
    std::vector<int> duration; // m
    std::vector<int> packets;  // nu
    std::vector<int> next_mode;
};

std::vector<ModeOutcomes> flatten(const TransitionKernel& k) {
    std::vector<ModeOutcomes> modes(k.S);
    for (int from = 0; from < k.S; ++from) {
        struct Entry {
            double p;
            int m, nu, to;
        };
        std::vector<Entry> entries;
        for (int m1 = 0; m1 < k.M; ++m1)
            for (int nu = 0; nu <= k.nu_max; ++nu)
                for (int to = 0; to < k.S; ++to) {
                    double p = k.at(m1, nu, from, to);
                    if (p > 0.0) entries.push_back({p, m1 + 1, nu, to});
                }
        std::sort(entries.begin(), entries.end(),
                  [](const Entry& a, const Entry& b) { return a.p > b.p; });
        ModeOutcomes& mo = modes[from];
        double acc = 0.0;
        for (const Entry& e : entries) {
            acc += e.p;
            mo.cdf.push_back(acc);
            mo.duration.push_back(e.m);
            mo.packets.push_back(e.nu);
            mo.next_mode.push_back(e.to);
        }
        if (!mo.cdf.empty()) mo.cdf.back() = 1.0; // absorb rounding in the last bin
    }
    return modes;
}

} // namespace

SimEstimate simulate_walk(const TransitionKernel& kernel, long long k, double theta,
                          long long trials, uint64_t seed) {
    validate(kernel);
    if (k < kernel.M) throw HorizonTooShort("simulate_walk: k must be >= M");
    if (trials < 1) throw DomainError("simulate_walk: trials must be >= 1");
    if (theta < 0.0) throw DomainError("simulate_walk: theta must be >= 0");

    const std::vector<ModeOutcomes> modes = flatten(kernel);
    const double theta_r = theta * kernel.rate_R;

    double sum = 0.0, sum_sq = 0.0;
    for (long long trial = 0; trial < trials; ++trial) {
        const uint64_t trial_key = rng::mix(seed, static_cast<uint64_t>(trial));
        long long t = 0;
        long long packets = 0;
        int mode = 0;
        uint64_t draw = 0;
        while (t < k) {
            const double u = (rng::mix(trial_key, draw++) >> 11) * 0x1.0p-53;
            const ModeOutcomes& mo = modes[mode];
            size_t o = 0;
            while (u > mo.cdf[o]) ++o;
            if (t + mo.duration[o] > k) break; // in-flight at k: no reward
            t += mo.duration[o];
            packets += mo.packets[o];
            mode = mo.next_mode[o];
        }
        const double x = (theta == 0.0) ? static_cast<double>(packets)
                                        : std::exp(-theta_r * static_cast<double>(packets));
        sum += x;
        sum_sq += x * x;
    }

    const double n = static_cast<double>(trials);
    const double mean = sum / n;
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / std::max(1.0, n - 1.0));
    const double se3 = 3.0 * std::sqrt(var / n);

    SimEstimate est;
    est.trials = trials;
    est.seed = seed;
    if (theta == 0.0) {
        est.mgf_hat = 1.0;
        est.ceff_hat = kernel.rate_R * mean / static_cast<double>(k);
        est.half_width = kernel.rate_R * se3 / static_cast<double>(k);
    } else {
        est.mgf_hat = mean;
        est.ceff_hat = -std::log(mean) / (theta * static_cast<double>(k));
        // d/dm of -ln(m)/(theta k) = -1/(m theta k)
        est.half_width = se3 / (mean * theta * static_cast<double>(k));
    }
    return est;
}

ChannelPmEstimate simulate_channel_pm(const std::function<double(double)>& sampler,
                                      double theta_cap, int m_limit, long long trials,
                                      uint64_t seed) {
    if (m_limit < 1) throw DomainError("simulate_channel_pm: M >= 1");
    if (trials < 1) throw DomainError("simulate_channel_pm: trials must be >= 1");
    std::vector<long long> hist(m_limit, 0);
    long long discarded = 0;
    for (long long trial = 0; trial < trials; ++trial) {
        const uint64_t trial_key = rng::mix(seed, static_cast<uint64_t>(trial));
        double acc = 0.0;
        int m = 0;
        for (; m < m_limit; ++m) {
            acc += sampler((rng::mix(trial_key, static_cast<uint64_t>(m)) >> 11) * 0x1.0p-53);
            if (acc >= theta_cap) break;
        }
        if (m < m_limit)
            ++hist[m];
        else
            ++discarded;
    }
    ChannelPmEstimate est;
    est.trials = trials;
    est.p.resize(m_limit);
    for (int m = 0; m < m_limit; ++m)
        est.p[m] = static_cast<double>(hist[m]) / static_cast<double>(trials);
    est.q_m = static_cast<double>(discarded) / static_cast<double>(trials);
    return est;
}

} // namespace recap
