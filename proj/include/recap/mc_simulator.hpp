// mc_simulator.hpp - Independent Monte-Carlo oracle for the analytic paths.
// Simulates the random walk over transmission cycles at the kernel level and
// the increment-accumulation process at the effective-channel level.
//
// Reproducibility contract: a counter-based generator derives every variate
// from (seed, trial index, draw index), so results are bit-identical for a
// given seed regardless of how trials are partitioned across workers.

#ifndef RECAP_MC_SIMULATOR_HPP
#define RECAP_MC_SIMULATOR_HPP

#include "recap/scheme_kernel.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace recap {

struct SimEstimate {
    double ceff_hat = 0.0;   // estimated effective capacity (throughput if theta = 0)
    double mgf_hat = 1.0;    // sample mean of e^{-theta R N_k}
    long long trials = 0;
    double half_width = 0.0; // 3-sigma half interval on ceff_hat (delta method)
    uint64_t seed = 0;
};

// Walks `trials` independent realizations of k timeslots. Every trial starts
// in mode 1 with no packets delivered; cycles are drawn from the exit
// distribution of the current mode; a cycle that would complete after slot k
// contributes no reward (rewards attach at cycle completion only, matching
// the analytic state definition). With theta = 0 the estimate is the
// empirical throughput R E{N_k}/k instead of the mgf transform.
SimEstimate simulate_walk(const TransitionKernel& kernel, long long k, double theta,
                          long long trials, uint64_t seed);

struct ChannelPmEstimate {
    std::vector<double> p;  // empirical P_1..P_M
    double q_m = 0.0;       // empirical Q_M (no success within M attempts)
    long long trials = 0;
};

// First-success histogram of the effective-channel accumulation: attempt m
// succeeds when the running sum of increments reaches Theta. `sampler` maps
// a uniform [0,1) variate to one increment (e.g. exponential for Rayleigh).
ChannelPmEstimate simulate_channel_pm(const std::function<double(double)>& sampler,
                                      double theta_cap, int m_limit, long long trials,
                                      uint64_t seed);

// Counter-based generator internals, exposed for tests and samplers.
namespace rng {
uint64_t mix(uint64_t a, uint64_t b);
double uniform01(uint64_t seed, uint64_t trial, uint64_t draw);
} // namespace rng

} // namespace recap

#endif // RECAP_MC_SIMULATOR_HPP
