// harq_analytic.hpp - Single-mode HARQ closed forms and characteristic-
// equation solvers: the char-eq route, the M = 2 closed form, the small-theta
// moment approximation, and the psi-parameterized family.

#ifndef RECAP_HARQ_ANALYTIC_HPP
#define RECAP_HARQ_ANALYTIC_HPP

#include "recap/companion_engine.hpp"
#include "recap/scheme_kernel.hpp"

#include <vector>

namespace recap {

struct HarqProfile {
    std::vector<double> P;  // P_1..P_M, success at exactly the m-th attempt
    double Q_M = 0.0;       // discard probability 1 - sum P_m
    double rate_R = 1.0;

    HarqProfile() = default;
    HarqProfile(std::vector<double> p, double rate);

    int transmission_limit() const { return static_cast<int>(P.size()); }
    bool persistent() const { return Q_M <= 1e-12; }
    double mean_attempts() const;    // sum m P_m
    double second_moment() const;    // sum m^2 P_m
    TransitionKernel to_kernel() const;
};

// Effective capacity from the characteristic equation
// lambda^M = sum_m a_m lambda^{M-m}, a_m = P_m e^{-theta R} (+ Q_M at m = M).
EffCapResult ceff_char_eq(const HarqProfile& profile, double theta);

// Closed form for M = 2:
// C = R - ln{(P1 + sqrt(P1^2 + 4(P2 e^{theta R} + Q2 e^{2 theta R})))/2}/theta.
double ceff_m2_closed(double p1, double p2, double rate_R, double theta);

// Small-theta approximation of persistent HARQ from the first two moments of
// the per-packet attempt count. Requires Q_M ~ 0.
double ceff_approx_small_theta(const HarqProfile& profile, double theta);

// Effective capacity against the joint QoS parameter psi = log(eta/eps)/Dmax:
// C(psi) = R psi / [ln(sum P_m e^{psi m}) - ln(1 - Q_M e^{psi M})].
// Requires psi < -ln(Q_M)/M when Q_M > 0 (strict).
double ceff_psi_truncated(const HarqProfile& profile, double psi);

// theta* = psi / C(psi); the (theta*, C) pair satisfies theta C(theta) = psi,
// which maps psi-form curves onto the theta axis parametrically.
double theta_from_psi(const HarqProfile& profile, double psi);

} // namespace recap

#endif // RECAP_HARQ_ANALYTIC_HPP
