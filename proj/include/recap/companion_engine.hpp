// companion_engine.hpp - Builds the block companion system of a transition
// kernel and evaluates effective capacity for finite and infinite horizons,
// plus throughput and moments of the delivered-packet count.
//
// For QoS exponent theta, each kernel maps to a nonnegative MSxMS block
// companion matrix A whose top block row holds A_m with entries
// a[m][from][to] = sum_nu P[m][nu][from][to] e^{-theta R nu}; the remaining
// block rows shift. The moment generating function E{e^{-theta R N_k}} is
// b^T A^{k-M} f_M, where the initialization vectors f_0..f_M absorb cycles
// still in flight at small k via inhomogeneous terms c_k.

#ifndef RECAP_COMPANION_ENGINE_HPP
#define RECAP_COMPANION_ENGINE_HPP

#include "recap/numerics.hpp"
#include "recap/scheme_kernel.hpp"

#include <optional>
#include <vector>

namespace recap {

struct CompanionSystem {
    num::Mat A;                       // MS x MS block companion matrix
    num::Vec b;                       // [1^{1xS} 0^{1xS(M-1)}]^T
    std::vector<num::Vec> f_init;     // f_0 .. f_M
    std::vector<num::Vec> c_terms;    // c_0 .. c_{M-1}; zero from k = M on
    double theta = 0.0;
    double rate_R = 0.0;
    int M = 1;
    int S = 1;
};

struct EffCapResult {
    double value = 0.0;                  // bits/Hz/s
    std::optional<double> lambda_plus;   // spectral radius, infinite horizon only
    std::optional<long long> horizon;    // k, or nullopt for infinite
};

// Assembles A, b, the c-terms and f_0..f_M for a validated kernel. The walk
// starts in mode 1. Requires theta > 0.
CompanionSystem build_companion(const TransitionKernel& kernel, double theta);

// Effective capacity with a k-timeslot window: -ln(b^T A^{k-M} f_M)/(theta k).
// Throws HorizonTooShort for k < M.
EffCapResult eff_cap_finite_k(const CompanionSystem& sys, long long k);

// Infinite-horizon effective capacity -ln(lambda_+)/theta with lambda_+ the
// spectral radius of A. Throws SpectralRadiusOutOfRange if lambda_+ leaves
// [0,1] beyond numerical slack (a corrupted kernel or broken numerics).
EffCapResult eff_cap_infinite(const CompanionSystem& sys);

// k-timeslot throughput T_k = R E{N_k}/k by direct first-moment recurrences
// over the cycle-termination walk; exact for every k >= 1 and any kernel.
double throughput_finite_k(const TransitionKernel& kernel, long long k);

// E{N_k^alpha} for a single-mode kernel, alpha in {1,2,3}, via the
// binomial-expansion recurrence propagating all lower moments jointly.
// Throws UnsupportedMode for S > 1.
double alpha_moment(const TransitionKernel& kernel, int alpha, long long k);

} // namespace recap

#endif // RECAP_COMPANION_ENGINE_HPP
