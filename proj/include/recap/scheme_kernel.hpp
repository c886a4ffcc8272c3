// scheme_kernel.hpp - Transition-probability description of a retransmission
// scheme, plus constructors for the named schemes.
//
// A scheme is fully characterized by the probability table P[m][nu][from][to]:
// a transmission cycle lasts m slots (1..M), delivers nu packets (0..nu_max),
// and moves the scheme from communication mode `from` to mode `to`. Mode and
// attempt indices are 0-based internally; configs use the 1-based convention.

#ifndef RECAP_SCHEME_KERNEL_HPP
#define RECAP_SCHEME_KERNEL_HPP

#include <vector>

namespace recap {

struct TransitionKernel {
    int M = 1;       // transmission limit (slots per cycle upper bound)
    int S = 1;       // number of communication modes
    int nu_max = 1;  // max packets delivered in one cycle
    double rate_R = 1.0;

    // Dense table, index (m-1, nu, from, to), all 0-based.
    std::vector<double> probs;

    TransitionKernel() = default;
    TransitionKernel(int m, int s, int numax, double rate);

    double& at(int m1, int nu, int from, int to);
    double at(int m1, int nu, int from, int to) const;

    // Total exit mass of mode `from`.
    double exit_mass(int from) const;
    // sum_{nu,to} P[m][nu][from][to]; must be mode-independent for m >= 2.
    double duration_mass(int m1, int from) const;
};

struct QosPoint {
    enum class Kind { Theta, Psi };
    Kind kind = Kind::Theta;
    double value = 0.0;

    static QosPoint theta(double v);
    static QosPoint psi(double v);
};

// Classical truncated HARQ: one mode, nu in {0,1}, per-attempt success
// probabilities P_1..P_M; the discard probability Q_M = 1 - sum P_m is stored
// at (m = M, nu = 0).
TransitionKernel make_truncated_harq(const std::vector<double>& p, double rate_R);

// Two-user network-coded ARQ with identical decoding probability P1.
// Three modes: 1 = plain ARQ, 2 = one user holds an overheard packet,
// 3 = network-coded retransmission (reward 2 packets on double decode).
TransitionKernel make_ncarq_two_user(double p1, double rate_R);

// General two-mode single-transmission scheme. entries[nu][from][to] with
// nu in {0,1}, from/to in {0,1}.
TransitionKernel make_two_mode(const double entries[2][2][2], double rate_R);

// Two-mode ARQ over a good/bad channel whose mode changes independently of
// the decode outcome: P[1][nu][from][to] = pi_{from,to} * decode(nu | from).
TransitionKernel make_gilbert_elliot(double pi_gg, double pi_bb, double p_g, double p_b,
                                     double rate_R);

// Checks both kernel invariants; throws the first violated constraint:
//   NegativeProbability / MassExceedsOne - an entry outside [0,1];
//   MassExceedsOne / MassDeficit - a mode's exit mass differs from 1;
//   HomogeneityViolation - for some m >= 2 the duration mass depends on the
//   originating mode (the recurrence construction assumes it does not).
void validate(const TransitionKernel& kernel);

} // namespace recap

#endif // RECAP_SCHEME_KERNEL_HPP
