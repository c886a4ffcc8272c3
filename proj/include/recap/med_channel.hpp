// med_channel.hpp - Matrix-exponential effective channels and the HARQ
// results built on them: outage probabilities, the persistent-HARQ implicit
// root, the psi-form closed expressions, the Rayleigh Lambert-W forms, and
// the parametric rate optimizers.
//
// An effective channel is the per-attempt mutual-information increment z with
// decoding threshold Theta: decoding fails after m attempts iff sum z < Theta.
// The MED class covers every z whose Laplace transform is rational,
// F(s) = p(s)/q(s); inverse transforms are evaluated through companion-matrix
// exponentials, which is robust to repeated poles such as F = 1/(1+s)^N.

#ifndef RECAP_MED_CHANNEL_HPP
#define RECAP_MED_CHANNEL_HPP

#include "recap/companion_engine.hpp"
#include "recap/harq_analytic.hpp"

#include <vector>

namespace recap {

struct MedChannel {
    std::vector<double> p_coeffs;  // numerator, ascending, deg(p) < deg(q)
    std::vector<double> q_coeffs;  // denominator, ascending, monic
    double theta_cap = 0.0;        // decoding threshold Theta >= 0
    bool pdf_warning = false;      // inverse transform dipped below 0 on a z-grid

    MedChannel() = default;
    MedChannel(std::vector<double> p, std::vector<double> q, double theta);

    int degree() const { return static_cast<int>(q_coeffs.size()) - 1; }

    // Exponential increment, F = 1/(1+s): RR over block Rayleigh fading.
    static MedChannel rayleigh(double theta);
    // Gamma(N) increment, F = 1/(1+s)^N: N-fold diversity combining.
    static MedChannel iid_diversity(int n, double theta);

    // pdf value p e^{zQ} r at z.
    double pdf(double z) const;
};

struct EffChannelScenario {
    enum class Flavor { RR, IR };
    double rate_R = 1.0;
    double snr_gamma = 1.0;  // linear SNR
    Flavor flavor = Flavor::RR;
    int n_t = 1;             // transmit antennas
    int n_r = 1;             // receive antennas
    int m_nakagami = 1;      // Nakagami fading parameter
    double r_stc = 1.0;      // space-time-code rate

    int n_tilde() const { return n_t * n_r * m_nakagami; }
    double r_tilde() const { return rate_R / r_stc; }
    double gamma_tilde() const { return snr_gamma / (r_stc * n_t); }
    // (2^R~ - 1)/Gamma~ for RR; the rate itself for IR-style thresholds.
    double theta_tilde() const;
    MedChannel to_channel() const;
};

// Q_m = P{sum of m increments < Theta}, via the value at Theta of the inverse
// transform of F(s)^m / s. Throws DimensionCap when m deg(q) + 1 > 200.
double outage_q_m(const MedChannel& chan, int m);

// P_m = Q_{m-1} - Q_m for m = 1..M (Q_0 = 1), Q_M kept as the discard mass.
// Throws NonMonotoneOutage if some P_m < -1e-12 (an invalid MED whose
// "pdf" goes negative at the relevant scale).
HarqProfile harq_profile_from_channel(const MedChannel& chan, int m_limit, double rate_R);

// Persistent profile truncated where the undelivered tail Q_m drops below
// tail_tol; the exact untruncated route is ceff_persistent_theorem2.
HarqProfile persistent_profile_from_channel(const MedChannel& chan, double rate_R,
                                            double tail_tol = 1e-14, int max_m = 512);

// Persistent profile deep enough for characteristic-equation work at a given
// QoS exponent. The root weights discarded attempts by lambda^-m, so the
// truncation depth must satisfy Q_M lambda^-M << 1, not just Q_M << 1; the
// depth is chosen by re-solving with the current root estimate until stable.
HarqProfile persistent_profile_for_theta(const MedChannel& chan, double rate_R, double theta);

// log-argument V(z) = value at Theta of L^-1{ z (q-p) / (s (q - p z)) },
// evaluated with z = e^psi (psi-forms) or z = 1/lambda (the implicit root).
// Also returns dV/dTheta when dv is non-null.
double med_log_arg(const MedChannel& chan, double z, double* dv_dtheta = nullptr);

// Persistent HARQ over an effective channel: solves
// e^{theta R} = V(1/lambda) for lambda in (0,1] by scanning lambda downward
// from 1 until a sign change brackets the root, then bisecting.
EffCapResult ceff_persistent_theorem2(const MedChannel& chan, double rate_R, double theta);

// Persistent HARQ in the psi parameterization: C = R psi / ln V(e^psi).
// Throws PsiOutOfDomain when the log-argument is <= 1 or not finite.
double ceff_psi_med(const MedChannel& chan, double rate_R, double psi);

// RR over block Rayleigh fading, closed form:
// C = R - (W0(Th e^{Th + theta R}) - Th)/theta, lambda_+ = Th / W0(...).
EffCapResult ceff_rr_rayleigh_theta(const EffChannelScenario& scenario, double theta);

// SNR that achieves a target effective capacity for RR/Rayleigh at fixed
// (R, theta): Gamma = (2^R - 1)(e^{theta C} - 1) / (theta (R - C)).
double snr_parametric_rr(double c_target, double rate_R, double theta);

// ARQ in the psi parameterization, C = R / (1 + ln((1-Q1)/(1-Q1 e^psi))/psi);
// the overload derives Q1 from a MED channel.
double ceff_psi_arq(double q1, double rate_R, double psi);
double ceff_psi_arq(const MedChannel& chan, double rate_R, double psi);

struct RrOptPoint {
    double theta_cap;   // auxiliary parameter
    double gamma;       // SNR (linear) where the optimum is attained
    double rate_star;   // optimal initial rate
    double ceff_star;   // optimal effective capacity
};

// Rate-optimized persistent HARQ over a MED family: sweeps the threshold as
// auxiliary parameter; each point solves the tangency condition for R* via
// Lambert W. Grid values whose optimum degenerates to R* <= 0 are skipped.
// r_stc/n_t map the effective-channel threshold back to the physical SNR.
std::vector<RrOptPoint> optimize_rr_med(const MedChannel& family, double psi,
                                        const std::vector<double>& theta_grid,
                                        double r_stc = 1.0, int n_t = 1);

struct ArqOptPoint {
    double rate_star;
    double gamma;
    double p1;
    double ceff_star;
};

// Rate-optimized ARQ over block Rayleigh fading, parametric in R*:
// Gamma(R*) = ln(2) 2^{R*} (e^{theta R*} - 1)/theta.
std::vector<ArqOptPoint> optimize_arq_rayleigh(double theta, const std::vector<double>& r_grid);

} // namespace recap

#endif // RECAP_MED_CHANNEL_HPP
