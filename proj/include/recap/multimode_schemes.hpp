// multimode_schemes.hpp - Closed-form results for schemes with several
// communication modes or several packets per cycle: two-mode ARQ, the
// Gilbert-Elliot channel, two-user network-coded ARQ, and multilayer ARQ.
// Every form here is cross-checked against the companion engine where a
// kernel representation exists; this module is a validation layer, not a
// second source of truth.

#ifndef RECAP_MULTIMODE_SCHEMES_HPP
#define RECAP_MULTIMODE_SCHEMES_HPP

#include "recap/scheme_kernel.hpp"

#include <vector>

namespace recap {

struct GilbertElliotParams {
    double pi_gg = 1.0;  // good -> good persistence
    double pi_bb = 1.0;  // bad -> bad persistence
    double p_g = 1.0;    // decode success in the good mode
    double p_b = 0.0;    // decode success in the bad mode
    double rate_R = 1.0;

    TransitionKernel to_kernel() const {
        return make_gilbert_elliot(pi_gg, pi_bb, p_g, p_b, rate_R);
    }
    // Stationary probability of the good mode, pi_bg / (pi_gb + pi_bg).
    double stationary_good() const;
};

struct MultilayerConfig {
    std::vector<double> r;   // per-layer rates r_1..r_L
    std::vector<double> x;   // fractional powers, sum = 1
    double snr_gamma = 1.0;  // linear SNR

    int layers() const { return static_cast<int>(r.size()); }
    double cumulative_rate(int l) const;      // R_l = sum_{l' <= l} r_l'
    double threshold_scaled(int l) const;     // Theta_l Y_l
    // P{decoding reaches exactly layer l}, l = 0 (nothing) .. L, Rayleigh
    // fading. Throws InfeasiblePowerSplit / NonMonotoneLayers.
    std::vector<double> exact_layer_probs() const;
};

// Two-mode single-transmission scheme, spectral radius in closed form:
// lambda_+ = ((a111 + a122) + sqrt((a111 - a122)^2 + 4 a121 a112))/2.
double ceff_two_mode_closed(double a111, double a121, double a112, double a122, double theta);

// ARQ over a block Gilbert-Elliot channel; the decode and mode processes are
// independent, so a_1ss' = pi_ss' (q_s + p_s e^{-theta R}).
double ceff_gilbert_elliot(const GilbertElliotParams& params, double theta);

// Two-user NC-ARQ with identical decode probability P1: spectral radius of
// the 3x3 mode matrix. The value is the system total (rewards R and 2R);
// per-user figures are half of it.
double ceff_ncarq(double p1, double rate_R, double theta);

// Multilayer ARQ in block Rayleigh fading:
// C = -ln(q + sum_l p_l e^{-theta R_l})/theta over the exact-layer partition.
double ceff_multilayer_arq(const MultilayerConfig& cfg, double theta);

} // namespace recap

#endif // RECAP_MULTIMODE_SCHEMES_HPP
