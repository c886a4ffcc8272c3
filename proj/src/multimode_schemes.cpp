#include "recap/multimode_schemes.hpp"
#include "recap/errors.hpp"
#include "recap/numerics.hpp"

#include <cmath>
#include <sstream>

namespace recap {

double GilbertElliotParams::stationary_good() const {
    const double pi_gb = 1.0 - pi_gg, pi_bg = 1.0 - pi_bb;
    if (pi_gb + pi_bg == 0.0) return 1.0; // both modes absorbing; start-mode convention
    return pi_bg / (pi_gb + pi_bg);
}

double MultilayerConfig::cumulative_rate(int l) const {
    double sum = 0.0;
    for (int i = 0; i < l; ++i) sum += r[i];
    return sum;
}

double MultilayerConfig::threshold_scaled(int l) const {
    // X_{l+1} = sum_{l' > l} x_l'; Y_l = 1/(1 - 2^{R_l} X_{l+1}).
    const int big_l = layers();
    double x_next = 0.0;
    for (int i = l; i < big_l; ++i) x_next += x[i];
    const double rl = cumulative_rate(l);
    const double denom = 1.0 - std::exp2(rl) * x_next;
    if (denom <= 0.0) {
        std::ostringstream os;
        os << "2^R_" << l << " X_" << (l + 1) << " = " << std::exp2(rl) * x_next
           << " >= 1 (Y_" << l << " <= 0)";
        throw InfeasiblePowerSplit(os.str());
    }
    const double theta_l = (std::exp2(rl) - 1.0) / snr_gamma;
    return theta_l / denom;
}

std::vector<double> MultilayerConfig::exact_layer_probs() const {
    const int big_l = layers();
    if (big_l < 1 || static_cast<int>(x.size()) != big_l)
        throw DomainError("MultilayerConfig: r and x must be non-empty and equal-length");
    double x_sum = 0.0;
    for (double v : x) {
        if (!(v > 0.0)) throw DomainError("MultilayerConfig: x_l must be positive");
        x_sum += v;
    }
    if (std::abs(x_sum - 1.0) > 1e-9)
        throw DomainError("MultilayerConfig: fractional powers must sum to 1");
    for (double v : r)
        if (!(v > 0.0)) throw DomainError("MultilayerConfig: r_l must be positive");
    if (!(snr_gamma > 0.0)) throw DomainError("MultilayerConfig: SNR must be positive");

    // At-least-l events are nested only if Theta_l Y_l increases with l;
    // then exactly-l has mass e^{-Theta_l Y_l} - e^{-Theta_{l+1} Y_{l+1}}.
    std::vector<double> tl(big_l);
    for (int l = 1; l <= big_l; ++l) {
        tl[l - 1] = threshold_scaled(l);
        if (l >= 2 && tl[l - 1] <= tl[l - 2]) {
            std::ostringstream os;
            os << "Theta_l Y_l not strictly increasing at layer " << l;
            throw NonMonotoneLayers(os.str());
        }
    }
    std::vector<double> probs(big_l + 1);
    probs[0] = 1.0 - std::exp(-tl[0]); // decodes nothing
    for (int l = 1; l <= big_l; ++l) {
        double hi = (l == big_l) ? 0.0 : std::exp(-tl[l]);
        probs[l] = std::exp(-tl[l - 1]) - hi;
        if (probs[l] < 0.0) {
            std::ostringstream os;
            os << "exact-layer probability negative at layer " << l;
            throw NonMonotoneLayers(os.str());
        }
    }
    return probs;
}

double ceff_two_mode_closed(double a111, double a121, double a112, double a122, double theta) {
    for (double v : {a111, a121, a112, a122})
        if (v < 0.0) throw NegativeProbability("ceff_two_mode_closed: a-entry < 0");
    if (!(theta > 0.0)) throw DomainError("ceff_two_mode_closed: theta must be positive");
    const double disc = (a111 - a122) * (a111 - a122) + 4.0 * a121 * a112;
    const double lambda = 0.5 * ((a111 + a122) + std::sqrt(disc));
    return -std::log(std::min(lambda, 1.0)) / theta;
}

double ceff_gilbert_elliot(const GilbertElliotParams& gp, double theta) {
    const double decay = std::exp(-theta * gp.rate_R);
    const double gg = (1.0 - gp.p_g) + gp.p_g * decay;
    const double bb = (1.0 - gp.p_b) + gp.p_b * decay;
    return ceff_two_mode_closed(gp.pi_gg * gg, (1.0 - gp.pi_gg) * gg,
                                (1.0 - gp.pi_bb) * bb, gp.pi_bb * bb, theta);
}

double ceff_ncarq(double p1, double rate_R, double theta) {
    if (p1 < 0.0 || p1 > 1.0) throw NegativeProbability("ceff_ncarq: P1 outside [0,1]");
    if (!(theta > 0.0)) throw DomainError("ceff_ncarq: theta must be positive");
    const double q1 = 1.0 - p1;
    const double e1 = std::exp(-theta * rate_R);
    const double e2 = std::exp(-2.0 * theta * rate_R);
    num::Mat a(3, 3);
    a << q1 * q1 + p1 * e1, 0.0, p1 * p1 * e2,
         q1 * p1, q1 * q1 + p1 * e1, 2.0 * p1 * q1 * e1,
         0.0, p1 * q1, q1 * q1;
    double lambda = num::spectral_radius(a);
    return -std::log(std::min(lambda, 1.0)) / theta;
}

double ceff_multilayer_arq(const MultilayerConfig& cfg, double theta) {
    if (!(theta > 0.0)) throw DomainError("ceff_multilayer_arq: theta must be positive");
    std::vector<double> probs = cfg.exact_layer_probs();
    double arg = probs[0];
    for (int l = 1; l <= cfg.layers(); ++l)
        arg += probs[l] * std::exp(-theta * cfg.cumulative_rate(l));
    return -std::log(arg) / theta;
}

} // namespace recap
