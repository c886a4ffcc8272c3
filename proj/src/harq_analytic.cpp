#include "recap/harq_analytic.hpp"
#include "recap/errors.hpp"
#include "recap/numerics.hpp"

#include <cmath>
#include <sstream>

namespace recap {

HarqProfile::HarqProfile(std::vector<double> p, double rate) : P(std::move(p)), rate_R(rate) {
    if (P.empty()) throw DomainError("HarqProfile: empty attempt list");
    // Q_M = 1 - sum P_m by compensated summation: a plain sum leaves ~1e-16
    // of absolute noise in the constant coefficient of the characteristic
    // polynomial, which ill-conditioned (long geometric) profiles amplify
    // into ~1e-9 of root error.
    double sum = -1.0, comp = 0.0;
    for (size_t i = 0; i < P.size(); ++i) {
        if (P[i] < 0.0) {
            std::ostringstream os;
            os << "P_" << (i + 1) << " = " << P[i];
            throw NegativeProbability(os.str());
        }
        double t = sum + P[i];
        comp += (std::abs(sum) >= std::abs(P[i])) ? (sum - t) + P[i] : (P[i] - t) + sum;
        sum = t;
    }
    double deficit = -(sum + comp); // 1 - sum P_m
    if (deficit < -1e-12) {
        std::ostringstream os;
        os << "sum of P_m = " << 1.0 - deficit;
        throw MassExceedsOne(os.str());
    }
    Q_M = std::max(0.0, deficit);
}

double HarqProfile::mean_attempts() const {
    double mu = 0.0;
    for (size_t i = 0; i < P.size(); ++i) mu += (i + 1.0) * P[i];
    return mu;
}

double HarqProfile::second_moment() const {
    double m2 = 0.0;
    for (size_t i = 0; i < P.size(); ++i) m2 += (i + 1.0) * (i + 1.0) * P[i];
    return m2;
}

TransitionKernel HarqProfile::to_kernel() const {
    return make_truncated_harq(P, rate_R);
}

EffCapResult ceff_char_eq(const HarqProfile& profile, double theta) {
    if (!(theta > 0.0)) throw DomainError("ceff_char_eq: theta must be positive");
    const int m = profile.transmission_limit();
    const double decay = std::exp(-theta * profile.rate_R);
    std::vector<double> a(m);
    for (int i = 0; i < m; ++i) a[i] = profile.P[i] * decay;
    a[m - 1] += profile.Q_M;

    double lambda = num::largest_positive_root(a);
    lambda = std::min(lambda, 1.0);
    EffCapResult r;
    r.value = -std::log(lambda) / theta;
    r.lambda_plus = lambda;
    return r;
}

double ceff_m2_closed(double p1, double p2, double rate_R, double theta) {
    if (p1 < 0.0 || p2 < 0.0) throw NegativeProbability("ceff_m2_closed");
    if (p1 + p2 > 1.0 + 1e-12) {
        std::ostringstream os;
        os << "P1 + P2 = " << (p1 + p2);
        throw MassExceedsOne(os.str());
    }
    if (!(theta > 0.0)) throw DomainError("ceff_m2_closed: theta must be positive");
    const double q2 = std::max(0.0, 1.0 - p1 - p2);
    const double etr = std::exp(theta * rate_R);
    double root = 0.5 * (p1 + std::sqrt(p1 * p1 + 4.0 * (p2 * etr + q2 * etr * etr)));
    return rate_R - std::log(root) / theta;
}

double ceff_approx_small_theta(const HarqProfile& profile, double theta) {
    if (!(theta > 0.0)) throw DomainError("ceff_approx_small_theta: theta must be positive");
    if (!profile.persistent())
        throw DomainError("ceff_approx_small_theta: stated for persistent profiles (Q_M ~ 0)");
    const double mu = profile.mean_attempts();
    const double m2 = profile.second_moment();
    if (!std::isfinite(mu) || !std::isfinite(m2) || m2 <= 0.0)
        throw InfiniteMoment("ceff_approx_small_theta: attempt-count moments diverge");
    const double r = profile.rate_R;
    // Quadratic C^2 + c1 C - c2 = 0 from the second-order expansion of the
    // persistent characteristic equation 1 = sum P_m e^{theta(m C - R)}.
    const double c1 = 2.0 * mu * (1.0 - theta * r) / (theta * m2);
    const double c2 = r * (2.0 - theta * r) / (theta * m2);
    return 0.5 * (-c1 + std::sqrt(c1 * c1 + 4.0 * c2));
}

double ceff_psi_truncated(const HarqProfile& profile, double psi) {
    if (!(psi > 0.0)) throw DomainError("ceff_psi_truncated: psi must be positive");
    const int m = profile.transmission_limit();
    // Q_M at or below the persistence tolerance is treated as exactly zero;
    // long profiles accumulate ~1e-16 of rounding in 1 - sum P_m.
    const bool persistent = profile.persistent();
    if (!persistent) {
        const double bound = -std::log(profile.Q_M) / m;
        if (psi >= bound) {
            std::ostringstream os;
            os << "psi = " << psi << " >= -ln(Q_M)/M = " << bound;
            throw PsiOutOfDomain(os.str());
        }
    }
    double num_sum = 0.0;
    double prev_term = 0.0;
    for (int i = 0; i < m; ++i) {
        double term = profile.P[i] * std::exp(psi * (i + 1.0));
        // A growing tail on a truncated stand-in for a persistent profile
        // means the untruncated series diverges.
        if (persistent && i + 1 == m && m >= 4 && term > prev_term && term > 1e-9) {
            std::ostringstream os;
            os << "tail terms P_m e^{psi m} grow at m = " << m;
            throw PsiOutOfDomain(os.str());
        }
        prev_term = term;
        num_sum += term;
    }
    double denom = std::log(num_sum);
    if (!persistent) denom -= std::log1p(-profile.Q_M * std::exp(psi * m));
    if (!(denom > 0.0)) throw PsiOutOfDomain("ceff_psi_truncated: nonpositive denominator");
    return profile.rate_R * psi / denom;
}

double theta_from_psi(const HarqProfile& profile, double psi) {
    double c = ceff_psi_truncated(profile, psi);
    return psi / c;
}

} // namespace recap
