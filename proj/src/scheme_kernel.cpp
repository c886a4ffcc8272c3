#include "recap/scheme_kernel.hpp"
#include "recap/errors.hpp"

#include <cmath>
#include <sstream>

namespace recap {

namespace {
constexpr double kMassTol = 1e-12;
}

TransitionKernel::TransitionKernel(int m, int s, int numax, double rate)
    : M(m), S(s), nu_max(numax), rate_R(rate) {
    if (m < 1 || s < 1 || numax < 0)
        throw DomainError("TransitionKernel: M >= 1, S >= 1, nu_max >= 0 required");
    if (rate <= 0.0) throw DomainError("TransitionKernel: rate_R must be positive");
    probs.assign(static_cast<size_t>(m) * (numax + 1) * s * s, 0.0);
}

double& TransitionKernel::at(int m1, int nu, int from, int to) {
    return probs[((static_cast<size_t>(m1) * (nu_max + 1) + nu) * S + from) * S + to];
}

double TransitionKernel::at(int m1, int nu, int from, int to) const {
    return probs[((static_cast<size_t>(m1) * (nu_max + 1) + nu) * S + from) * S + to];
}

double TransitionKernel::exit_mass(int from) const {
    double sum = 0.0;
    for (int m1 = 0; m1 < M; ++m1) sum += duration_mass(m1, from);
    return sum;
}

double TransitionKernel::duration_mass(int m1, int from) const {
    double sum = 0.0;
    for (int nu = 0; nu <= nu_max; ++nu)
        for (int to = 0; to < S; ++to) sum += at(m1, nu, from, to);
    return sum;
}

QosPoint QosPoint::theta(double v) {
    if (!(v > 0.0)) throw DomainError("QosPoint: theta must be positive");
    return {Kind::Theta, v};
}

QosPoint QosPoint::psi(double v) {
    if (!(v > 0.0)) throw DomainError("QosPoint: psi must be positive");
    return {Kind::Psi, v};
}

TransitionKernel make_truncated_harq(const std::vector<double>& p, double rate_R) {
    if (p.empty()) throw DomainError("make_truncated_harq: need at least one attempt");
    // compensated sum keeps Q_M accurate to a relative (not absolute) error
    double sum = -1.0, comp = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        if (p[i] < 0.0) {
            std::ostringstream os;
            os << "P_" << (i + 1) << " = " << p[i];
            throw NegativeProbability(os.str());
        }
        double t = sum + p[i];
        comp += (std::abs(sum) >= std::abs(p[i])) ? (sum - t) + p[i] : (p[i] - t) + sum;
        sum = t;
    }
    double deficit = -(sum + comp); // 1 - sum P_m
    if (deficit < -kMassTol) {
        std::ostringstream os;
        os << "sum of P_m = " << 1.0 - deficit << " exceeds 1";
        throw MassExceedsOne(os.str());
    }
    const int m = static_cast<int>(p.size());
    TransitionKernel k(m, 1, 1, rate_R);
    for (int i = 0; i < m; ++i) k.at(i, 1, 0, 0) = p[i];
    k.at(m - 1, 0, 0, 0) = std::max(0.0, deficit); // Q_M
    return k;
}

TransitionKernel make_ncarq_two_user(double p1, double rate_R) {
    if (p1 < 0.0 || p1 > 1.0) {
        std::ostringstream os;
        os << "P1 = " << p1;
        throw NegativeProbability(os.str());
    }
    const double q1 = 1.0 - p1;
    TransitionKernel k(1, 3, 2, rate_R);
    // Mode 1: plain ARQ. Decoded by the target (reward 1, stay), by neither
    // (stay), or only overheard by the other user (enter mode 2).
    k.at(0, 1, 0, 0) = p1;
    k.at(0, 0, 0, 0) = q1 * q1;
    k.at(0, 0, 0, 1) = p1 * q1;
    // Mode 2: serve the other user until the roles invert (enter mode 3).
    k.at(0, 1, 1, 1) = p1;
    k.at(0, 0, 1, 1) = q1 * q1;
    k.at(0, 0, 1, 2) = p1 * q1;
    // Mode 3: network-coded packet; decoded by both (reward 2, back to
    // mode 1), by exactly one (reward 1, mode 2), or by neither.
    k.at(0, 2, 2, 0) = p1 * p1;
    k.at(0, 1, 2, 1) = 2.0 * p1 * q1;
    k.at(0, 0, 2, 2) = q1 * q1;
    return k;
}

TransitionKernel make_two_mode(const double entries[2][2][2], double rate_R) {
    TransitionKernel k(1, 2, 1, rate_R);
    for (int nu = 0; nu < 2; ++nu)
        for (int from = 0; from < 2; ++from)
            for (int to = 0; to < 2; ++to) k.at(0, nu, from, to) = entries[nu][from][to];
    validate(k);
    return k;
}

TransitionKernel make_gilbert_elliot(double pi_gg, double pi_bb, double p_g, double p_b,
                                     double rate_R) {
    for (double v : {pi_gg, pi_bb, p_g, p_b}) {
        if (v < 0.0 || v > 1.0) {
            std::ostringstream os;
            os << "Gilbert-Elliot parameter " << v << " outside [0,1]";
            throw NegativeProbability(os.str());
        }
    }
    const double pi_gb = 1.0 - pi_gg, pi_bg = 1.0 - pi_bb;
    const double q_g = 1.0 - p_g, q_b = 1.0 - p_b;
    double entries[2][2][2];
    entries[1][0][0] = p_g * pi_gg;
    entries[0][0][0] = q_g * pi_gg;
    entries[1][0][1] = p_g * pi_gb;
    entries[0][0][1] = q_g * pi_gb;
    entries[1][1][1] = p_b * pi_bb;
    entries[0][1][1] = q_b * pi_bb;
    entries[1][1][0] = p_b * pi_bg;
    entries[0][1][0] = q_b * pi_bg;
    return make_two_mode(entries, rate_R);
}

void validate(const TransitionKernel& kernel) {
    for (int m1 = 0; m1 < kernel.M; ++m1)
        for (int nu = 0; nu <= kernel.nu_max; ++nu)
            for (int from = 0; from < kernel.S; ++from)
                for (int to = 0; to < kernel.S; ++to) {
                    double v = kernel.at(m1, nu, from, to);
                    std::ostringstream os;
                    os << "P[m=" << (m1 + 1) << "][nu=" << nu << "][from=" << (from + 1)
                       << "][to=" << (to + 1) << "] = " << v;
                    if (v < 0.0) throw NegativeProbability(os.str());
                    if (v > 1.0 + kMassTol) throw MassExceedsOne(os.str());
                }

    for (int from = 0; from < kernel.S; ++from) {
        double mass = kernel.exit_mass(from);
        std::ostringstream os;
        os << "exit mass of mode " << (from + 1) << " is " << mass;
        if (mass > 1.0 + kMassTol) throw MassExceedsOne(os.str());
        if (mass < 1.0 - kMassTol) throw MassDeficit(os.str());
    }

    for (int m1 = 1; m1 < kernel.M; ++m1) {
        double ref = kernel.duration_mass(m1, 0);
        for (int from = 1; from < kernel.S; ++from) {
            double v = kernel.duration_mass(m1, from);
            if (std::abs(v - ref) > kMassTol) {
                std::ostringstream os;
                os << "duration mass for m=" << (m1 + 1) << " differs across modes: "
                   << ref << " (mode 1) vs " << v << " (mode " << (from + 1) << ")";
                throw HomogeneityViolation(os.str());
            }
        }
    }
}

} // namespace recap
