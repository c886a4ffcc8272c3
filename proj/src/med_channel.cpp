#include "recap/med_channel.hpp"
#include "recap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace recap {

namespace {
constexpr int kDimensionCap = 200;
}

MedChannel::MedChannel(std::vector<double> p, std::vector<double> q, double theta)
    : p_coeffs(std::move(p)), q_coeffs(std::move(q)), theta_cap(theta) {
    while (!p_coeffs.empty() && p_coeffs.back() == 0.0) p_coeffs.pop_back();
    if (p_coeffs.empty() || q_coeffs.size() < 2)
        throw DomainError("MedChannel: need deg(q) >= 1 and a nonzero p(s)");
    if (p_coeffs.size() >= q_coeffs.size())
        throw DomainError("MedChannel: deg(p) must be < deg(q)");
    if (q_coeffs.back() != 1.0) throw DomainError("MedChannel: q(s) must be monic");
    if (theta_cap < 0.0) throw DomainError("MedChannel: Theta must be >= 0");
    if (std::abs(p_coeffs[0] - q_coeffs[0]) > 1e-12) {
        std::ostringstream os;
        os << "F(0) = p(0)/q(0) = " << p_coeffs[0] << "/" << q_coeffs[0]
           << " must equal 1 for a unit-mass pdf";
        throw DomainError(os.str());
    }

    // The MED class admits coefficients whose inverse transform is not a
    // valid pdf; there is no simple algebraic test, so probe a z-grid and
    // flag rather than reject.
    double zmax = 10.0 * degree();
    for (int i = 1; i <= 160; ++i) {
        if (pdf(zmax * i / 160.0) < -1e-9) {
            pdf_warning = true;
            break;
        }
    }
}

MedChannel MedChannel::rayleigh(double theta) {
    return MedChannel({1.0}, {1.0, 1.0}, theta);
}

MedChannel MedChannel::iid_diversity(int n, double theta) {
    if (n < 1) throw DomainError("iid_diversity: N >= 1");
    return MedChannel({1.0}, num::poly_pow({1.0, 1.0}, n), theta);
}

double MedChannel::pdf(double z) const {
    const int n = degree();
    num::Mat q = num::Mat::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) q(i, i + 1) = 1.0;
    for (int j = 0; j < n; ++j) q(n - 1, j) = -q_coeffs[j];
    num::Mat e = num::matrix_exp(z * q);
    double val = 0.0;
    for (int i = 0; i < static_cast<int>(p_coeffs.size()); ++i) val += p_coeffs[i] * e(i, n - 1);
    return val;
}

double EffChannelScenario::theta_tilde() const {
    if (!(snr_gamma > 0.0)) throw DomainError("EffChannelScenario: SNR must be positive");
    if (!(rate_R > 0.0)) throw DomainError("EffChannelScenario: rate must be positive");
    if (flavor == Flavor::IR) return r_tilde();
    return (std::exp2(r_tilde()) - 1.0) / gamma_tilde();
}

MedChannel EffChannelScenario::to_channel() const {
    return MedChannel::iid_diversity(n_tilde(), theta_tilde());
}

double outage_q_m(const MedChannel& chan, int m) {
    if (m < 1) throw DomainError("outage_q_m: m >= 1");
    if (chan.theta_cap == 0.0) return 0.0;
    const int n = chan.degree();
    const int dim = m * n + 1;
    if (dim > kDimensionCap) {
        std::ostringstream os;
        os << "outage_q_m: matrix dimension " << dim << " exceeds " << kDimensionCap;
        throw DimensionCap(os.str());
    }
    // Q_m is the CDF of the m-fold convolution: L^-1 of F(s)^m / s at Theta.
    // Realized as a cascade of m companion blocks of q(s) coupled through
    // p(s), closed by one integrator state. Expanding q(s)^m into monomial
    // coefficients instead would put binomial-sized entries in the matrix
    // and destroy the exponential for large m Theta.
    num::Mat a = num::Mat::Zero(dim, dim);
    for (int stage = 0; stage < m; ++stage) {
        const int off = stage * n;
        for (int i = 0; i + 1 < n; ++i) a(off + i, off + i + 1) = 1.0;
        for (int j = 0; j < n; ++j) a(off + n - 1, off + j) = -chan.q_coeffs[j];
        // input of the next stage (or the integrator) taps p(s) of this one
        const int next = off + n;
        for (int j = 0; j < static_cast<int>(chan.p_coeffs.size()); ++j) {
            if (next < dim - 1)
                a(next + n - 1, off + j) += chan.p_coeffs[j];
            else
                a(dim - 1, off + j) += chan.p_coeffs[j];
        }
    }
    num::Mat e = num::matrix_exp(chan.theta_cap * a);
    // impulse enters the first stage (column n-1), the integrator is read out
    double v = e(dim - 1, n - 1);
    return std::clamp(v, 0.0, 1.0);
}

HarqProfile harq_profile_from_channel(const MedChannel& chan, int m_limit, double rate_R) {
    if (m_limit < 1) throw DomainError("harq_profile_from_channel: M >= 1");
    std::vector<double> p(m_limit);
    double q_prev = 1.0;
    for (int m = 1; m <= m_limit; ++m) {
        double q = outage_q_m(chan, m);
        double pm = q_prev - q;
        if (pm < -1e-12) {
            std::ostringstream os;
            os << "Q_" << m << " = " << q << " > Q_" << (m - 1) << " = " << q_prev;
            throw NonMonotoneOutage(os.str());
        }
        p[m - 1] = std::max(0.0, pm);
        q_prev = q;
    }
    return HarqProfile(p, rate_R);
}

HarqProfile persistent_profile_from_channel(const MedChannel& chan, double rate_R,
                                            double tail_tol, int max_m) {
    std::vector<double> p;
    double q_prev = 1.0;
    for (int m = 1; m <= max_m; ++m) {
        double q;
        try {
            q = outage_q_m(chan, m);
        } catch (const DimensionCap&) {
            break; // keep what converged; the tail check below decides
        }
        p.push_back(std::max(0.0, q_prev - q));
        q_prev = q;
        if (q < tail_tol) break;
    }
    if (q_prev >= 1e-9) {
        std::ostringstream os;
        os << "undelivered tail " << q_prev << " after " << p.size() << " attempts";
        throw NoConvergence(os.str());
    }
    return HarqProfile(p, rate_R);
}

HarqProfile persistent_profile_for_theta(const MedChannel& chan, double rate_R, double theta) {
    if (!(theta > 0.0)) return persistent_profile_from_channel(chan, rate_R);
    const int m_cap = (kDimensionCap - 1) / chan.degree();
    std::vector<double> qv; // cached Q_1..Q_m
    auto extend_to = [&](int m) {
        while (static_cast<int>(qv.size()) < m)
            qv.push_back(outage_q_m(chan, static_cast<int>(qv.size()) + 1));
    };
    auto profile_of = [&](int m) {
        std::vector<double> p(m);
        double prev = 1.0;
        for (int i = 0; i < m; ++i) {
            p[i] = std::max(0.0, prev - qv[i]);
            prev = qv[i];
        }
        return HarqProfile(p, rate_R);
    };

    int m = 1;
    extend_to(1);
    while (m < m_cap && qv[m - 1] > 1e-14) extend_to(++m);

    for (int pass = 0; pass < 8; ++pass) {
        HarqProfile prof = profile_of(m);
        double lam = std::max(1e-12, *ceff_char_eq(prof, theta).lambda_plus);
        double safe = 0.95 * lam;
        if (qv[m - 1] * std::pow(safe, -static_cast<double>(m)) <= 1e-12 || m >= m_cap)
            return prof;
        while (m < m_cap) {
            extend_to(++m);
            if (qv[m - 1] * std::pow(safe, -static_cast<double>(m)) <= 1e-13) break;
        }
    }
    return profile_of(m);
}

double med_log_arg(const MedChannel& chan, double z, double* dv_dtheta) {
    const int n = chan.degree();
    const int dim = n + 1;
    // a(s) = z (q(s) - p(s)), b(s) = s (q(s) - p(s) z); V = a e^{Theta B} c
    // with B the companion matrix of b and c the last basis vector.
    std::vector<double> a(dim, 0.0);
    std::vector<double> qmpz(dim, 0.0);
    for (int i = 0; i <= n; ++i) {
        double pi = (i < static_cast<int>(chan.p_coeffs.size())) ? chan.p_coeffs[i] : 0.0;
        a[i] = z * (chan.q_coeffs[i] - pi);
        qmpz[i] = chan.q_coeffs[i] - pi * z;
    }

    num::Mat b = num::Mat::Zero(dim, dim);
    for (int i = 0; i + 1 < dim; ++i) b(i, i + 1) = 1.0;
    for (int j = 1; j < dim; ++j) b(dim - 1, j) = -qmpz[j - 1]; // b_0 = 0
    num::Mat e = num::matrix_exp(chan.theta_cap * b);

    num::Vec row = num::Vec::Zero(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) row(j) += a[i] * e(i, j);
    double v = row(dim - 1);
    if (dv_dtheta) {
        num::Vec bc = b.col(dim - 1);
        *dv_dtheta = row.dot(bc);
    }
    return v;
}

EffCapResult ceff_persistent_theorem2(const MedChannel& chan, double rate_R, double theta) {
    if (!(theta > 0.0)) throw DomainError("ceff_persistent_theorem2: theta must be positive");
    if (!(rate_R > 0.0)) throw DomainError("ceff_persistent_theorem2: rate must be positive");
    const double target = std::exp(theta * rate_R);

    if (chan.theta_cap == 0.0) {
        EffCapResult r;
        r.value = rate_R;
        r.lambda_plus = std::exp(-theta * rate_R);
        return r;
    }

    auto residual = [&](double lambda) { return med_log_arg(chan, 1.0 / lambda) - target; };

    // V(1) = 1 < e^{theta R}; V grows as lambda decreases toward the first
    // pole of the transform, so walk down in geometric steps until the
    // residual flips sign.
    double hi = 1.0;
    double f_hi = residual(hi);
    if (f_hi >= 0.0) { // boundary roundoff: the root is at lambda = 1
        EffCapResult r;
        r.value = 0.0;
        r.lambda_plus = 1.0;
        return r;
    }
    double lo = hi;
    bool bracketed = false;
    for (int probe = 0; probe < 1000; ++probe) {
        lo = hi * 0.9;
        double f_lo = residual(lo);
        if (std::isfinite(f_lo) && f_lo >= 0.0) {
            bracketed = true;
            break;
        }
        if (!std::isfinite(f_lo)) break; // crossed a pole without a root: invalid channel
        hi = lo;
        f_hi = f_lo;
    }
    if (!bracketed) {
        std::ostringstream os;
        os << "no sign change while scanning lambda down to " << lo << " (residual at last probe "
           << f_hi << ")";
        throw NoSignChange(os.str());
    }

    double lambda = num::bracketed_root(residual, lo, hi);
    EffCapResult r;
    r.value = -std::log(lambda) / theta;
    r.lambda_plus = lambda;
    return r;
}

double ceff_psi_med(const MedChannel& chan, double rate_R, double psi) {
    if (!(psi > 0.0)) throw DomainError("ceff_psi_med: psi must be positive");
    double v = med_log_arg(chan, std::exp(psi));
    if (!std::isfinite(v) || v <= 1.0) {
        std::ostringstream os;
        os << "log-argument " << v << " <= 1 at psi = " << psi;
        throw PsiOutOfDomain(os.str());
    }
    return rate_R * psi / std::log(v);
}

EffCapResult ceff_rr_rayleigh_theta(const EffChannelScenario& scenario, double theta) {
    if (!(theta > 0.0)) throw DomainError("ceff_rr_rayleigh_theta: theta must be positive");
    const double th = scenario.theta_tilde();
    const double r = scenario.rate_R;
    // W0(Th e^{Th + theta R}) via the log-argument form; exponent-safe.
    const double w = num::lambert_w0_exp(std::log(th) + th + theta * r);
    EffCapResult res;
    res.value = r - (w - th) / theta;
    res.lambda_plus = th / w;
    return res;
}

double snr_parametric_rr(double c_target, double rate_R, double theta) {
    if (!(c_target > 0.0) || !(c_target < rate_R)) {
        std::ostringstream os;
        os << "target " << c_target << " outside (0, R = " << rate_R << ")";
        throw TargetOutOfRange(os.str());
    }
    return (std::exp2(rate_R) - 1.0) * std::expm1(theta * c_target) /
           (theta * (rate_R - c_target));
}

double ceff_psi_arq(double q1, double rate_R, double psi) {
    if (!(psi > 0.0)) throw DomainError("ceff_psi_arq: psi must be positive");
    if (q1 < 0.0 || q1 > 1.0) throw NegativeProbability("ceff_psi_arq: Q1 outside [0,1]");
    if (q1 == 0.0) return rate_R;
    const double qe = q1 * std::exp(psi);
    if (qe >= 1.0) {
        std::ostringstream os;
        os << "Q1 e^psi = " << qe << " >= 1 (psi bound -ln(Q1) = " << -std::log(q1) << ")";
        throw PsiOutOfDomain(os.str());
    }
    return rate_R / (1.0 + std::log((1.0 - q1) / (1.0 - qe)) / psi);
}

double ceff_psi_arq(const MedChannel& chan, double rate_R, double psi) {
    return ceff_psi_arq(outage_q_m(chan, 1), rate_R, psi);
}

std::vector<RrOptPoint> optimize_rr_med(const MedChannel& family, double psi,
                                        const std::vector<double>& theta_grid,
                                        double r_stc, int n_t) {
    if (!(psi > 0.0)) throw DomainError("optimize_rr_med: psi must be positive");
    std::vector<RrOptPoint> curve;
    curve.reserve(theta_grid.size());
    for (double th : theta_grid) {
        if (!(th > 0.0)) throw DomainError("optimize_rr_med: Theta grid must be positive");
        MedChannel chan = family;
        chan.theta_cap = th;
        double dv = 0.0;
        double v = med_log_arg(chan, std::exp(psi), &dv);
        if (!(v > 1.0) || !(dv > 0.0)) continue;

        double f_theta = v * std::log(v) / (th * dv);
        if (!std::isfinite(f_theta)) continue; // Theta V' underflowed: off the curve
        if (f_theta <= 1.0) continue;          // optimum degenerates to R* = 0 here
        double arg = -f_theta * std::exp(-f_theta);
        if (arg < -std::exp(-1.0)) {
            if (arg < -std::exp(-1.0) - 1e-12) {
                std::ostringstream os;
                os << "-f e^{-f} = " << arg << " below -1/e for f = " << f_theta;
                throw LambertDomain(os.str());
            }
            arg = -std::exp(-1.0);
        }
        double r_tilde_star = std::log2(std::exp(1.0)) * (f_theta + num::lambert_w0(arg));

        RrOptPoint pt;
        pt.theta_cap = th;
        pt.rate_star = r_tilde_star * r_stc;
        pt.gamma = (std::exp2(r_tilde_star) - 1.0) / th * (r_stc * n_t);
        pt.ceff_star = pt.rate_star * psi / std::log(v);
        if (!(pt.rate_star > 0.0) || !std::isfinite(pt.gamma) || !std::isfinite(pt.ceff_star))
            continue;
        curve.push_back(pt);
    }
    return curve;
}

std::vector<ArqOptPoint> optimize_arq_rayleigh(double theta, const std::vector<double>& r_grid) {
    if (!(theta > 0.0)) throw DomainError("optimize_arq_rayleigh: theta must be positive");
    std::vector<ArqOptPoint> curve;
    curve.reserve(r_grid.size());
    for (double r : r_grid) {
        if (!(r > 0.0)) throw DomainError("optimize_arq_rayleigh: rate grid must be positive");
        ArqOptPoint pt;
        pt.rate_star = r;
        pt.gamma = std::log(2.0) * std::exp2(r) * std::expm1(theta * r) / theta;
        double th_cap = (std::exp2(r) - 1.0) / pt.gamma;
        pt.p1 = std::exp(-th_cap);
        pt.ceff_star = -std::log(1.0 - pt.p1 + pt.p1 * std::exp(-theta * r)) / theta;
        curve.push_back(pt);
    }
    return curve;
}

} // namespace recap
