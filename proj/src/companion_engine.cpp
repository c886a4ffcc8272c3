#include "recap/companion_engine.hpp"
#include "recap/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace recap {

namespace {

// P{a cycle leaving mode `from` lasts more than m1+1 slots}.
double tail_mass(const TransitionKernel& k, int from, int m1_exclusive) {
    double sum = 0.0;
    for (int m1 = m1_exclusive; m1 < k.M; ++m1) sum += k.duration_mass(m1, from);
    return sum;
}

} // namespace

CompanionSystem build_companion(const TransitionKernel& kernel, double theta) {
    validate(kernel);
    if (!(theta > 0.0)) throw DomainError("build_companion: theta must be positive");

    const int M = kernel.M, S = kernel.S;
    const int dim = M * S;
    CompanionSystem sys;
    sys.theta = theta;
    sys.rate_R = kernel.rate_R;
    sys.M = M;
    sys.S = S;

    std::vector<double> reward(kernel.nu_max + 1);
    for (int nu = 0; nu <= kernel.nu_max; ++nu)
        reward[nu] = std::exp(-theta * kernel.rate_R * nu);

    sys.A = num::Mat::Zero(dim, dim);
    for (int m1 = 0; m1 < M; ++m1)
        for (int from = 0; from < S; ++from)
            for (int to = 0; to < S; ++to) {
                double a = 0.0;
                for (int nu = 0; nu <= kernel.nu_max; ++nu)
                    a += kernel.at(m1, nu, from, to) * reward[nu];
                // Block column m1 carries cycles of duration m1+1; within a
                // block, rows index the destination mode.
                sys.A(to, m1 * S + from) = a;
            }
    for (int r = 1; r < M; ++r)
        for (int s = 0; s < S; ++s) sys.A(r * S + s, (r - 1) * S + s) = 1.0;

    sys.b = num::Vec::Zero(dim);
    for (int s = 0; s < S; ++s) sys.b(s) = 1.0;

    // The walk starts in mode 1; c_k compensates for the first cycle when it
    // is still in flight at time k (no reward attaches until completion).
    sys.c_terms.resize(M);
    for (int k = 0; k < M; ++k) {
        sys.c_terms[k] = num::Vec::Zero(dim);
        sys.c_terms[k](0) = (k == 0) ? 1.0 : tail_mass(kernel, 0, k);
    }

    sys.f_init.resize(M + 1);
    sys.f_init[0] = sys.c_terms[0]; // f_0 = c_0 = e_1
    for (int k = 1; k <= M; ++k) {
        sys.f_init[k] = sys.A * sys.f_init[k - 1];
        if (k < M) sys.f_init[k] += sys.c_terms[k];
    }
    return sys;
}

EffCapResult eff_cap_finite_k(const CompanionSystem& sys, long long k) {
    if (k < sys.M) {
        std::ostringstream os;
        os << "k = " << k << " < M = " << sys.M;
        throw HorizonTooShort(os.str());
    }
    auto [pw, log_scale] = num::scaled_matrix_power(sys.A, k - sys.M);
    double inner = sys.b.dot(pw * sys.f_init[sys.M]);
    if (!(inner > 0.0)) {
        std::ostringstream os;
        os << "mgf evaluated to " << inner << " at k = " << k;
        throw NoConvergence(os.str());
    }
    double log_mgf = std::log(inner) + log_scale;
    EffCapResult r;
    r.value = -log_mgf / (sys.theta * static_cast<double>(k));
    r.horizon = k;
    return r;
}

EffCapResult eff_cap_infinite(const CompanionSystem& sys) {
    double lambda = num::spectral_radius(sys.A);
    if (lambda < -1e-12 || lambda > 1.0 + 1e-9) {
        std::ostringstream os;
        os << "spectral radius " << lambda << " outside [0,1]";
        throw SpectralRadiusOutOfRange(os.str());
    }
    lambda = std::min(lambda, 1.0);
    EffCapResult r;
    r.value = (lambda > 0.0) ? -std::log(lambda) / sys.theta
                             : std::numeric_limits<double>::infinity();
    r.lambda_plus = lambda;
    return r;
}

// Moments are computed on the termination walk: q[j][s] is the probability of
// completing a cycle exactly at slot j in mode s, u[j][s] the partial first
// moment of delivered packets over those walks. The state value at time k
// dresses these with the probability that the next cycle is still running.
double throughput_finite_k(const TransitionKernel& kernel, long long k) {
    validate(kernel);
    if (k < 1) throw DomainError("throughput_finite_k: k must be >= 1");
    const int M = kernel.M, S = kernel.S;
    const size_t n = static_cast<size_t>(k) + 1;

    std::vector<std::vector<double>> q(n, std::vector<double>(S, 0.0));
    std::vector<std::vector<double>> u(n, std::vector<double>(S, 0.0));
    q[0][0] = 1.0;
    for (size_t j = 1; j < n; ++j)
        for (int to = 0; to < S; ++to) {
            double qj = 0.0, uj = 0.0;
            for (int m1 = 0; m1 < M && static_cast<size_t>(m1) < j; ++m1) {
                size_t prev = j - (m1 + 1);
                for (int from = 0; from < S; ++from) {
                    double pq = 0.0, pnu = 0.0;
                    for (int nu = 0; nu <= kernel.nu_max; ++nu) {
                        double p = kernel.at(m1, nu, from, to);
                        pq += p;
                        pnu += p * nu;
                    }
                    qj += pq * q[prev][from];
                    uj += pq * u[prev][from] + pnu * q[prev][from];
                }
            }
            q[j][to] = qj;
            u[j][to] = uj;
        }

    double mean = 0.0;
    for (int s = 0; s < S; ++s) mean += u[k][s]; // mu = 0 dressing is 1
    for (int mu = 1; mu < M && mu <= k; ++mu)
        for (int s = 0; s < S; ++s)
            mean += tail_mass(kernel, s, mu) * u[k - mu][s];

    return kernel.rate_R * mean / static_cast<double>(k);
}

double alpha_moment(const TransitionKernel& kernel, int alpha, long long k) {
    validate(kernel);
    if (kernel.S > 1)
        throw UnsupportedMode("alpha_moment: stated for single-mode kernels only");
    if (alpha < 1 || alpha > 3) throw DomainError("alpha_moment: alpha in {1,2,3}");
    if (k < 0) throw DomainError("alpha_moment: k must be >= 0");

    const int M = kernel.M;
    const size_t n = static_cast<size_t>(k) + 1;
    static const double binom[4][4] = {
        {1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};

    // t[j][beta] = sum_n n^beta pi_{j,n} for beta = 0..alpha.
    std::vector<std::vector<double>> t(n, std::vector<double>(alpha + 1, 0.0));
    t[0][0] = 1.0;
    for (size_t j = 1; j < n; ++j)
        for (int beta = 0; beta <= alpha; ++beta) {
            double acc = 0.0;
            for (int m1 = 0; m1 < M && static_cast<size_t>(m1) < j; ++m1) {
                size_t prev = j - (m1 + 1);
                for (int nu = 0; nu <= kernel.nu_max; ++nu) {
                    double p = kernel.at(m1, nu, 0, 0);
                    if (p == 0.0) continue;
                    double nupow = 1.0;
                    for (int g = beta; g >= 0; --g) {
                        acc += p * binom[beta][g] * nupow * t[prev][g];
                        nupow *= nu;
                    }
                }
            }
            t[j][beta] = acc;
        }

    double moment = t[k][alpha];
    for (int mu = 1; mu < M && mu <= k; ++mu)
        moment += tail_mass(kernel, 0, mu) * t[k - mu][alpha];
    return moment;
}

} // namespace recap
