#include "recap/numerics.hpp"
#include "recap/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>
#include <sstream>

namespace recap {
namespace num {

namespace {

// One Halley step for w e^w = x.
inline double halley_step(double w, double x) {
    double ew = std::exp(w);
    double f = w * ew - x;
    double denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0);
    return w - f / denom;
}

} // namespace

double lambert_w0(double x) {
    const double em1 = std::exp(-1.0);
    if (x < -em1 - 1e-15) {
        std::ostringstream os;
        os << "lambert_w0 requires x >= -1/e, got " << x;
        throw DomainError(os.str());
    }
    if (x == 0.0) return 0.0;

    double w;
    if (x < -em1 + 1e-2) {
        // Branch-point series around x = -1/e.
        double p = std::sqrt(std::max(0.0, 2.0 * (std::exp(1.0) * x + 1.0)));
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    } else if (x < std::exp(1.0)) {
        // ln(1+x) tracks W0 well on (-1/e, e).
        w = std::log1p(x);
        if (w <= -1.0) w = -1.0 + 1e-9;
    } else {
        double l1 = std::log(x);
        double l2 = std::log(l1);
        w = l1 - l2 + l2 / l1;
    }

    for (int it = 0; it < 60; ++it) {
        double wn = halley_step(w, x);
        if (wn < -1.0) wn = -1.0 + 0.5 * (w + 1.0); // stay on the principal branch
        double res = std::abs(wn * std::exp(wn) - x);
        w = wn;
        if (res <= 1e-14 * std::max(1.0, std::abs(x))) break;
    }
    return w;
}

double lambert_w0_exp(double y) {
    if (y <= 700.0) return lambert_w0(std::exp(y));
    // Solve w + ln w = y by Newton; for y > 700, w > 1 so ln w is smooth.
    double l2 = std::log(y);
    double w = y - l2 + l2 / y;
    for (int it = 0; it < 60; ++it) {
        double f = w + std::log(w) - y;
        double wn = w - f / (1.0 + 1.0 / w);
        if (std::abs(wn - w) <= 1e-14 * std::abs(wn)) {
            w = wn;
            break;
        }
        w = wn;
    }
    return w;
}

Mat matrix_exp(const Mat& m) {
    return m.exp();
}

double spectral_radius(const Mat& a) {
    const Eigen::Index n = a.rows();
    if (n == 1) return std::abs(a(0, 0));

    Vec v = Vec::Ones(n) / std::sqrt(static_cast<double>(n));
    double lambda = 0.0;
    double prev = std::numeric_limits<double>::quiet_NaN();
    bool converged = false;
    const int max_iter = 20000;
    for (int it = 0; it < max_iter; ++it) {
        Vec w = a * v;
        double nw = w.norm();
        if (nw == 0.0) return 0.0; // reached the kernel: nilpotent direction
        lambda = v.dot(w);
        v = w / nw;
        if (it > 0 && std::abs(lambda - prev) <= 1e-14 * std::max(1.0, std::abs(lambda))) {
            double resid = (a * v - lambda * v).norm();
            if (resid <= 1e-12 * std::max(1.0, std::abs(lambda))) {
                converged = true;
                break;
            }
        }
        prev = lambda;
    }
    if (converged) return std::abs(lambda);

    // Stagnation (complex pair or near-defective dominant part): full solve.
    Eigen::EigenSolver<Mat> es(a, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) {
        std::ostringstream os;
        os << "power iteration stagnated at lambda=" << lambda
           << " and the fallback eigensolve failed";
        throw NoConvergence(os.str());
    }
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

namespace {

// Compensated Horner evaluation of f(lam) = lam^M - sum a_m lam^(M-m).
// Error-free transformations (FMA products, TwoSum) recover ~double-double
// accuracy, which matters because geometric-tail profiles make the positive
// root badly conditioned in the monomial basis (f' down to ~1e-8).
double char_poly_compensated(const std::vector<double>& a, double lam) {
    double s = 1.0, comp = 0.0;
    for (double am : a) {
        double p = s * lam;
        double ep = std::fma(s, lam, -p);
        double t = p - am;
        double bv = t - p;
        double et = (p - (t - bv)) + (-am - bv);
        s = t;
        comp = comp * lam + (ep + et);
    }
    return s + comp;
}

double char_poly_deriv(const std::vector<double>& a, double lam) {
    double s = 1.0, d = 0.0;
    for (double am : a) {
        d = d * lam + s;
        s = s * lam - am;
    }
    return d;
}

} // namespace

double largest_positive_root(const std::vector<double>& a_in) {
    std::vector<double> a = a_in;
    for (double c : a) {
        if (c < 0.0) throw DomainError("largest_positive_root: negative coefficient");
    }
    // Trailing zero coefficients factor out lambda = 0 roots.
    while (!a.empty() && a.back() == 0.0) a.pop_back();
    if (a.empty()) throw AllZeroCoefficients("largest_positive_root: all coefficients zero");

    const int m = static_cast<int>(a.size());
    double sum = 0.0;
    for (double c : a) sum += c;

    auto f = [&](double lam) {
        double acc = 1.0;
        for (int i = 0; i < m; ++i) acc = acc * lam - a[i];
        return acc;
    };

    double lo = 0.0, hi = 1.0 + sum; // f(0) = -a_M < 0, f at the Cauchy bound > 0
    for (int it = 0; it < 200 && (hi - lo) > 1e-13; ++it) {
        double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    double root = 0.5 * (lo + hi);

    // Newton polish on the compensated evaluation; the single positive root
    // is simple (one Descartes sign change), so f'(root) != 0.
    for (int it = 0; it < 4; ++it) {
        double deriv = char_poly_deriv(a, root);
        if (std::abs(deriv) < 1e-300) break;
        double step = char_poly_compensated(a, root) / deriv;
        double next = root - step;
        if (!(next > 0.0) || !std::isfinite(next)) break;
        root = next;
        if (std::abs(step) <= 1e-16 * root) break;
    }
    return root;
}

double bracketed_root(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) {
        std::ostringstream os;
        os << "bracketed_root: f(" << lo << ")=" << flo << " and f(" << hi << ")=" << fhi
           << " do not change sign";
        throw NoSignChange(os.str());
    }
    const double tol = 1e-13 * std::max({1.0, std::abs(lo), std::abs(hi)});
    for (int it = 0; it < 400 && (hi - lo) > tol; ++it) {
        // Secant proposal, safeguarded to the middle half of the bracket.
        double mid = 0.5 * (lo + hi);
        double x = mid;
        double denom = fhi - flo;
        if (denom != 0.0) {
            double sec = (lo * fhi - hi * flo) / denom;
            if (sec > lo + 0.25 * (hi - lo) && sec < hi - 0.25 * (hi - lo)) x = sec;
        }
        double fx = f(x);
        if (fx == 0.0) return x;
        if ((fx > 0.0) == (fhi > 0.0)) {
            hi = x;
            fhi = fx;
        } else {
            lo = x;
            flo = fx;
        }
    }
    return 0.5 * (lo + hi);
}

double reg_lower_gamma(int k, double x) {
    if (k < 1) throw DomainError("reg_lower_gamma: k must be >= 1");
    if (x < 0.0) throw DomainError("reg_lower_gamma: x must be >= 0");
    if (x == 0.0) return 0.0;
    // 1 - e^-x sum_{j<k} x^j/j!, accumulated as Poisson masses u_j = e^-x x^j/j!.
    double u = std::exp(-x);
    double s = u;
    for (int j = 1; j < k; ++j) {
        u *= x / j;
        s += u;
    }
    double g = 1.0 - s;
    if (g < 0.0) g = 0.0;
    if (g > 1.0) g = 1.0;
    return g;
}

std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> c(a.size() + b.size() - 1, 0.0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
}

std::vector<double> poly_pow(const std::vector<double>& a, int n) {
    std::vector<double> acc{1.0};
    for (int i = 0; i < n; ++i) acc = poly_mul(acc, a);
    return acc;
}

double poly_eval(const std::vector<double>& c, double x) {
    double acc = 0.0;
    for (size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
    return acc;
}

double inverse_laplace_at(const std::vector<double>& a_coeffs,
                          const std::vector<double>& b_monic, double z) {
    const int n = static_cast<int>(b_monic.size()) - 1; // degree of b
    if (n < 1 || b_monic.back() != 1.0)
        throw DomainError("inverse_laplace_at: b must be monic of degree >= 1");
    if (static_cast<int>(a_coeffs.size()) > n)
        throw DomainError("inverse_laplace_at: a(s)/b(s) must be strictly proper");

    Mat b = Mat::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) b(i, i + 1) = 1.0;
    for (int j = 0; j < n; ++j) b(n - 1, j) = -b_monic[j];

    Mat e = matrix_exp(z * b);
    double val = 0.0;
    for (int i = 0; i < static_cast<int>(a_coeffs.size()); ++i)
        val += a_coeffs[i] * e(i, n - 1);
    return val;
}

std::pair<Mat, double> scaled_matrix_power(const Mat& a, long long n) {
    const Eigen::Index dim = a.rows();
    Mat result = Mat::Identity(dim, dim);
    double log_scale = 0.0;
    Mat base = a;
    auto rescale = [&](Mat& m) {
        double norm = m.cwiseAbs().maxCoeff();
        if (norm > 0.0 && (norm > 1e100 || norm < 1e-100)) {
            m /= norm;
            return std::log(norm);
        }
        return 0.0;
    };
    double base_log = 0.0;
    while (n > 0) {
        if (n & 1) {
            result = result * base;
            log_scale += base_log;
            log_scale += rescale(result);
        }
        n >>= 1;
        if (n > 0) {
            base = base * base;
            base_log *= 2.0;
            base_log += rescale(base);
        }
    }
    return {result, log_scale};
}

} // namespace num
} // namespace recap
