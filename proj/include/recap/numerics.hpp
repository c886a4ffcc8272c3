// numerics.hpp - Special functions and small dense matrix helpers shared by
// the analytic solvers. All functions are pure and thread-safe.

#ifndef RECAP_NUMERICS_HPP
#define RECAP_NUMERICS_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace recap {
namespace num {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Principal branch W0 (W0(x) > -1) of Lambert's W function, w e^w = x.
// Halley iteration from a branch-aware initial guess; relative residual
// |w e^w - x| <= ~1e-13 max(1,|x|). Throws DomainError for x < -1/e.
double lambert_w0(double x);

// W0(e^y) without forming e^y; safe for y far beyond the overflow range.
// For y <= 700 this is exactly lambert_w0(exp(y)).
double lambert_w0_exp(double y);

// Matrix exponential, scaling-and-squaring with the order-13 rational
// approximant (Eigen's implementation). Exact up to roundoff for the
// nilpotent shift matrices used by the rational-transform device.
Mat matrix_exp(const Mat& m);

// Spectral radius max|lambda_i|. Power iteration seeded with the all-ones
// vector (strictly positive, never orthogonal to the Perron vector of the
// nonnegative matrices produced here); falls back to a full eigensolve when
// the iteration stagnates, e.g. for matrices with several eigenvalues of
// equal modulus. Throws NoConvergence only if both routes fail.
double spectral_radius(const Mat& a);

// The unique positive root of lambda^M - sum_m a_m lambda^(M-m) = 0 for
// coefficients a_m >= 0 (one Descartes sign change). Bisection on
// [0, 1 + sum a_m], absolute tolerance 1e-13.
double largest_positive_root(const std::vector<double>& a);

// Root of a continuous scalar function on a sign-changing bracket.
// Bisection/secant hybrid driven to interval width 1e-13 (scaled).
// Throws NoSignChange if f(lo) and f(hi) have the same sign.
double bracketed_root(const std::function<double(double)>& f, double lo, double hi);

// Regularized lower incomplete gamma function for integer order k >= 1:
// gamma_r(k, x) = 1 - e^-x sum_{j<k} x^j/j!, in [0,1].
double reg_lower_gamma(int k, double x);

// Polynomial utilities; coefficients are stored ascending, c[0] + c[1] s + ...
std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b);
std::vector<double> poly_pow(const std::vector<double>& a, int n);
double poly_eval(const std::vector<double>& c, double x);

// Value at z of the inverse Laplace transform of a(s)/b(s), where b is monic
// of degree n and deg(a) < n. Evaluated as a_row e^{zB} e_n with B the
// companion matrix of b; robust to repeated poles.
double inverse_laplace_at(const std::vector<double>& a_coeffs,
                          const std::vector<double>& b_monic, double z);

// (P_hat, log_scale) with A^n = e^{log_scale} P_hat; repeated squaring with a
// 1-norm rescale at each step so entries never underflow for large n.
std::pair<Mat, double> scaled_matrix_power(const Mat& a, long long n);

} // namespace num
} // namespace recap

#endif // RECAP_NUMERICS_HPP
