#include "recap/config.hpp"
#include "recap/errors.hpp"
#include "recap/mc_simulator.hpp"
#include "recap/numerics.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

namespace recap {

namespace {

double u01(uint64_t seed, uint64_t i, uint64_t j) { return rng::uniform01(seed, i, j); }

HarqProfile random_profile(uint64_t seed, uint64_t idx, int max_m = 6) {
    int m = 1 + static_cast<int>(u01(seed, idx, 0) * max_m);
    std::vector<double> p(m);
    double budget = 1.0;
    p[0] = 0.05 + 0.85 * u01(seed, idx, 1); // keep the first attempt viable
    budget -= p[0];
    for (int i = 1; i < m; ++i) {
        p[i] = budget * u01(seed, idx, 1 + i) * 0.9;
        budget -= p[i];
    }
    return HarqProfile(p, 1.0 + 7.0 * u01(seed, idx, 40));
}

struct Check {
    std::string name;
    std::function<bool(std::string&)> fn;
};

} // namespace

int run_selfcheck(bool inject_defect, uint64_t seed) {
    std::vector<Check> checks;

    checks.push_back({"lambert_w0 residual on log grid", [](std::string&) {
        for (int i = 0; i <= 120; ++i) {
            double x = (i == 0) ? -std::exp(-1.0) + 1e-6
                                : std::pow(10.0, -6.0 + 12.0 * i / 120.0);
            double w = num::lambert_w0(x);
            if (std::abs(w * std::exp(w) - x) > 1e-12 * std::max(1.0, std::abs(x))) return false;
        }
        return true;
    }});

    checks.push_back({"matrix_exp commutes with its argument", [seed](std::string&) {
        for (int t = 0; t < 20; ++t) {
            num::Mat b(6, 6);
            for (int i = 0; i < 6; ++i)
                for (int j = 0; j < 6; ++j) b(i, j) = -2.0 + 4.0 * u01(seed, 900 + t, i * 6 + j);
            num::Mat e = num::matrix_exp(b);
            double comm = (e * b - b * e).norm();
            if (comm > 1e-10 * std::max(1.0, e.norm() * b.norm())) return false;
        }
        return true;
    }});

    checks.push_back({"largest_positive_root: residual and root uniqueness", [seed](std::string&) {
        for (int t = 0; t < 2000; ++t) {
            int m = 1 + static_cast<int>(u01(seed, 1000 + t, 0) * 8);
            std::vector<double> a(m);
            double sum = 0.0;
            for (int i = 0; i < m; ++i) sum += a[i] = u01(seed, 1000 + t, 1 + i);
            if (sum == 0.0) a[0] = 0.5;
            double r = num::largest_positive_root(a);
            double f = 1.0;
            for (int i = 0; i < m; ++i) f = f * r - a[i];
            if (std::abs(f) > 1e-10) return false;
            // one sign change on (0, bound)
            double bound = 1.0;
            for (double c : a) bound += c;
            int flips = 0;
            double prev = -a[m - 1];
            for (int g = 1; g <= 400; ++g) {
                double x = bound * g / 400.0;
                double v = 1.0;
                for (int i = 0; i < m; ++i) v = v * x - a[i];
                if (v != 0.0 && prev != 0.0 && (v > 0.0) != (prev > 0.0)) ++flips;
                if (v != 0.0) prev = v;
            }
            if (flips != 1) return false;
        }
        return true;
    }});

    checks.push_back({"spectral radius of a column-stochastic matrix is 1", [seed](std::string&) {
        for (int t = 0; t < 50; ++t) {
            int n = 2 + static_cast<int>(u01(seed, 2000 + t, 0) * 6);
            num::Mat a(n, n);
            for (int j = 0; j < n; ++j) {
                double col = 0.0;
                for (int i = 0; i < n; ++i) col += a(i, j) = 0.05 + u01(seed, 2000 + t, 1 + i * n + j);
                for (int i = 0; i < n; ++i) a(i, j) /= col;
            }
            if (std::abs(num::spectral_radius(a) - 1.0) > 1e-10) return false;
        }
        return true;
    }});

    checks.push_back({"constructors emit kernels that pass validate()", [seed](std::string&) {
        for (int t = 0; t < 300; ++t) {
            validate(random_profile(seed, 3000 + t).to_kernel());
            validate(make_ncarq_two_user(u01(seed, 3300 + t, 0), 4.0));
            validate(make_gilbert_elliot(u01(seed, 3600 + t, 0), u01(seed, 3600 + t, 1),
                                         u01(seed, 3600 + t, 2), u01(seed, 3600 + t, 3), 4.0));
        }
        return true;
    }});

    if (inject_defect) {
        checks.push_back({"validator flags an injected homogeneity defect", [](std::string& msg) {
            TransitionKernel k = make_truncated_harq({0.4, 0.3, 0.2}, 4.0);
            TransitionKernel bad(3, 2, 1, 4.0);
            for (int m1 = 0; m1 < 3; ++m1)
                for (int nu = 0; nu <= 1; ++nu)
                    for (int s = 0; s < 2; ++s) bad.at(m1, nu, s, s) = k.at(m1, nu, 0, 0);
            // shift mass between durations for mode 2 only
            bad.at(1, 1, 1, 1) -= 0.05;
            bad.at(2, 1, 1, 1) += 0.05;
            try {
                validate(bad);
            } catch (const HomogeneityViolation& e) {
                msg = e.what();
                return true;
            }
            return false;
        }});
    }

    checks.push_back({"cross-method: chareq = companion (= M2 closed form)", [seed](std::string&) {
        for (int t = 0; t < 200; ++t) {
            HarqProfile prof = random_profile(seed, 4000 + t);
            double theta = 0.05 + 2.0 * u01(seed, 4000 + t, 30);
            double c1 = ceff_char_eq(prof, theta).value;
            double c2 = eff_cap_infinite(build_companion(prof.to_kernel(), theta)).value;
            if (std::abs(c1 - c2) > 1e-10 * std::max(1.0, c1)) return false;
            if (prof.transmission_limit() == 2) {
                double c3 = ceff_m2_closed(prof.P[0], prof.P[1], prof.rate_R, theta);
                if (std::abs(c1 - c3) > 1e-10 * std::max(1.0, c1)) return false;
            }
        }
        return true;
    }});

    checks.push_back({"theta->0 limit equals truncated throughput", [seed](std::string&) {
        for (int t = 0; t < 50; ++t) {
            HarqProfile prof = random_profile(seed, 5000 + t);
            double c = ceff_char_eq(prof, 1e-6).value;
            double q = 1.0, denom = 0.0;
            for (double pm : prof.P) {
                denom += q;
                q -= pm;
            }
            double tput = prof.rate_R * (1.0 - prof.Q_M) / denom;
            if (std::abs(c - tput) > 1e-4 * tput) return false;
        }
        return true;
    }});

    checks.push_back({"geometric profiles degenerate to the ARQ value", [](std::string&) {
        const double p1 = 0.6, theta = 0.8, r = 4.0;
        double ref = -std::log(0.4 + 0.6 * std::exp(-theta * r)) / theta;
        for (int m : {1, 2, 5, 10}) {
            std::vector<double> p(m);
            for (int i = 0; i < m; ++i) p[i] = p1 * std::pow(1.0 - p1, i);
            double c = ceff_char_eq(HarqProfile(p, r), theta).value;
            if (std::abs(c - ref) > 1e-10) return false;
        }
        return true;
    }});

    checks.push_back({"0 <= C <= R and lambda in [0,1] on random profiles", [seed](std::string&) {
        for (int t = 0; t < 500; ++t) {
            HarqProfile prof = random_profile(seed, 6000 + t);
            double theta = 0.01 + 3.0 * u01(seed, 6000 + t, 31);
            EffCapResult res = ceff_char_eq(prof, theta);
            if (*res.lambda_plus < 0.0 || *res.lambda_plus > 1.0) return false;
            if (res.value < 0.0 || res.value > prof.rate_R + 1e-12) return false;
        }
        return true;
    }});

    checks.push_back({"outage Q_m nonincreasing in m", [](std::string&) {
        for (double th : {0.05, 0.5, 2.0, 10.0}) {
            for (int deg : {1, 2, 4}) {
                MedChannel chan = MedChannel::iid_diversity(deg, th);
                double prev = 1.0;
                for (int m = 1; m <= 6; ++m) {
                    double q = outage_q_m(chan, m);
                    if (q > prev + 1e-12) return false;
                    prev = q;
                }
            }
        }
        return true;
    }});

    checks.push_back({"Rayleigh RR: Lambert-W form = implicit-root form", [](std::string&) {
        for (int gdb = 0; gdb <= 40; gdb += 5) {
            for (double theta : {0.5, 1.0}) {
                EffChannelScenario sc;
                sc.rate_R = 4.0;
                sc.snr_gamma = std::pow(10.0, gdb / 10.0);
                double c1 = ceff_rr_rayleigh_theta(sc, theta).value;
                double c2 = ceff_persistent_theorem2(MedChannel::rayleigh(sc.theta_tilde()),
                                                     4.0, theta).value;
                if (std::abs(c1 - c2) > 1e-10 * std::max(1.0, c1)) return false;
            }
        }
        return true;
    }});

    checks.push_back({"psi-forms: matrix evaluation, limits, theta* round trip", [](std::string&) {
        const double r = 4.0, th = 0.6;
        MedChannel ray = MedChannel::rayleigh(th);
        for (double psi : {0.2, 0.5, 1.0, 2.0}) {
            double via_matrix = ceff_psi_med(ray, r, psi);
            double closed = r / (1.0 + th * std::expm1(psi) / psi);
            if (std::abs(via_matrix - closed) > 1e-12 * closed) return false;
            // theta C(theta) = psi round trip through the implicit root
            double theta_star = psi / via_matrix;
            double c2 = ceff_persistent_theorem2(ray, r, theta_star).value;
            if (std::abs(c2 - via_matrix) > 1e-8 * via_matrix) return false;
        }
        if (std::abs(ceff_psi_med(ray, r, 1e-8) - r / (1.0 + th)) > 1e-6) return false;
        if (std::abs(ceff_psi_arq(0.3, r, 1e-8) - 0.7 * r) > 1e-6) return false;
        return true;
    }});

    checks.push_back({"ordering: persistent RR >= ARQ at equal (SNR, R, theta)", [](std::string&) {
        for (int gdb = 0; gdb <= 40; gdb += 4) {
            for (double theta : {0.5, 1.0}) {
                EffChannelScenario sc;
                sc.rate_R = 4.0;
                sc.snr_gamma = std::pow(10.0, gdb / 10.0);
                double rr = ceff_rr_rayleigh_theta(sc, theta).value;
                double p1 = std::exp(-sc.theta_tilde());
                double arq = -std::log(1.0 - p1 + p1 * std::exp(-theta * 4.0)) / theta;
                if (rr < arq - 1e-12) return false;
            }
        }
        return true;
    }});

    checks.push_back({"closed two-mode / NC-ARQ forms equal the companion route", [seed](std::string&) {
        for (int t = 0; t < 40; ++t) {
            double p1 = 0.05 + 0.9 * u01(seed, 7000 + t, 0);
            double theta = 0.1 + 1.5 * u01(seed, 7000 + t, 1);
            double c1 = ceff_ncarq(p1, 4.0, theta);
            double c2 = eff_cap_infinite(build_companion(make_ncarq_two_user(p1, 4.0), theta)).value;
            if (std::abs(c1 - c2) > 1e-12 * std::max(1.0, c1) + 1e-13) return false;

            GilbertElliotParams ge{0.5 + 0.5 * u01(seed, 7100 + t, 0),
                                   0.5 + 0.5 * u01(seed, 7100 + t, 1),
                                   u01(seed, 7100 + t, 2), u01(seed, 7100 + t, 3), 4.0};
            double g1 = ceff_gilbert_elliot(ge, theta);
            double g2 = eff_cap_infinite(build_companion(ge.to_kernel(), theta)).value;
            if (std::abs(g1 - g2) > 1e-12 * std::max(1.0, g1) + 1e-13) return false;
        }
        return true;
    }});

    checks.push_back({"two-mode quadratic picks the dominant root", [seed](std::string&) {
        for (int t = 0; t < 200; ++t) {
            double a11 = u01(seed, 7500 + t, 0), a22 = u01(seed, 7500 + t, 1);
            double a12 = u01(seed, 7500 + t, 2) * 0.5, a21 = u01(seed, 7500 + t, 3) * 0.5;
            double disc = std::sqrt((a11 - a22) * (a11 - a22) + 4.0 * a12 * a21);
            double lp = 0.5 * ((a11 + a22) + disc), lm = 0.5 * ((a11 + a22) - disc);
            if (lp < std::abs(lm) - 1e-14) return false;
            // trace/determinant identities
            if (std::abs(lp + lm - (a11 + a22)) > 1e-12) return false;
            if (std::abs(lp * lm - (a11 * a22 - a12 * a21)) > 1e-12) return false;
        }
        return true;
    }});

    checks.push_back({"multilayer: L=1 equals ARQ; theta->0 equals layer throughput", [](std::string&) {
        MultilayerConfig one;
        one.r = {4.0};
        one.x = {1.0};
        one.snr_gamma = 100.0;
        double theta = 0.7;
        double p1 = std::exp(-(std::exp2(4.0) - 1.0) / 100.0);
        double arq = -std::log(1.0 - p1 + p1 * std::exp(-theta * 4.0)) / theta;
        if (std::abs(ceff_multilayer_arq(one, theta) - arq) > 1e-12) return false;

        MultilayerConfig ml;
        ml.r = {1.0, 1.5, 2.0};
        ml.x = {0.70, 0.22, 0.08};
        ml.snr_gamma = 200.0;
        std::vector<double> probs = ml.exact_layer_probs();
        double tput = 0.0;
        for (int l = 1; l <= 3; ++l) tput += probs[l] * ml.cumulative_rate(l);
        if (std::abs(ceff_multilayer_arq(ml, 1e-6) - tput) > 1e-4 * tput) return false;
        return true;
    }});

    checks.push_back({"simulator is deterministic for a fixed seed", [](std::string&) {
        TransitionKernel k = make_truncated_harq({0.5, 0.25}, 4.0);
        SimEstimate a = simulate_walk(k, 50, 0.5, 20000, 77);
        SimEstimate b = simulate_walk(k, 50, 0.5, 20000, 77);
        return a.mgf_hat == b.mgf_hat && a.ceff_hat == b.ceff_hat &&
               a.half_width == b.half_width;
    }});

    checks.push_back({"simulator theta=0 mode matches the throughput recurrence", [](std::string&) {
        TransitionKernel k = make_ncarq_two_user(0.55, 4.0);
        SimEstimate est = simulate_walk(k, 60, 0.0, 200000, 11);
        double t = throughput_finite_k(k, 60);
        return std::abs(est.ceff_hat - t) <= std::max(est.half_width, 1e-9);
    }});

    checks.push_back({"simulator calibration subset: >= 99/100 seeds inside 3-sigma", [](std::string& msg) {
        TransitionKernel k = make_truncated_harq({std::exp(-0.15)}, 4.0);
        CompanionSystem sys = build_companion(k, 0.2);
        const long long horizon = 16;
        double analytic = eff_cap_finite_k(sys, horizon).value;
        int inside = 0;
        for (int s = 0; s < 100; ++s) {
            SimEstimate est = simulate_walk(k, horizon, 0.2, 100000, 42 + s);
            if (std::abs(est.ceff_hat - analytic) <= est.half_width) ++inside;
        }
        msg = "coverage " + std::to_string(inside) + "/100";
        return inside >= 99;
    }});

    checks.push_back({"ARQ optimizer curve is tangent to the fixed-R curve", [](std::string&) {
        const double theta = 0.5, r = 4.0;
        auto curve = optimize_arq_rayleigh(theta, {r});
        const ArqOptPoint& pt = curve[0];
        auto fixed_r = [&](double rate) {
            double th_cap = (std::exp2(rate) - 1.0) / pt.gamma;
            double p1 = std::exp(-th_cap);
            return -std::log(1.0 - p1 + p1 * std::exp(-theta * rate)) / theta;
        };
        if (std::abs(pt.ceff_star - fixed_r(r)) > 1e-9) return false;
        double h = 1e-4;
        double deriv = (fixed_r(r + h) - fixed_r(r - h)) / (2.0 * h);
        return std::abs(deriv) < 1e-5;
    }});

    int failures = 0;
    for (auto& c : checks) {
        bool ok = false;
        std::string msg;
        try {
            ok = c.fn(msg);
        } catch (const std::exception& e) {
            msg = e.what();
            ok = false;
        }
        std::printf("[%s] %s%s%s\n", ok ? "PASS" : "FAIL", c.name.c_str(),
                    msg.empty() ? "" : " - ", msg.c_str());
        if (!ok) ++failures;
    }
    std::printf("%zu checks, %d failures\n", checks.size(), failures);
    return failures;
}

} // namespace recap
