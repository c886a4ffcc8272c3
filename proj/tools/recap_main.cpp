// recap - effective-capacity calculator for retransmission schemes.
// Subcommands: sweep, compute, optimize, simulate, selfcheck.

#include "recap/config.hpp"
#include "recap/errors.hpp"
#include "recap/mc_simulator.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::vector<std::string> split_methods(const std::string& methods) {
    std::vector<std::string> out;
    std::stringstream ss(methods);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw recap::ConfigParse("cannot write \"" + out_path + "\"");
    f << text;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"recap - effective capacity of retransmission schemes"};
    app.require_subcommand(1);

    std::string config_path, out_path, methods = "closed", format = "csv";
    std::string axis = "theta";
    double lo = 0.1, hi = 1.0;
    int steps = 10;
    long long trials = -1, horizon = -1;
    long long seed = -1;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* opt = cmd->add_option("--config", config_path, "scenario config (JSON)");
        if (needs_config) opt->required();
        cmd->add_option("--trials", trials, "Monte-Carlo trials override");
        cmd->add_option("--seed", seed, "simulation seed override");
        cmd->add_option("--out", out_path, "output file (stdout if omitted)");
        cmd->add_option("--format", format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
    };

    auto* sweep = app.add_subcommand("sweep", "evaluate methods over an axis grid");
    add_common(sweep, true);
    sweep->add_option("--axis", axis, "snr_db | theta | psi | k")->required();
    sweep->add_option("--lo", lo, "axis lower end")->required();
    sweep->add_option("--hi", hi, "axis upper end")->required();
    sweep->add_option("--steps", steps, "grid points")->required();
    sweep->add_option("--methods", methods, "comma-separated method list");

    auto* compute = app.add_subcommand("compute", "one point, all requested methods");
    add_common(compute, true);
    compute->add_option("--methods", methods, "comma-separated method list");
    compute->add_option("--k", horizon, "finite horizon (default: infinite)");

    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo walk estimate");
    add_common(simulate, true);
    simulate->add_option("--k", horizon, "timeslots per trial");

    std::string opt_scheme = "rr", opt_channel;
    double opt_psi = 0.0, opt_theta = 0.0, opt_rstc = 1.0;
    int opt_nt = 1, opt_nr = 1, opt_mn = 1;
    auto* optimize = app.add_subcommand("optimize", "rate-optimized parametric curve");
    add_common(optimize, false);
    optimize->add_option("--scheme", opt_scheme, "rr | arq")
        ->check(CLI::IsMember({"rr", "arq"}));
    optimize->add_option("--psi", opt_psi, "QoS parameter (rr)");
    optimize->add_option("--theta", opt_theta, "QoS exponent (arq)");
    optimize->add_option("--channel", opt_channel, "rayleigh | nakagami_ostbc (rr)");
    optimize->add_option("--Nt", opt_nt, "transmit antennas");
    optimize->add_option("--Nr", opt_nr, "receive antennas");
    optimize->add_option("--mN", opt_mn, "Nakagami parameter");
    optimize->add_option("--Rstc", opt_rstc, "space-time-code rate");
    optimize->add_option("--lo", lo, "auxiliary grid lower end");
    optimize->add_option("--hi", hi, "auxiliary grid upper end");
    optimize->add_option("--steps", steps, "auxiliary grid points");

    bool inject = false;
    long long selfcheck_seed = 42;
    auto* selfcheck = app.add_subcommand("selfcheck", "run the invariant suite");
    selfcheck->add_flag("--inject-homogeneity-defect", inject,
                        "also verify the validator rejects a perturbed kernel");
    selfcheck->add_option("--seed", selfcheck_seed, "fuzz seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (selfcheck->parsed()) {
            return recap::run_selfcheck(inject, static_cast<uint64_t>(selfcheck_seed)) == 0 ? 0
                                                                                            : 1;
        }

        recap::Scenario scenario;
        if (!config_path.empty()) scenario = recap::load_scenario(config_path);
        if (trials > 0) scenario.trials = trials;
        if (seed >= 0) scenario.seed = static_cast<uint64_t>(seed);
        if (horizon > 0) scenario.horizon_k = horizon;

        if (sweep->parsed()) {
            recap::SweepSpec spec;
            spec.axis = axis;
            spec.lo = lo;
            spec.hi = hi;
            spec.steps = steps;
            spec.methods = split_methods(methods);
            recap::SweepResult res = recap::run_sweep(scenario, spec);
            if (format == "json") {
                write_output(recap::to_json(res, scenario, spec), out_path);
            } else {
                write_output(recap::to_csv(res), out_path);
                if (!out_path.empty()) {
                    std::ofstream meta(out_path + ".meta.json", std::ios::binary);
                    meta << recap::metadata_json(scenario, spec);
                }
            }
        } else if (compute->parsed()) {
            std::ostringstream os;
            os << "method,value,half_width_3sigma\n";
            for (const auto& m : split_methods(methods)) {
                recap::MethodResult r = recap::evaluate_method(scenario, m);
                os << m << "," << fmt(r.value) << ","
                   << (r.half_width ? fmt(*r.half_width) : "") << "\n";
            }
            write_output(os.str(), out_path);
        } else if (simulate->parsed()) {
            long long k = scenario.horizon_k > 0 ? scenario.horizon_k : 200;
            double theta = 0.0;
            if (scenario.qos_kind == recap::Scenario::QosKind::Theta)
                theta = scenario.qos_value;
            else if (scenario.qos_kind == recap::Scenario::QosKind::Psi)
                theta = recap::theta_from_psi(scenario.resolve_profile(), scenario.qos_value);
            recap::SimEstimate est = recap::simulate_walk(scenario.resolve_kernel(), k, theta,
                                                          scenario.trials, scenario.seed);
            std::ostringstream os;
            os << "ceff_hat,mgf_hat,half_width_3sigma,trials,seed,k\n"
               << fmt(est.ceff_hat) << "," << fmt(est.mgf_hat) << "," << fmt(est.half_width)
               << "," << est.trials << "," << est.seed << "," << k << "\n";
            write_output(os.str(), out_path);
        } else if (optimize->parsed()) {
            std::ostringstream os;
            if (opt_scheme == "rr") {
                if (!(opt_psi > 0.0))
                    throw recap::ConfigParse("optimize --scheme rr needs --psi > 0");
                recap::MedChannel family = recap::MedChannel::rayleigh(1.0);
                double rstc = opt_rstc;
                int nt = opt_nt;
                if (!opt_channel.empty()) {
                    if (opt_channel == "nakagami_ostbc")
                        family = recap::MedChannel::iid_diversity(opt_nt * opt_nr * opt_mn, 1.0);
                    else if (opt_channel != "rayleigh")
                        throw recap::ConfigParse("optimize channel must be rayleigh or nakagami_ostbc");
                } else if (!config_path.empty()) {
                    recap::MedChannel resolved = scenario.resolve_channel();
                    family = resolved;
                    rstc = scenario.r_stc;
                    nt = scenario.n_t;
                }
                if (lo <= 0.0) lo = 1e-3;
                std::vector<double> grid(steps);
                for (int i = 0; i < steps; ++i)
                    grid[i] = lo * std::pow(hi / lo, i / (steps - 1.0));
                auto curve = recap::optimize_rr_med(family, opt_psi, grid, rstc, nt);
                os << "gamma_db,gamma,rate_star,ceff_star,theta_cap\n";
                for (const auto& pt : curve)
                    os << fmt(10.0 * std::log10(pt.gamma)) << "," << fmt(pt.gamma) << ","
                       << fmt(pt.rate_star) << "," << fmt(pt.ceff_star) << ","
                       << fmt(pt.theta_cap) << "\n";
            } else {
                if (!(opt_theta > 0.0))
                    throw recap::ConfigParse("optimize --scheme arq needs --theta > 0");
                std::vector<double> grid(steps);
                for (int i = 0; i < steps; ++i) grid[i] = lo + (hi - lo) * i / (steps - 1.0);
                auto curve = recap::optimize_arq_rayleigh(opt_theta, grid);
                os << "gamma_db,gamma,rate_star,p1,ceff_star\n";
                for (const auto& pt : curve)
                    os << fmt(10.0 * std::log10(pt.gamma)) << "," << fmt(pt.gamma) << ","
                       << fmt(pt.rate_star) << "," << fmt(pt.p1) << "," << fmt(pt.ceff_star)
                       << "\n";
            }
            write_output(os.str(), out_path);
        }
        return 0;
    } catch (const recap::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}
