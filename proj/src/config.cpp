#include "recap/config.hpp"
#include "recap/errors.hpp"
#include "recap/mc_simulator.hpp"
#include "recap/numerics.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

namespace recap {

using nlohmann::json;

namespace {

double get_num(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number()) {
        std::ostringstream os;
        os << "missing or non-numeric field \"" << key << "\"";
        throw ConfigParse(os.str());
    }
    return j[key].get<double>();
}

std::vector<double> get_array(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_array()) {
        std::ostringstream os;
        os << "missing or non-array field \"" << key << "\"";
        throw ConfigParse(os.str());
    }
    std::vector<double> out;
    for (const auto& v : j[key]) {
        if (!v.is_number()) throw ConfigParse(std::string("non-numeric entry in \"") + key + "\"");
        out.push_back(v.get<double>());
    }
    return out;
}

void parse_channel_block(const json& j, Scenario& s) {
    std::string kind = j.value("channel", "");
    const json* cj = &j;
    json nested;
    if (j.contains("channel") && j["channel"].is_object()) {
        nested = j["channel"];
        cj = &nested;
        kind = nested.value("channel", nested.value("kind", ""));
    }
    if (kind.empty()) return;
    if (kind == "rayleigh") {
        s.channel = Scenario::ChannelKind::Rayleigh;
    } else if (kind == "nakagami_ostbc") {
        s.channel = Scenario::ChannelKind::NakagamiOstbc;
        s.n_t = static_cast<int>((*cj).value("Nt", 1.0));
        s.n_r = static_cast<int>((*cj).value("Nr", 1.0));
        s.m_nakagami = static_cast<int>((*cj).value("mN", 1.0));
        s.r_stc = (*cj).value("Rstc", 1.0);
    } else if (kind == "med") {
        s.channel = Scenario::ChannelKind::Med;
        s.med_p = get_array(*cj, "p");
        s.med_q = get_array(*cj, "q");
        if (cj->contains("Theta")) s.med_theta = get_num(*cj, "Theta");
    } else {
        throw ConfigParse("unknown channel \"" + kind + "\"");
    }
    if (cj->contains("flavor")) {
        std::string f = (*cj)["flavor"].get<std::string>();
        if (f == "rr")
            s.flavor = EffChannelScenario::Flavor::RR;
        else if (f == "ir")
            s.flavor = EffChannelScenario::Flavor::IR;
        else
            throw ConfigParse("flavor must be \"rr\" or \"ir\"");
    }
}

} // namespace

double Scenario::snr_linear() const {
    if (!has_snr) throw ConfigParse("scenario needs \"snr_db\"");
    return std::pow(10.0, snr_db / 10.0);
}

MedChannel Scenario::resolve_channel() const {
    switch (channel) {
        case ChannelKind::Rayleigh: {
            EffChannelScenario sc;
            sc.rate_R = rate_R;
            sc.snr_gamma = snr_linear();
            sc.flavor = flavor;
            return sc.to_channel();
        }
        case ChannelKind::NakagamiOstbc: {
            EffChannelScenario sc;
            sc.rate_R = rate_R;
            sc.snr_gamma = snr_linear();
            sc.flavor = flavor;
            sc.n_t = n_t;
            sc.n_r = n_r;
            sc.m_nakagami = m_nakagami;
            sc.r_stc = r_stc;
            return sc.to_channel();
        }
        case ChannelKind::Med: {
            double theta_cap;
            if (med_theta) {
                theta_cap = *med_theta;
            } else if (flavor == EffChannelScenario::Flavor::IR) {
                theta_cap = rate_R;
            } else {
                theta_cap = (std::exp2(rate_R) - 1.0) / snr_linear();
            }
            return MedChannel(med_p, med_q, theta_cap);
        }
        case ChannelKind::None:
            break;
    }
    throw ConfigParse("scheme requires a channel block");
}

double Scenario::resolve_p1() const {
    if (p1) return *p1;
    return 1.0 - outage_q_m(resolve_channel(), 1);
}

HarqProfile Scenario::resolve_profile() const {
    switch (scheme) {
        case Scheme::TruncatedHarq:
            if (!harq_p.empty()) return HarqProfile(harq_p, rate_R);
            return harq_profile_from_channel(resolve_channel(), m_limit, rate_R);
        case Scheme::RrTruncated:
            return harq_profile_from_channel(resolve_channel(), m_limit, rate_R);
        case Scheme::RrPersistent:
            // the char-eq/companion representation must be truncated deep
            // enough for the theta at which it will be evaluated
            if (qos_kind == QosKind::Theta && qos_value > 0.0)
                return persistent_profile_for_theta(resolve_channel(), rate_R, qos_value);
            return persistent_profile_from_channel(resolve_channel(), rate_R);
        case Scheme::Arq:
            return HarqProfile({resolve_p1()}, rate_R);
        default:
            throw ConfigParse("scheme has no HARQ profile");
    }
}

TransitionKernel Scenario::resolve_kernel() const {
    switch (scheme) {
        case Scheme::TruncatedHarq:
        case Scheme::RrTruncated:
        case Scheme::RrPersistent:
        case Scheme::Arq:
            return resolve_profile().to_kernel();
        case Scheme::Ncarq2:
            return make_ncarq_two_user(resolve_p1(), rate_R);
        case Scheme::GilbertElliot:
            return ge.to_kernel();
        case Scheme::TwoMode:
            return make_two_mode(two_mode_entries, rate_R);
        case Scheme::Multilayer:
            break;
    }
    throw ConfigParse("multilayer has no kernel representation (unequal layer rates)");
}

Scenario parse_scenario(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const std::exception& e) {
        throw ConfigParse(std::string("invalid JSON: ") + e.what());
    }

    Scenario s;
    const std::string scheme = j.value("scheme", "");
    if (scheme == "truncated_harq")
        s.scheme = Scenario::Scheme::TruncatedHarq;
    else if (scheme == "arq")
        s.scheme = Scenario::Scheme::Arq;
    else if (scheme == "rr_truncated")
        s.scheme = Scenario::Scheme::RrTruncated;
    else if (scheme == "rr_persistent")
        s.scheme = Scenario::Scheme::RrPersistent;
    else if (scheme == "ncarq2")
        s.scheme = Scenario::Scheme::Ncarq2;
    else if (scheme == "gilbert_elliot")
        s.scheme = Scenario::Scheme::GilbertElliot;
    else if (scheme == "two_mode")
        s.scheme = Scenario::Scheme::TwoMode;
    else if (scheme == "multilayer")
        s.scheme = Scenario::Scheme::Multilayer;
    else
        throw ConfigParse("unknown or missing \"scheme\": \"" + scheme + "\"");

    s.rate_R = j.value("rate_R", 1.0);
    if (!(s.rate_R > 0.0)) throw ConfigParse("rate_R must be positive");

    if (j.contains("theta") && j.contains("psi"))
        throw ConfigParse("specify theta or psi, not both");
    if (j.contains("theta")) {
        s.qos_kind = Scenario::QosKind::Theta;
        s.qos_value = get_num(j, "theta");
        if (s.qos_value < 0.0) throw ConfigParse("theta must be >= 0");
    } else if (j.contains("psi")) {
        s.qos_kind = Scenario::QosKind::Psi;
        s.qos_value = get_num(j, "psi");
        if (s.qos_value < 0.0) throw ConfigParse("psi must be >= 0");
    }

    if (j.contains("snr_db")) {
        s.snr_db = get_num(j, "snr_db");
        s.has_snr = true;
    }
    parse_channel_block(j, s);

    switch (s.scheme) {
        case Scenario::Scheme::TruncatedHarq:
            if (j.contains("P"))
                s.harq_p = get_array(j, "P");
            else
                s.m_limit = static_cast<int>(j.value("M", 1.0));
            break;
        case Scenario::Scheme::RrTruncated:
            s.m_limit = static_cast<int>(get_num(j, "M"));
            break;
        case Scenario::Scheme::Arq:
        case Scenario::Scheme::Ncarq2:
            if (j.contains("P1")) s.p1 = get_num(j, "P1");
            break;
        case Scenario::Scheme::GilbertElliot:
            s.ge.pi_gg = get_num(j, "pi_gg");
            s.ge.pi_bb = get_num(j, "pi_bb");
            s.ge.p_g = get_num(j, "p_g");
            s.ge.p_b = get_num(j, "p_b");
            s.ge.rate_R = s.rate_R;
            break;
        case Scenario::Scheme::TwoMode: {
            // entries: [{"nu":..,"from":..,"to":..,"p":..}], 1-based modes
            if (!j.contains("entries") || !j["entries"].is_array())
                throw ConfigParse("two_mode needs an \"entries\" array");
            for (const auto& e : j["entries"]) {
                int nu = static_cast<int>(get_num(e, "nu"));
                int from = static_cast<int>(get_num(e, "from")) - 1;
                int to = static_cast<int>(get_num(e, "to")) - 1;
                if (nu < 0 || nu > 1 || from < 0 || from > 1 || to < 0 || to > 1)
                    throw ConfigParse("two_mode entry indices out of range");
                s.two_mode_entries[nu][from][to] = get_num(e, "p");
            }
            break;
        }
        case Scenario::Scheme::Multilayer:
            s.ml.r = get_array(j, "r");
            s.ml.x = get_array(j, "x");
            s.ml.snr_gamma = s.snr_linear();
            break;
        case Scenario::Scheme::RrPersistent:
            break;
    }

    if (j.contains("trials")) s.trials = static_cast<long long>(get_num(j, "trials"));
    if (j.contains("seed")) s.seed = static_cast<uint64_t>(get_num(j, "seed"));
    if (j.contains("k")) s.horizon_k = static_cast<long long>(get_num(j, "k"));
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigParse("cannot open config \"" + path + "\"");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

namespace {

double require_theta(const Scenario& s) {
    if (s.qos_kind == Scenario::QosKind::Theta) return s.qos_value;
    if (s.qos_kind == Scenario::QosKind::Psi)
        throw ConfigParse("method needs theta; scenario specifies psi");
    throw ConfigParse("scenario needs \"theta\"");
}

// Throughput closed forms per scheme (the theta = 0 / psi = 0 route).
double throughput_closed(const Scenario& s) {
    switch (s.scheme) {
        case Scenario::Scheme::Arq:
            return s.rate_R * s.resolve_p1();
        case Scenario::Scheme::TruncatedHarq:
        case Scenario::Scheme::RrTruncated:
        case Scenario::Scheme::RrPersistent: {
            HarqProfile prof = s.resolve_profile();
            double q = 1.0, denom = 0.0;
            for (double pm : prof.P) {
                denom += q;
                q -= pm;
            }
            return prof.rate_R * (1.0 - prof.Q_M) / denom;
        }
        case Scenario::Scheme::Ncarq2: {
            double p1 = s.resolve_p1();
            return s.rate_R * 2.0 * p1 * (2.0 - p1) / (3.0 - p1);
        }
        case Scenario::Scheme::GilbertElliot: {
            double pgg = s.ge.stationary_good();
            return pgg * s.rate_R * s.ge.p_g + (1.0 - pgg) * s.rate_R * s.ge.p_b;
        }
        case Scenario::Scheme::Multilayer: {
            MultilayerConfig ml = s.ml;
            ml.snr_gamma = s.snr_linear();
            std::vector<double> probs = ml.exact_layer_probs();
            double t = 0.0;
            for (int l = 1; l <= ml.layers(); ++l) t += probs[l] * ml.cumulative_rate(l);
            return t;
        }
        case Scenario::Scheme::TwoMode: {
            TransitionKernel k = s.resolve_kernel();
            return throughput_finite_k(k, 20000);
        }
    }
    throw ConfigParse("no throughput form for scheme");
}

double closed_form(const Scenario& s) {
    if (s.qos_kind == Scenario::QosKind::None)
        throw ConfigParse("closed method needs theta or psi");
    if (s.qos_value == 0.0) return throughput_closed(s);

    const double q = s.qos_value;
    const bool is_psi = s.qos_kind == Scenario::QosKind::Psi;
    switch (s.scheme) {
        case Scenario::Scheme::Arq: {
            double p1 = s.resolve_p1();
            if (is_psi) return ceff_psi_arq(1.0 - p1, s.rate_R, q);
            return -std::log(1.0 - p1 + p1 * std::exp(-q * s.rate_R)) / q;
        }
        case Scenario::Scheme::TruncatedHarq:
        case Scenario::Scheme::RrTruncated: {
            HarqProfile prof = s.resolve_profile();
            if (is_psi) return ceff_psi_truncated(prof, q);
            if (prof.transmission_limit() == 2)
                return ceff_m2_closed(prof.P[0], prof.P[1], prof.rate_R, q);
            return ceff_char_eq(prof, q).value;
        }
        case Scenario::Scheme::RrPersistent: {
            MedChannel chan = s.resolve_channel();
            if (is_psi) return ceff_psi_med(chan, s.rate_R, q);
            if (chan.degree() == 1) {
                EffChannelScenario sc;
                sc.rate_R = s.rate_R;
                sc.snr_gamma = s.snr_linear();
                sc.flavor = s.flavor;
                return ceff_rr_rayleigh_theta(sc, q).value;
            }
            return ceff_persistent_theorem2(chan, s.rate_R, q).value;
        }
        case Scenario::Scheme::Ncarq2: {
            if (is_psi) throw ConfigParse("ncarq2 has no psi closed form; sweep theta");
            return ceff_ncarq(s.resolve_p1(), s.rate_R, q);
        }
        case Scenario::Scheme::GilbertElliot: {
            if (is_psi) throw ConfigParse("gilbert_elliot has no psi closed form; sweep theta");
            GilbertElliotParams ge = s.ge;
            ge.rate_R = s.rate_R;
            return ceff_gilbert_elliot(ge, q);
        }
        case Scenario::Scheme::TwoMode: {
            if (is_psi) throw ConfigParse("two_mode has no psi closed form; sweep theta");
            TransitionKernel k = s.resolve_kernel();
            CompanionSystem sys = build_companion(k, q);
            return ceff_two_mode_closed(sys.A(0, 0), sys.A(0, 1), sys.A(1, 0), sys.A(1, 1), q);
        }
        case Scenario::Scheme::Multilayer: {
            if (is_psi) throw ConfigParse("multilayer has no psi closed form; sweep theta");
            MultilayerConfig ml = s.ml;
            ml.snr_gamma = s.snr_linear();
            return ceff_multilayer_arq(ml, q);
        }
    }
    throw ConfigParse("no closed form for scheme");
}

} // namespace

MethodResult evaluate_method(const Scenario& s, const std::string& method) {
    MethodResult r;
    if (method == "closed") {
        r.value = closed_form(s);
    } else if (method == "chareq") {
        double theta = require_theta(s);
        if (theta == 0.0) {
            r.value = throughput_closed(s);
        } else {
            r.value = ceff_char_eq(s.resolve_profile(), theta).value;
        }
    } else if (method == "companion") {
        double theta;
        if (s.qos_kind == Scenario::QosKind::Psi) {
            // map psi to theta* via the profile's psi-form where available
            theta = theta_from_psi(s.resolve_profile(), s.qos_value);
        } else {
            theta = require_theta(s);
        }
        if (theta == 0.0) {
            r.value = throughput_finite_k(s.resolve_kernel(),
                                          s.horizon_k > 0 ? s.horizon_k : 20000);
        } else {
            CompanionSystem sys = build_companion(s.resolve_kernel(), theta);
            r.value = (s.horizon_k > 0) ? eff_cap_finite_k(sys, s.horizon_k).value
                                        : eff_cap_infinite(sys).value;
        }
    } else if (method == "theorem2") {
        double theta = require_theta(s);
        MedChannel chan = s.resolve_channel();
        if (theta == 0.0)
            r.value = throughput_closed(s);
        else
            r.value = ceff_persistent_theorem2(chan, s.rate_R, theta).value;
    } else if (method == "simulate") {
        double theta;
        if (s.qos_kind == Scenario::QosKind::Psi)
            theta = theta_from_psi(s.resolve_profile(), s.qos_value);
        else
            theta = require_theta(s);
        long long k = s.horizon_k > 0 ? s.horizon_k : 200;
        SimEstimate est = simulate_walk(s.resolve_kernel(), k, theta, s.trials, s.seed);
        r.value = est.ceff_hat;
        r.half_width = est.half_width;
    } else if (method == "throughput") {
        r.value = throughput_closed(s);
    } else {
        throw ConfigParse("unknown method \"" + method + "\"");
    }
    return r;
}

SweepResult run_sweep(const Scenario& base, const SweepSpec& spec) {
    if (spec.steps < 2) throw ConfigParse("sweep needs steps >= 2");
    if (!(spec.lo < spec.hi)) throw ConfigParse("sweep needs lo < hi");
    if (spec.methods.empty()) throw ConfigParse("sweep needs at least one method");
    if (spec.axis != "snr_db" && spec.axis != "theta" && spec.axis != "psi" &&
        spec.axis != "k")
        throw ConfigParse("axis must be snr_db, theta, psi or k");

    SweepResult out;
    out.columns.push_back(spec.axis);
    bool sim_col = false;
    for (const auto& m : spec.methods) {
        out.columns.push_back(m);
        if (m == "simulate") sim_col = true;
    }
    if (sim_col) out.columns.push_back("simulate_3sigma");

    const int n = spec.steps;
    out.rows.assign(n, {});

    auto eval_point = [&](int i) {
        double x = spec.lo + (spec.hi - spec.lo) * i / (n - 1.0);
        Scenario s = base;
        if (spec.axis == "snr_db") {
            s.snr_db = x;
            s.has_snr = true;
        } else if (spec.axis == "theta") {
            s.qos_kind = Scenario::QosKind::Theta;
            s.qos_value = x;
        } else if (spec.axis == "psi") {
            s.qos_kind = Scenario::QosKind::Psi;
            s.qos_value = x;
        } else {
            s.horizon_k = static_cast<long long>(std::llround(x));
            x = static_cast<double>(s.horizon_k);
        }
        std::vector<double> row;
        row.push_back(x);
        double hw = std::nan("");
        for (const auto& m : spec.methods) {
            MethodResult res = evaluate_method(s, m);
            row.push_back(res.value);
            if (res.half_width) hw = *res.half_width;
        }
        if (sim_col) row.push_back(hw);
        out.rows[i] = std::move(row);
    };

    unsigned workers = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("RECAP_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) workers = static_cast<unsigned>(v);
    }
    workers = std::max(1u, std::min(workers, static_cast<unsigned>(n)));

    if (workers == 1) {
        for (int i = 0; i < n; ++i) eval_point(i);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errs(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                try {
                    for (int i = static_cast<int>(w); i < n; i += static_cast<int>(workers))
                        eval_point(i);
                } catch (...) {
                    errs[w] = std::current_exception();
                }
            });
        for (auto& t : pool) t.join();
        for (auto& e : errs)
            if (e) std::rethrow_exception(e);
    }
    return out;
}

std::string to_csv(const SweepResult& r) {
    std::ostringstream os;
    for (size_t c = 0; c < r.columns.size(); ++c)
        os << (c ? "," : "") << r.columns[c];
    os << "\n";
    char buf[64];
    for (const auto& row : r.rows) {
        for (size_t c = 0; c < row.size(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.12g", row[c]);
            os << (c ? "," : "") << buf;
        }
        os << "\n";
    }
    return os.str();
}

std::string metadata_json(const Scenario& s, const SweepSpec& spec) {
    json meta;
    meta["tool"] = "recap";
    meta["version"] = "1.0.0";
    meta["seed"] = s.seed;
    meta["trials"] = s.trials;
    meta["axis"] = spec.axis;
    meta["range"] = {spec.lo, spec.hi, spec.steps};
    meta["methods"] = spec.methods;
    meta["tolerances"] = {{"probability_mass", 1e-12},
                          {"root_bisection", 1e-13},
                          {"spectral_radius_rel", 1e-10}};
    return meta.dump(2);
}

std::string to_json(const SweepResult& r, const Scenario& s, const SweepSpec& spec) {
    json doc;
    doc["meta"] = json::parse(metadata_json(s, spec));
    doc["columns"] = r.columns;
    doc["rows"] = r.rows;
    return doc.dump(2);
}

} // namespace recap
