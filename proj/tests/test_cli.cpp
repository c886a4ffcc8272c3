#include "recap/config.hpp"
#include "recap/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace recap;

namespace {

std::string bin() { return RECAP_BIN; }
std::string cfg(const std::string& name) { return std::string(RECAP_CONFIG_DIR) + "/" + name; }

std::string tmp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

int run(const std::string& args) {
    std::string cmd = bin() + " " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

Csv parse_csv(const std::string& text) {
    Csv out;
    std::stringstream ss(text);
    std::string line;
    bool first = true;
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::string cell;
        if (first) {
            while (std::getline(ls, cell, ',')) out.header.push_back(cell);
            first = false;
        } else {
            std::vector<double> row;
            while (std::getline(ls, cell, ',')) {
                try {
                    row.push_back(cell.empty() ? NAN : std::stod(cell));
                } catch (const std::exception&) {
                    row.push_back(NAN); // non-numeric label column
                }
            }
            out.rows.push_back(row);
        }
    }
    return out;
}

} // namespace

TEST_CASE("scenario parsing") {
    SUBCASE("shorthand scheme blocks") {
        Scenario s = parse_scenario(R"({"scheme":"truncated_harq","P":[0.5,0.25],"rate_R":4,"theta":1})");
        CHECK(s.scheme == Scenario::Scheme::TruncatedHarq);
        HarqProfile prof = s.resolve_profile();
        CHECK(prof.P[1] == 0.25);
        CHECK(prof.Q_M == doctest::Approx(0.25));
    }
    SUBCASE("explicit dense entries") {
        Scenario s = parse_scenario(
            R"({"scheme":"two_mode","rate_R":4,"theta":0.5,"entries":[
                {"nu":1,"from":1,"to":1,"p":0.5},{"nu":0,"from":1,"to":1,"p":0.3},
                {"nu":0,"from":1,"to":2,"p":0.2},
                {"nu":1,"from":2,"to":2,"p":0.4},{"nu":0,"from":2,"to":2,"p":0.4},
                {"nu":0,"from":2,"to":1,"p":0.2}]})");
        TransitionKernel k = s.resolve_kernel();
        CHECK(k.at(0, 1, 0, 0) == 0.5);
        CHECK(k.at(0, 0, 1, 0) == 0.2);
    }
    SUBCASE("theta and psi together are refused") {
        CHECK_THROWS_AS(parse_scenario(R"({"scheme":"arq","P1":0.5,"theta":1,"psi":1})"),
                        ConfigParse);
    }
    SUBCASE("unknown scheme is refused") {
        CHECK_THROWS_AS(parse_scenario(R"({"scheme":"carrier_pigeon"})"), ConfigParse);
    }
    SUBCASE("channel-derived ARQ") {
        Scenario s = parse_scenario(
            R"({"scheme":"arq","channel":"rayleigh","snr_db":20,"rate_R":4,"theta":0.5})");
        CHECK(s.resolve_p1() == doctest::Approx(std::exp(-0.15)).epsilon(1e-12));
    }
}

TEST_CASE("method evaluation consistency through the scenario layer") {
    Scenario s = parse_scenario(
        R"({"scheme":"rr_persistent","channel":"rayleigh","snr_db":20,"rate_R":4,"theta":0.5})");
    double closed = evaluate_method(s, "closed").value;
    double t2 = evaluate_method(s, "theorem2").value;
    double comp = evaluate_method(s, "companion").value;
    CHECK(std::abs(closed - t2) <= 1e-9 * closed);
    CHECK(std::abs(closed - comp) <= 1e-8 * closed);
    CHECK_THROWS_AS(evaluate_method(s, "warp_drive"), ConfigParse);
}

TEST_CASE("sweep: closed and theorem2 columns agree on the Rayleigh grid") {
    Scenario s = load_scenario(cfg("fig_rr_rayleigh_theta.json"));
    SweepSpec spec;
    spec.axis = "snr_db";
    spec.lo = 0.0;
    spec.hi = 40.0;
    spec.steps = 81;
    spec.methods = {"closed", "theorem2"};
    SweepResult res = run_sweep(s, spec);
    REQUIRE(res.columns.size() == 3);
    REQUIRE(res.rows.size() == 81);
    for (const auto& row : res.rows) {
        CHECK(std::abs(row[1] - row[2]) <= 1e-9 * std::max(1.0, row[1]));
    }
}

TEST_CASE("CLI end-to-end") {
    SUBCASE("sweep writes deterministic CSV plus metadata sidecar") {
        std::string out1 = tmp_path("recap_sweep1.csv"), out2 = tmp_path("recap_sweep2.csv");
        std::string args = "sweep --config " + cfg("fig_psi_mc.json") +
                           " --axis psi --lo 0.2 --hi 0.8 --steps 4"
                           " --methods closed,companion,simulate --trials 20000 --out ";
        REQUIRE(run(args + out1) == 0);
        REQUIRE(run(args + out2) == 0);
        std::string text1 = slurp(out1);
        CHECK(text1 == slurp(out2)); // byte-identical
        CHECK(slurp(out1 + ".meta.json").find("\"seed\"") != std::string::npos);

        Csv csv = parse_csv(text1);
        REQUIRE(csv.header.size() == 5); // psi, closed, companion, simulate, simulate_3sigma
        CHECK(csv.header[4] == "simulate_3sigma");
        for (const auto& row : csv.rows) {
            // simulate estimates the same finite-horizon object as companion
            CHECK(std::abs(row[3] - row[2]) <= row[4]);
            // the infinite-horizon closed form sits within a small bias of it
            CHECK(std::abs(row[1] - row[2]) <= 0.02 * row[1]);
        }
    }
    SUBCASE("compute prints one line per method") {
        std::string out = tmp_path("recap_compute.csv");
        REQUIRE(run("compute --config " + cfg("gilbert_elliot.json") +
                    " --methods closed,companion --out " + out) == 0);
        Csv csv = parse_csv(slurp(out));
        REQUIRE(csv.rows.size() == 2);
        CHECK(std::abs(csv.rows[0][1] - csv.rows[1][1]) <= 1e-9);
    }
    SUBCASE("optimize emits the parametric ARQ curve") {
        std::string out = tmp_path("recap_opt.csv");
        REQUIRE(run("optimize --scheme arq --theta 0.5 --lo 1 --hi 8 --steps 15 --out " + out) ==
                0);
        Csv csv = parse_csv(slurp(out));
        REQUIRE(csv.header.size() == 5);
        REQUIRE(csv.rows.size() == 15);
        for (const auto& row : csv.rows) CHECK(row[4] > 0.0); // ceff_star
    }
    SUBCASE("optimize rr over the MED family") {
        std::string out = tmp_path("recap_opt_rr.csv");
        REQUIRE(run("optimize --scheme rr --psi 1 --channel nakagami_ostbc --Nt 2"
                    " --lo 0.05 --hi 10 --steps 25 --out " +
                    out) == 0);
        Csv csv = parse_csv(slurp(out));
        CHECK(csv.rows.size() >= 20);
        for (const auto& row : csv.rows) {
            CHECK(row[2] > 0.0); // rate_star
            CHECK(row[3] > 0.0); // ceff_star
            CHECK(row[3] <= row[2] + 1e-9);
        }
    }
    SUBCASE("multilayer and simulate subcommands run") {
        std::string out = tmp_path("recap_ml.csv");
        REQUIRE(run("compute --config " + cfg("multilayer.json") +
                    " --methods closed,throughput --out " + out) == 0);
        Csv csv = parse_csv(slurp(out));
        REQUIRE(csv.rows.size() == 2);
        CHECK(csv.rows[0][1] < csv.rows[1][1]); // ceff below throughput at theta > 0

        REQUIRE(run("simulate --config " + cfg("fig_psi_mc.json") + " --trials 5000 --out " +
                    tmp_path("recap_sim.csv")) == 0);
    }
    SUBCASE("bad config exits nonzero") {
        std::string bad = tmp_path("recap_bad.json");
        std::ofstream(bad) << R"({"scheme":"arq","P1":0.5,"theta":1,"psi":1})";
        CHECK(run("compute --config " + bad + " --methods closed") != 0);
        CHECK(run("compute --config /nonexistent.json --methods closed") != 0);
    }
}
