// config.hpp - JSON scenario configs and method evaluation shared by the CLI
// subcommands. A scenario is a scheme (explicit probabilities or a fading
// channel), a rate, one QoS coordinate (theta or psi, never both), and the
// knobs for simulation.

#ifndef RECAP_CONFIG_HPP
#define RECAP_CONFIG_HPP

#include "recap/med_channel.hpp"
#include "recap/multimode_schemes.hpp"
#include "recap/scheme_kernel.hpp"

#include <optional>
#include <string>
#include <vector>

namespace recap {

struct Scenario {
    enum class Scheme {
        TruncatedHarq,
        Arq,
        RrTruncated,
        RrPersistent,
        Ncarq2,
        GilbertElliot,
        TwoMode,
        Multilayer
    };
    enum class ChannelKind { None, Rayleigh, NakagamiOstbc, Med };
    enum class QosKind { None, Theta, Psi };

    Scheme scheme = Scheme::Arq;
    double rate_R = 1.0;

    QosKind qos_kind = QosKind::None;
    double qos_value = 0.0; // 0 routes to the throughput forms

    ChannelKind channel = ChannelKind::None;
    double snr_db = 0.0;
    bool has_snr = false;
    int n_t = 1, n_r = 1, m_nakagami = 1;
    double r_stc = 1.0;
    std::vector<double> med_p, med_q;
    std::optional<double> med_theta; // explicit threshold for raw MED channels
    EffChannelScenario::Flavor flavor = EffChannelScenario::Flavor::RR;

    std::vector<double> harq_p;    // explicit truncated-HARQ profile
    std::optional<double> p1;      // explicit ARQ / NC-ARQ decode probability
    int m_limit = 1;               // attempts for channel-derived truncated schemes
    GilbertElliotParams ge;
    double two_mode_entries[2][2][2] = {};
    MultilayerConfig ml;

    long long trials = 100000;
    uint64_t seed = 1;
    long long horizon_k = 0; // 0 = infinite horizon

    double snr_linear() const;
    // Effective channel resolved from the channel block (requires one).
    MedChannel resolve_channel() const;
    // First-attempt success probability (explicit or channel-derived).
    double resolve_p1() const;
    // Truncated profile for HARQ-style schemes; persistent profiles are
    // truncated where the undelivered tail drops below 1e-14.
    HarqProfile resolve_profile() const;
    // Kernel representation; throws ConfigParse for multilayer (no kernel).
    TransitionKernel resolve_kernel() const;
};

Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);

struct MethodResult {
    double value = 0.0;
    std::optional<double> half_width; // simulate only: 3-sigma interval
};

// Methods: closed, chareq, companion, theorem2, simulate, throughput.
// Availability depends on the scheme; unsupported pairs throw ConfigParse.
MethodResult evaluate_method(const Scenario& s, const std::string& method);

struct SweepSpec {
    std::string axis; // snr_db | theta | psi | k
    double lo = 0.0, hi = 1.0;
    int steps = 2;
    std::vector<std::string> methods;
};

struct SweepResult {
    std::vector<std::string> columns;          // header, axis first
    std::vector<std::vector<double>> rows;     // one row per grid point
};

// Runs every method at every grid point; points are dispatched to a worker
// pool (RECAP_THREADS caps it) and assembled in axis order.
SweepResult run_sweep(const Scenario& base, const SweepSpec& spec);

std::string to_csv(const SweepResult& r);
std::string to_json(const SweepResult& r, const Scenario& s, const SweepSpec& spec);
std::string metadata_json(const Scenario& s, const SweepSpec& spec);

// Full invariant suite; prints one pass/fail line per property to stdout and
// returns the number of failures. `inject_defect` perturbs a kernel entry to
// demonstrate that the validator catches a homogeneity violation.
int run_selfcheck(bool inject_defect, uint64_t seed);

} // namespace recap

#endif // RECAP_CONFIG_HPP
