#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "amcsim/circuits.hpp"
#include "amcsim/device.hpp"
#include "amcsim/dynamics.hpp"
#include "amcsim/matrix.hpp"
#include "amcsim/stability.hpp"

namespace amcsim {

// Raised on scenario validation failures; the message carries the offending
// field path, e.g. "scenario.sim.t_end_s: must be > 0".
class ScenarioError : public std::invalid_argument {
public:
    explicit ScenarioError(const std::string& msg) : std::invalid_argument(msg) {}
};

struct SimConfig {
    double t_end_s = 0.0;      // required
    double tol = 0.01;         // settle criterion, relative
    std::uint64_t seed = 1;
    double compare_tol = 1e-3; // oracle comparison gate for the exit code
};

// One self-contained experiment: operand, topology, device treatment,
// amplifier parameters and simulation horizon.
struct Scenario {
    Topology topology = Topology::inversion;
    Matrix matrix;        // signed mathematical operand
    Vec input;            // volts; empty for the self-sustained eigenvector loop
    DeviceConfig device;
    bool quantize_stage = false;
    bool program_stage = false;
    TIAConfig tia;
    OAParams oa;           // first (or only) amplifier stage
    OAParams oa_second;    // pinv second stage; defaults to oa
    OAParams inverter_oa;  // analog inverters; defaults to oa
    bool has_delta = false;
    double delta = 0.01;  // eigenvector detuning, lambda = (1-delta)*nominal
    bool has_lambda = false;
    double lambda_mapped = 0.0;  // explicit feedback eigenvalue override
    EigenSign eigen_sign = EigenSign::positive;
    SimConfig sim;
    std::string out_dir;  // empty: resolve from AMCSIM_OUT_DIR, then "."
};

// strict=false skips the semantic validation pass (check mode reports those
// findings itself); structural problems always throw ScenarioError.
Scenario parse_scenario(const nlohmann::ordered_json& doc, const std::string& base_dir,
                        bool strict = true);
Scenario load_scenario_file(const std::string& path, bool strict = true);

struct DeviceSummary {
    Provenance provenance = Provenance::ideal;
    long clamp_events = 0;
    long total_verify_iters = 0;
};

struct BuiltScenario {
    CircuitSystem system;
    DeviceSummary device;
    double lambda_mapped = 0.0;  // resolved eigenvector feedback value
};

// map -> optional quantize -> optional program -> topology builder.
BuiltScenario build_from_scenario(const Scenario& sc);

// Oracle prediction of the circuit output, in circuit units (the MVM family
// carries the g0/g_f transimpedance scale; the eigenvector case returns the
// oracle unit eigenvector).
Vec oracle_expected(const Scenario& sc);

// Relative output error; for eigenvector runs the sign-invariant distance
// between unit directions.
double output_relative_error(const Scenario& sc, const Vec& result, const Vec& expected);

struct RunReport {
    nlohmann::ordered_json json;  // deterministic report body
    int exit_code = 0;            // 0 iff verdict != unstable and within compare_tol
    Trajectory trajectory;
    bool has_trajectory = false;
};

RunReport run_scenario(const Scenario& sc);

struct SweepRow {
    double value = 0.0;
    double settle_time_s = 0.0;  // NaN when not settled or not simulated
    double relative_error = 0.0; // NaN when not comparable
    double dominant_re = 0.0;    // NaN when no decaying pole
};

struct SweepResult {
    std::string axis;
    std::vector<SweepRow> rows;
    std::vector<nlohmann::ordered_json> reports;
};

// Supported axes: delta, levels, g_f_siemens, f_gbwp_hz, max_row_sum,
// t_end_s, sigma_prog, g0_siemens, l0.
SweepResult sweep_scenario(const Scenario& sc, const std::string& axis,
                           const std::vector<double>& values);

// Header value,settle_time_s,relative_error,dominant_pole_re_per_s.
std::string sweep_csv(const SweepResult& sweep);

// Dry-run validation: dimensions, definiteness, window fit, predicted poles
// and response bound. Never simulates; collects findings instead of throwing.
nlohmann::ordered_json check_scenario(const Scenario& sc);

// Scenario out_dir, else $AMCSIM_OUT_DIR, else ".".
std::string resolve_out_dir(const Scenario& sc);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace amcsim
