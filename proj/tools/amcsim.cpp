// Scenario runner: load a JSON scenario, realise it on the device model,
// simulate and compare against the linear-algebra oracle.
#include <chrono>
#include <cstdio>
#include <exception>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "amcsim/scenario.hpp"

namespace {

using amcsim::RunReport;
using amcsim::Scenario;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Scenario load(const std::string& path, bool strict, const std::int64_t* seed_override) {
    Scenario sc = amcsim::load_scenario_file(path, strict);
    if (seed_override != nullptr) sc.sim.seed = static_cast<std::uint64_t>(*seed_override);
    return sc;
}

int cmd_run(const std::string& path, const std::int64_t* seed_override) {
    const auto t0 = std::chrono::steady_clock::now();
    const Scenario sc = load(path, true, seed_override);
    const RunReport rr = amcsim::run_scenario(sc);

    const std::string dir = amcsim::resolve_out_dir(sc);
    amcsim::write_text_file(dir + "/report.json", rr.json.dump(2) + "\n");
    if (rr.has_trajectory) {
        std::ostringstream csv;
        amcsim::write_trajectory_csv(rr.trajectory, csv);
        amcsim::write_text_file(dir + "/trajectory.csv", csv.str());
    }

    std::printf("run: topology=%s relative_error=%s settled=%s verdict=%s\n",
                rr.json.at("topology").get<std::string>().c_str(),
                rr.json.at("relative_error").dump().c_str(),
                rr.json.at("settled").dump().c_str(),
                rr.json.at("verdict").get<std::string>().c_str());
    const std::string traj_note = rr.has_trajectory ? " " + dir + "/trajectory.csv" : "";
    std::printf("wrote %s/report.json%s\n", dir.c_str(), traj_note.c_str());
    // Kept out of report.json so reports stay byte-identical across runs.
    std::printf("wall_clock_s=%.3f\n", seconds_since(t0));
    return rr.exit_code;
}

int cmd_sweep(const std::string& path, const std::string& axis, const std::vector<double>& values,
              const std::int64_t* seed_override) {
    const auto t0 = std::chrono::steady_clock::now();
    const Scenario sc = load(path, true, seed_override);
    const amcsim::SweepResult sweep = amcsim::sweep_scenario(sc, axis, values);

    const std::string dir = amcsim::resolve_out_dir(sc);
    amcsim::write_text_file(dir + "/sweep.csv", amcsim::sweep_csv(sweep));
    for (std::size_t k = 0; k < sweep.reports.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof(name), "/report_%03zu.json", k);
        amcsim::write_text_file(dir + name, sweep.reports[k].dump(2) + "\n");
    }

    std::printf("sweep: axis=%s points=%zu\n", axis.c_str(), sweep.rows.size());
    for (const amcsim::SweepRow& r : sweep.rows)
        std::printf("  %-12g settle_time_s=%-12g relative_error=%-12g dominant_re=%g\n", r.value,
                    r.settle_time_s, r.relative_error, r.dominant_re);
    std::printf("wrote %s/sweep.csv and %zu reports\n", dir.c_str(), sweep.reports.size());
    std::printf("wall_clock_s=%.3f\n", seconds_since(t0));
    return 0;
}

int cmd_check(const std::string& path, const std::int64_t* seed_override) {
    nlohmann::ordered_json rep;
    try {
        const Scenario sc = load(path, false, seed_override);
        rep = amcsim::check_scenario(sc);
    } catch (const amcsim::ScenarioError& e) {
        rep["valid"] = false;
        rep["errors"] = {e.what()};
    }
    std::printf("%s\n", rep.dump(2).c_str());
    return rep.at("valid").get<bool>() ? 0 : 1;
}

int cmd_poles(const std::string& path, const std::int64_t* seed_override) {
    const Scenario sc = load(path, true, seed_override);
    const amcsim::BuiltScenario built = amcsim::build_from_scenario(sc);
    const amcsim::PoleReport pr = amcsim::poles(built.system);
    std::printf("%s\n", amcsim::to_json(pr).dump(2).c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Analog matrix-computing circuit simulator"};
    app.require_subcommand(1);

    std::int64_t seed = 0;
    bool seed_set = false;
    app.add_option("--seed", seed, "Override the scenario RNG seed")
        ->each([&seed_set](const std::string&) { seed_set = true; });

    std::string scenario_path;
    std::string axis;
    std::vector<double> values;

    CLI::App* run = app.add_subcommand("run", "Simulate a scenario and write report/trajectory");
    run->add_option("scenario", scenario_path, "Scenario JSON file")->required();

    CLI::App* sweep = app.add_subcommand("sweep", "Run a scenario across one parameter axis");
    sweep->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    sweep->add_option("--axis", axis, "Scenario field to sweep")->required();
    sweep->add_option("--values", values, "Comma-separated axis values")
        ->required()
        ->delimiter(',');

    CLI::App* check = app.add_subcommand("check", "Validate a scenario without simulating");
    check->add_option("scenario", scenario_path, "Scenario JSON file")->required();

    CLI::App* poles = app.add_subcommand("poles", "Print the pole report of a scenario");
    poles->add_option("scenario", scenario_path, "Scenario JSON file")->required();

    CLI11_PARSE(app, argc, argv);
    const std::int64_t* seed_override = seed_set ? &seed : nullptr;

    try {
        if (run->parsed()) return cmd_run(scenario_path, seed_override);
        if (sweep->parsed()) return cmd_sweep(scenario_path, axis, values, seed_override);
        if (check->parsed()) return cmd_check(scenario_path, seed_override);
        if (poles->parsed()) return cmd_poles(scenario_path, seed_override);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
