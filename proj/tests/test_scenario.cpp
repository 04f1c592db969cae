#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>

#include "amcsim/oracle.hpp"
#include "amcsim/scenario.hpp"

using namespace amcsim;
using nlohmann::ordered_json;

namespace {
ordered_json inversion_doc() {
    return ordered_json{
        {"topology", "inversion"},
        {"matrix", {{2.0, 1.0}, {1.0, 2.0}}},
        {"input", {3.0, 3.0}},
        {"sim", {{"t_end_s", 1e-4}}},
    };
}

ordered_json eigen_doc(double delta) {
    return ordered_json{
        {"topology", "eigenvector"},
        {"matrix", {{2.0, 0.0}, {0.0, 1.0}}},
        {"eigen", {{"delta", delta}, {"sign", "positive"}}},
        {"sim", {{"t_end_s", 2e-2}}},
    };
}
}  // namespace

TEST_CASE("parsing: minimal scenario and defaults") {
    auto sc = parse_scenario(inversion_doc(), ".");
    CHECK(sc.topology == Topology::inversion);
    CHECK(sc.matrix.rows() == 2);
    CHECK(sc.input.size() == 2);
    CHECK(sc.sim.t_end_s == 1e-4);
    CHECK(sc.sim.tol == 0.01);
    CHECK(sc.sim.seed == 1);
    CHECK(sc.sim.compare_tol == 1e-3);
    CHECK(sc.device.g0 == doctest::Approx(100e-6));
    CHECK(sc.oa.l0 == 1e5);
    CHECK(!sc.quantize_stage);
    CHECK(!sc.program_stage);
}

TEST_CASE("parsing: field-path errors") {
    auto doc = inversion_doc();
    doc.erase("sim");
    CHECK_THROWS_WITH_AS(parse_scenario(doc, "."), doctest::Contains("sim"),
                         ScenarioError);

    doc = inversion_doc();
    doc["sim"].erase("t_end_s");
    CHECK_THROWS_WITH_AS(parse_scenario(doc, "."), doctest::Contains("t_end_s"),
                         ScenarioError);

    doc = inversion_doc();
    doc["sim"]["t_end_s"] = -1.0;
    CHECK_THROWS_WITH_AS(parse_scenario(doc, "."), doctest::Contains("t_end_s"),
                         ScenarioError);

    doc = inversion_doc();
    doc["topology"] = "warp_drive";
    CHECK_THROWS_AS(parse_scenario(doc, "."), ScenarioError);

    doc = inversion_doc();
    doc["matrix_file"] = "also_given.txt";
    CHECK_THROWS_WITH_AS(parse_scenario(doc, "."), doctest::Contains("matrix"),
                         ScenarioError);

    doc = inversion_doc();
    doc.erase("matrix");
    CHECK_THROWS_AS(parse_scenario(doc, "."), ScenarioError);

    doc = inversion_doc();
    doc["input"] = {1.0};
    CHECK_THROWS_WITH_AS(parse_scenario(doc, "."), doctest::Contains("input"),
                         ScenarioError);

    doc = inversion_doc();
    doc["matrix"] = {{1.0, -2.0}, {1.0, 2.0}};
    CHECK_THROWS_WITH_AS(parse_scenario(doc, "."),
                         doctest::Contains("inversion_split"), ScenarioError);
}

TEST_CASE("parsing: matrix file resolution against the scenario directory") {
    const std::string dir = "/tmp/amcsim_scen_test";
    if (std::system(("mkdir -p " + dir).c_str()) != 0) FAIL("mkdir failed");
    {
        std::ofstream f(dir + "/operand.txt");
        f << "2 1\n1 2\n";
    }
    ordered_json doc = inversion_doc();
    doc.erase("matrix");
    doc["matrix_file"] = "operand.txt";
    auto sc = parse_scenario(doc, dir);
    CHECK(sc.matrix(0, 0) == 2.0);
    CHECK(sc.matrix(1, 0) == 1.0);

    doc["matrix_file"] = "missing.txt";
    CHECK_THROWS_WITH_AS(parse_scenario(doc, dir), doctest::Contains("missing.txt"),
                         ScenarioError);
}

TEST_CASE("parsing: eigenvector constraints") {
    auto doc = eigen_doc(0.01);
    auto sc = parse_scenario(doc, ".");
    CHECK(sc.has_delta);
    CHECK(sc.delta == 0.01);
    CHECK(sc.input.empty());

    doc = eigen_doc(0.01);
    doc["input"] = {1.0, 1.0};  // self-sustained loop takes no drive
    CHECK_THROWS_WITH_AS(parse_scenario(doc, "."), doctest::Contains("input"),
                         ScenarioError);

    doc = eigen_doc(1.5);
    CHECK_THROWS_WITH_AS(parse_scenario(doc, "."), doctest::Contains("delta"),
                         ScenarioError);

    doc = eigen_doc(0.01);
    doc["eigen"]["lambda_mapped"] = 1.9;  // both given: ambiguous
    CHECK_THROWS_AS(parse_scenario(doc, "."), ScenarioError);
}

TEST_CASE("build: device stages show up in the provenance summary") {
    auto doc = inversion_doc();
    doc["device"] = {{"quantize", true}, {"program", true}, {"sigma_prog", 0.02}};
    auto sc = parse_scenario(doc, ".");
    auto built = build_from_scenario(sc);
    CHECK(built.device.provenance == Provenance::programmed);
    CHECK(built.system.topology == Topology::inversion);

    auto plain = build_from_scenario(parse_scenario(inversion_doc(), "."));
    CHECK(plain.device.provenance == Provenance::ideal);
}

TEST_CASE("build: eigenvector feedback resolves from the oracle eigenvalue") {
    auto sc = parse_scenario(eigen_doc(0.01), ".");
    auto built = build_from_scenario(sc);
    CHECK(built.lambda_mapped == doctest::Approx(2.0 * 0.99).epsilon(1e-6));
}

TEST_CASE("oracle expectation per topology") {
    // mvm carries the transimpedance scale g0/g_f = 1 with the defaults
    ordered_json doc{{"topology", "mvm"},
                     {"matrix", {{1.0, 2.0}, {3.0, 4.0}}},
                     {"input", {1.0, 1.0}},
                     {"sim", {{"t_end_s", 1e-4}}}};
    auto sc = parse_scenario(doc, ".");
    Vec e = oracle_expected(sc);
    CHECK(e[0] == doctest::Approx(3.0));
    CHECK(e[1] == doctest::Approx(7.0));

    auto inv = parse_scenario(inversion_doc(), ".");
    Vec ei = oracle_expected(inv);
    CHECK(ei[0] == doctest::Approx(1.0));
    CHECK(ei[1] == doctest::Approx(1.0));

    auto eig = parse_scenario(eigen_doc(0.01), ".");
    Vec ev = oracle_expected(eig);
    CHECK(std::abs(ev[0]) == doctest::Approx(1.0));
    CHECK(std::abs(ev[1]) < 1e-8);
}

TEST_CASE("relative error: eigenvector comparison ignores the sign") {
    auto eig = parse_scenario(eigen_doc(0.01), ".");
    Vec expected{1.0, 0.0};
    CHECK(output_relative_error(eig, Vec{10.0, 0.0}, expected) < 1e-12);
    CHECK(output_relative_error(eig, Vec{-10.0, 0.0}, expected) < 1e-12);
    CHECK(output_relative_error(eig, Vec{0.0, 10.0}, expected) > 1.0);

    auto inv = parse_scenario(inversion_doc(), ".");
    CHECK(output_relative_error(inv, Vec{1.01, 1.0}, Vec{1.0, 1.0}) ==
          doctest::Approx(0.01 / std::sqrt(2.0)));
}

TEST_CASE("run: PD inversion scenario") {
    auto sc = parse_scenario(inversion_doc(), ".");
    auto rr = run_scenario(sc);
    CHECK(rr.exit_code == 0);
    CHECK(rr.has_trajectory);
    CHECK(rr.json["topology"] == "inversion");
    CHECK(rr.json["relative_error"].get<double>() < 1e-3);
    CHECK(rr.json["settled"] == true);
    CHECK(rr.json["verdict"] == "stable");
    CHECK(rr.json["within_tol"] == true);
    CHECK(rr.json["exit_code"] == 0);
    CHECK(rr.json["device"]["provenance"] == "ideal");
    CHECK(rr.json["poles"]["poles"].size() == 2);

    // deterministic: byte-identical report body on a second run
    auto rr2 = run_scenario(sc);
    CHECK(rr.json.dump() == rr2.json.dump());

    // the embedded vectors recompute to the reported relative error
    Vec result, expected;
    for (const auto& v : rr.json["result"]) result.push_back(v.get<double>());
    for (const auto& v : rr.json["oracle"]) expected.push_back(v.get<double>());
    const double re = output_relative_error(sc, result, expected);
    CHECK(re == doctest::Approx(rr.json["relative_error"].get<double>()).epsilon(1e-12));
}

TEST_CASE("run: eigenvector scenario") {
    auto sc = parse_scenario(eigen_doc(0.01), ".");
    auto rr = run_scenario(sc);
    CHECK(rr.exit_code == 0);
    CHECK(rr.json["eigen"]["direction_settled"] == true);
    CHECK(rr.json["eigen"]["angle_rad"].get<double>() < 1.0 * M_PI / 180.0);
    CHECK(rr.json["eigen"]["amplitude_ratio"].get<double>() ==
          doctest::Approx(1.0).epsilon(0.01));
    CHECK(rr.json["eigen"]["rayleigh"].get<double>() ==
          doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("run: unstable scenario reports the offending poles and fails") {
    ordered_json doc{{"topology", "inversion"},
                     {"matrix", {{0.1, 2.0}, {2.0, 0.1}}},  // indefinite operand
                     {"input", {1.0, 1.0}},
                     {"sim", {{"t_end_s", 1e-4}}}};
    auto sc = parse_scenario(doc, ".");
    auto rr = run_scenario(sc);
    CHECK(rr.exit_code == 1);
    CHECK(rr.json["verdict"] == "unstable");
    CHECK(!rr.has_trajectory);  // nothing to integrate: it would diverge
    CHECK(rr.json["result"].is_null());
    bool any_positive = false;
    for (const auto& p : rr.json["poles"]["poles"])
        any_positive = any_positive || p["re"].get<double>() > 0.0;
    CHECK(any_positive);
}

TEST_CASE("sweep: quantization levels drive the error down") {
    // non-round entries so no coarse grid hits them exactly
    ordered_json doc{{"topology", "mvm"},
                     {"matrix", {{0.37, 1.22}, {2.71, 3.94}}},
                     {"input", {1.0, 1.0}},
                     {"device", {{"quantize", true}}},
                     {"sim", {{"t_end_s", 1e-4}}}};
    auto sc = parse_scenario(doc, ".");
    auto sw = sweep_scenario(sc, "levels", {16.0, 64.0, 256.0});
    REQUIRE(sw.rows.size() == 3);
    CHECK(sw.rows[0].relative_error > sw.rows[1].relative_error);
    CHECK(sw.rows[1].relative_error > sw.rows[2].relative_error);
    for (const auto& row : sw.rows) CHECK(std::isfinite(row.settle_time_s));

    const std::string csv = sweep_csv(sw);
    CHECK(csv.rfind("value,settle_time_s,relative_error,dominant_pole_re_per_s\n", 0) == 0);
    std::size_t lines = 0;
    for (char c : csv)
        if (c == '\n') ++lines;
    CHECK(lines == 4);  // header plus one line per value

    CHECK_THROWS_WITH_AS(sweep_scenario(sc, "warp_factor", {1.0}),
                         doctest::Contains("axis"), ScenarioError);
}

TEST_CASE("sweep: max_row_sum rescales the operand") {
    ordered_json doc{{"topology", "mvm"},
                     {"matrix", {{0.5, 0.5}, {0.25, 0.75}}},
                     {"input", {1.0, 1.0}},
                     {"sim", {{"t_end_s", 1e-3}}}};
    auto sc = parse_scenario(doc, ".");
    auto sw = sweep_scenario(sc, "max_row_sum", {1.0, 2.0, 3.0});
    REQUIRE(sw.rows.size() == 3);
    // heavier rows settle later
    CHECK(sw.rows[0].settle_time_s < sw.rows[1].settle_time_s);
    CHECK(sw.rows[1].settle_time_s < sw.rows[2].settle_time_s);
}

TEST_CASE("check: stable prediction with window diagnostics") {
    auto doc = inversion_doc();
    auto sc = parse_scenario(doc, ".");
    auto rep = check_scenario(sc);
    CHECK(rep["valid"] == true);
    CHECK(rep["errors"].empty());
    CHECK(rep["positive_definite"] == true);
    CHECK(rep["window"]["fits"] == true);
    CHECK(rep["predicted_verdict"] == "stable");
    CHECK(rep["bound_time_s"].is_number());
    CHECK(rep["predicted_poles"].size() == 2);
}

TEST_CASE("check: negative entries suggest the split topology") {
    auto doc = inversion_doc();
    doc["matrix"] = {{2.0, -1.0}, {-1.0, 2.0}};
    auto sc = parse_scenario(doc, ".", /*strict=*/false);
    auto rep = check_scenario(sc);
    CHECK(rep["valid"] == false);
    bool advised = false;
    for (const auto& e : rep["errors"])
        advised = advised || e.get<std::string>().find("inversion_split") != std::string::npos;
    CHECK(advised);
}

TEST_CASE("check: loop-gain warning when the feedback eigenvalue is too high") {
    auto doc = eigen_doc(0.01);
    doc["eigen"].erase("delta");
    doc["eigen"]["lambda_mapped"] = 2.5;  // above the nominal dominant 2.0
    auto sc = parse_scenario(doc, ".");
    auto rep = check_scenario(sc);
    CHECK(rep["valid"] == true);
    bool warned = false;
    for (const auto& w : rep["warnings"])
        warned = warned || w.get<std::string>().find("loop gain") != std::string::npos;
    CHECK(warned);
}

TEST_CASE("check: window overflow reports the feasible unit conductance") {
    auto doc = inversion_doc();
    doc["matrix"] = {{9.0, 1.0}, {1.0, 9.0}};  // 9 * 100 uS > 500 uS
    auto sc = parse_scenario(doc, ".", /*strict=*/false);
    auto rep = check_scenario(sc);
    CHECK(rep["valid"] == false);
    CHECK(rep["window"]["fits"] == false);
    CHECK(rep["window"]["max_feasible_g0_siemens"].get<double>() ==
          doctest::Approx(500e-6 / 9.0));
}

TEST_CASE("output directory resolution order") {
    auto sc = parse_scenario(inversion_doc(), ".");
    unsetenv("AMCSIM_OUT_DIR");
    CHECK(resolve_out_dir(sc) == ".");
    setenv("AMCSIM_OUT_DIR", "/tmp/amcsim_env_dir", 1);
    CHECK(resolve_out_dir(sc) == "/tmp/amcsim_env_dir");
    sc.out_dir = "/tmp/amcsim_explicit";
    CHECK(resolve_out_dir(sc) == "/tmp/amcsim_explicit");
    unsetenv("AMCSIM_OUT_DIR");
}
