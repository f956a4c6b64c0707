#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "anisored/runner.hpp"
#include "anisored/serialize.hpp"

using namespace anisored;
using nlohmann::json;

namespace {

// the diagonal instance of the worked family: a=2, b=0, c=1, f=1
// (A12 = [[0,-1],[1,0]], A21 = [[0,1],[-1,0]])
json family_2011_config() {
    return json::parse(R"({
      "coefficients": {
        "mode": "constant",
        "a": [ [ [[2,0],[0,1]], [[0,-1],[1,0]] ],
               [ [[0,1],[-1,0]], [[1,0],[0,1]] ] ]
      },
      "domain": {"center": [0,0], "half_width": 0.5},
      "grid": {"n": 17}
    })");
}

json isotropic_config() {
    return json::parse(R"({
      "coefficients": {
        "mode": "constant",
        "a": [ [ [[1,0],[0,1]], [[0,0],[0,0]] ],
               [ [[0,0],[0,0]], [[1,0],[0,1]] ] ]
      },
      "domain": {"center": [0,0], "half_width": 0.5}
    })");
}

json strip_timestamp(json j) {
    j.erase("timestamp");
    return j;
}

} // namespace

TEST_CASE("minimal constant config parses with zero lower-order defaults") {
    const RunConfig cfg = parse_config_json(family_2011_config());
    REQUIRE(cfg.tensor.has_value());
    CHECK(cfg.tensor->bref(1, 1, 1).constant_value() == Cx(0));
    CHECK(cfg.tensor->cref(2, 2).constant_value() == Cx(0));
    CHECK(cfg.grid_n == 17);
    CHECK(cfg.domain_half_width == 0.5);
    // defaults are echoed
    CHECK(cfg.echo["tolerances"]["factor_res"] == 1e-9);
    CHECK(cfg.echo["coefficients"].contains("b"));
}

TEST_CASE("unknown keys are rejected") {
    json j = family_2011_config();
    j["coefficents"] = 1; // typo
    CHECK_THROWS_WITH_AS(parse_config_json(j), doctest::Contains("unknown key"), Error);

    json j2 = family_2011_config();
    j2["grid"]["m"] = 3;
    CHECK_THROWS_AS(parse_config_json(j2), Error);
}

TEST_CASE("grid.n validation") {
    json j = family_2011_config();
    j["grid"]["n"] = 8;
    CHECK_THROWS_WITH_AS(parse_config_json(j), doctest::Contains("grid.n must be odd >= 9"),
                         Error);
}

TEST_CASE("an asymmetric tensor parses but fails the symmetry check") {
    json j = isotropic_config();
    j["coefficients"]["a"][0][1][0][0] = 0.5; // A11_12 != A11_21
    const RunConfig cfg = parse_config_json(j); // parse is shape-only
    const RunResult rr = run("check", cfg);
    CHECK(rr.exit_code == 2);
    bool major_failed = false;
    for (const auto& c : rr.report["checks"])
        if (c["name"] == "symmetry-major") major_failed = (c["status"] == "fail");
    CHECK(major_failed);
}

TEST_CASE("check on the isotropic-like tensor fails simple characteristics with exit 2") {
    const RunResult rr = run("check", parse_config_json(isotropic_config()));
    CHECK(rr.exit_code == 2);
    bool simple_failed = false, elliptic_passed = false;
    for (const auto& c : rr.report["checks"]) {
        if (c["name"] == "simple-characteristics") simple_failed = (c["status"] == "fail");
        if (c["name"] == "strong-ellipticity") elliptic_passed = (c["status"] == "pass");
    }
    CHECK(simple_failed);
    CHECK(elliptic_passed);
}

TEST_CASE("factorize on the diagonal family instance") {
    const RunResult rr = run("factorize", parse_config_json(family_2011_config()));
    CHECK(rr.exit_code == 0);
    double residual = 1.0;
    for (const auto& c : rr.report["checks"])
        if (c["name"] == "factorization-residual") residual = c["residual"].get<double>();
    CHECK(residual <= 1e-10);
    // X = diag(i/sqrt(2), i)
    const auto& x = rr.report["results"]["factorization"]["x"];
    CHECK(x[0][0]["im"].get<double>() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
    CHECK(x[1][1]["im"].get<double>() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("example5 subcommand accepts (2,1,1,2) and reports the factor coefficient 7") {
    CliOverrides ov;
    ov.ex5_a = 2.0;
    ov.ex5_b = 1.0;
    ov.ex5_c = 1.0;
    ov.ex5_f = 2.0;
    const RunResult rr = run("example5", parse_config_json(json::object()), ov);
    CHECK(rr.exit_code == 0);
    CHECK(rr.report["results"]["example5"]["second_factor_coeff"].get<double>() ==
          doctest::Approx(7.0).epsilon(1e-12));

    ov.ex5_f = 0.3;
    const RunResult bad = run("example5", parse_config_json(json::object()), ov);
    CHECK(bad.exit_code == 2);
}

TEST_CASE("reduce report checks and the serialization round trip") {
    const RunResult rr = run("reduce", parse_config_json(family_2011_config()));
    CHECK(rr.exit_code == 0);

    const ReductionData rd = reduction_from_json(rr.report["results"]["reduction"]);
    const auto before = verify_reduction_data(rd);

    // serialize again, re-read, re-verify: identical residuals
    const json dumped = to_json(rd);
    const ReductionData rd2 = reduction_from_json(dumped);
    const auto after = verify_reduction_data(rd2);
    CHECK(std::abs(before.quad_residual - after.quad_residual) <= 1e-14);
    CHECK(std::abs(before.sylvester_residual - after.sylvester_residual) <= 1e-14);
    CHECK(std::abs(before.conj_mismatch - after.conj_mismatch) <= 1e-14);
    CHECK(std::abs(before.diag_conj_mismatch - after.diag_conj_mismatch) <= 1e-14);
}

TEST_CASE("verify subcommand on a constant system") {
    json j = family_2011_config();
    j["grid"]["n"] = 17;
    const RunResult rr = run("verify", parse_config_json(j));
    CHECK(rr.exit_code == 0);
    for (const auto& c : rr.report["checks"])
        if (c["name"] == "block-identity-exact") CHECK(c["status"] == "pass");
}

TEST_CASE("verify subcommand runs the refinement study on polynomial coefficients") {
    // family instance a = 2, b = 0, c = 1 + 0.2 x1, f = 1 + 0.1 x2
    // (e = 0, d = -c), written in the monomial entry syntax
    const json two = json::array({{{"i", 0}, {"j", 0}, {"c", 2.0}}});
    const json zero = json::array();
    const json cp = json::array({{{"i", 0}, {"j", 0}, {"c", 1.0}}, {{"i", 1}, {"j", 0}, {"c", 0.2}}});
    const json ncp =
        json::array({{{"i", 0}, {"j", 0}, {"c", -1.0}}, {{"i", 1}, {"j", 0}, {"c", -0.2}}});
    const json fp = json::array({{{"i", 0}, {"j", 0}, {"c", 1.0}}, {{"i", 0}, {"j", 1}, {"c", 0.1}}});
    json a = json::array();
    a.push_back(json::array({json::array({json::array({two, zero}), json::array({zero, cp})}),
                             json::array({json::array({zero, ncp}), json::array({cp, zero})})}));
    a.push_back(json::array({json::array({json::array({zero, cp}), json::array({ncp, zero})}),
                             json::array({json::array({cp, zero}), json::array({zero, fp})})}));
    json j;
    j["coefficients"] = {{"mode", "poly"}, {"a", a}};
    j["domain"] = {{"center", {0.0, 0.0}}, {"half_width", 0.5}};
    j["grid"] = {{"n", 21}};
    const RunConfig cfg = parse_config_json(j);
    const RunResult rr = run("verify", cfg);
    INFO(rr.report.dump(2));
    CHECK(rr.exit_code == 0);
    double block_order = 0.0, diag_order = 0.0;
    for (const auto& c : rr.report["checks"]) {
        if (c["name"] == "block-identity-order") block_order = c["value"].get<double>();
        if (c["name"] == "diagonal-identity-order") diag_order = c["value"].get<double>();
    }
    CHECK(block_order >= 1.8);
    CHECK(diag_order >= 1.8);
}

TEST_CASE("carleman subcommand on the diagonal family instance") {
    json j = family_2011_config();
    j["grid"]["n"] = 65;
    j["carleman"] = {{"tau", {20.0, 40.0}}, {"nu", 1.0}, {"r_min", 0.1}};
    const RunResult rr = run("carleman", parse_config_json(j));
    INFO(rr.report.dump(2));
    CHECK(rr.exit_code == 0);
    const auto& rows = rr.report["results"]["carleman"]["rows"];
    REQUIRE(rows.size() == 2);
    CHECK(rows[0]["defined"].get<bool>());
}

TEST_CASE("vanish subcommand reads a field file") {
    // |x|^2 profile: slope 6
    const Grid2 g({}, 0.5, 129);
    json field;
    field["grid"] = {{"center", {0.0, 0.0}}, {"half_width", 0.5}, {"n", 129}};
    json re = json::array();
    for (int i2 = 0; i2 < g.n; ++i2)
        for (int i1 = 0; i1 < g.n; ++i1) {
            const Vec2 x = g.node(i1, i2);
            re.push_back(x.x1 * x.x1 + x.x2 * x.x2);
        }
    field["components"] = json::array({{{"re", re}}});
    const std::string path = "/tmp/anisored_test_field.json";
    std::ofstream(path) << field.dump();

    CliOverrides ov;
    ov.field_path = path;
    const RunResult rr = run("vanish", parse_config_json(json::object()), ov);
    CHECK(rr.exit_code == 0);
    CHECK(std::abs(rr.report["results"]["vanish"]["slope"].get<double>() - 6.0) <= 0.1);
    std::remove(path.c_str());
}

TEST_CASE("reports are deterministic modulo the timestamp") {
    const json cfg_json = family_2011_config();
    const RunResult a = run("factorize", parse_config_json(cfg_json));
    const RunResult b = run("factorize", parse_config_json(cfg_json));
    CHECK(strip_timestamp(a.report).dump() == strip_timestamp(b.report).dump());

    CliOverrides ov;
    ov.ex5_a = 2.0;
    ov.ex5_b = 1.0;
    ov.ex5_c = 1.0;
    ov.ex5_f = 2.0;
    const RunResult c = run("example5", parse_config_json(json::object()), ov);
    const RunResult d = run("example5", parse_config_json(json::object()), ov);
    CHECK(strip_timestamp(c.report).dump() == strip_timestamp(d.report).dump());
}

TEST_CASE("exit statuses: exit 0 iff no failed checks; errors map to 3..9") {
    // missing coefficients -> validation error -> exit 4
    const RunResult rr = run("check", parse_config_json(json::object()));
    CHECK(rr.exit_code == 4);
    CHECK(rr.report["results"].contains("error"));

    // vanish without a field file
    const RunResult rv = run("vanish", parse_config_json(json::object()));
    CHECK(rv.exit_code == 4);

    CHECK_THROWS_WITH_AS(parse_config("/nonexistent/path.json"), doctest::Contains("IoError"),
                         Error);
}

TEST_CASE("tau and nu overrides take precedence over the config") {
    json j = family_2011_config();
    j["grid"]["n"] = 65;
    j["carleman"] = {{"tau", {20.0, 40.0, 80.0}}, {"nu", 1.0}, {"r_min", 0.1}};
    CliOverrides ov;
    ov.tau = std::vector<double>{30.0, 60.0};
    const RunResult rr = run("carleman", parse_config_json(j), ov);
    const auto& rows = rr.report["results"]["carleman"]["rows"];
    REQUIRE(rows.size() == 2);
    CHECK(rows[0]["tau"].get<double>() == 30.0);
    CHECK(rr.report["config"]["carleman"]["tau"][0].get<double>() == 30.0);
}
