#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <string>
#include <vector>

#include "satmix/scenario.hpp"

using namespace satmix;

TEST_CASE("builtin catalog") {
    std::vector<std::string> names = builtin_scenario_names();
    CHECK(names.size() == 12);
    for (const char* expect :
         {"wall-1d-a", "wall-1d-b", "square-u1", "corridor", "ks-q10", "ks-q50"}) {
        CHECK(std::count(names.begin(), names.end(), std::string(expect)) == 1);
        CHECK(std::count(names.begin(), names.end(), std::string(expect) + "-desk") == 1);
    }
    for (const std::string& n : names) {
        CHECK(is_builtin_scenario(n));
        ScenarioConfig cfg = builtin_scenario(n);
        CHECK(cfg.name == n);
        CHECK(cfg.nx >= 3);
    }
    CHECK(!is_builtin_scenario("no-such"));
    CHECK_THROWS_AS(builtin_scenario("no-such"), ConfigError);
}

TEST_CASE("emit and parse round-trip every builtin") {
    for (const std::string& n : builtin_scenario_names()) {
        std::string text = emit_scenario(builtin_scenario(n));
        ScenarioConfig back = parse_scenario(text);
        CHECK(emit_scenario(back) == text);
        CHECK(back.name == n);
    }
}

TEST_CASE("desk variants shrink the grid, not the physics") {
    ScenarioConfig full = builtin_scenario("corridor");
    ScenarioConfig desk = builtin_scenario("corridor-desk");
    CHECK(desk.nx < full.nx);
    CHECK(desk.mask.size() == full.mask.size());
    CHECK(desk.velocity.kind == full.velocity.kind);
    CHECK(desk.t_end == full.t_end);
}

TEST_CASE("unknown keys are named in the error") {
    std::string text = emit_scenario(builtin_scenario("wall-1d-b-desk"));
    std::string broken = text;
    broken.replace(broken.find("\"t_end\""), 7, "\"dt_max\"");
    try {
        parse_scenario(broken);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("dt_max") != std::string::npos);
    }
}

TEST_CASE("field validation names the offender") {
    auto expect_error = [](const std::string& text, const std::string& needle) {
        try {
            parse_scenario(text);
            FAIL("expected ConfigError for " << needle);
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };

    expect_error(R"({"name":"x","grid":{"nx":64},"velocity":{"kind":"constant","vector":[1,0]},
                    "init":{"kind":"bernoulli","q":1.5,"seed":1},
                    "stepping":{"t_end":1,"snapshot_dt":0.5}})",
                 "q");
    expect_error(R"({"name":"x","grid":{"nx":64},"velocity":{"kind":"warp"},
                    "init":{"kind":"bernoulli","q":0.5,"seed":1},
                    "stepping":{"t_end":1,"snapshot_dt":0.5}})",
                 "kind");
    expect_error(R"({"name":"x","grid":{"nx":64},"velocity":{"kind":"constant","vector":[1,0]},
                    "init":{"kind":"bernoulli","q":0.5,"seed":1},
                    "stepping":{"t_end":-2,"snapshot_dt":0.5}})",
                 "t_end");
    expect_error(R"({"name":"x","grid":{"nx":64},"velocity":{"kind":"constant","vector":[1,0]},
                    "init":{"kind":"bernoulli","q":0.5,"seed":1},
                    "velocity2":{"kind":"constant","vector":[1,0]},
                    "stepping":{"t_end":1,"snapshot_dt":0.5}})",
                 "velocity2");
    expect_error("{ not json", "JSON");
}

TEST_CASE("parsing a minimal handwritten scenario") {
    std::string text = R"({
        "name": "mini",
        "grid": {"nx": 48, "ny": 48, "bc_x": "periodic", "bc_y": "periodic"},
        "velocity": {"kind": "chemotaxis"},
        "init": {"kind": "bernoulli", "q": 0.25, "seed": 9},
        "stepping": {"cfl_safety": 0.4, "t_end": 2.0, "snapshot_dt": 1.0},
        "solver_tol": 1e-9,
        "output": {"dir": "", "formats": ["pgm"]}
    })";
    ScenarioConfig cfg = parse_scenario(text);
    CHECK(cfg.nx == 48);
    CHECK(cfg.ny == 48);
    CHECK(cfg.bc_x == AxisBc::periodic);
    CHECK(cfg.velocity.kind == VelocityKind::chemotaxis);
    CHECK(cfg.init.q == 0.25);
    CHECK(cfg.cfl_safety == 0.4);
    CHECK(cfg.solver_tol == 1e-9);
    CHECK(cfg.output.pgm);
    CHECK(!cfg.output.csv);

    // defaults fill in what the text omits
    CHECK(cfg.pressure_bc == PressureBcChoice::automatic);
    CHECK(cfg.mode == SimMode::single_active);
    CHECK(!cfg.dt_cap.has_value());
}

TEST_CASE("mask rectangles round-trip") {
    ScenarioConfig cfg = builtin_scenario("corridor-desk");
    REQUIRE(cfg.mask.size() == 2);
    ScenarioConfig back = parse_scenario(emit_scenario(cfg));
    REQUIRE(back.mask.size() == 2);
    CHECK(back.mask[0].x0 == cfg.mask[0].x0);
    CHECK(back.mask[0].y1 == cfg.mask[0].y1);
    CHECK(back.mask[1].y0 == cfg.mask[1].y0);
}

TEST_CASE("two-species config round-trips the second drive") {
    ScenarioConfig cfg;
    cfg.name = "pair";
    cfg.nx = 32;
    cfg.mode = SimMode::two_species_experimental;
    cfg.velocity.kind = VelocityKind::constant_vector;
    cfg.velocity.ux = 1.0;
    cfg.velocity2.kind = VelocityKind::constant_vector;
    cfg.velocity2.ux = -0.5;
    cfg.init.kind = InitKind::indicators;
    cfg.init.terms = {{MaskRect{0.0, 0.5, 0.0, 1.0}, 1.0}};
    ScenarioConfig back = parse_scenario(emit_scenario(cfg));
    CHECK(back.mode == SimMode::two_species_experimental);
    CHECK(back.velocity2.ux == -0.5);
    CHECK(emit_scenario(back) == emit_scenario(cfg));
}
