#include "satmix/scenario.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"

#include "satmix/errors.hpp"

namespace satmix {

namespace {

using ojson = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& msg) { throw ConfigError(msg); }

void check_keys(const ojson& j, const char* ctx, std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok) bad("unknown key \"" + it.key() + "\" in " + ctx);
    }
}

const ojson& req(const ojson& j, const char* key, const char* ctx) {
    auto it = j.find(key);
    if (it == j.end()) bad(std::string(ctx) + " is missing required key \"" + key + "\"");
    return *it;
}

double num_field(const ojson& j, const char* key, const char* ctx) {
    const ojson& v = req(j, key, ctx);
    if (!v.is_number()) bad("\"" + std::string(key) + "\" in " + ctx + " must be a number");
    return v.get<double>();
}

double num_or(const ojson& j, const char* key, const char* ctx, double dflt) {
    if (!j.contains(key)) return dflt;
    return num_field(j, key, ctx);
}

long long int_field(const ojson& j, const char* key, const char* ctx) {
    const ojson& v = req(j, key, ctx);
    if (!v.is_number_integer()) bad("\"" + std::string(key) + "\" in " + ctx + " must be an integer");
    return v.get<long long>();
}

std::string str_field(const ojson& j, const char* key, const char* ctx) {
    const ojson& v = req(j, key, ctx);
    if (!v.is_string()) bad("\"" + std::string(key) + "\" in " + ctx + " must be a string");
    return v.get<std::string>();
}

MaskRect rect_from(const ojson& v, const char* ctx) {
    if (!v.is_array() || v.size() != 4) bad(std::string("rect in ") + ctx + " must be [x0, x1, y0, y1]");
    for (const auto& e : v)
        if (!e.is_number()) bad(std::string("rect in ") + ctx + " must hold numbers");
    return MaskRect{v[0].get<double>(), v[1].get<double>(), v[2].get<double>(), v[3].get<double>()};
}

AxisBc axis_bc_from(const std::string& s, const char* key) {
    if (s == "wall") return AxisBc::wall;
    if (s == "periodic") return AxisBc::periodic;
    bad("\"" + std::string(key) + "\" must be \"wall\" or \"periodic\", got \"" + s + "\"");
}

VelocityConfig velocity_from(const ojson& j, const char* ctx) {
    if (!j.is_object()) bad(std::string(ctx) + " must be an object");
    check_keys(j, ctx, {"kind", "vector", "values", "target"});
    VelocityConfig vc;
    std::string kind = str_field(j, "kind", ctx);
    if (kind == "constant") {
        vc.kind = VelocityKind::constant_vector;
        const ojson& v = req(j, "vector", ctx);
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
            bad("\"vector\" in " + std::string(ctx) + " must be [ux, uy]");
        vc.ux = v[0].get<double>();
        vc.uy = v[1].get<double>();
        check_keys(j, ctx, {"kind", "vector"});
    } else if (kind == "potential") {
        vc.kind = VelocityKind::explicit_potential;
        const ojson& v = req(j, "values", ctx);
        if (!v.is_array()) bad("\"values\" in " + std::string(ctx) + " must be an array");
        for (const auto& e : v) {
            if (!e.is_number()) bad("\"values\" in " + std::string(ctx) + " must hold numbers");
            vc.potential.push_back(e.get<double>());
        }
        check_keys(j, ctx, {"kind", "values"});
    } else if (kind == "geodesic") {
        vc.kind = VelocityKind::geodesic_to_target;
        const ojson& v = req(j, "target", ctx);
        if (v.is_string() && v.get<std::string>() == "right_wall") {
            vc.target_right_wall = true;
        } else if (v.is_array()) {
            for (const auto& e : v) vc.target_rects.push_back(rect_from(e, ctx));
            if (vc.target_rects.empty()) bad("\"target\" in " + std::string(ctx) + " lists no rects");
        } else {
            bad("\"target\" in " + std::string(ctx) + " must be \"right_wall\" or a rect list");
        }
        check_keys(j, ctx, {"kind", "target"});
    } else if (kind == "chemotaxis") {
        vc.kind = VelocityKind::chemotaxis;
        check_keys(j, ctx, {"kind"});
    } else {
        bad("\"kind\" in " + std::string(ctx) + " must be constant|potential|geodesic|chemotaxis");
    }
    return vc;
}

InitSpec init_from(const ojson& j) {
    if (!j.is_object()) bad("\"init\" must be an object");
    InitSpec init;
    std::string kind = str_field(j, "kind", "init");
    if (kind == "indicators") {
        init.kind = InitKind::indicators;
        check_keys(j, "init", {"kind", "terms"});
        const ojson& terms = req(j, "terms", "init");
        if (!terms.is_array()) bad("\"terms\" in init must be an array");
        for (const auto& t : terms) {
            if (!t.is_object()) bad("init term must be an object");
            check_keys(t, "init term", {"rect", "value"});
            IndicatorTerm term;
            term.rect = rect_from(req(t, "rect", "init term"), "init term");
            term.value = num_field(t, "value", "init term");
            init.terms.push_back(term);
        }
    } else if (kind == "bernoulli") {
        init.kind = InitKind::bernoulli;
        check_keys(j, "init", {"kind", "q", "seed"});
        init.q = num_field(j, "q", "init");
        if (!(init.q > 0.0 && init.q < 1.0)) bad("\"q\" in init must lie in (0, 1)");
        init.seed = (unsigned long long)int_field(j, "seed", "init");
    } else if (kind == "array") {
        init.kind = InitKind::array;
        check_keys(j, "init", {"kind", "values"});
        const ojson& v = req(j, "values", "init");
        if (!v.is_array()) bad("\"values\" in init must be an array");
        for (const auto& e : v) {
            if (!e.is_number()) bad("\"values\" in init must hold numbers");
            init.values.push_back(e.get<double>());
        }
    } else {
        bad("\"kind\" in init must be indicators|bernoulli|array");
    }
    return init;
}

ScenarioConfig config_from(const ojson& j) {
    if (!j.is_object()) bad("scenario config must be a JSON object");
    check_keys(j, "config", {"name", "grid", "pressure_bc", "velocity", "velocity2", "init",
                             "mode", "stepping", "solver_tol", "output"});
    ScenarioConfig cfg;
    if (j.contains("name")) cfg.name = str_field(j, "name", "config");

    const ojson& g = req(j, "grid", "config");
    if (!g.is_object()) bad("\"grid\" must be an object");
    check_keys(g, "grid", {"nx", "ny", "bc_x", "bc_y", "mask_rects"});
    cfg.nx = (int)int_field(g, "nx", "grid");
    cfg.ny = g.contains("ny") ? (int)int_field(g, "ny", "grid") : 1;
    cfg.bc_x = axis_bc_from(g.contains("bc_x") ? str_field(g, "bc_x", "grid") : "wall", "bc_x");
    cfg.bc_y = axis_bc_from(g.contains("bc_y") ? str_field(g, "bc_y", "grid") : "wall", "bc_y");
    if (g.contains("mask_rects")) {
        const ojson& m = g.at("mask_rects");
        if (!m.is_array()) bad("\"mask_rects\" in grid must be an array");
        for (const auto& r : m) cfg.mask.push_back(rect_from(r, "mask_rects"));
    }

    if (j.contains("pressure_bc")) {
        std::string s = str_field(j, "pressure_bc", "config");
        if (s == "auto")
            cfg.pressure_bc = PressureBcChoice::automatic;
        else if (s == "dirichlet_left_1d")
            cfg.pressure_bc = PressureBcChoice::dirichlet_left_1d;
        else if (s == "neumann_walls")
            cfg.pressure_bc = PressureBcChoice::neumann_walls;
        else if (s == "periodic")
            cfg.pressure_bc = PressureBcChoice::periodic;
        else
            bad("\"pressure_bc\" must be auto|dirichlet_left_1d|neumann_walls|periodic");
    }

    cfg.velocity = velocity_from(req(j, "velocity", "config"), "velocity");
    cfg.init = init_from(req(j, "init", "config"));

    if (j.contains("mode")) {
        std::string s = str_field(j, "mode", "config");
        if (s == "single_active")
            cfg.mode = SimMode::single_active;
        else if (s == "two_species_experimental")
            cfg.mode = SimMode::two_species_experimental;
        else
            bad("\"mode\" must be single_active|two_species_experimental");
    }
    if (cfg.mode == SimMode::two_species_experimental) {
        cfg.velocity2 = velocity_from(req(j, "velocity2", "config"), "velocity2");
    } else if (j.contains("velocity2")) {
        bad("\"velocity2\" is only valid in two_species_experimental mode");
    }

    const ojson& st = req(j, "stepping", "config");
    if (!st.is_object()) bad("\"stepping\" must be an object");
    check_keys(st, "stepping", {"cfl_safety", "t_end", "snapshot_dt", "dt_cap"});
    cfg.cfl_safety = num_or(st, "cfl_safety", "stepping", 0.45);
    if (!(cfg.cfl_safety > 0.0 && cfg.cfl_safety < 0.5))
        bad("\"cfl_safety\" in stepping must lie in (0, 0.5)");
    cfg.t_end = num_field(st, "t_end", "stepping");
    if (!(cfg.t_end > 0.0)) bad("\"t_end\" in stepping must be positive");
    cfg.snapshot_dt = num_field(st, "snapshot_dt", "stepping");
    if (!(cfg.snapshot_dt > 0.0)) bad("\"snapshot_dt\" in stepping must be positive");
    if (st.contains("dt_cap")) {
        double cap = num_field(st, "dt_cap", "stepping");
        if (!(cap > 0.0)) bad("\"dt_cap\" in stepping must be positive");
        cfg.dt_cap = cap;
    }

    cfg.solver_tol = num_or(j, "solver_tol", "config", 1e-10);
    if (!(cfg.solver_tol > 0.0)) bad("\"solver_tol\" must be positive");

    if (j.contains("output")) {
        const ojson& o = j.at("output");
        if (!o.is_object()) bad("\"output\" must be an object");
        check_keys(o, "output", {"dir", "formats"});
        if (o.contains("dir")) cfg.output.dir = str_field(o, "dir", "output");
        if (o.contains("formats")) {
            const ojson& f = o.at("formats");
            if (!f.is_array()) bad("\"formats\" in output must be an array");
            cfg.output.csv = false;
            cfg.output.pgm = false;
            for (const auto& e : f) {
                if (!e.is_string()) bad("\"formats\" in output must hold strings");
                std::string s = e.get<std::string>();
                if (s == "csv")
                    cfg.output.csv = true;
                else if (s == "pgm")
                    cfg.output.pgm = true;
                else
                    bad("output format must be \"csv\" or \"pgm\", got \"" + s + "\"");
            }
        }
    }
    return cfg;
}

ojson rect_json(const MaskRect& r) { return ojson::array({r.x0, r.x1, r.y0, r.y1}); }

ojson velocity_json(const VelocityConfig& vc) {
    ojson j;
    switch (vc.kind) {
        case VelocityKind::constant_vector:
            j["kind"] = "constant";
            j["vector"] = ojson::array({vc.ux, vc.uy});
            break;
        case VelocityKind::explicit_potential:
            j["kind"] = "potential";
            j["values"] = vc.potential;
            break;
        case VelocityKind::geodesic_to_target:
            j["kind"] = "geodesic";
            if (vc.target_right_wall) {
                j["target"] = "right_wall";
            } else {
                ojson rects = ojson::array();
                for (const auto& r : vc.target_rects) rects.push_back(rect_json(r));
                j["target"] = rects;
            }
            break;
        case VelocityKind::chemotaxis:
            j["kind"] = "chemotaxis";
            break;
    }
    return j;
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& json_text) {
    ojson j;
    try {
        j = ojson::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return config_from(j);
}

ScenarioConfig load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

std::string emit_scenario(const ScenarioConfig& cfg) {
    ojson j;
    j["name"] = cfg.name;
    ojson g;
    g["nx"] = cfg.nx;
    g["ny"] = cfg.ny;
    g["bc_x"] = cfg.bc_x == AxisBc::periodic ? "periodic" : "wall";
    g["bc_y"] = cfg.bc_y == AxisBc::periodic ? "periodic" : "wall";
    ojson rects = ojson::array();
    for (const auto& r : cfg.mask) rects.push_back(rect_json(r));
    g["mask_rects"] = rects;
    j["grid"] = g;

    switch (cfg.pressure_bc) {
        case PressureBcChoice::automatic:
            j["pressure_bc"] = "auto";
            break;
        case PressureBcChoice::dirichlet_left_1d:
            j["pressure_bc"] = "dirichlet_left_1d";
            break;
        case PressureBcChoice::neumann_walls:
            j["pressure_bc"] = "neumann_walls";
            break;
        case PressureBcChoice::periodic:
            j["pressure_bc"] = "periodic";
            break;
    }

    j["velocity"] = velocity_json(cfg.velocity);

    ojson init;
    switch (cfg.init.kind) {
        case InitKind::indicators: {
            init["kind"] = "indicators";
            ojson terms = ojson::array();
            for (const auto& t : cfg.init.terms) {
                ojson term;
                term["rect"] = rect_json(t.rect);
                term["value"] = t.value;
                terms.push_back(term);
            }
            init["terms"] = terms;
            break;
        }
        case InitKind::bernoulli:
            init["kind"] = "bernoulli";
            init["q"] = cfg.init.q;
            init["seed"] = cfg.init.seed;
            break;
        case InitKind::array:
            init["kind"] = "array";
            init["values"] = cfg.init.values;
            break;
    }
    j["init"] = init;

    j["mode"] = cfg.mode == SimMode::two_species_experimental ? "two_species_experimental"
                                                              : "single_active";
    if (cfg.mode == SimMode::two_species_experimental) j["velocity2"] = velocity_json(cfg.velocity2);

    ojson st;
    st["cfl_safety"] = cfg.cfl_safety;
    st["t_end"] = cfg.t_end;
    st["snapshot_dt"] = cfg.snapshot_dt;
    if (cfg.dt_cap) st["dt_cap"] = *cfg.dt_cap;
    j["stepping"] = st;

    j["solver_tol"] = cfg.solver_tol;

    ojson out;
    out["dir"] = cfg.output.dir;
    ojson formats = ojson::array();
    if (cfg.output.csv) formats.push_back("csv");
    if (cfg.output.pgm) formats.push_back("pgm");
    out["formats"] = formats;
    j["output"] = out;

    return j.dump(2) + "\n";
}

namespace {

ScenarioConfig wall_1d(const std::string& name, int nx,
                       std::vector<IndicatorTerm> terms, double t_end) {
    ScenarioConfig cfg;
    cfg.name = name;
    cfg.nx = nx;
    cfg.ny = 1;
    cfg.velocity.kind = VelocityKind::constant_vector;
    cfg.velocity.ux = 1.0;
    cfg.init.kind = InitKind::indicators;
    cfg.init.terms = std::move(terms);
    cfg.t_end = t_end;
    cfg.snapshot_dt = 0.25;
    return cfg;
}

ScenarioConfig square_u1(const std::string& name, int n) {
    ScenarioConfig cfg;
    cfg.name = name;
    cfg.nx = n;
    cfg.ny = n;
    cfg.velocity.kind = VelocityKind::constant_vector;
    cfg.velocity.ux = 1.0;
    cfg.init.kind = InitKind::indicators;
    cfg.init.terms = {{MaskRect{0.3, 0.5, 0.3, 0.7}, 1.0}};
    cfg.t_end = 3.0;
    cfg.snapshot_dt = 0.25;
    cfg.output.pgm = true;
    return cfg;
}

ScenarioConfig corridor(const std::string& name, int n) {
    ScenarioConfig cfg;
    cfg.name = name;
    cfg.nx = n;
    cfg.ny = n;
    cfg.mask = {MaskRect{0.3, 0.7, 0.0, 0.45}, MaskRect{0.3, 0.7, 0.55, 1.0}};
    cfg.velocity.kind = VelocityKind::geodesic_to_target;
    cfg.velocity.target_right_wall = true;
    cfg.init.kind = InitKind::indicators;
    cfg.init.terms = {{MaskRect{0.02, 0.26, 0.0, 1.0}, 1.0}};
    cfg.t_end = 16.0;
    cfg.snapshot_dt = 0.5;
    cfg.output.pgm = true;
    return cfg;
}

ScenarioConfig keller_segel(const std::string& name, int n, double q,
                            unsigned long long seed, double t_end) {
    ScenarioConfig cfg;
    cfg.name = name;
    cfg.nx = n;
    cfg.ny = n;
    cfg.bc_x = AxisBc::periodic;
    cfg.bc_y = AxisBc::periodic;
    cfg.velocity.kind = VelocityKind::chemotaxis;
    cfg.init.kind = InitKind::bernoulli;
    cfg.init.q = q;
    cfg.init.seed = seed;
    cfg.t_end = t_end;
    cfg.snapshot_dt = t_end / 16.0;
    cfg.output.pgm = true;
    return cfg;
}

}  // namespace

std::vector<std::string> builtin_scenario_names() {
    return {"wall-1d-a", "wall-1d-a-desk", "wall-1d-b", "wall-1d-b-desk",
            "square-u1", "square-u1-desk", "corridor",  "corridor-desk",
            "ks-q10",    "ks-q10-desk",    "ks-q50",    "ks-q50-desk"};
}

bool is_builtin_scenario(const std::string& name) {
    for (const auto& n : builtin_scenario_names())
        if (n == name) return true;
    return false;
}

ScenarioConfig builtin_scenario(const std::string& name) {
    std::vector<IndicatorTerm> merge_terms = {{MaskRect{0.1, 0.9, 0.0, 1.0}, 0.5},
                                              {MaskRect{0.9, 1.0, 0.0, 1.0}, 1.0}};
    std::vector<IndicatorTerm> block_terms = {{MaskRect{0.3, 0.5, 0.0, 1.0}, 1.0}};
    if (name == "wall-1d-a") return wall_1d(name, 200, merge_terms, 2.5);
    if (name == "wall-1d-a-desk") return wall_1d(name, 100, merge_terms, 2.5);
    if (name == "wall-1d-b") return wall_1d(name, 200, block_terms, 2.5);
    if (name == "wall-1d-b-desk") return wall_1d(name, 100, block_terms, 2.5);
    if (name == "square-u1") return square_u1(name, 300);
    if (name == "square-u1-desk") return square_u1(name, 64);
    if (name == "corridor") return corridor(name, 300);
    if (name == "corridor-desk") return corridor(name, 150);
    if (name == "ks-q10") return keller_segel(name, 300, 0.1, 12061, 48.0);
    if (name == "ks-q10-desk") return keller_segel(name, 64, 0.1, 12061, 48.0);
    if (name == "ks-q50") return keller_segel(name, 300, 0.5, 24122, 48.0);
    if (name == "ks-q50-desk") return keller_segel(name, 64, 0.5, 24122, 48.0);
    throw ConfigError("unknown built-in scenario \"" + name + "\"");
}

ScenarioConfig resolve_scenario(const std::string& name_or_path) {
    if (is_builtin_scenario(name_or_path)) return builtin_scenario(name_or_path);
    return load_scenario_file(name_or_path);
}

}  // namespace satmix
