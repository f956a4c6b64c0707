#include "anisored/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace anisored {

using nlohmann::json;

namespace {

void require_object(const json& j, const std::string& where) {
    if (!j.is_object()) fail(Err::parse_error, where + " must be an object");
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& item : j.items())
        if (!allowed.count(item.key()))
            fail(Err::parse_error, "unknown key '" + item.key() + "' in " + where);
}

double as_number(const json& j, const std::string& where) {
    if (!j.is_number()) fail(Err::parse_error, where + " must be a number");
    return j.get<double>();
}

int as_int(const json& j, const std::string& where) {
    if (!j.is_number_integer()) fail(Err::parse_error, where + " must be an integer");
    return j.get<int>();
}

Scalar2Field parse_entry(const json& j, const std::string& mode, const std::string& where,
                         const Grid2& grid) {
    if (mode == "constant") return Scalar2Field::constant(Cx(as_number(j, where)));
    if (mode == "poly") {
        if (!j.is_array()) fail(Err::parse_error, where + " must be a monomial list");
        Poly2c p;
        for (size_t k = 0; k < j.size(); ++k) {
            const json& term = j[k];
            const std::string twhere = where + "[" + std::to_string(k) + "]";
            require_object(term, twhere);
            reject_unknown_keys(term, {"i", "j", "c"}, twhere);
            if (!term.contains("i") || !term.contains("j") || !term.contains("c"))
                fail(Err::parse_error, twhere + " needs keys i, j, c");
            const int pi = as_int(term["i"], twhere + ".i");
            const int pj = as_int(term["j"], twhere + ".j");
            if (pi < 0 || pj < 0)
                fail(Err::validation_error, twhere + ": exponents must be nonnegative");
            p = p + Poly2c::monomial(pi, pj, Cx(as_number(term["c"], twhere + ".c")));
        }
        return Scalar2Field::poly(p);
    }
    if (mode == "grid") {
        if (!j.is_array() || static_cast<int>(j.size()) != grid.size())
            fail(Err::parse_error,
                 where + " must be a row-major array of " + std::to_string(grid.size()) +
                     " samples");
        std::vector<Cx> vals(j.size());
        for (size_t k = 0; k < j.size(); ++k)
            vals[k] = Cx(as_number(j[k], where + "[" + std::to_string(k) + "]"));
        return Scalar2Field::on_grid(grid, std::move(vals));
    }
    fail(Err::parse_error, "coefficients.mode must be constant, poly or grid");
}

json default_entry(const std::string& mode) {
    if (mode == "poly") return json::array();
    return 0.0; // a constant zero also stands in for an absent grid entry
}

} // namespace

Grid2 RunConfig::make_grid() const { return Grid2(domain_center, domain_half_width, grid_n); }

double RunConfig::effective_r_min() const {
    if (carleman_r_min > 0.0) return carleman_r_min;
    return std::max(2.0 * make_grid().h(), 0.05 * domain_half_width);
}

std::vector<Vec2> RunConfig::sample_points() const {
    if (tensor && tensor->mode() == FieldMode::grid) return grid_points(make_grid());
    return lattice_points(domain_center, domain_half_width, checks_sample_n);
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Err::io_error, "cannot open config file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        fail(Err::parse_error, std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config_json(j);
}

RunConfig parse_config_json(const json& j) {
    require_object(j, "config");
    reject_unknown_keys(j,
                        {"coefficients", "domain", "grid", "tolerances", "carleman", "checks",
                         "vanish", "sigma", "nu", "nu0"},
                        "config");

    RunConfig cfg;

    if (j.contains("domain")) {
        const json& d = j["domain"];
        require_object(d, "domain");
        reject_unknown_keys(d, {"center", "half_width"}, "domain");
        if (d.contains("center")) {
            const json& c = d["center"];
            if (!c.is_array() || c.size() != 2)
                fail(Err::parse_error, "domain.center must be a pair");
            cfg.domain_center = {as_number(c[0], "domain.center[0]"),
                                 as_number(c[1], "domain.center[1]")};
        }
        if (d.contains("half_width"))
            cfg.domain_half_width = as_number(d["half_width"], "domain.half_width");
    }
    if (!(cfg.domain_half_width > 0.0))
        fail(Err::validation_error, "domain.half_width must be positive");

    if (j.contains("grid")) {
        const json& g = j["grid"];
        require_object(g, "grid");
        reject_unknown_keys(g, {"n"}, "grid");
        if (g.contains("n")) cfg.grid_n = as_int(g["n"], "grid.n");
    }
    if (cfg.grid_n < 9 || cfg.grid_n % 2 == 0)
        fail(Err::validation_error, "grid.n must be odd >= 9");

    if (j.contains("tolerances")) {
        const json& t = j["tolerances"];
        require_object(t, "tolerances");
        reject_unknown_keys(t, {"factor_res", "sylvester_res", "sep_tol"}, "tolerances");
        if (t.contains("factor_res"))
            cfg.tol_factor_res = as_number(t["factor_res"], "tolerances.factor_res");
        if (t.contains("sylvester_res"))
            cfg.tol_sylvester_res = as_number(t["sylvester_res"], "tolerances.sylvester_res");
        if (t.contains("sep_tol")) cfg.sep_tol = as_number(t["sep_tol"], "tolerances.sep_tol");
    }
    for (double tol : {cfg.tol_factor_res, cfg.tol_sylvester_res, cfg.sep_tol})
        if (!(tol > 0.0)) fail(Err::validation_error, "tolerances must be positive");

    if (j.contains("carleman")) {
        const json& c = j["carleman"];
        require_object(c, "carleman");
        reject_unknown_keys(c, {"tau", "nu", "r_min", "log_domain"}, "carleman");
        if (c.contains("tau")) {
            if (!c["tau"].is_array() || c["tau"].empty())
                fail(Err::parse_error, "carleman.tau must be a nonempty array");
            cfg.carleman_tau.clear();
            for (size_t k = 0; k < c["tau"].size(); ++k)
                cfg.carleman_tau.push_back(as_number(c["tau"][k], "carleman.tau"));
            for (size_t k = 1; k < cfg.carleman_tau.size(); ++k)
                if (!(cfg.carleman_tau[k] > cfg.carleman_tau[k - 1]))
                    fail(Err::validation_error, "carleman.tau must be strictly increasing");
        }
        if (c.contains("nu")) cfg.carleman_nu = as_number(c["nu"], "carleman.nu");
        if (c.contains("r_min")) cfg.carleman_r_min = as_number(c["r_min"], "carleman.r_min");
        if (c.contains("log_domain")) {
            if (!c["log_domain"].is_boolean())
                fail(Err::parse_error, "carleman.log_domain must be a boolean");
            cfg.carleman_log = c["log_domain"].get<bool>();
        }
    }
    if (!(cfg.carleman_nu > 0.0)) fail(Err::validation_error, "carleman.nu must be positive");
    if (cfg.carleman_r_min < 0.0)
        fail(Err::validation_error, "carleman.r_min must be nonnegative");

    if (j.contains("checks")) {
        const json& c = j["checks"];
        require_object(c, "checks");
        reject_unknown_keys(c, {"sample_n", "n_dirs"}, "checks");
        if (c.contains("sample_n")) cfg.checks_sample_n = as_int(c["sample_n"], "checks.sample_n");
        if (c.contains("n_dirs")) cfg.checks_n_dirs = as_int(c["n_dirs"], "checks.n_dirs");
    }
    if (cfg.checks_sample_n < 1 || cfg.checks_n_dirs < 8)
        fail(Err::validation_error, "checks.sample_n must be >= 1 and checks.n_dirs >= 8");

    if (j.contains("vanish")) {
        const json& v = j["vanish"];
        require_object(v, "vanish");
        reject_unknown_keys(v, {"radii"}, "vanish");
        if (v.contains("radii")) {
            if (!v["radii"].is_array() || v["radii"].size() < 4)
                fail(Err::validation_error, "vanish.radii needs at least 4 radii");
            cfg.vanish_radii.clear();
            for (size_t k = 0; k < v["radii"].size(); ++k)
                cfg.vanish_radii.push_back(as_number(v["radii"][k], "vanish.radii"));
        }
    }

    if (j.contains("sigma")) cfg.sigma = as_number(j["sigma"], "sigma");
    if (j.contains("nu")) cfg.nu = as_number(j["nu"], "nu");
    if (j.contains("nu0")) cfg.nu0 = as_number(j["nu0"], "nu0");
    if (cfg.sigma && !(*cfg.sigma > 1.0)) fail(Err::validation_error, "sigma must exceed 1");

    if (j.contains("coefficients")) {
        const json& c = j["coefficients"];
        require_object(c, "coefficients");
        reject_unknown_keys(c, {"mode", "a", "b", "c"}, "coefficients");
        if (!c.contains("mode") || !c["mode"].is_string())
            fail(Err::parse_error, "coefficients.mode is required");
        const std::string mode = c["mode"].get<std::string>();
        if (mode != "constant" && mode != "poly" && mode != "grid")
            fail(Err::parse_error, "coefficients.mode must be constant, poly or grid");
        if (!c.contains("a")) fail(Err::parse_error, "coefficients.a is required");

        const Grid2 grid = cfg.make_grid();
        CoefficientTensor t;

        const json& a = c["a"];
        if (!a.is_array() || a.size() != 2) fail(Err::parse_error, "coefficients.a must be 2x2x2x2");
        for (int alpha = 1; alpha <= 2; ++alpha) {
            const json& lvl1 = a[static_cast<size_t>(alpha - 1)];
            if (!lvl1.is_array() || lvl1.size() != 2)
                fail(Err::parse_error, "coefficients.a must be 2x2x2x2");
            for (int beta = 1; beta <= 2; ++beta) {
                const json& lvl2 = lvl1[static_cast<size_t>(beta - 1)];
                if (!lvl2.is_array() || lvl2.size() != 2)
                    fail(Err::parse_error, "coefficients.a must be 2x2x2x2");
                for (int jj = 1; jj <= 2; ++jj) {
                    const json& lvl3 = lvl2[static_cast<size_t>(jj - 1)];
                    if (!lvl3.is_array() || lvl3.size() != 2)
                        fail(Err::parse_error, "coefficients.a must be 2x2x2x2");
                    for (int l = 1; l <= 2; ++l) {
                        const std::string where = "coefficients.a[" + std::to_string(alpha - 1) +
                                                  "][" + std::to_string(beta - 1) + "][" +
                                                  std::to_string(jj - 1) + "][" +
                                                  std::to_string(l - 1) + "]";
                        t.aref(alpha, beta, jj, l) =
                            parse_entry(lvl3[static_cast<size_t>(l - 1)], mode, where, grid);
                    }
                }
            }
        }

        const Scalar2Field zero = Scalar2Field::constant(Cx(0));
        for (auto& f : t.b) f = zero;
        for (auto& f : t.c) f = zero;
        if (c.contains("b")) {
            const json& b = c["b"];
            if (!b.is_array() || b.size() != 2) fail(Err::parse_error, "coefficients.b must be 2x2x2");
            for (int alpha = 1; alpha <= 2; ++alpha) {
                const json& lvl1 = b[static_cast<size_t>(alpha - 1)];
                if (!lvl1.is_array() || lvl1.size() != 2)
                    fail(Err::parse_error, "coefficients.b must be 2x2x2");
                for (int beta = 1; beta <= 2; ++beta) {
                    const json& lvl2 = lvl1[static_cast<size_t>(beta - 1)];
                    if (!lvl2.is_array() || lvl2.size() != 2)
                        fail(Err::parse_error, "coefficients.b must be 2x2x2");
                    for (int l = 1; l <= 2; ++l)
                        t.bref(alpha, beta, l) = parse_entry(
                            lvl2[static_cast<size_t>(l - 1)], mode,
                            "coefficients.b[" + std::to_string(alpha - 1) + "]", grid);
                }
            }
        }
        if (c.contains("c")) {
            const json& cc = c["c"];
            if (!cc.is_array() || cc.size() != 2) fail(Err::parse_error, "coefficients.c must be 2x2");
            for (int alpha = 1; alpha <= 2; ++alpha) {
                const json& lvl1 = cc[static_cast<size_t>(alpha - 1)];
                if (!lvl1.is_array() || lvl1.size() != 2)
                    fail(Err::parse_error, "coefficients.c must be 2x2");
                for (int beta = 1; beta <= 2; ++beta)
                    t.cref(alpha, beta) = parse_entry(
                        lvl1[static_cast<size_t>(beta - 1)], mode,
                        "coefficients.c[" + std::to_string(alpha - 1) + "]", grid);
            }
        }
        cfg.tensor = std::move(t);

        // defaults echoed back for absent b, c blocks
        json cecho = c;
        if (!cecho.contains("b")) {
            json row = json::array({default_entry(mode), default_entry(mode)});
            json mat = json::array({row, row});
            cecho["b"] = json::array({mat, mat});
        }
        if (!cecho.contains("c")) {
            json row = json::array({default_entry(mode), default_entry(mode)});
            cecho["c"] = json::array({row, row});
        }
        cfg.echo["coefficients"] = cecho;
    }

    cfg.echo["domain"] = {{"center", {cfg.domain_center.x1, cfg.domain_center.x2}},
                          {"half_width", cfg.domain_half_width}};
    cfg.echo["grid"] = {{"n", cfg.grid_n}};
    cfg.echo["tolerances"] = {{"factor_res", cfg.tol_factor_res},
                              {"sylvester_res", cfg.tol_sylvester_res},
                              {"sep_tol", cfg.sep_tol}};
    cfg.echo["carleman"] = {{"tau", cfg.carleman_tau},
                            {"nu", cfg.carleman_nu},
                            {"r_min", cfg.carleman_r_min},
                            {"log_domain", cfg.carleman_log}};
    cfg.echo["checks"] = {{"sample_n", cfg.checks_sample_n}, {"n_dirs", cfg.checks_n_dirs}};
    cfg.echo["vanish"] = {{"radii", cfg.vanish_radii}};
    if (cfg.sigma) cfg.echo["sigma"] = *cfg.sigma;
    if (cfg.nu) cfg.echo["nu"] = *cfg.nu;
    if (cfg.nu0) cfg.echo["nu0"] = *cfg.nu0;
    return cfg;
}

FieldFile load_field_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Err::io_error, "cannot open field file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        fail(Err::parse_error, std::string("field file is not valid JSON: ") + e.what());
    }
    require_object(j, "field file");
    reject_unknown_keys(j, {"grid", "components"}, "field file");
    if (!j.contains("grid") || !j.contains("components"))
        fail(Err::parse_error, "field file needs 'grid' and 'components'");

    const json& g = j["grid"];
    require_object(g, "field grid");
    reject_unknown_keys(g, {"center", "half_width", "n"}, "field grid");
    Vec2 center{};
    if (g.contains("center")) {
        if (!g["center"].is_array() || g["center"].size() != 2)
            fail(Err::parse_error, "field grid.center must be a pair");
        center = {as_number(g["center"][0], "grid.center[0]"),
                  as_number(g["center"][1], "grid.center[1]")};
    }
    const double hw = g.contains("half_width") ? as_number(g["half_width"], "grid.half_width") : 1.0;
    const int n = g.contains("n") ? as_int(g["n"], "grid.n") : 17;

    FieldFile out;
    out.grid = Grid2(center, hw, n);
    const json& comps = j["components"];
    if (!comps.is_array() || comps.empty())
        fail(Err::parse_error, "field file needs a nonempty components array");
    for (const json& comp : comps) {
        require_object(comp, "field component");
        reject_unknown_keys(comp, {"re", "im"}, "field component");
        if (!comp.contains("re") || !comp["re"].is_array() ||
            static_cast<int>(comp["re"].size()) != out.grid.size())
            fail(Err::parse_error, "component.re must hold one value per grid node");
        std::vector<Cx> vals(comp["re"].size());
        for (size_t k = 0; k < vals.size(); ++k)
            vals[k] = Cx(as_number(comp["re"][k], "component.re"));
        if (comp.contains("im")) {
            if (!comp["im"].is_array() || comp["im"].size() != vals.size())
                fail(Err::parse_error, "component.im must match component.re");
            for (size_t k = 0; k < vals.size(); ++k)
                vals[k] += Cx(0.0, as_number(comp["im"][k], "component.im"));
        }
        out.components.push_back(Scalar2Field::on_grid(out.grid, std::move(vals)));
    }
    return out;
}

} // namespace anisored
