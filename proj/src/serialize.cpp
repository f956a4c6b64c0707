#include "anisored/serialize.hpp"

#include <algorithm>
#include <limits>

namespace anisored {

using nlohmann::json;

json to_json(const Grid2& g) {
    return json{{"center", {g.center.x1, g.center.x2}}, {"half_width", g.half_width}, {"n", g.n}};
}

Grid2 grid_from_json(const json& j) {
    if (!j.is_object() || !j.contains("center") || !j.contains("half_width") || !j.contains("n"))
        fail(Err::parse_error, "grid record needs center, half_width, n");
    return Grid2({j["center"][0].get<double>(), j["center"][1].get<double>()},
                 j["half_width"].get<double>(), j["n"].get<int>());
}

json to_json(const Scalar2Field& f) {
    json j;
    switch (f.mode()) {
        case FieldMode::constant: {
            const Cx v = f.constant_value();
            j["mode"] = "constant";
            j["re"] = v.real();
            j["im"] = v.imag();
            break;
        }
        case FieldMode::poly: {
            j["mode"] = "poly";
            json terms = json::array();
            for (const auto& t : f.polynomial().terms())
                terms.push_back(
                    {{"i", t.i}, {"j", t.j}, {"re", t.coeff.real()}, {"im", t.coeff.imag()}});
            j["terms"] = terms;
            break;
        }
        case FieldMode::grid: {
            j["mode"] = "grid";
            const auto& vals = f.grid_values();
            json re = json::array(), im = json::array();
            for (Cx v : vals) {
                re.push_back(v.real());
                im.push_back(v.imag());
            }
            j["re"] = re;
            j["im"] = im;
            break;
        }
    }
    return j;
}

Scalar2Field scalar_field_from_json(const json& j, const std::optional<Grid2>& g) {
    if (!j.is_object() || !j.contains("mode"))
        fail(Err::parse_error, "field record needs a mode");
    const std::string mode = j["mode"].get<std::string>();
    if (mode == "constant")
        return Scalar2Field::constant(Cx(j["re"].get<double>(), j["im"].get<double>()));
    if (mode == "poly") {
        Poly2c p;
        for (const json& t : j["terms"])
            p = p + Poly2c::monomial(t["i"].get<int>(), t["j"].get<int>(),
                                     Cx(t["re"].get<double>(), t["im"].get<double>()));
        return Scalar2Field::poly(p);
    }
    if (mode == "grid") {
        if (!g) fail(Err::parse_error, "grid-mode field without a grid record");
        const json& re = j["re"];
        const json& im = j["im"];
        if (static_cast<int>(re.size()) != g->size() || im.size() != re.size())
            fail(Err::parse_error, "grid field sample count mismatch");
        std::vector<Cx> vals(re.size());
        for (size_t k = 0; k < vals.size(); ++k)
            vals[k] = Cx(re[k].get<double>(), im[k].get<double>());
        return Scalar2Field::on_grid(*g, std::move(vals));
    }
    fail(Err::parse_error, "unknown field mode: " + mode);
}

namespace {

template <int R, int C>
json mat_to_json(const FieldMat<R, C>& m) {
    json arr = json::array();
    for (const auto& entry : m.e) arr.push_back(to_json(entry));
    return arr;
}

template <int R, int C>
FieldMat<R, C> mat_from_json(const json& j, const std::optional<Grid2>& g) {
    FieldMat<R, C> m;
    if (!j.is_array() || j.size() != m.e.size())
        fail(Err::parse_error, "field matrix with wrong entry count");
    for (size_t k = 0; k < m.e.size(); ++k) m.e[k] = scalar_field_from_json(j[k], g);
    return m;
}

} // namespace

json to_json(const ReductionData& rd) {
    json j;
    j["grid"] = rd.grid ? to_json(*rd.grid) : json(nullptr);
    j["system"] = {{"lam11", mat_to_json(rd.sys.lam11)}, {"lam12", mat_to_json(rd.sys.lam12)},
                   {"lam22", mat_to_json(rd.sys.lam22)}, {"b1", mat_to_json(rd.sys.b1)},
                   {"b2", mat_to_json(rd.sys.b2)},       {"c0", mat_to_json(rd.sys.c0)}};
    j["t"] = mat_to_json(rd.t_mat);
    j["s"] = mat_to_json(rd.s_mat);
    j["psi"] = mat_to_json(rd.psi);
    j["m"] = mat_to_json(rd.m_src);
    j["m1"] = mat_to_json(rd.m1_block);
    j["m0"] = mat_to_json(rd.m0_block);
    j["p1"] = {{"tr", to_json(rd.p1_tr)}, {"det", to_json(rd.p1_det)}};
    j["p2"] = {{"tr", to_json(rd.p2_tr)}, {"det", to_json(rd.p2_det)}};
    j["k10"] = mat_to_json(rd.k10);
    j["k01"] = mat_to_json(rd.k01);
    j["k00"] = mat_to_json(rd.k00);
    j["diagnostics"] = {{"quad_residual", rd.diag.quad_residual},
                        {"conj_mismatch", rd.diag.conj_mismatch},
                        {"spectrum_gap", rd.diag.spectrum_gap},
                        {"im_margin", rd.diag.im_margin},
                        {"sylvester_residual", rd.diag.sylvester_residual},
                        {"factor_residual", rd.diag.factor_residual},
                        {"diag_conj_mismatch", rd.diag.diag_conj_mismatch},
                        {"min_separation", rd.diag.min_separation}};
    return j;
}

ReductionData reduction_from_json(const json& j) {
    ReductionData rd;
    if (j.contains("grid") && !j["grid"].is_null()) rd.grid = grid_from_json(j["grid"]);
    const auto& sys = j.at("system");
    rd.sys.lam11 = mat_from_json<2, 2>(sys.at("lam11"), rd.grid);
    rd.sys.lam12 = mat_from_json<2, 2>(sys.at("lam12"), rd.grid);
    rd.sys.lam22 = mat_from_json<2, 2>(sys.at("lam22"), rd.grid);
    rd.sys.b1 = mat_from_json<2, 2>(sys.at("b1"), rd.grid);
    rd.sys.b2 = mat_from_json<2, 2>(sys.at("b2"), rd.grid);
    rd.sys.c0 = mat_from_json<2, 2>(sys.at("c0"), rd.grid);
    rd.lam11_inv = inverse_field(rd.sys.lam11);
    rd.t_mat = mat_from_json<2, 2>(j.at("t"), rd.grid);
    rd.s_mat = mat_from_json<2, 2>(j.at("s"), rd.grid);
    rd.psi = mat_from_json<2, 2>(j.at("psi"), rd.grid);
    rd.m_src = mat_from_json<2, 2>(j.at("m"), rd.grid);
    rd.m1_block = mat_from_json<4, 4>(j.at("m1"), rd.grid);
    rd.m0_block = mat_from_json<4, 4>(j.at("m0"), rd.grid);
    rd.p1_tr = scalar_field_from_json(j.at("p1").at("tr"), rd.grid);
    rd.p1_det = scalar_field_from_json(j.at("p1").at("det"), rd.grid);
    rd.p2_tr = scalar_field_from_json(j.at("p2").at("tr"), rd.grid);
    rd.p2_det = scalar_field_from_json(j.at("p2").at("det"), rd.grid);
    rd.k10 = mat_from_json<4, 4>(j.at("k10"), rd.grid);
    rd.k01 = mat_from_json<4, 4>(j.at("k01"), rd.grid);
    rd.k00 = mat_from_json<4, 4>(j.at("k00"), rd.grid);
    rd.cof_t = cof_transpose_field(rd.t_mat);
    rd.cof_s = cof_transpose_field(rd.s_mat);
    const auto& d = j.at("diagnostics");
    rd.diag.quad_residual = d.at("quad_residual").get<double>();
    rd.diag.conj_mismatch = d.at("conj_mismatch").get<double>();
    rd.diag.spectrum_gap = d.at("spectrum_gap").get<double>();
    rd.diag.im_margin = d.at("im_margin").get<double>();
    rd.diag.sylvester_residual = d.at("sylvester_residual").get<double>();
    rd.diag.factor_residual = d.at("factor_residual").get<double>();
    rd.diag.diag_conj_mismatch = d.at("diag_conj_mismatch").get<double>();
    rd.diag.min_separation = d.at("min_separation").get<double>();
    return rd;
}

ReductionData::Diagnostics verify_reduction_data(const ReductionData& rd) {
    ReductionData::Diagnostics out;
    out.spectrum_gap = std::numeric_limits<double>::infinity();
    out.im_margin = std::numeric_limits<double>::infinity();
    out.min_separation = std::numeric_limits<double>::infinity();

    const Mat2cField a_field = rd.lam11_inv * rd.sys.lam12;
    const Mat2cField b_field = rd.lam11_inv * rd.sys.lam22;

    for (const Vec2& x : rd.eval_points()) {
        const Mat2c t = eval_at(rd.t_mat, x);
        const Mat2c s = eval_at(rd.s_mat, x);
        const Mat2c a = eval_at(a_field, x);
        const Mat2c b = eval_at(b_field, x);
        const Mat2c quad = t * t - a * t + b;
        const double tn = norm_fro(t);
        out.quad_residual = std::max(out.quad_residual, norm_fro(quad) / (1.0 + tn * tn));

        const auto et = eigenvalues2(t);
        const auto es = eigenvalues2(s);
        const double direct = std::max(std::abs(std::conj(et.first) - es.first),
                                       std::abs(std::conj(et.second) - es.second));
        const double swapped = std::max(std::abs(std::conj(et.first) - es.second),
                                        std::abs(std::conj(et.second) - es.first));
        out.conj_mismatch = std::max(out.conj_mismatch, std::min(direct, swapped));
        out.spectrum_gap = std::min(
            out.spectrum_gap,
            std::min(std::min(std::abs(et.first - es.first), std::abs(et.first - es.second)),
                     std::min(std::abs(et.second - es.first), std::abs(et.second - es.second))));
        out.im_margin = std::min(out.im_margin, std::min(std::abs(et.first.imag()),
                                                         std::abs(et.second.imag())));

        const Mat2c psi = eval_at(rd.psi, x);
        const Mat2c m = eval_at(rd.m_src, x);
        const Mat2c syl = psi * t - s * psi + m;
        const double scale = (norm_fro(t) + norm_fro(s)) * norm_fro(psi) + norm_fro(m);
        out.sylvester_residual =
            std::max(out.sylvester_residual, norm_fro(syl) / std::max(1e-300, scale));

        out.diag_conj_mismatch = std::max(
            out.diag_conj_mismatch,
            std::max(std::abs(rd.p2_tr.at(x) - std::conj(rd.p1_tr.at(x))),
                     std::abs(rd.p2_det.at(x) - std::conj(rd.p1_det.at(x)))));
    }
    return out;
}

} // namespace anisored
