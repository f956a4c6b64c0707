#include "anisored/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace anisored {

namespace {

Mat2c real_to_c(const Mat2r& m) { return Mat2c::from_real(m); }

double spectrum_distance(const std::pair<Cx, Cx>& a, const std::pair<Cx, Cx>& b) {
    // set distance between two eigenvalue pairs, tolerant to ordering
    const double direct =
        std::max(std::abs(a.first - b.first), std::abs(a.second - b.second));
    const double swapped =
        std::max(std::abs(a.first - b.second), std::abs(a.second - b.first));
    return std::min(direct, swapped);
}

} // namespace

TS compute_t_s(const QuadMatPoly& p) {
    const SpectralFactorization f = right_divisor(p);
    TS out;
    out.t = Cx(-1) * f.x_div;
    const Mat2c l11_inv = inverse(real_to_c(p.lam11));
    const Mat2c a = l11_inv * real_to_c(p.lam12);
    out.s = a - out.t;

    const Mat2c quad = out.t * out.t - a * out.t + l11_inv * real_to_c(p.lam22);
    const double tn = norm_fro(out.t);
    out.quad_residual = norm_fro(quad) / (1.0 + tn * tn);
    if (out.quad_residual > 1e-9)
        fail(Err::quadratic_residual_too_large, "computed T does not satisfy its quadratic");

    const auto et = eigenvalues2(out.t);
    const auto es = eigenvalues2(out.s);
    out.conj_mismatch =
        spectrum_distance({std::conj(et.first), std::conj(et.second)}, es);
    out.spectrum_gap = std::min(std::min(std::abs(et.first - es.first),
                                         std::abs(et.first - es.second)),
                                std::min(std::abs(et.second - es.first),
                                         std::abs(et.second - es.second)));
    out.im_margin = std::min(std::abs(et.first.imag()), std::abs(et.second.imag()));
    return out;
}

Mat2c solve_sylvester(const Mat2c& a, const Mat2c& b, const Mat2c& c) {
    // unknowns ordered (psi11, psi12, psi21, psi22)
    Mat4c sys;
    sys(0, 0) = a(0, 0) - b(0, 0);
    sys(0, 1) = a(1, 0);
    sys(0, 2) = -b(0, 1);
    sys(1, 0) = a(0, 1);
    sys(1, 1) = a(1, 1) - b(0, 0);
    sys(1, 3) = -b(0, 1);
    sys(2, 0) = -b(1, 0);
    sys(2, 2) = a(0, 0) - b(1, 1);
    sys(2, 3) = a(1, 0);
    sys(3, 1) = -b(1, 0);
    sys(3, 2) = a(0, 1);
    sys(3, 3) = a(1, 1) - b(1, 1);

    Vec4c rhs{{-c(0, 0), -c(0, 1), -c(1, 0), -c(1, 1)}};
    Vec4c x;
    try {
        x = lin_solve4(sys, rhs);
    } catch (const Error& e) {
        if (e.code() == Err::singular_system)
            fail(Err::spectra_not_disjoint, "Sylvester system singular: spectra intersect");
        throw;
    }
    return Mat2c{{x[0], x[1], x[2], x[3]}};
}

Mat2cField compute_m_field(const Mat2cField& lam11_inv, const Mat2cField& lam12,
                           const Mat2cField& b1, const Mat2cField& b2, const Mat2cField& t,
                           const Mat2cField& d1t, const Mat2cField& d2t) {
    return -(lam11_inv * (b1 * t)) + lam11_inv * b2 - lam11_inv * (lam12 * d2t) + t * d2t - d1t;
}

Mat2cField compute_m(const QuadMatPoly& p, const Mat2cField& b1, const Mat2cField& b2,
                     const Mat2cField& t, const Mat2cField& d1t, const Mat2cField& d2t) {
    return compute_m_field(to_field(inverse(real_to_c(p.lam11))), to_field(p.lam12), b1, b2, t,
                           d1t, d2t);
}

std::vector<Vec2> ReductionData::eval_points() const {
    if (grid) return grid_points(*grid);
    return lattice_points({}, 1.0, 9);
}

namespace {

struct PointwiseTS {
    Mat2cField t, s;
    ReductionData::Diagnostics diag;
};

QuadMatPoly quad_at(const SystemFields& sys, Vec2 x) {
    const auto real_block = [&](const Mat2cField& f) {
        Mat2r m;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) {
                const Cx v = f(r, c).at(x);
                if (std::abs(v.imag()) > 1e-12 * std::max(1.0, std::abs(v)))
                    fail(Err::validation_error, "coefficient field has an imaginary part");
                m(r, c) = v.real();
            }
        return m;
    };
    return QuadMatPoly::make(real_block(sys.lam11), real_block(sys.lam12),
                             real_block(sys.lam22));
}

PointwiseTS factorize_field(const SystemFields& sys, const std::optional<Grid2>& grid,
                            ReductionData::Diagnostics& diag) {
    PointwiseTS out;
    if (!grid) {
        const QuadMatPoly p = quad_at(sys, Vec2{});
        const TS ts = compute_t_s(p);
        const SpectralFactorization f = right_divisor(p);
        const auto simple = is_simple(p);
        out.t = to_field(ts.t);
        out.s = to_field(ts.s);
        diag.quad_residual = ts.quad_residual;
        diag.conj_mismatch = ts.conj_mismatch;
        diag.spectrum_gap = ts.spectrum_gap;
        diag.im_margin = ts.im_margin;
        diag.factor_residual = f.residual;
        diag.min_separation = simple.separation;
        return out;
    }
    const Grid2& g = *grid;
    std::array<std::vector<Cx>, 4> tv, sv;
    for (auto& v : tv) v.resize(static_cast<size_t>(g.size()));
    for (auto& v : sv) v.resize(static_cast<size_t>(g.size()));
    diag.quad_residual = 0.0;
    diag.conj_mismatch = 0.0;
    diag.spectrum_gap = std::numeric_limits<double>::infinity();
    diag.im_margin = std::numeric_limits<double>::infinity();
    diag.factor_residual = 0.0;
    diag.min_separation = std::numeric_limits<double>::infinity();
    for (int i2 = 0; i2 < g.n; ++i2)
        for (int i1 = 0; i1 < g.n; ++i1) {
            const QuadMatPoly p = quad_at(sys, g.node(i1, i2));
            const TS ts = compute_t_s(p);
            const SpectralFactorization f = right_divisor(p);
            const auto simple = is_simple(p);
            const size_t k = static_cast<size_t>(g.index(i1, i2));
            for (size_t e = 0; e < 4; ++e) {
                tv[e][k] = ts.t.e[e];
                sv[e][k] = ts.s.e[e];
            }
            diag.quad_residual = std::max(diag.quad_residual, ts.quad_residual);
            diag.conj_mismatch = std::max(diag.conj_mismatch, ts.conj_mismatch);
            diag.spectrum_gap = std::min(diag.spectrum_gap, ts.spectrum_gap);
            diag.im_margin = std::min(diag.im_margin, ts.im_margin);
            diag.factor_residual = std::max(diag.factor_residual, f.residual);
            diag.min_separation = std::min(diag.min_separation, simple.separation);
        }
    for (size_t e = 0; e < 4; ++e) {
        out.t.e[e] = Scalar2Field::on_grid(g, std::move(tv[e]));
        out.s.e[e] = Scalar2Field::on_grid(g, std::move(sv[e]));
    }
    return out;
}

Mat2cField sylvester_field(const Mat2cField& t, const Mat2cField& s, const Mat2cField& m,
                           const std::vector<Vec2>& pts, const std::optional<Grid2>& grid,
                           double& residual_out) {
    residual_out = 0.0;
    const auto residual_at = [&](const Mat2c& a, const Mat2c& b, const Mat2c& c,
                                 const Mat2c& psi) {
        const Mat2c r = psi * a - b * psi + c;
        const double scale =
            (norm_fro(a) + norm_fro(b)) * norm_fro(psi) + norm_fro(c);
        return norm_fro(r) / std::max(1e-300, scale);
    };
    if (!grid) {
        const Mat2c a = eval_at(t, Vec2{});
        const Mat2c b = eval_at(s, Vec2{});
        const Mat2c c = eval_at(m, Vec2{});
        const Mat2c psi = solve_sylvester(a, b, c);
        residual_out = residual_at(a, b, c, psi);
        return to_field(psi);
    }
    (void)pts;
    const Grid2& g = *grid;
    std::array<std::vector<Cx>, 4> pv;
    for (auto& v : pv) v.resize(static_cast<size_t>(g.size()));
    for (int i2 = 0; i2 < g.n; ++i2)
        for (int i1 = 0; i1 < g.n; ++i1) {
            const size_t k = static_cast<size_t>(g.index(i1, i2));
            const Vec2 x = g.node(i1, i2);
            const Mat2c a = eval_at(t, x);
            const Mat2c b = eval_at(s, x);
            const Mat2c c = eval_at(m, x);
            const Mat2c psi = solve_sylvester(a, b, c);
            residual_out = std::max(residual_out, residual_at(a, b, c, psi));
            for (size_t e = 0; e < 4; ++e) pv[e][k] = psi.e[e];
        }
    Mat2cField out;
    for (size_t e = 0; e < 4; ++e) out.e[e] = Scalar2Field::on_grid(g, std::move(pv[e]));
    return out;
}

} // namespace

DiagonalCoeffs assemble_diagonal(const Mat2cField& t, const Mat2cField& s,
                                 const std::vector<Vec2>& pts, double tol) {
    DiagonalCoeffs out;
    out.p1_tr = t(0, 0) + t(1, 1);
    out.p1_det = t(0, 0) * t(1, 1) - t(0, 1) * t(1, 0);
    out.p2_tr = s(0, 0) + s(1, 1);
    out.p2_det = s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0);

    double mismatch = 0.0;
    for (const Vec2& x : pts) {
        mismatch = std::max(mismatch,
                            std::abs(out.p2_tr.at(x) - std::conj(out.p1_tr.at(x))));
        mismatch = std::max(mismatch,
                            std::abs(out.p2_det.at(x) - std::conj(out.p1_det.at(x))));
    }
    out.conj_mismatch = mismatch;
    if (mismatch > tol)
        fail(Err::conjugacy_violated,
             "second diagonal operator is not the conjugate of the first");
    return out;
}

ReductionData reduce(const SystemFields& sys_in, const std::optional<Grid2>& grid,
                     const ReduceOptions& opt) {
    ReductionData rd;
    const FieldMode mode = sys_in.mode();
    if (mode == FieldMode::constant) {
        rd.sys = sys_in;
        rd.grid = std::nullopt;
    } else {
        if (!grid)
            fail(Err::validation_error,
                 "non-constant coefficients need a grid for the reduction");
        rd.sys = sys_in.sampled(*grid);
        rd.grid = grid;
    }

    rd.lam11_inv = inverse_field(rd.sys.lam11);

    const PointwiseTS ts = factorize_field(rd.sys, rd.grid, rd.diag);
    rd.t_mat = ts.t;
    rd.s_mat = ts.s;
    if (rd.diag.quad_residual > opt.quad_res_tol)
        fail(Err::quadratic_residual_too_large, "worst-case quadratic residual over the domain");
    if (rd.diag.conj_mismatch > opt.conj_tol)
        fail(Err::conjugacy_violated, "Spec(S) does not match conj(Spec(T))");

    rd.m_src = compute_m_field(rd.lam11_inv, rd.sys.lam12, rd.sys.b1, rd.sys.b2, rd.t_mat,
                               rd.t_mat.derivative(1), rd.t_mat.derivative(2));

    const std::vector<Vec2> pts =
        rd.grid ? grid_points(*rd.grid)
                : lattice_points(opt.box_center, opt.box_half_width, opt.lattice_per_axis);

    rd.psi = sylvester_field(rd.t_mat, rd.s_mat, rd.m_src, pts, rd.grid,
                             rd.diag.sylvester_residual);

    // block system
    const Mat2cField eye = Mat2cField::constant_identity();
    const Mat2cField psi_m_l11b1 = rd.psi - rd.lam11_inv * rd.sys.b1;
    const Mat2cField q = rd.psi.derivative(1) + rd.s_mat * rd.psi.derivative(2) -
                         rd.lam11_inv * rd.sys.c0 - psi_m_l11b1 * rd.psi;
    rd.m1_block = block_diag(rd.t_mat, rd.s_mat);
    rd.m0_block = block2x2(-rd.psi, eye, q, psi_m_l11b1);

    const auto dcoef = assemble_diagonal(rd.t_mat, rd.s_mat, pts, opt.conj_tol);
    rd.p1_tr = dcoef.p1_tr;
    rd.p1_det = dcoef.p1_det;
    rd.p2_tr = dcoef.p2_tr;
    rd.p2_det = dcoef.p2_det;
    rd.diag.diag_conj_mismatch = dcoef.conj_mismatch;

    // lower-order matrices of the diagonalized system
    rd.cof_t = cof_transpose_field(rd.t_mat);
    rd.cof_s = cof_transpose_field(rd.s_mat);
    const Mat4cField ccof = block_diag(rd.cof_t, rd.cof_s);
    const Cx mi(0, -1);
    rd.k10 = mi * rd.m0_block;
    rd.k01 = mi * (ccof * rd.m0_block - rd.m1_block.derivative(1) -
                   ccof * rd.m1_block.derivative(2));
    rd.k00 = -(rd.m0_block.derivative(1) + ccof * rd.m0_block.derivative(2));
    return rd;
}

StateVectorW build_w(const Vec2cField& u, const ReductionData& rd) {
    StateVectorW w;
    w.w1 = u;
    w.w2 = rd.psi * u + u.derivative(1) + rd.t_mat * u.derivative(2);
    return w;
}

Vec2cField apply_system(const SystemFields& sys, const Vec2cField& u) {
    const Vec2cField d1u = u.derivative(1);
    const Vec2cField d2u = u.derivative(2);
    return sys.lam11 * d1u.derivative(1) + sys.lam12 * d2u.derivative(1) +
           sys.lam22 * d2u.derivative(2) + sys.b1 * d1u + sys.b2 * d2u + sys.c0 * u;
}

} // namespace anisored
