#include "anisored/checkers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "anisored/reduction.hpp"

namespace anisored {

namespace {

size_t aidx(int alpha, int beta, int j, int l) {
    return static_cast<size_t>(((alpha - 1) * 2 + (beta - 1)) * 4 + (j - 1) * 2 + (l - 1));
}

size_t bidx(int alpha, int beta, int l) {
    return static_cast<size_t>(((alpha - 1) * 2 + (beta - 1)) * 2 + (l - 1));
}

size_t cidx(int alpha, int beta) { return static_cast<size_t>((alpha - 1) * 2 + (beta - 1)); }

double real_at(const Scalar2Field& f, Vec2 x) {
    const Cx v = f.at(x);
    if (std::abs(v.imag()) > 1e-12 * std::max(1.0, std::abs(v)))
        fail(Err::validation_error, "coefficient field has an imaginary part");
    return v.real();
}

/// num / den pointwise; den must be constant or a grid field.
Scalar2Field field_div(const Scalar2Field& num, const Scalar2Field& den) {
    if (den.mode() == FieldMode::constant) {
        const Cx d = den.constant_value();
        if (std::abs(d) < 1e-300) fail(Err::validation_error, "division by a zero field");
        return (Cx(1) / d) * num;
    }
    if (den.mode() == FieldMode::poly)
        fail(Err::validation_error, "division by a non-constant polynomial field");
    const Grid2& g = den.grid();
    std::vector<Cx> out = num.sample(g);
    const std::vector<Cx>& dv = den.grid_values();
    for (size_t i = 0; i < out.size(); ++i) {
        if (std::abs(dv[i]) < 1e-300) fail(Err::validation_error, "division by a zero field");
        out[i] /= dv[i];
    }
    return Scalar2Field::on_grid(g, std::move(out));
}

} // namespace

Scalar2Field& CoefficientTensor::aref(int alpha, int beta, int j, int l) {
    return a[aidx(alpha, beta, j, l)];
}
const Scalar2Field& CoefficientTensor::aref(int alpha, int beta, int j, int l) const {
    return a[aidx(alpha, beta, j, l)];
}
Scalar2Field& CoefficientTensor::bref(int alpha, int beta, int l) {
    return b[bidx(alpha, beta, l)];
}
const Scalar2Field& CoefficientTensor::bref(int alpha, int beta, int l) const {
    return b[bidx(alpha, beta, l)];
}
Scalar2Field& CoefficientTensor::cref(int alpha, int beta) { return c[cidx(alpha, beta)]; }
const Scalar2Field& CoefficientTensor::cref(int alpha, int beta) const {
    return c[cidx(alpha, beta)];
}

FieldMode CoefficientTensor::mode() const {
    FieldMode m = FieldMode::constant;
    const auto scan = [&m](const Scalar2Field& f) {
        if (f.mode() == FieldMode::grid) m = FieldMode::grid;
        else if (f.mode() == FieldMode::poly && m == FieldMode::constant) m = FieldMode::poly;
    };
    for (const auto& f : a) scan(f);
    for (const auto& f : b) scan(f);
    for (const auto& f : c) scan(f);
    return m;
}

SystemFields CoefficientTensor::fields() const {
    SystemFields s;
    for (int alpha = 1; alpha <= 2; ++alpha)
        for (int beta = 1; beta <= 2; ++beta) {
            s.lam11(alpha - 1, beta - 1) = aref(alpha, beta, 1, 1);
            s.lam12(alpha - 1, beta - 1) = aref(alpha, beta, 1, 2) + aref(alpha, beta, 2, 1);
            s.lam22(alpha - 1, beta - 1) = aref(alpha, beta, 2, 2);
            s.b1(alpha - 1, beta - 1) = bref(alpha, beta, 1);
            s.b2(alpha - 1, beta - 1) = bref(alpha, beta, 2);
            s.c0(alpha - 1, beta - 1) = cref(alpha, beta);
        }
    return s;
}

QuadMatPoly CoefficientTensor::lambdas_at(Vec2 x) const {
    Mat2r l11, l12, l22;
    for (int alpha = 1; alpha <= 2; ++alpha)
        for (int beta = 1; beta <= 2; ++beta) {
            l11(alpha - 1, beta - 1) = real_at(aref(alpha, beta, 1, 1), x);
            l12(alpha - 1, beta - 1) =
                real_at(aref(alpha, beta, 1, 2), x) + real_at(aref(alpha, beta, 2, 1), x);
            l22(alpha - 1, beta - 1) = real_at(aref(alpha, beta, 2, 2), x);
        }
    return QuadMatPoly::make(l11, l12, l22);
}

Mat2r CoefficientTensor::symbol_at(Vec2 x, double xi1, double xi2) const {
    const double w[2] = {xi1, xi2};
    Mat2r m;
    for (int alpha = 1; alpha <= 2; ++alpha)
        for (int beta = 1; beta <= 2; ++beta) {
            double s = 0.0;
            for (int j = 1; j <= 2; ++j)
                for (int l = 1; l <= 2; ++l)
                    s += real_at(aref(alpha, beta, j, l), x) * w[j - 1] * w[l - 1];
            m(alpha - 1, beta - 1) = s;
        }
    return m;
}

std::pair<bool, bool> check_symmetries(const CoefficientTensor& t,
                                       const std::vector<Vec2>& pts) {
    bool major = true, minor = true;
    for (const Vec2& x : pts) {
        double scale = 1.0;
        double vals[2][2][2][2];
        for (int alpha = 1; alpha <= 2; ++alpha)
            for (int beta = 1; beta <= 2; ++beta)
                for (int j = 1; j <= 2; ++j)
                    for (int l = 1; l <= 2; ++l) {
                        const double v = real_at(t.aref(alpha, beta, j, l), x);
                        vals[alpha - 1][beta - 1][j - 1][l - 1] = v;
                        scale = std::max(scale, std::abs(v));
                    }
        const double tol = 1e-12 * scale;
        for (int alpha = 0; alpha < 2; ++alpha)
            for (int beta = 0; beta < 2; ++beta)
                for (int j = 0; j < 2; ++j)
                    for (int l = 0; l < 2; ++l) {
                        if (std::abs(vals[alpha][beta][j][l] - vals[beta][alpha][l][j]) > tol)
                            major = false;
                        if (std::abs(vals[alpha][beta][j][l] - vals[alpha][l][j][beta]) > tol)
                            minor = false;
                    }
    }
    return {major, minor};
}

namespace {

/// Tensor values frozen at one sample point; the angular form becomes pure
/// arithmetic.
struct PointTensor {
    double a[2][2][2][2];

    static PointTensor at(const CoefficientTensor& t, Vec2 x) {
        PointTensor pt;
        for (int alpha = 1; alpha <= 2; ++alpha)
            for (int beta = 1; beta <= 2; ++beta)
                for (int j = 1; j <= 2; ++j)
                    for (int l = 1; l <= 2; ++l)
                        pt.a[alpha - 1][beta - 1][j - 1][l - 1] =
                            real_at(t.aref(alpha, beta, j, l), x);
        return pt;
    }

    double form(double ta, double tb) const {
        const double av[2] = {std::cos(ta), std::sin(ta)};
        const double bv[2] = {std::cos(tb), std::sin(tb)};
        double s = 0.0;
        for (int alpha = 0; alpha < 2; ++alpha)
            for (int beta = 0; beta < 2; ++beta)
                for (int j = 0; j < 2; ++j)
                    for (int l = 0; l < 2; ++l)
                        s += a[alpha][beta][j][l] * av[alpha] * av[beta] * bv[j] * bv[l];
        return s;
    }
};

} // namespace

EllipticityReport check_strong_ellipticity(const CoefficientTensor& t,
                                           const std::vector<Vec2>& pts, int n_dirs) {
    EllipticityReport rep;
    const auto syms = check_symmetries(t, pts);
    rep.major_sym = syms.first;
    rep.minor_sym = syms.second;
    if (!rep.major_sym)
        fail(Err::validation_error, "strong ellipticity check requires major symmetry");

    bool elliptic = true;
    for (const Vec2& x : pts) {
        // the positivity of P(z) for every real z is decided from: leading
        // block positive definite, no real characteristic roots, det P(0) > 0
        Mat2r l11;
        for (int alpha = 1; alpha <= 2; ++alpha)
            for (int beta = 1; beta <= 2; ++beta)
                l11(alpha - 1, beta - 1) = real_at(t.aref(alpha, beta, 1, 1), x);
        const double d11 = l11(0, 0) * l11(1, 1) - l11(0, 1) * l11(1, 0);
        if (!(l11(0, 0) > 0.0 && d11 > 0.0)) {
            elliptic = false;
            continue;
        }
        try {
            const QuadMatPoly p = t.lambdas_at(x);
            const Poly4c q = det_quartic(p);
            const auto roots = quartic_roots(q);
            double scale = 1.0, margin = std::numeric_limits<double>::infinity();
            for (Cx r : roots) {
                scale = std::max(scale, std::abs(r));
                margin = std::min(margin, std::abs(r.imag()));
            }
            if (margin <= 1e-9 * scale) elliptic = false;
            if (!(q.eval(Cx(0)).real() > 0.0)) elliptic = false;
        } catch (const Error&) {
            elliptic = false;
        }
    }

    // angular scan of the quadratic form plus a deterministic pattern-search
    // refinement around the best grid pair
    double best = std::numeric_limits<double>::infinity();
    Vec2 best_x{};
    PointTensor best_pt{};
    double best_ta = 0.0, best_tb = 0.0;
    const double step0 = 2.0 * M_PI / n_dirs;
    std::vector<double> ca(static_cast<size_t>(n_dirs)), sa(static_cast<size_t>(n_dirs));
    for (int k = 0; k < n_dirs; ++k) {
        ca[static_cast<size_t>(k)] = std::cos(step0 * k);
        sa[static_cast<size_t>(k)] = std::sin(step0 * k);
    }
    for (const Vec2& x : pts) {
        const PointTensor pt = PointTensor::at(t, x);
        for (int ia = 0; ia < n_dirs; ++ia) {
            const double av[2] = {ca[static_cast<size_t>(ia)], sa[static_cast<size_t>(ia)]};
            // contract the component indices first
            double m[2][2];
            for (int j = 0; j < 2; ++j)
                for (int l = 0; l < 2; ++l) {
                    double s = 0.0;
                    for (int alpha = 0; alpha < 2; ++alpha)
                        for (int beta = 0; beta < 2; ++beta)
                            s += pt.a[alpha][beta][j][l] * av[alpha] * av[beta];
                    m[j][l] = s;
                }
            for (int ib = 0; ib < n_dirs; ++ib) {
                const double b1 = ca[static_cast<size_t>(ib)], b2 = sa[static_cast<size_t>(ib)];
                const double v =
                    m[0][0] * b1 * b1 + (m[0][1] + m[1][0]) * b1 * b2 + m[1][1] * b2 * b2;
                if (v < best) {
                    best = v;
                    best_x = x;
                    best_pt = pt;
                    best_ta = step0 * ia;
                    best_tb = step0 * ib;
                }
            }
        }
    }
    double step = step0;
    for (int it = 0; it < 90 && step > 1e-12; ++it) {
        bool moved = false;
        for (int da = -1; da <= 1; ++da)
            for (int db = -1; db <= 1; ++db) {
                if (da == 0 && db == 0) continue;
                const double v = best_pt.form(best_ta + da * step, best_tb + db * step);
                if (v < best) {
                    best = v;
                    best_ta += da * step;
                    best_tb += db * step;
                    moved = true;
                }
            }
        if (!moved) step *= 0.5;
    }

    rep.strong_elliptic = elliptic;
    rep.delta_est = elliptic ? best : std::min(best, 0.0);
    rep.worst_point = best_x;
    rep.worst_a = {std::cos(best_ta), std::sin(best_ta)};
    rep.worst_b = {std::cos(best_tb), std::sin(best_tb)};
    return rep;
}

SimpleDomainReport check_simple_domain(const CoefficientTensor& t,
                                       const std::vector<Vec2>& pts, double sep_tol) {
    SimpleDomainReport rep;
    rep.all_simple = true;
    rep.min_separation = std::numeric_limits<double>::infinity();
    rep.min_t_eig_gap = std::numeric_limits<double>::infinity();
    for (const Vec2& x : pts) {
        const QuadMatPoly p = t.lambdas_at(x);
        const SimpleCheck sc = is_simple(p, sep_tol);
        SimpleDomainReport::PointRecord rec;
        rec.x = x;
        rec.simple = sc.simple;
        rec.separation = sc.separation;
        if (sc.simple) {
            const TS ts = compute_t_s(p);
            const auto eig = eigenvalues2(ts.t);
            rec.t_eig_gap = std::abs(eig.first - eig.second);
            if (rec.t_eig_gap <= sep_tol) rec.simple = false;
        } else {
            rec.t_eig_gap = 0.0;
        }
        rep.all_simple = rep.all_simple && rec.simple;
        rep.min_separation = std::min(rep.min_separation, rec.separation);
        rep.min_t_eig_gap = std::min(rep.min_t_eig_gap, rec.t_eig_gap);
        rep.points.push_back(rec);
    }
    return rep;
}

Example5Result example5(const Example5Params& params, const std::vector<Vec2>& pts) {
    const Scalar2Field& a = params.a;
    const Scalar2Field& bf = params.b;
    const Scalar2Field& cf = params.c;
    const Scalar2Field& ff = params.f;

    const Scalar2Field e = field_div(bf * cf, a);
    const Scalar2Field d = field_div(Cx(2) * (bf * bf) - a * cf, a);

    Example5Result out;
    CoefficientTensor& t = out.tensor;
    const auto set_block = [&](int j, int l, const Scalar2Field& v11, const Scalar2Field& v12,
                               const Scalar2Field& v21, const Scalar2Field& v22) {
        t.aref(1, 1, j, l) = v11;
        t.aref(1, 2, j, l) = v12;
        t.aref(2, 1, j, l) = v21;
        t.aref(2, 2, j, l) = v22;
    };
    // the unique filling of the two mixed blocks compatible with both
    // symmetries: A12 = [[b, d],[c, e]], A21 = [[b, c],[d, e]]
    set_block(1, 1, a, bf, bf, cf);
    set_block(1, 2, bf, d, cf, e);
    set_block(2, 1, bf, cf, d, e);
    set_block(2, 2, cf, e, e, ff);

    for (const Vec2& x : pts) {
        const double av = real_at(a, x);
        const double bv = real_at(bf, x);
        const double cv = real_at(cf, x);
        const double fv = real_at(ff, x);
        if (std::abs(av) < 1e-300 || std::abs(cv) < 1e-300)
            fail(Err::validation_error, "parameters a, c must be nonzero on the domain");

        const auto flag = [&](const char* name, double value) {
            out.failures.push_back({name, x, value});
        };
        if (!(av > 0.0)) flag("a > 0", av);
        if (!(cv > 0.0)) flag("c > 0", cv);
        const double minor_det = av * cv - bv * bv;
        if (!(minor_det > 0.0)) flag("ac - b^2 > 0", minor_det);
        const double bound =
            std::max(bv * bv * cv / (av * av), (2.0 * av * bv * bv * cv - bv * bv * bv * bv) /
                                                   (av * av * av));
        if (!(fv > bound)) flag("f > max(b^2 c / a^2, (2ab^2 c - b^4)/a^3)", fv);
        const double fcrit = cv * cv / av;
        if (!(std::abs(fv - fcrit) > 1e-8 * std::abs(fv))) flag("f != c^2/a", fv);
    }

    // determinant factorization of the principal symbol, coefficient by
    // coefficient against the two quadratic factors
    double worst = 0.0;
    bool factor_ok = true;
    for (const Vec2& x : pts) {
        const double av = real_at(a, x);
        const double bv = real_at(bf, x);
        const double cv = real_at(cf, x);
        const double fv = real_at(ff, x);
        const double minor_det = av * cv - bv * bv;
        if (!(std::abs(minor_det) > 0.0)) {
            factor_ok = false;
            continue;
        }
        const double k = minor_det / (av * av);
        const double g = (av * av * fv - bv * bv * cv) / minor_det;
        if (&x == &pts.front()) out.second_factor_coeff = g;

        const double q1[3] = {cv, 2.0 * bv, av}; // ascending in z
        const double q2[3] = {g, 2.0 * bv, av};
        double prod[5] = {0, 0, 0, 0, 0};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) prod[i + j] += k * q1[i] * q2[j];

        const Poly4c det_p = det_quartic(t.lambdas_at(x));
        double scale = 1.0;
        for (double v : prod) scale = std::max(scale, std::abs(v));
        for (int i = 0; i < 5; ++i)
            worst = std::max(worst, std::abs(det_p.c[static_cast<size_t>(i)] - Cx(prod[i])) / scale);
    }
    out.det_factor_mismatch = worst;
    if (worst > 1e-10 || !factor_ok)
        out.failures.push_back({"det symbol factors into the two quadratics", pts.front(), worst});

    out.accepted = out.failures.empty();
    return out;
}

} // namespace anisored
