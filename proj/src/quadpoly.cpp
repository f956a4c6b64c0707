#include "anisored/quadpoly.hpp"

#include <algorithm>
#include <cmath>

namespace anisored {

namespace {

bool symmetric(const Mat2r& m, double tol) {
    double scale = 0.0;
    for (double v : m.e) scale = std::max(scale, std::abs(v));
    return std::abs(m(0, 1) - m(1, 0)) <= tol * std::max(1.0, scale);
}

double root_scale(const std::array<Cx, 4>& roots) {
    double s = 1.0;
    for (Cx r : roots) s = std::max(s, std::abs(r));
    return s;
}

} // namespace

QuadMatPoly QuadMatPoly::make(const Mat2r& l11, const Mat2r& l12, const Mat2r& l22) {
    for (const Mat2r* m : {&l11, &l12, &l22})
        for (double v : m->e)
            if (!std::isfinite(v)) fail(Err::validation_error, "non-finite coefficient block");
    if (!symmetric(l11, 1e-12) || !symmetric(l12, 1e-12) || !symmetric(l22, 1e-12))
        fail(Err::validation_error, "coefficient blocks must be symmetric");
    const double d = l11(0, 0) * l11(1, 1) - l11(0, 1) * l11(1, 0);
    double nf = 0.0;
    for (double v : l11.e) nf += v * v;
    if (std::abs(d) <= 1e-14 * nf) fail(Err::singular_matrix, "leading block not invertible");
    return QuadMatPoly{l11, l12, l22};
}

Mat2c eval_p(const QuadMatPoly& p, Cx lam) {
    Mat2c r;
    const Cx lam2 = lam * lam;
    for (size_t i = 0; i < 4; ++i)
        r.e[i] = lam2 * p.lam11.e[i] + lam * p.lam12.e[i] + p.lam22.e[i];
    return r;
}

Poly4c det_quartic(const QuadMatPoly& p) {
    // det of a 2x2 whose entries are quadratics in z: convolve the two
    // diagonal quadratics and subtract the off-diagonal product
    const auto quad = [&](int r, int c) {
        return std::array<double, 3>{p.lam22(r, c), p.lam12(r, c), p.lam11(r, c)};
    };
    const auto a = quad(0, 0), b = quad(0, 1), c = quad(1, 0), d = quad(1, 1);
    Poly4c out;
    for (size_t i = 0; i < 3; ++i)
        for (size_t j = 0; j < 3; ++j) out.c[i + j] += Cx(a[i] * d[j] - b[i] * c[j]);

    // pointwise cross-check at five sample values
    const double scale = std::max(1.0, out.coeff_scale());
    for (double z : {0.0, 1.0, -1.0, 2.0, -2.0}) {
        const Cx direct = det(eval_p(p, Cx(z)));
        const Cx from_coeffs = out.eval(Cx(z));
        if (std::abs(direct - from_coeffs) > 1e-11 * scale * std::max(1.0, std::abs(direct)))
            fail(Err::internal_error, "determinant quartic failed its pointwise cross-check");
    }
    return out;
}

SpectralSplit split_spectrum(const QuadMatPoly& p) {
    const auto roots = quartic_roots(det_quartic(p));
    const double scale = root_scale(roots);

    SpectralSplit s;
    s.im_margin = std::abs(roots[0].imag());
    s.separation = std::abs(roots[0] - roots[1]);
    for (size_t i = 0; i < 4; ++i) {
        s.im_margin = std::min(s.im_margin, std::abs(roots[i].imag()));
        for (size_t j = i + 1; j < 4; ++j)
            s.separation = std::min(s.separation, std::abs(roots[i] - roots[j]));
    }
    if (s.im_margin <= 1e-9 * scale)
        fail(Err::real_root_detected, "characteristic root on the real axis");

    std::array<Cx, 2> up, lo;
    size_t nu = 0, nl = 0;
    for (Cx r : roots) {
        if (r.imag() > 0.0) {
            if (nu < 2) up[nu] = r;
            ++nu;
        } else {
            if (nl < 2) lo[nl] = r;
            ++nl;
        }
    }
    if (nu != 2 || nl != 2)
        fail(Err::internal_error, "characteristic roots did not split two per half-plane");
    std::sort(up.begin(), up.end(), lex_less);
    std::sort(lo.begin(), lo.end(), lex_less);
    s.upper = up;
    s.lower = lo;
    return s;
}

Contour choose_contour(const SpectralSplit& split) {
    const Cx center = 0.5 * (split.upper[0] + split.upper[1]);
    const double maxdist =
        std::max(std::abs(split.upper[0] - center), std::abs(split.upper[1] - center));
    double scale = 1.0;
    for (Cx r : split.upper) scale = std::max(scale, std::abs(r));

    // largest radius keeping the real axis and the lower roots outside
    // with the required 10% margin
    double rmax = center.imag();
    for (Cx r : split.lower) rmax = std::min(rmax, std::abs(center - r));
    rmax /= 1.1;

    // a clustered (repeated) upper pair gives maxdist ~ 0; fall back to a
    // wide circle so the quadrature stays away from the near-double pole
    const double radius = (maxdist <= 1e-8 * scale) ? 0.5 * rmax : 1.25 * maxdist;

    if (!(radius > 0.0) || radius > rmax)
        fail(Err::contour_construction_failed,
             "no circle separates the upper roots from the lower ones");
    return Contour{center, radius};
}

std::vector<Contour> choose_contours(const SpectralSplit& split) {
    try {
        return {choose_contour(split)};
    } catch (const Error&) {
        // fall through to per-root circles
    }
    std::vector<Contour> out;
    for (size_t k = 0; k < 2; ++k) {
        const Cx root = split.upper[k];
        double limit = 0.9 * root.imag();
        limit = std::min(limit, 0.45 * std::abs(split.upper[0] - split.upper[1]));
        for (Cx lo : split.lower) limit = std::min(limit, 0.9 * std::abs(root - lo));
        if (!(limit > 0.0))
            fail(Err::contour_construction_failed, "upper root too close to an obstacle");
        out.push_back(Contour{root, limit});
    }
    return out;
}

std::pair<Mat2c, Mat2c> contour_moments_on(const QuadMatPoly& p, const Contour& c, int nodes) {
    Mat2c m0, m1;
    const double step = 2.0 * M_PI / nodes;
    for (int k = 0; k < nodes; ++k) {
        const double theta = step * k;
        const Cx on_circle = std::polar(c.radius, theta);
        const Cx z = c.center + on_circle;
        const Cx dz = Cx(0, 1) * on_circle * step; // i * R e^{i t} dt
        const Mat2c pinv = inverse(eval_p(p, z));
        for (size_t i = 0; i < 4; ++i) {
            m0.e[i] += pinv.e[i] * dz;
            m1.e[i] += z * pinv.e[i] * dz;
        }
    }
    return {m0, m1};
}

std::pair<Mat2c, Mat2c> contour_moments(const QuadMatPoly& p, const SpectralSplit& split) {
    Mat2c m0, m1;
    for (const Contour& c : choose_contours(split)) {
        const auto [a0, a1] = contour_moments_on(p, c, 512);
        for (size_t i = 0; i < 4; ++i) {
            m0.e[i] += a0.e[i];
            m1.e[i] += a1.e[i];
        }
    }
    return {m0, m1};
}

std::pair<Mat2c, Mat2c> residue_moments(const QuadMatPoly& p, const SpectralSplit& split) {
    const Poly4c q = det_quartic(p);
    Mat2c m0, m1;
    for (Cx r : split.upper) {
        const Cx dq = q.eval_derivative(r);
        if (std::abs(dq) < 1e-12 * std::max(1.0, q.coeff_scale()))
            fail(Err::validation_error, "residue oracle needs simple upper roots");
        const Mat2c adj = cof_transpose(eval_p(p, r));
        const Cx f0 = Cx(0, 2.0 * M_PI) / dq;
        for (size_t i = 0; i < 4; ++i) {
            m0.e[i] += f0 * adj.e[i];
            m1.e[i] += f0 * r * adj.e[i];
        }
    }
    return {m0, m1};
}

SpectralFactorization right_divisor(const QuadMatPoly& p) {
    const SpectralSplit split = split_spectrum(p);
    const std::vector<Contour> cycle = choose_contours(split);
    Mat2c m0, m1;
    for (const Contour& c : cycle) {
        const auto [a0, a1] = contour_moments_on(p, c, 512);
        for (size_t i = 0; i < 4; ++i) {
            m0.e[i] += a0.e[i];
            m1.e[i] += a1.e[i];
        }
    }

    const double nf = norm_fro(m0);
    if (std::abs(det(m0)) <= 1e-12 * nf * nf)
        fail(Err::moment_singular, "zeroth contour moment numerically singular");

    SpectralFactorization f;
    f.moment0 = m0;
    f.moment1 = m1;
    f.x_div = m1 * inverse(m0);
    if (cycle.size() == 1) {
        f.contour_center = cycle[0].center;
        f.contour_radius = cycle[0].radius;
    } else {
        // descriptive bounding circle of the two-circle cycle
        f.contour_center = 0.5 * (cycle[0].center + cycle[1].center);
        f.contour_radius = 0.0;
        for (const Contour& c : cycle)
            f.contour_radius =
                std::max(f.contour_radius, std::abs(c.center - f.contour_center) + c.radius);
    }

    const auto eig = eigenvalues2(f.x_div);
    if (eig.first.imag() <= 0.0 || eig.second.imag() <= 0.0)
        fail(Err::spectrum_leak, "right divisor has spectrum outside the upper half-plane");

    f.residual = verify_factorization(p, f);
    return f;
}

double verify_factorization(const QuadMatPoly& p, const SpectralFactorization& f) {
    const Mat2c xs = adjoint(f.x_div);
    const Mat2c l11 = Mat2c::from_real(p.lam11);
    double worst = 0.0;
    for (Cx lam : {Cx(0), Cx(1), Cx(-1), Cx(2), Cx(-2), Cx(0, 1)}) {
        Mat2c zmxs = Mat2c::identity();
        Mat2c zmx = Mat2c::identity();
        for (size_t i = 0; i < 4; ++i) {
            zmxs.e[i] = lam * zmxs.e[i] - xs.e[i];
            zmx.e[i] = lam * zmx.e[i] - f.x_div.e[i];
        }
        const Mat2c lhs = eval_p(p, lam);
        const Mat2c rhs = zmxs * (l11 * zmx);
        worst = std::max(worst, norm_fro(lhs - rhs) / (1.0 + norm_fro(lhs)));
    }
    return worst;
}

SimpleCheck is_simple(const QuadMatPoly& p, double sep_tol) {
    const auto roots = quartic_roots(det_quartic(p));
    const double scale = root_scale(roots);
    double sep = std::abs(roots[0] - roots[1]);
    for (size_t i = 0; i < 4; ++i) {
        if (std::abs(roots[i].imag()) <= 1e-9 * scale)
            fail(Err::real_root_detected, "characteristic root on the real axis");
        for (size_t j = i + 1; j < 4; ++j) sep = std::min(sep, std::abs(roots[i] - roots[j]));
    }
    return SimpleCheck{sep > sep_tol * scale, sep};
}

} // namespace anisored
