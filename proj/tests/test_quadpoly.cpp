#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "anisored/quadpoly.hpp"

using namespace anisored;

namespace {

const double kPi = 3.14159265358979323846;

QuadMatPoly identity_like() {
    return QuadMatPoly::make(Mat2r::identity(), Mat2r{}, Mat2r::identity());
}

/// The worked elasticity family: blocks from (a, b, c, f) with e = bc/a and
/// d = (2b^2 - ac)/a.
QuadMatPoly family_instance(double a, double b, double c, double f) {
    const double e = b * c / a;
    const double d = (2.0 * b * b - a * c) / a;
    Mat2r l11{{a, b, b, c}};
    Mat2r l12{{2.0 * b, c + d, c + d, 2.0 * e}};
    Mat2r l22{{c, e, e, f}};
    return QuadMatPoly::make(l11, l12, l22);
}

/// Random strongly elliptic instance; draws until the spectral margin is
/// comfortable.
QuadMatPoly random_elliptic(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (;;) {
        Mat2r r1, r2, s;
        for (auto& v : r1.e) v = u(rng);
        for (auto& v : r2.e) v = u(rng);
        for (auto& v : s.e) v = u(rng);
        Mat2r l11, l22, l12;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                l11(i, j) = r1(i, 0) * r1(j, 0) + r1(i, 1) * r1(j, 1) + (i == j ? 0.25 : 0.0);
                l22(i, j) = r2(i, 0) * r2(j, 0) + r2(i, 1) * r2(j, 1) + (i == j ? 0.25 : 0.0);
                l12(i, j) = 0.4 * (s(i, j) + s(j, i));
            }
        try {
            const QuadMatPoly p = QuadMatPoly::make(l11, l12, l22);
            const SpectralSplit split = split_spectrum(p);
            if (split.im_margin > 1e-3) return p;
        } catch (const Error&) {
            continue;
        }
    }
}

} // namespace

TEST_CASE("eval_p basics") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Mat2r l11{{2, 0.5, 0.5, 1}}, l12{{1, 0.25, 0.25, -1}}, l22{{3, 0, 0, 2}};
    const QuadMatPoly p = QuadMatPoly::make(l11, l12, l22);
    const Mat2c at0 = eval_p(p, Cx(0));
    for (size_t i = 0; i < 4; ++i) CHECK(at0.e[i] == Cx(l22.e[i]));

    const Mat2c ati = eval_p(identity_like(), Cx(0, 1));
    CHECK(norm_fro(ati) < 1e-15);
}

TEST_CASE("eval_p on the (2,1,1,2) family instance at z=1") {
    const QuadMatPoly p = family_instance(2, 1, 1, 2);
    const Mat2c v = eval_p(p, Cx(1));
    CHECK(std::abs(v(0, 0) - Cx(5.0)) < 1e-14);
    CHECK(std::abs(v(0, 1) - Cx(2.5)) < 1e-14);
    CHECK(std::abs(v(1, 0) - Cx(2.5)) < 1e-14);
    CHECK(std::abs(v(1, 1) - Cx(4.0)) < 1e-14);
}

TEST_CASE("det_quartic closed forms") {
    const Poly4c q1 = det_quartic(identity_like());
    const double expect1[5] = {1, 0, 2, 0, 1};
    for (size_t k = 0; k < 5; ++k) CHECK(std::abs(q1.c[k] - Cx(expect1[k])) < 1e-14);

    const Poly4c q2 = det_quartic(family_instance(2, 0, 1, 1));
    const double expect2[5] = {1, 0, 3, 0, 2};
    for (size_t k = 0; k < 5; ++k) CHECK(std::abs(q2.c[k] - Cx(expect2[k])) < 1e-14);
}

TEST_CASE("det_quartic matches pointwise determinants on random instances") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const QuadMatPoly p = random_elliptic(rng);
        const Poly4c q = det_quartic(p);
        for (double z : {0.0, 1.0, -1.0, 2.0, -2.0}) {
            const Cx direct = det(eval_p(p, Cx(z)));
            CHECK(std::abs(q.eval(Cx(z)) - direct) <=
                  1e-11 * std::max(1.0, std::abs(direct)));
        }
    }
}

TEST_CASE("split_spectrum: repeated and separated cases") {
    const SpectralSplit s1 = split_spectrum(identity_like());
    CHECK(std::abs(s1.upper[0] - Cx(0, 1)) < 1e-6);
    CHECK(std::abs(s1.upper[1] - Cx(0, 1)) < 1e-6);
    CHECK(std::abs(s1.lower[0] - Cx(0, -1)) < 1e-6);
    CHECK(s1.separation < 1e-6);
    CHECK(s1.im_margin == doctest::Approx(1.0).epsilon(1e-9));

    const SpectralSplit s2 = split_spectrum(family_instance(2, 0, 1, 1));
    const double is = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(s2.upper[0] - Cx(0, is)) < 1e-12);
    CHECK(std::abs(s2.upper[1] - Cx(0, 1)) < 1e-12);
    CHECK(s2.im_margin == doctest::Approx(is).epsilon(1e-10));
}

TEST_CASE("split_spectrum flags a real root when the trailing block is singular") {
    Mat2r l22{{1, 0, 0, 0}};
    const QuadMatPoly p = QuadMatPoly::make(Mat2r::identity(), Mat2r{}, l22);
    CHECK_THROWS_WITH_AS(split_spectrum(p), doctest::Contains("RealRootDetected"), Error);
}

TEST_CASE("contour moments: identity-like closed form") {
    const QuadMatPoly p = identity_like();
    const auto [m0, m1] = contour_moments(p, split_spectrum(p));
    Mat2c expect0;
    expect0(0, 0) = expect0(1, 1) = Cx(kPi);
    Mat2c expect1;
    expect1(0, 0) = expect1(1, 1) = Cx(0, kPi);
    CHECK(norm_fro(m0 - expect0) < 1e-9);
    CHECK(norm_fro(m1 - expect1) < 1e-9);
}

TEST_CASE("contour moments: diagonal family closed form") {
    const QuadMatPoly p = family_instance(2, 0, 1, 1);
    const auto [m0, m1] = contour_moments(p, split_spectrum(p));
    const double is = 1.0 / std::sqrt(2.0);
    Mat2c expect0;
    expect0(0, 0) = Cx(kPi * is);
    expect0(1, 1) = Cx(kPi);
    Mat2c expect1;
    expect1(0, 0) = Cx(0, kPi / 2.0);
    expect1(1, 1) = Cx(0, kPi);
    CHECK(norm_fro(m0 - expect0) < 1e-9);
    CHECK(norm_fro(m1 - expect1) < 1e-9);
}

TEST_CASE("quadrature self-convergence: 512 vs 1024 nodes") {
    const QuadMatPoly p = family_instance(2, 1, 1, 2);
    const SpectralSplit split = split_spectrum(p);
    const Contour c = choose_contour(split);
    const auto [a0, a1] = contour_moments_on(p, c, 512);
    const auto [b0, b1] = contour_moments_on(p, c, 1024);
    CHECK(norm_fro(a0 - b0) < 1e-12);
    CHECK(norm_fro(a1 - b1) < 1e-12);
}

TEST_CASE("residue oracle agrees with the quadrature when roots are simple") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 30; ++trial) {
        const QuadMatPoly p = random_elliptic(rng);
        const SpectralSplit split = split_spectrum(p);
        if (split.separation < 1e-4) continue;
        const auto [q0, q1] = contour_moments(p, split);
        const auto [r0, r1] = residue_moments(p, split);
        CHECK(norm_fro(q0 - r0) <= 1e-9 * std::max(1.0, norm_fro(r0)));
        CHECK(norm_fro(q1 - r1) <= 1e-9 * std::max(1.0, norm_fro(r1)));
    }
}

TEST_CASE("right divisor: identity-like gives X = iI") {
    const SpectralFactorization f = right_divisor(identity_like());
    Mat2c expect;
    expect(0, 0) = expect(1, 1) = Cx(0, 1);
    CHECK(norm_fro(f.x_div - expect) < 1e-9);
    CHECK(f.residual < 1e-12);
}

TEST_CASE("right divisor: diagonal family") {
    const SpectralFactorization f = right_divisor(family_instance(2, 0, 1, 1));
    const double is = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(f.x_div(0, 0) - Cx(0, is)) < 1e-10);
    CHECK(std::abs(f.x_div(1, 1) - Cx(0, 1)) < 1e-10);
    CHECK(std::abs(f.x_div(0, 1)) < 1e-10);
    CHECK(std::abs(f.x_div(1, 0)) < 1e-10);
    CHECK(f.residual <= 1e-10);
}

TEST_CASE("right divisor spectrum on the coupled family instance") {
    const SpectralFactorization f = right_divisor(family_instance(2, 1, 1, 2));
    const auto eig = eigenvalues2(f.x_div);
    const Cx e1(-0.5, 0.5);
    const Cx e2(-0.5, std::sqrt(13.0) / 2.0);
    CHECK(std::abs(eig.first - e1) < 1e-8);
    CHECK(std::abs(eig.second - e2) < 1e-8);
    CHECK(f.residual <= 1e-9);
}

TEST_CASE("verify_factorization is a sensitive detector") {
    const QuadMatPoly p = family_instance(2, 0, 1, 1);
    SpectralFactorization f = right_divisor(p);
    CHECK(verify_factorization(p, f) <= 1e-10);
    f.x_div(0, 0) += Cx(1e-3);
    CHECK(verify_factorization(p, f) >= 1e-4);
}

TEST_CASE("residual is scale-invariant") {
    const QuadMatPoly base = family_instance(2, 1, 1, 2);
    const SpectralFactorization f0 = right_divisor(base);
    for (double scale : {1e-3, 1.0, 1e3}) {
        Mat2r l11 = base.lam11, l12 = base.lam12, l22 = base.lam22;
        for (auto& v : l11.e) v *= scale;
        for (auto& v : l12.e) v *= scale;
        for (auto& v : l22.e) v *= scale;
        const QuadMatPoly scaled = QuadMatPoly::make(l11, l12, l22);
        const SpectralFactorization f = right_divisor(scaled);
        CHECK(f.residual <= 2.0 * std::max(f0.residual, 1e-14));
    }
}

TEST_CASE("is_simple: repeated vs distinct characteristic roots") {
    CHECK_FALSE(is_simple(identity_like()).simple);

    const SimpleCheck s1 = is_simple(family_instance(2, 0, 1, 1));
    CHECK(s1.simple);
    CHECK(s1.separation == doctest::Approx(1.0 - 1.0 / std::sqrt(2.0)).epsilon(1e-9));

    CHECK(is_simple(family_instance(2, 1, 1, 2)).simple);
}

TEST_CASE("conjugate-pair property over random elliptic instances") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        const QuadMatPoly p = random_elliptic(rng);
        const SpectralSplit s = split_spectrum(p);
        // the upper multiset must be the conjugate of the lower one
        const double direct = std::max(std::abs(s.upper[0] - std::conj(s.lower[0])),
                                       std::abs(s.upper[1] - std::conj(s.lower[1])));
        const double swapped = std::max(std::abs(s.upper[0] - std::conj(s.lower[1])),
                                        std::abs(s.upper[1] - std::conj(s.lower[0])));
        CHECK(std::min(direct, swapped) < 1e-9);
    }
}

TEST_CASE("X solves the quadratic through T = -X") {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 50; ++trial) {
        const QuadMatPoly p = random_elliptic(rng);
        const SpectralFactorization f = right_divisor(p);
        const Mat2c t = Cx(-1) * f.x_div;
        const Mat2c l11i = inverse(Mat2c::from_real(p.lam11));
        const Mat2c quad =
            t * t - (l11i * Mat2c::from_real(p.lam12)) * t + l11i * Mat2c::from_real(p.lam22);
        const double tn = norm_fro(t);
        CHECK(norm_fro(quad) <= 1e-9 * (1.0 + tn * tn));
    }
}
