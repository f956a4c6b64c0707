#pragma once

#include <array>
#include <utility>
#include <vector>

#include "anisored/algebra.hpp"

namespace anisored {

/// The matrix quadratic L11*z^2 + L12*z + L22 built from real symmetric
/// coefficient blocks, with L11 invertible.
struct QuadMatPoly {
    Mat2r lam11, lam12, lam22;

    /// Validates symmetry of all three blocks and invertibility of lam11.
    static QuadMatPoly make(const Mat2r& l11, const Mat2r& l12, const Mat2r& l22);
};

Mat2c eval_p(const QuadMatPoly& p, Cx lam);

/// Coefficients of det P(z) as a real-coefficient quartic; self-checked
/// against pointwise determinants on a small sample.
Poly4c det_quartic(const QuadMatPoly& p);

/// Characteristic roots split by half-plane. `separation` is the minimum
/// pairwise distance over all four roots, `im_margin` the smallest |Im|.
struct SpectralSplit {
    std::array<Cx, 2> upper;
    std::array<Cx, 2> lower;
    double separation = 0.0;
    double im_margin = 0.0;
};

/// Throws Err::real_root_detected when a root sits on (or hugs) the real
/// axis, i.e. the ellipticity hypothesis fails.
SpectralSplit split_spectrum(const QuadMatPoly& p);

/// Circle used for the moment quadrature.
struct Contour {
    Cx center;
    double radius = 0.0;
};

/// Circle around the upper-half-plane roots, all lower roots and the real
/// axis outside with >= 10% radius margin. Throws
/// Err::contour_construction_failed when no such circle exists.
Contour choose_contour(const SpectralSplit& split);

/// Quadrature cycle enclosing the upper spectrum: the single circle above
/// when it exists, otherwise one disjoint circle per upper root (the upper
/// pair can sit too wide and too low for any one circle to clear the real
/// axis).
std::vector<Contour> choose_contours(const SpectralSplit& split);

/// Trapezoidal contour quadrature of P(z)^-1 and z*P(z)^-1 with 512 nodes.
std::pair<Mat2c, Mat2c> contour_moments(const QuadMatPoly& p, const SpectralSplit& split);
std::pair<Mat2c, Mat2c> contour_moments_on(const QuadMatPoly& p, const Contour& c, int nodes);

/// Residue-sum evaluation of the same moments; valid only when the upper
/// roots are simple. Used as an independent cross-check.
std::pair<Mat2c, Mat2c> residue_moments(const QuadMatPoly& p, const SpectralSplit& split);

struct SpectralFactorization {
    Mat2c x_div;
    Mat2c moment0;
    Mat2c moment1;
    Cx contour_center;
    double contour_radius = 0.0;
    double residual = 0.0;
};

/// The right divisor X = moment1 * moment0^-1 with Spec(X) in the upper
/// half-plane, so that P(z) = (z - X*) L11 (z - X).
SpectralFactorization right_divisor(const QuadMatPoly& p);

/// Max over the fixed sample set {0,+-1,+-2,i} of
/// ||P(z) - (z - X*) L11 (z - X)||_F / (1 + ||P(z)||_F).
double verify_factorization(const QuadMatPoly& p, const SpectralFactorization& f);

struct SimpleCheck {
    bool simple = false;
    double separation = 0.0;
};

/// Distinct-roots test on the characteristic quartic.
SimpleCheck is_simple(const QuadMatPoly& p, double sep_tol = 1e-8);

} // namespace anisored
