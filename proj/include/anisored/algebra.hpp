#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <utility>

#include "anisored/errors.hpp"

namespace anisored {

using Cx = std::complex<double>;

inline bool is_finite(Cx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// Lexicographic order by (re, im); the tie-break convention every
/// eigenvalue/root list in the library is sorted with.
inline bool lex_less(Cx a, Cx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

struct Vec2 {
    double x1 = 0.0, x2 = 0.0;
};

struct Vec2c {
    std::array<Cx, 2> e{};
    Cx& operator[](int i) { return e[static_cast<size_t>(i)]; }
    Cx operator[](int i) const { return e[static_cast<size_t>(i)]; }
};

struct Vec4c {
    std::array<Cx, 4> e{};
    Cx& operator[](int i) { return e[static_cast<size_t>(i)]; }
    Cx operator[](int i) const { return e[static_cast<size_t>(i)]; }
};

/// 2x2 real matrix, row-major.
struct Mat2r {
    std::array<double, 4> e{};
    double& operator()(int r, int c) { return e[static_cast<size_t>(2 * r + c)]; }
    double operator()(int r, int c) const { return e[static_cast<size_t>(2 * r + c)]; }
    static Mat2r identity() { return Mat2r{{1.0, 0.0, 0.0, 1.0}}; }
};

/// 2x2 complex matrix, row-major.
struct Mat2c {
    std::array<Cx, 4> e{};
    Cx& operator()(int r, int c) { return e[static_cast<size_t>(2 * r + c)]; }
    Cx operator()(int r, int c) const { return e[static_cast<size_t>(2 * r + c)]; }
    static Mat2c identity() { return Mat2c{{Cx(1), Cx(0), Cx(0), Cx(1)}}; }
    static Mat2c from_real(const Mat2r& m) {
        return Mat2c{{Cx(m.e[0]), Cx(m.e[1]), Cx(m.e[2]), Cx(m.e[3])}};
    }
};

Mat2c operator+(const Mat2c& a, const Mat2c& b);
Mat2c operator-(const Mat2c& a, const Mat2c& b);
Mat2c operator*(const Mat2c& a, const Mat2c& b);
Mat2c operator*(Cx s, const Mat2c& a);
Vec2c operator*(const Mat2c& a, const Vec2c& v);

Cx det(const Mat2c& m);
Cx trace(const Mat2c& m);
/// Transpose of the cofactor matrix: [[m22,-m12],[-m21,m11]].
Mat2c cof_transpose(const Mat2c& m);
/// Conjugate transpose.
Mat2c adjoint(const Mat2c& m);
Mat2c inverse(const Mat2c& m); // throws Err::singular_matrix
/// Both roots of the characteristic quadratic, sorted by (re, im).
std::pair<Cx, Cx> eigenvalues2(const Mat2c& m);

double norm_fro(const Mat2c& m);
double norm2(const Vec2c& v);
double norm2(const Vec4c& v);

struct Mat2cOps {
    Cx det;
    Cx trace;
    Mat2c inverse;
    Mat2c cof_transpose;
    Mat2c adjoint;
    std::pair<Cx, Cx> eigenvalues;
};

/// One-call bundle of the 2x2 derived quantities. Requires an invertible,
/// finite matrix; use the granular helpers when singular input is legal.
Mat2cOps mat_ops(const Mat2c& m);

/// Quartic with complex coefficients c0 + c1*z + ... + c4*z^4.
struct Poly4c {
    std::array<Cx, 5> c{};
    Cx eval(Cx z) const;
    Cx eval_derivative(Cx z) const;
    double coeff_scale() const; // max |c_k|
};

/// All four roots (with multiplicity), sorted by (re, im).
/// Aberth-Ehrlich simultaneous iteration from a seeded perturbed-circle
/// start, then a guarded Newton polish. Deterministic for fixed seed.
std::array<Cx, 4> quartic_roots(const Poly4c& p);

/// 4x4 complex matrix, row-major.
struct Mat4c {
    std::array<Cx, 16> e{};
    Cx& operator()(int r, int c) { return e[static_cast<size_t>(4 * r + c)]; }
    Cx operator()(int r, int c) const { return e[static_cast<size_t>(4 * r + c)]; }
    static Mat4c identity();
};

double norm_fro(const Mat4c& m);
Mat4c operator+(const Mat4c& a, const Mat4c& b);
Mat4c operator-(const Mat4c& a, const Mat4c& b);
Vec4c operator*(const Mat4c& a, const Vec4c& v);

/// Gaussian elimination with partial pivoting; throws Err::singular_system
/// when a pivot falls below 1e-13 * ||a||_F.
Vec4c lin_solve4(const Mat4c& a, const Vec4c& b);

/// Root-solver seed; ANISORED_SEED overrides the default 0x5EED. Read once
/// per process and immutable afterwards.
std::uint64_t root_solver_seed();

} // namespace anisored
