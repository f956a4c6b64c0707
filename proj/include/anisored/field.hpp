#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <vector>

#include "anisored/algebra.hpp"
#include "anisored/errors.hpp"

namespace anisored {

/// Uniform square grid centered at `center`, (n x n) nodes, n odd so the
/// center point is a node.
struct Grid2 {
    Vec2 center{};
    double half_width = 0.5;
    int n = 9;

    Grid2() = default;
    Grid2(Vec2 c, double hw, int nodes);

    double h() const { return 2.0 * half_width / static_cast<double>(n - 1); }
    int size() const { return n * n; }
    int index(int i1, int i2) const { return i2 * n + i1; }
    Vec2 node(int i1, int i2) const {
        const int m = (n - 1) / 2;
        return {center.x1 + (i1 - m) * h(), center.x2 + (i2 - m) * h()};
    }
    bool same_as(const Grid2& o) const;
};

/// Bivariate polynomial with complex coefficients; coeff(i,j) multiplies
/// x1^i x2^j. Dense storage, exact arithmetic up to rounding.
class Poly2c {
public:
    Poly2c() : nx_(1), ny_(1), c_(1, Cx(0)) {}
    static Poly2c constant(Cx v);
    static Poly2c monomial(int i, int j, Cx coeff);

    int deg1() const { return nx_ - 1; }
    int deg2() const { return ny_ - 1; }
    Cx coeff(int i, int j) const;
    Cx eval(Vec2 x) const;
    Poly2c derivative(int axis) const;
    double max_abs_coeff() const;
    bool is_constant() const { return nx_ == 1 && ny_ == 1; }

    friend Poly2c operator+(const Poly2c& a, const Poly2c& b);
    friend Poly2c operator-(const Poly2c& a, const Poly2c& b);
    friend Poly2c operator*(const Poly2c& a, const Poly2c& b);
    friend Poly2c operator*(Cx s, const Poly2c& a);
    Poly2c conjugated() const;

    struct Term {
        int i, j;
        Cx coeff;
    };
    std::vector<Term> terms() const; // nonzero coefficients

private:
    Poly2c(int nx, int ny) : nx_(nx), ny_(ny), c_(static_cast<size_t>(nx * ny), Cx(0)) {}
    Cx& at(int i, int j) { return c_[static_cast<size_t>(j * nx_ + i)]; }
    Cx get(int i, int j) const { return c_[static_cast<size_t>(j * nx_ + i)]; }

    int nx_, ny_;
    std::vector<Cx> c_;
};

enum class FieldMode { constant, poly, grid };

const char* field_mode_name(FieldMode m);

/// Complex scalar field over R^2 in one of three representations.
/// Arithmetic promotes constant -> poly -> grid; derivatives are exact in
/// constant/poly mode and 2nd-order finite differences in grid mode.
class Scalar2Field {
public:
    Scalar2Field() : mode_(FieldMode::constant), k_(0) {}

    static Scalar2Field constant(Cx v);
    static Scalar2Field poly(Poly2c p);
    static Scalar2Field on_grid(const Grid2& g, std::vector<Cx> values);

    FieldMode mode() const { return mode_; }
    const Grid2& grid() const;
    const Poly2c& polynomial() const;
    Cx constant_value() const;
    const std::vector<Cx>& grid_values() const;

    /// Value at a point. Grid mode requires x to coincide with a node.
    Cx at(Vec2 x) const;
    Cx at_node(int i1, int i2) const; // grid-mode fast path; other modes evaluate

    /// order=1 first derivative, order=2 direct second derivative.
    Scalar2Field derivative(int axis, int order = 1) const;

    Scalar2Field conjugated() const;

    /// Sample onto a grid (identity for matching grid mode).
    std::vector<Cx> sample(const Grid2& g) const;

    friend Scalar2Field operator+(const Scalar2Field& a, const Scalar2Field& b);
    friend Scalar2Field operator-(const Scalar2Field& a, const Scalar2Field& b);
    friend Scalar2Field operator*(const Scalar2Field& a, const Scalar2Field& b);
    friend Scalar2Field operator*(Cx s, const Scalar2Field& a);
    Scalar2Field operator-() const;

private:
    FieldMode mode_;
    Cx k_{};
    Poly2c p_;
    Grid2 g_{};
    std::shared_ptr<const std::vector<Cx>> v_;
};

/// Small fixed-shape matrix of scalar fields.
template <int R, int C>
struct FieldMat {
    std::array<Scalar2Field, static_cast<size_t>(R * C)> e{};

    Scalar2Field& operator()(int r, int c) { return e[static_cast<size_t>(C * r + c)]; }
    const Scalar2Field& operator()(int r, int c) const { return e[static_cast<size_t>(C * r + c)]; }

    static FieldMat zero() { return FieldMat{}; }

    static FieldMat constant_identity() {
        static_assert(R == C);
        FieldMat m;
        for (int i = 0; i < R; ++i) m(i, i) = Scalar2Field::constant(Cx(1));
        return m;
    }

    FieldMat derivative(int axis, int order = 1) const {
        FieldMat d;
        for (size_t i = 0; i < e.size(); ++i) d.e[i] = e[i].derivative(axis, order);
        return d;
    }

    FieldMat conjugated() const {
        FieldMat d;
        for (size_t i = 0; i < e.size(); ++i) d.e[i] = e[i].conjugated();
        return d;
    }

    FieldMat operator-() const {
        FieldMat d;
        for (size_t i = 0; i < e.size(); ++i) d.e[i] = -e[i];
        return d;
    }
};

using Mat2cField = FieldMat<2, 2>;
using Mat4cField = FieldMat<4, 4>;
using Vec2cField = FieldMat<2, 1>;
using Vec4cField = FieldMat<4, 1>;

template <int R, int C>
FieldMat<R, C> operator+(const FieldMat<R, C>& a, const FieldMat<R, C>& b) {
    FieldMat<R, C> r;
    for (size_t i = 0; i < a.e.size(); ++i) r.e[i] = a.e[i] + b.e[i];
    return r;
}

template <int R, int C>
FieldMat<R, C> operator-(const FieldMat<R, C>& a, const FieldMat<R, C>& b) {
    FieldMat<R, C> r;
    for (size_t i = 0; i < a.e.size(); ++i) r.e[i] = a.e[i] - b.e[i];
    return r;
}

template <int R, int K, int C>
FieldMat<R, C> operator*(const FieldMat<R, K>& a, const FieldMat<K, C>& b) {
    FieldMat<R, C> r;
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < C; ++j) {
            Scalar2Field s = a(i, 0) * b(0, j);
            for (int k = 1; k < K; ++k) s = s + a(i, k) * b(k, j);
            r(i, j) = s;
        }
    return r;
}

template <int R, int C>
FieldMat<R, C> operator*(const Scalar2Field& s, const FieldMat<R, C>& a) {
    FieldMat<R, C> r;
    for (size_t i = 0; i < a.e.size(); ++i) r.e[i] = s * a.e[i];
    return r;
}

template <int R, int C>
FieldMat<R, C> operator*(Cx s, const FieldMat<R, C>& a) {
    FieldMat<R, C> r;
    for (size_t i = 0; i < a.e.size(); ++i) r.e[i] = s * a.e[i];
    return r;
}

Mat2c eval_at(const Mat2cField& f, Vec2 x);
Mat4c eval_at(const Mat4cField& f, Vec2 x);
Vec2c eval_at(const Vec2cField& f, Vec2 x);
Vec4c eval_at(const Vec4cField& f, Vec2 x);

Mat2cField to_field(const Mat2c& m);
Mat2cField to_field(const Mat2r& m);
Mat4cField to_field(const Mat4c& m);

/// Pointwise 2x2 inverse. Constant/grid modes invert pointwise; poly mode is
/// legal only for degree-0 entries.
Mat2cField inverse_field(const Mat2cField& m);

/// Pointwise transpose-of-cofactor: [[m22,-m12],[-m21,m11]].
Mat2cField cof_transpose_field(const Mat2cField& m);

Mat4cField block_diag(const Mat2cField& a, const Mat2cField& d);
Mat4cField block2x2(const Mat2cField& a, const Mat2cField& b, const Mat2cField& c,
                    const Mat2cField& d);
Vec4cField vstack(const Vec2cField& top, const Vec2cField& bottom);
Vec2cField upper_half(const Vec4cField& w);
Vec2cField lower_half(const Vec4cField& w);

/// Evaluation points for residual norms: grid nodes when any participating
/// field lives on a grid, otherwise a lattice over the domain box.
std::vector<Vec2> lattice_points(Vec2 center, double half_width, int per_axis);
std::vector<Vec2> grid_points(const Grid2& g);

template <int R, int C>
double max_norm_at(const FieldMat<R, C>& f, const std::vector<Vec2>& pts) {
    double worst = 0.0;
    for (const Vec2& x : pts) {
        double s = 0.0;
        for (const auto& entry : f.e) s += std::norm(entry.at(x));
        worst = std::max(worst, std::sqrt(s));
    }
    return worst;
}

/// Common mode of a collection of fields (the strongest one present).
template <int R, int C>
FieldMode mode_of(const FieldMat<R, C>& f) {
    FieldMode m = FieldMode::constant;
    for (const auto& entry : f.e) {
        if (entry.mode() == FieldMode::grid) return FieldMode::grid;
        if (entry.mode() == FieldMode::poly) m = FieldMode::poly;
    }
    return m;
}

/// The coefficient fields of the second-order system: the three leading
/// matrices, the two first-order matrices and the zero-order matrix.
struct SystemFields {
    Mat2cField lam11, lam12, lam22;
    Mat2cField b1, b2, c0;

    FieldMode mode() const;
    /// Sample every entry onto `g`, yielding an all-grid system.
    SystemFields sampled(const Grid2& g) const;
};

} // namespace anisored
