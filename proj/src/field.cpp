#include "anisored/field.hpp"

#include <algorithm>
#include <cmath>

namespace anisored {

Grid2::Grid2(Vec2 c, double hw, int nodes) : center(c), half_width(hw), n(nodes) {
    if (n < 9) fail(Err::grid_too_coarse, "grid needs at least 9 nodes per axis");
    if (n % 2 == 0) fail(Err::validation_error, "grid node count must be odd");
    if (!(half_width > 0.0) || !std::isfinite(half_width))
        fail(Err::validation_error, "grid half_width must be positive and finite");
}

bool Grid2::same_as(const Grid2& o) const {
    return n == o.n && half_width == o.half_width && center.x1 == o.center.x1 &&
           center.x2 == o.center.x2;
}

const char* field_mode_name(FieldMode m) {
    switch (m) {
        case FieldMode::constant: return "constant";
        case FieldMode::poly: return "poly";
        case FieldMode::grid: return "grid";
    }
    return "unknown";
}

// ---------------------------------------------------------------- Poly2c

Poly2c Poly2c::constant(Cx v) {
    Poly2c p;
    p.c_[0] = v;
    return p;
}

Poly2c Poly2c::monomial(int i, int j, Cx coeff) {
    if (i < 0 || j < 0) fail(Err::validation_error, "monomial exponents must be nonnegative");
    Poly2c p(i + 1, j + 1);
    p.at(i, j) = coeff;
    return p;
}

Cx Poly2c::coeff(int i, int j) const {
    if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return Cx(0);
    return get(i, j);
}

Cx Poly2c::eval(Vec2 x) const {
    // Horner in x2 of Horner-in-x1 row polynomials
    Cx acc(0);
    for (int j = ny_ - 1; j >= 0; --j) {
        Cx row(0);
        for (int i = nx_ - 1; i >= 0; --i) row = row * x.x1 + get(i, j);
        acc = acc * x.x2 + row;
    }
    return acc;
}

Poly2c Poly2c::derivative(int axis) const {
    if (axis != 1 && axis != 2) fail(Err::validation_error, "axis must be 1 or 2");
    if (axis == 1) {
        if (nx_ == 1) return Poly2c();
        Poly2c d(nx_ - 1, ny_);
        for (int j = 0; j < ny_; ++j)
            for (int i = 1; i < nx_; ++i) d.at(i - 1, j) = static_cast<double>(i) * get(i, j);
        return d;
    }
    if (ny_ == 1) return Poly2c();
    Poly2c d(nx_, ny_ - 1);
    for (int j = 1; j < ny_; ++j)
        for (int i = 0; i < nx_; ++i) d.at(i, j - 1) = static_cast<double>(j) * get(i, j);
    return d;
}

double Poly2c::max_abs_coeff() const {
    double s = 0.0;
    for (Cx z : c_) s = std::max(s, std::abs(z));
    return s;
}

Poly2c operator+(const Poly2c& a, const Poly2c& b) {
    Poly2c r(std::max(a.nx_, b.nx_), std::max(a.ny_, b.ny_));
    for (int j = 0; j < r.ny_; ++j)
        for (int i = 0; i < r.nx_; ++i) r.at(i, j) = a.coeff(i, j) + b.coeff(i, j);
    return r;
}

Poly2c operator-(const Poly2c& a, const Poly2c& b) {
    Poly2c r(std::max(a.nx_, b.nx_), std::max(a.ny_, b.ny_));
    for (int j = 0; j < r.ny_; ++j)
        for (int i = 0; i < r.nx_; ++i) r.at(i, j) = a.coeff(i, j) - b.coeff(i, j);
    return r;
}

Poly2c operator*(const Poly2c& a, const Poly2c& b) {
    Poly2c r(a.nx_ + b.nx_ - 1, a.ny_ + b.ny_ - 1);
    for (int ja = 0; ja < a.ny_; ++ja)
        for (int ia = 0; ia < a.nx_; ++ia) {
            const Cx ca = a.get(ia, ja);
            if (ca == Cx(0)) continue;
            for (int jb = 0; jb < b.ny_; ++jb)
                for (int ib = 0; ib < b.nx_; ++ib) r.at(ia + ib, ja + jb) += ca * b.get(ib, jb);
        }
    return r;
}

Poly2c operator*(Cx s, const Poly2c& a) {
    Poly2c r = a;
    for (Cx& z : r.c_) z *= s;
    return r;
}

Poly2c Poly2c::conjugated() const {
    Poly2c r = *this;
    for (Cx& z : r.c_) z = std::conj(z);
    return r;
}

std::vector<Poly2c::Term> Poly2c::terms() const {
    std::vector<Term> out;
    for (int j = 0; j < ny_; ++j)
        for (int i = 0; i < nx_; ++i)
            if (get(i, j) != Cx(0)) out.push_back({i, j, get(i, j)});
    return out;
}

// ---------------------------------------------------------- Scalar2Field

Scalar2Field Scalar2Field::constant(Cx v) {
    Scalar2Field f;
    f.mode_ = FieldMode::constant;
    f.k_ = v;
    return f;
}

Scalar2Field Scalar2Field::poly(Poly2c p) {
    if (p.is_constant()) return constant(p.coeff(0, 0));
    Scalar2Field f;
    f.mode_ = FieldMode::poly;
    f.p_ = std::move(p);
    return f;
}

Scalar2Field Scalar2Field::on_grid(const Grid2& g, std::vector<Cx> values) {
    if (static_cast<int>(values.size()) != g.size())
        fail(Err::validation_error, "grid value count does not match the grid");
    Scalar2Field f;
    f.mode_ = FieldMode::grid;
    f.g_ = g;
    f.v_ = std::make_shared<const std::vector<Cx>>(std::move(values));
    return f;
}

const Grid2& Scalar2Field::grid() const {
    if (mode_ != FieldMode::grid) fail(Err::internal_error, "field has no grid");
    return g_;
}

const Poly2c& Scalar2Field::polynomial() const {
    if (mode_ != FieldMode::poly) fail(Err::internal_error, "field is not polynomial");
    return p_;
}

Cx Scalar2Field::constant_value() const {
    if (mode_ != FieldMode::constant) fail(Err::internal_error, "field is not constant");
    return k_;
}

const std::vector<Cx>& Scalar2Field::grid_values() const {
    if (mode_ != FieldMode::grid) fail(Err::internal_error, "field has no grid values");
    return *v_;
}

Cx Scalar2Field::at(Vec2 x) const {
    switch (mode_) {
        case FieldMode::constant: return k_;
        case FieldMode::poly: return p_.eval(x);
        case FieldMode::grid: {
            const double h = g_.h();
            const int m = (g_.n - 1) / 2;
            const double f1 = (x.x1 - g_.center.x1) / h + m;
            const double f2 = (x.x2 - g_.center.x2) / h + m;
            const int i1 = static_cast<int>(std::lround(f1));
            const int i2 = static_cast<int>(std::lround(f2));
            if (i1 < 0 || i1 >= g_.n || i2 < 0 || i2 >= g_.n ||
                std::abs(f1 - i1) > 1e-6 || std::abs(f2 - i2) > 1e-6)
                fail(Err::validation_error, "grid field evaluated off its nodes");
            return (*v_)[static_cast<size_t>(g_.index(i1, i2))];
        }
    }
    return Cx(0);
}

Cx Scalar2Field::at_node(int i1, int i2) const {
    if (mode_ == FieldMode::grid) return (*v_)[static_cast<size_t>(g_.index(i1, i2))];
    fail(Err::internal_error, "at_node on a non-grid field");
}

std::vector<Cx> Scalar2Field::sample(const Grid2& g) const {
    if (mode_ == FieldMode::grid) {
        if (!g_.same_as(g)) fail(Err::validation_error, "grid mismatch while sampling");
        return *v_;
    }
    std::vector<Cx> out(static_cast<size_t>(g.size()));
    for (int i2 = 0; i2 < g.n; ++i2)
        for (int i1 = 0; i1 < g.n; ++i1)
            out[static_cast<size_t>(g.index(i1, i2))] = at(g.node(i1, i2));
    return out;
}

namespace {

// 2nd-order stencils; one-sided variants at the borders
std::vector<Cx> diff_grid(const Grid2& g, const std::vector<Cx>& v, int axis, int order) {
    const int n = g.n;
    const double h = g.h();
    std::vector<Cx> out(v.size());
    const auto idx = [&](int i, int j) {
        return static_cast<size_t>(axis == 1 ? g.index(i, j) : g.index(j, i));
    };
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            Cx d;
            if (order == 1) {
                if (i == 0)
                    d = (-3.0 * v[idx(0, j)] + 4.0 * v[idx(1, j)] - v[idx(2, j)]) / (2.0 * h);
                else if (i == n - 1)
                    d = (3.0 * v[idx(n - 1, j)] - 4.0 * v[idx(n - 2, j)] + v[idx(n - 3, j)]) /
                        (2.0 * h);
                else
                    d = (v[idx(i + 1, j)] - v[idx(i - 1, j)]) / (2.0 * h);
            } else {
                if (i == 0)
                    d = (2.0 * v[idx(0, j)] - 5.0 * v[idx(1, j)] + 4.0 * v[idx(2, j)] -
                         v[idx(3, j)]) /
                        (h * h);
                else if (i == n - 1)
                    d = (2.0 * v[idx(n - 1, j)] - 5.0 * v[idx(n - 2, j)] + 4.0 * v[idx(n - 3, j)] -
                         v[idx(n - 4, j)]) /
                        (h * h);
                else
                    d = (v[idx(i + 1, j)] - 2.0 * v[idx(i, j)] + v[idx(i - 1, j)]) / (h * h);
            }
            out[idx(i, j)] = d;
        }
    }
    return out;
}

} // namespace

Scalar2Field Scalar2Field::derivative(int axis, int order) const {
    if (axis != 1 && axis != 2) fail(Err::validation_error, "axis must be 1 or 2");
    if (order != 1 && order != 2) fail(Err::validation_error, "order must be 1 or 2");
    switch (mode_) {
        case FieldMode::constant: return constant(Cx(0));
        case FieldMode::poly: {
            Poly2c d = p_.derivative(axis);
            if (order == 2) d = d.derivative(axis);
            return poly(std::move(d));
        }
        case FieldMode::grid: return on_grid(g_, diff_grid(g_, *v_, axis, order));
    }
    return {};
}

Scalar2Field Scalar2Field::conjugated() const {
    switch (mode_) {
        case FieldMode::constant: return constant(std::conj(k_));
        case FieldMode::poly: return poly(p_.conjugated());
        case FieldMode::grid: {
            std::vector<Cx> out = *v_;
            for (Cx& z : out) z = std::conj(z);
            return on_grid(g_, std::move(out));
        }
    }
    return {};
}

namespace {

enum class BinOp { add, sub, mul };

Cx apply(BinOp op, Cx a, Cx b) {
    switch (op) {
        case BinOp::add: return a + b;
        case BinOp::sub: return a - b;
        case BinOp::mul: return a * b;
    }
    return Cx(0);
}

Scalar2Field combine(const Scalar2Field& a, const Scalar2Field& b, BinOp op) {
    const FieldMode ma = a.mode(), mb = b.mode();
    if (ma == FieldMode::grid || mb == FieldMode::grid) {
        const Grid2& g = (ma == FieldMode::grid) ? a.grid() : b.grid();
        if (ma == FieldMode::grid && mb == FieldMode::grid && !a.grid().same_as(b.grid()))
            fail(Err::validation_error, "field arithmetic across mismatched grids");
        std::vector<Cx> va = a.sample(g);
        const std::vector<Cx> vb = b.sample(g);
        for (size_t i = 0; i < va.size(); ++i) va[i] = apply(op, va[i], vb[i]);
        return Scalar2Field::on_grid(g, std::move(va));
    }
    if (ma == FieldMode::poly || mb == FieldMode::poly) {
        const Poly2c pa =
            (ma == FieldMode::poly) ? a.polynomial() : Poly2c::constant(a.constant_value());
        const Poly2c pb =
            (mb == FieldMode::poly) ? b.polynomial() : Poly2c::constant(b.constant_value());
        switch (op) {
            case BinOp::add: return Scalar2Field::poly(pa + pb);
            case BinOp::sub: return Scalar2Field::poly(pa - pb);
            case BinOp::mul: return Scalar2Field::poly(pa * pb);
        }
    }
    return Scalar2Field::constant(apply(op, a.constant_value(), b.constant_value()));
}

} // namespace

Scalar2Field operator+(const Scalar2Field& a, const Scalar2Field& b) {
    return combine(a, b, BinOp::add);
}

Scalar2Field operator-(const Scalar2Field& a, const Scalar2Field& b) {
    return combine(a, b, BinOp::sub);
}

Scalar2Field operator*(const Scalar2Field& a, const Scalar2Field& b) {
    return combine(a, b, BinOp::mul);
}

Scalar2Field operator*(Cx s, const Scalar2Field& a) {
    return combine(Scalar2Field::constant(s), a, BinOp::mul);
}

Scalar2Field Scalar2Field::operator-() const { return Cx(-1) * (*this); }

// ------------------------------------------------------------- helpers

Mat2c eval_at(const Mat2cField& f, Vec2 x) {
    Mat2c m;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) m(r, c) = f(r, c).at(x);
    return m;
}

Mat4c eval_at(const Mat4cField& f, Vec2 x) {
    Mat4c m;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) m(r, c) = f(r, c).at(x);
    return m;
}

Vec2c eval_at(const Vec2cField& f, Vec2 x) {
    Vec2c v;
    v[0] = f(0, 0).at(x);
    v[1] = f(1, 0).at(x);
    return v;
}

Vec4c eval_at(const Vec4cField& f, Vec2 x) {
    Vec4c v;
    for (int r = 0; r < 4; ++r) v[r] = f(r, 0).at(x);
    return v;
}

Mat2cField to_field(const Mat2c& m) {
    Mat2cField f;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) f(r, c) = Scalar2Field::constant(m(r, c));
    return f;
}

Mat2cField to_field(const Mat2r& m) { return to_field(Mat2c::from_real(m)); }

Mat4cField to_field(const Mat4c& m) {
    Mat4cField f;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) f(r, c) = Scalar2Field::constant(m(r, c));
    return f;
}

Mat2cField inverse_field(const Mat2cField& m) {
    const FieldMode mode = mode_of(m);
    if (mode == FieldMode::constant) {
        Mat2c k;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) k(r, c) = m(r, c).constant_value();
        return to_field(inverse(k));
    }
    if (mode == FieldMode::poly)
        fail(Err::validation_error, "pointwise inverse of a non-constant polynomial field");
    // locate the common grid
    const Grid2* g = nullptr;
    for (const auto& entry : m.e)
        if (entry.mode() == FieldMode::grid) {
            g = &entry.grid();
            break;
        }
    std::array<std::vector<Cx>, 4> vals;
    for (size_t i = 0; i < 4; ++i) vals[i] = m.e[i].sample(*g);
    std::array<std::vector<Cx>, 4> out;
    for (auto& o : out) o.resize(vals[0].size());
    for (size_t k = 0; k < vals[0].size(); ++k) {
        const Mat2c a{{vals[0][k], vals[1][k], vals[2][k], vals[3][k]}};
        const Mat2c inv = inverse(a);
        for (size_t i = 0; i < 4; ++i) out[i][k] = inv.e[i];
    }
    Mat2cField f;
    for (size_t i = 0; i < 4; ++i) f.e[i] = Scalar2Field::on_grid(*g, std::move(out[i]));
    return f;
}

Mat2cField cof_transpose_field(const Mat2cField& m) {
    Mat2cField f;
    f(0, 0) = m(1, 1);
    f(0, 1) = -m(0, 1);
    f(1, 0) = -m(1, 0);
    f(1, 1) = m(0, 0);
    return f;
}

Mat4cField block_diag(const Mat2cField& a, const Mat2cField& d) {
    Mat4cField f;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
            f(r, c) = a(r, c);
            f(r + 2, c + 2) = d(r, c);
        }
    return f;
}

Mat4cField block2x2(const Mat2cField& a, const Mat2cField& b, const Mat2cField& c,
                    const Mat2cField& d) {
    Mat4cField f;
    for (int r = 0; r < 2; ++r)
        for (int col = 0; col < 2; ++col) {
            f(r, col) = a(r, col);
            f(r, col + 2) = b(r, col);
            f(r + 2, col) = c(r, col);
            f(r + 2, col + 2) = d(r, col);
        }
    return f;
}

Vec4cField vstack(const Vec2cField& top, const Vec2cField& bottom) {
    Vec4cField f;
    f(0, 0) = top(0, 0);
    f(1, 0) = top(1, 0);
    f(2, 0) = bottom(0, 0);
    f(3, 0) = bottom(1, 0);
    return f;
}

Vec2cField upper_half(const Vec4cField& w) {
    Vec2cField f;
    f(0, 0) = w(0, 0);
    f(1, 0) = w(1, 0);
    return f;
}

Vec2cField lower_half(const Vec4cField& w) {
    Vec2cField f;
    f(0, 0) = w(2, 0);
    f(1, 0) = w(3, 0);
    return f;
}

std::vector<Vec2> lattice_points(Vec2 center, double half_width, int per_axis) {
    std::vector<Vec2> pts;
    pts.reserve(static_cast<size_t>(per_axis) * static_cast<size_t>(per_axis));
    for (int j = 0; j < per_axis; ++j)
        for (int i = 0; i < per_axis; ++i) {
            const double t1 = (per_axis == 1) ? 0.0 : -1.0 + 2.0 * i / (per_axis - 1);
            const double t2 = (per_axis == 1) ? 0.0 : -1.0 + 2.0 * j / (per_axis - 1);
            pts.push_back({center.x1 + t1 * half_width, center.x2 + t2 * half_width});
        }
    return pts;
}

std::vector<Vec2> grid_points(const Grid2& g) {
    std::vector<Vec2> pts;
    pts.reserve(static_cast<size_t>(g.size()));
    for (int i2 = 0; i2 < g.n; ++i2)
        for (int i1 = 0; i1 < g.n; ++i1) pts.push_back(g.node(i1, i2));
    return pts;
}

FieldMode SystemFields::mode() const {
    FieldMode m = FieldMode::constant;
    for (const Mat2cField* f : {&lam11, &lam12, &lam22, &b1, &b2, &c0}) {
        const FieldMode fm = mode_of(*f);
        if (fm == FieldMode::grid) return FieldMode::grid;
        if (fm == FieldMode::poly) m = FieldMode::poly;
    }
    return m;
}

SystemFields SystemFields::sampled(const Grid2& g) const {
    SystemFields out;
    const auto conv = [&](const Mat2cField& f) {
        Mat2cField r;
        for (size_t i = 0; i < 4; ++i) r.e[i] = Scalar2Field::on_grid(g, f.e[i].sample(g));
        return r;
    };
    out.lam11 = conv(lam11);
    out.lam12 = conv(lam12);
    out.lam22 = conv(lam22);
    out.b1 = conv(b1);
    out.b2 = conv(b2);
    out.c0 = conv(c0);
    return out;
}

} // namespace anisored
