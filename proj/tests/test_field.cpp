#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "anisored/field.hpp"

using namespace anisored;

TEST_CASE("grid construction invariants") {
    CHECK_NOTHROW(Grid2({}, 0.5, 9));
    CHECK_THROWS_WITH_AS(Grid2({}, 0.5, 7), doctest::Contains("GridTooCoarse"), Error);
    CHECK_THROWS_WITH_AS(Grid2({}, 0.5, 10), doctest::Contains("ValidationError"), Error);
    CHECK_THROWS_AS(Grid2({}, -1.0, 9), Error);

    const Grid2 g({}, 0.5, 9);
    CHECK(g.h() == doctest::Approx(0.125));
    const Vec2 center_node = g.node(4, 4);
    CHECK(center_node.x1 == 0.0);
    CHECK(center_node.x2 == 0.0);
}

TEST_CASE("bivariate polynomial arithmetic and differentiation") {
    // p = 2 x1^2 + 3 x1 x2 - x2
    const Poly2c p = Poly2c::monomial(2, 0, Cx(2)) + Poly2c::monomial(1, 1, Cx(3)) +
                     Poly2c::monomial(0, 1, Cx(-1));
    CHECK(p.eval({1.0, 2.0}) == Cx(2 + 6 - 2));

    const Poly2c d1 = p.derivative(1); // 4 x1 + 3 x2
    CHECK(d1.eval({0.5, 1.0}) == Cx(5.0));
    const Poly2c d2 = p.derivative(2); // 3 x1 - 1
    CHECK(d2.eval({2.0, 7.0}) == Cx(5.0));

    const Poly2c q = Poly2c::monomial(1, 0, Cx(1)) + Poly2c::constant(Cx(1));
    const Poly2c prod = p * q;
    const Vec2 x{0.3, -0.7};
    CHECK(std::abs(prod.eval(x) - p.eval(x) * q.eval(x)) < 1e-15);
}

TEST_CASE("field promotion rules") {
    const Scalar2Field k = Scalar2Field::constant(Cx(2));
    const Scalar2Field p = Scalar2Field::poly(Poly2c::monomial(1, 0, Cx(1)));
    const Grid2 g({}, 1.0, 9);
    std::vector<Cx> vals(static_cast<size_t>(g.size()), Cx(3));
    const Scalar2Field f = Scalar2Field::on_grid(g, vals);

    CHECK((k + k).mode() == FieldMode::constant);
    CHECK((k * p).mode() == FieldMode::poly);
    CHECK((p + f).mode() == FieldMode::grid);

    const Scalar2Field sum = p + f; // x1 + 3 sampled
    const Vec2 node = g.node(6, 3);
    CHECK(std::abs(sum.at(node) - Cx(node.x1 + 3.0)) < 1e-15);
}

TEST_CASE("grid arithmetic rejects mismatched grids") {
    const Grid2 g1({}, 1.0, 9);
    const Grid2 g2({}, 1.0, 11);
    const Scalar2Field a =
        Scalar2Field::on_grid(g1, std::vector<Cx>(static_cast<size_t>(g1.size()), Cx(1)));
    const Scalar2Field b =
        Scalar2Field::on_grid(g2, std::vector<Cx>(static_cast<size_t>(g2.size()), Cx(1)));
    CHECK_THROWS_AS(a + b, Error);
}

TEST_CASE("polynomial-mode differentiation is exact") {
    // d1(x1^2) = 2 x1
    const Scalar2Field f = Scalar2Field::poly(Poly2c::monomial(2, 0, Cx(1)));
    const Scalar2Field d = f.derivative(1);
    CHECK(d.at({3.0, 0.0}) == Cx(6.0));
    // derivative of a constant vanishes
    CHECK(Scalar2Field::constant(Cx(5)).derivative(2).at({1.0, 1.0}) == Cx(0));
}

TEST_CASE("grid-mode stencils differentiate smooth samples at 2nd order") {
    const auto sample = [](const Grid2& g) {
        std::vector<Cx> v(static_cast<size_t>(g.size()));
        for (int i2 = 0; i2 < g.n; ++i2)
            for (int i1 = 0; i1 < g.n; ++i1) {
                const Vec2 x = g.node(i1, i2);
                v[static_cast<size_t>(g.index(i1, i2))] = Cx(std::sin(2.0 * x.x1) * std::cos(x.x2));
            }
        return v;
    };
    const auto max_err = [&](int n, int axis, int order) {
        const Grid2 g({}, 1.0, n);
        const Scalar2Field f = Scalar2Field::on_grid(g, sample(g));
        const Scalar2Field d = f.derivative(axis, order);
        double worst = 0.0;
        for (int i2 = 0; i2 < g.n; ++i2)
            for (int i1 = 0; i1 < g.n; ++i1) {
                const Vec2 x = g.node(i1, i2);
                double exact = 0.0;
                if (axis == 1 && order == 1) exact = 2.0 * std::cos(2.0 * x.x1) * std::cos(x.x2);
                if (axis == 1 && order == 2) exact = -4.0 * std::sin(2.0 * x.x1) * std::cos(x.x2);
                if (axis == 2 && order == 1) exact = -std::sin(2.0 * x.x1) * std::sin(x.x2);
                if (axis == 2 && order == 2) exact = -std::sin(2.0 * x.x1) * std::cos(x.x2);
                worst = std::max(worst, std::abs(d.at(x) - Cx(exact)));
            }
        return worst;
    };
    for (int axis : {1, 2})
        for (int order : {1, 2}) {
            const double e1 = max_err(33, axis, order);
            const double e2 = max_err(65, axis, order);
            const double ratio = e1 / e2;
            CHECK(ratio > 3.4);
            CHECK(ratio < 4.6);
        }
}

TEST_CASE("field matrix products against pointwise evaluation") {
    const Grid2 g({}, 1.0, 9);
    Mat2cField a, b;
    a(0, 0) = Scalar2Field::poly(Poly2c::monomial(1, 0, Cx(1)));
    a(0, 1) = Scalar2Field::constant(Cx(0, 1));
    a(1, 0) = Scalar2Field::constant(Cx(2));
    a(1, 1) = Scalar2Field::poly(Poly2c::monomial(0, 1, Cx(1)));
    b(0, 0) = Scalar2Field::constant(Cx(1));
    b(0, 1) = Scalar2Field::poly(Poly2c::monomial(1, 1, Cx(1)));
    b(1, 0) = Scalar2Field::constant(Cx(-1, 0.5));
    b(1, 1) = Scalar2Field::constant(Cx(3));

    const Mat2cField prod = a * b;
    const Vec2 x{0.4, -0.6};
    const Mat2c direct = eval_at(a, x) * eval_at(b, x);
    CHECK(norm_fro(eval_at(prod, x) - direct) < 1e-14);

    // pointwise inverse: constant and grid modes
    Mat2cField k;
    k(0, 0) = Scalar2Field::constant(Cx(2, 1));
    k(0, 1) = Scalar2Field::constant(Cx(0.5));
    k(1, 0) = Scalar2Field::constant(Cx(-0.25, 0.1));
    k(1, 1) = Scalar2Field::constant(Cx(1, -1));
    const Mat2cField kinv = inverse_field(k);
    CHECK(norm_fro(eval_at(k, x) * eval_at(kinv, x) - Mat2c::identity()) < 1e-14);

    Mat2cField gridded;
    for (size_t i = 0; i < 4; ++i) gridded.e[i] = Scalar2Field::on_grid(g, k.e[i].sample(g));
    const Mat2cField ginv = inverse_field(gridded);
    const Vec2 node = g.node(2, 7);
    CHECK(norm_fro(eval_at(gridded, node) * eval_at(ginv, node) - Mat2c::identity()) < 1e-14);

    // a non-constant polynomial matrix has no polynomial inverse
    CHECK_THROWS_AS(inverse_field(a), Error);
}

TEST_CASE("cof-transpose field identity") {
    Mat2cField m;
    m(0, 0) = Scalar2Field::poly(Poly2c::monomial(1, 0, Cx(1)));
    m(0, 1) = Scalar2Field::constant(Cx(2));
    m(1, 0) = Scalar2Field::constant(Cx(0, -1));
    m(1, 1) = Scalar2Field::poly(Poly2c::monomial(0, 2, Cx(1)));
    const Mat2cField cof = cof_transpose_field(m);
    const Vec2 x{1.5, -0.5};
    const Mat2c prod = eval_at(cof, x) * eval_at(m, x);
    const Cx d = det(eval_at(m, x));
    CHECK(std::abs(prod(0, 0) - d) < 1e-14);
    CHECK(std::abs(prod(1, 1) - d) < 1e-14);
    CHECK(std::abs(prod(0, 1)) < 1e-14);
}
