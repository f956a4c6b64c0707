#include "anisored/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <string>

namespace anisored {

const char* err_name(Err code) {
    switch (code) {
        case Err::singular_matrix: return "SingularMatrix";
        case Err::degenerate_leading_coefficient: return "DegenerateLeadingCoefficient";
        case Err::no_convergence: return "NoConvergence";
        case Err::singular_system: return "SingularSystem";
        case Err::real_root_detected: return "RealRootDetected";
        case Err::contour_construction_failed: return "ContourConstructionFailed";
        case Err::moment_singular: return "MomentSingular";
        case Err::spectrum_leak: return "SpectrumLeak";
        case Err::quadratic_residual_too_large: return "QuadraticResidualTooLarge";
        case Err::spectra_not_disjoint: return "SpectraNotDisjoint";
        case Err::conjugacy_violated: return "ConjugacyViolated";
        case Err::hypothesis_violated: return "HypothesisViolated";
        case Err::grid_too_coarse: return "GridTooCoarse";
        case Err::all_zero_field: return "AllZeroField";
        case Err::weight_overflow_unavoidable: return "WeightOverflowUnavoidable";
        case Err::parse_error: return "ParseError";
        case Err::validation_error: return "ValidationError";
        case Err::io_error: return "IoError";
        case Err::internal_error: return "InternalError";
    }
    return "UnknownError";
}

namespace {

void require_finite(const Mat2c& m, const char* who) {
    for (Cx z : m.e)
        if (!is_finite(z)) fail(Err::validation_error, std::string(who) + ": non-finite entry");
}

} // namespace

Mat2c operator+(const Mat2c& a, const Mat2c& b) {
    Mat2c r;
    for (size_t i = 0; i < 4; ++i) r.e[i] = a.e[i] + b.e[i];
    return r;
}

Mat2c operator-(const Mat2c& a, const Mat2c& b) {
    Mat2c r;
    for (size_t i = 0; i < 4; ++i) r.e[i] = a.e[i] - b.e[i];
    return r;
}

Mat2c operator*(const Mat2c& a, const Mat2c& b) {
    Mat2c r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
    return r;
}

Mat2c operator*(Cx s, const Mat2c& a) {
    Mat2c r;
    for (size_t i = 0; i < 4; ++i) r.e[i] = s * a.e[i];
    return r;
}

Vec2c operator*(const Mat2c& a, const Vec2c& v) {
    Vec2c r;
    r[0] = a(0, 0) * v[0] + a(0, 1) * v[1];
    r[1] = a(1, 0) * v[0] + a(1, 1) * v[1];
    return r;
}

Cx det(const Mat2c& m) { return m.e[0] * m.e[3] - m.e[1] * m.e[2]; }

Cx trace(const Mat2c& m) { return m.e[0] + m.e[3]; }

Mat2c cof_transpose(const Mat2c& m) { return Mat2c{{m.e[3], -m.e[1], -m.e[2], m.e[0]}}; }

Mat2c adjoint(const Mat2c& m) {
    return Mat2c{{std::conj(m.e[0]), std::conj(m.e[2]), std::conj(m.e[1]), std::conj(m.e[3])}};
}

double norm_fro(const Mat2c& m) {
    double s = 0.0;
    for (Cx z : m.e) s += std::norm(z);
    return std::sqrt(s);
}

double norm2(const Vec2c& v) { return std::sqrt(std::norm(v[0]) + std::norm(v[1])); }

double norm2(const Vec4c& v) {
    double s = 0.0;
    for (Cx z : v.e) s += std::norm(z);
    return std::sqrt(s);
}

Mat2c inverse(const Mat2c& m) {
    require_finite(m, "inverse");
    const Cx d = det(m);
    const double nf = norm_fro(m);
    if (std::abs(d) <= 1e-14 * nf * nf)
        fail(Err::singular_matrix, "2x2 determinant below threshold");
    const Cx inv_d = Cx(1.0) / d;
    return inv_d * cof_transpose(m);
}

std::pair<Cx, Cx> eigenvalues2(const Mat2c& m) {
    require_finite(m, "eigenvalues2");
    const Cx tr = trace(m);
    const Cx dt = det(m);
    const Cx disc = tr * tr - 4.0 * dt;
    const Cx sq = std::sqrt(disc);
    // pick the larger-magnitude branch first, recover the mate from det
    const Cx cand1 = 0.5 * (tr + sq);
    const Cx cand2 = 0.5 * (tr - sq);
    Cx l1 = (std::abs(cand1) >= std::abs(cand2)) ? cand1 : cand2;
    Cx l2 = (std::abs(l1) > 0.0) ? dt / l1 : tr - l1;
    if (lex_less(l2, l1)) std::swap(l1, l2);
    return {l1, l2};
}

Mat2cOps mat_ops(const Mat2c& m) {
    require_finite(m, "mat_ops");
    Mat2cOps r;
    r.det = det(m);
    r.trace = trace(m);
    r.cof_transpose = cof_transpose(m);
    r.adjoint = adjoint(m);
    r.inverse = inverse(m);
    r.eigenvalues = eigenvalues2(m);
    return r;
}

Cx Poly4c::eval(Cx z) const {
    Cx r = c[4];
    for (int k = 3; k >= 0; --k) r = r * z + c[static_cast<size_t>(k)];
    return r;
}

Cx Poly4c::eval_derivative(Cx z) const {
    Cx r = 4.0 * c[4];
    for (int k = 3; k >= 1; --k) r = r * z + static_cast<double>(k) * c[static_cast<size_t>(k)];
    return r;
}

double Poly4c::coeff_scale() const {
    double s = 0.0;
    for (Cx z : c) s = std::max(s, std::abs(z));
    return s;
}

std::uint64_t root_solver_seed() {
    static const std::uint64_t seed = [] {
        if (const char* env = std::getenv("ANISORED_SEED")) {
            try {
                return static_cast<std::uint64_t>(std::stoull(env, nullptr, 0));
            } catch (const std::exception&) {
                // unparsable override falls back to the default
            }
        }
        return std::uint64_t{0x5EED};
    }();
    return seed;
}

namespace {

// Elementary symmetric functions of the current root estimates, compared
// against the monic coefficients. Used as the convergence certificate.
double vieta_residual(const std::array<Cx, 4>& r, const std::array<Cx, 4>& monic_low) {
    const Cx e1 = r[0] + r[1] + r[2] + r[3];
    const Cx e2 = r[0] * r[1] + r[0] * r[2] + r[0] * r[3] + r[1] * r[2] + r[1] * r[3] + r[2] * r[3];
    const Cx e3 = r[0] * r[1] * r[2] + r[0] * r[1] * r[3] + r[0] * r[2] * r[3] + r[1] * r[2] * r[3];
    const Cx e4 = r[0] * r[1] * r[2] * r[3];
    double res = std::abs(e1 + monic_low[3]);
    res = std::max(res, std::abs(e2 - monic_low[2]));
    res = std::max(res, std::abs(e3 + monic_low[1]));
    res = std::max(res, std::abs(e4 - monic_low[0]));
    return res;
}

} // namespace

std::array<Cx, 4> quartic_roots(const Poly4c& p) {
    for (Cx z : p.c)
        if (!is_finite(z)) fail(Err::validation_error, "quartic_roots: non-finite coefficient");

    const double scale = p.coeff_scale();
    if (std::abs(p.c[4]) <= 1e-14 * scale || scale == 0.0)
        fail(Err::degenerate_leading_coefficient, "leading quartic coefficient too small");

    // monic low-order coefficients c0..c3 (after dividing by c4)
    std::array<Cx, 4> m;
    for (size_t k = 0; k < 4; ++k) m[k] = p.c[k] / p.c[4];
    const auto pv = [&](Cx z) {
        Cx r = Cx(1);
        for (int k = 3; k >= 0; --k) r = r * z + m[static_cast<size_t>(k)];
        return r;
    };
    const auto pd = [&](Cx z) {
        Cx r = Cx(4);
        for (int k = 3; k >= 1; --k) r = r * z + static_cast<double>(k) * m[static_cast<size_t>(k)];
        return r;
    };

    double bound = 0.0;
    for (size_t k = 0; k < 4; ++k) bound = std::max(bound, std::abs(m[k]));
    const double radius = 1.0 + bound;

    std::mt19937_64 rng(root_solver_seed());
    std::uniform_real_distribution<double> jitter(-0.05, 0.05);
    std::array<Cx, 4> z;
    for (size_t j = 0; j < 4; ++j) {
        // offset keeps the start asymmetric w.r.t. the real axis
        const double theta = 2.0 * M_PI * static_cast<double>(j) / 4.0 + 0.4 + jitter(rng);
        const double r = radius * (1.0 + jitter(rng));
        z[j] = Cx(r * std::cos(theta), r * std::sin(theta));
    }

    bool converged = false;
    for (int it = 0; it < 200 && !converged; ++it) {
        std::array<Cx, 4> next = z;
        double max_step = 0.0;
        for (size_t i = 0; i < 4; ++i) {
            const Cx val = pv(z[i]);
            Cx der = pd(z[i]);
            if (val == Cx(0)) continue;
            if (der == Cx(0)) der = Cx(1e-300);
            const Cx newton = val / der;
            Cx repulse = Cx(0);
            for (size_t j = 0; j < 4; ++j) {
                if (j == i) continue;
                Cx diff = z[i] - z[j];
                if (diff == Cx(0)) diff = Cx(1e-150);
                repulse += Cx(1.0) / diff;
            }
            const Cx denom = Cx(1.0) - newton * repulse;
            const Cx step = (std::abs(denom) > 1e-300) ? newton / denom : newton;
            next[i] = z[i] - step;
            max_step = std::max(max_step, std::abs(step) / (1.0 + std::abs(next[i])));
        }
        z = next;
        converged = max_step <= 1e-15;
    }

    // Aberth stagnates near multiple roots at the sqrt-of-roundoff level and
    // the cluster mean drifts; a quadratic-factor (Bairstow) polish restores
    // the symmetric functions of a close pair to machine precision.
    double root_scale = 1.0;
    for (Cx r : z) root_scale = std::max(root_scale, std::abs(r));
    const double cluster_tol = 1e-4 * root_scale;

    const auto bairstow_pair = [&](Cx& u, Cx& v) {
        Cx b = -(u + v);
        Cx c = u * v;
        for (int it = 0; it < 12; ++it) {
            const Cx d1 = m[3] - b;
            const Cx d0 = m[2] - c - b * d1;
            const Cx r1 = m[1] - b * d0 - c * d1;
            const Cx r0 = m[0] - c * d0;
            const Cx dd0_db = b - d1;
            const Cx dr1_db = -d0 - b * dd0_db + c;
            const Cx dr0_db = -c * dd0_db;
            const Cx dr1_dc = b - d1;
            const Cx dr0_dc = c - d0;
            const Cx det_j = dr1_db * dr0_dc - dr1_dc * dr0_db;
            if (std::abs(det_j) < 1e-300) break;
            const Cx db = (r1 * dr0_dc - r0 * dr1_dc) / det_j;
            const Cx dc = (dr1_db * r0 - dr0_db * r1) / det_j;
            b -= db;
            c -= dc;
            if (std::abs(db) + std::abs(dc) < 1e-16 * (1.0 + std::abs(b) + std::abs(c))) break;
        }
        // roots of z^2 + b z + c; a discriminant at rounding level is an
        // exact double pair
        Cx disc = b * b - 4.0 * c;
        const double noise = 4.0 * 2.3e-16 * std::max(std::abs(b) * std::abs(b), std::abs(c));
        if (std::abs(disc) <= noise) disc = Cx(0);
        const Cx sq = std::sqrt(disc);
        const Cx t1 = 0.5 * (-b + sq);
        const Cx t2 = 0.5 * (-b - sq);
        // assign preserving proximity to the previous estimates
        if (std::abs(t1 - u) + std::abs(t2 - v) <= std::abs(t1 - v) + std::abs(t2 - u)) {
            u = t1;
            v = t2;
        } else {
            u = t2;
            v = t1;
        }
    };

    // find the closest pair; polish it as a quadratic factor when clustered
    size_t pi = 0, pj = 1;
    double pd_min = std::abs(z[0] - z[1]);
    for (size_t i = 0; i < 4; ++i)
        for (size_t j = i + 1; j < 4; ++j)
            if (std::abs(z[i] - z[j]) < pd_min) {
                pd_min = std::abs(z[i] - z[j]);
                pi = i;
                pj = j;
            }
    std::array<bool, 4> in_cluster{false, false, false, false};
    if (pd_min < cluster_tol) {
        bairstow_pair(z[pi], z[pj]);
        in_cluster[pi] = in_cluster[pj] = true;
        size_t oi = 0, oj = 0;
        bool first = true;
        for (size_t k = 0; k < 4; ++k) {
            if (in_cluster[k]) continue;
            (first ? oi : oj) = k;
            first = false;
        }
        if (std::abs(z[oi] - z[oj]) < cluster_tol) {
            bairstow_pair(z[oi], z[oj]);
            in_cluster[oi] = in_cluster[oj] = true;
        }
    }

    // guarded Newton polish for the separated roots
    for (size_t i = 0; i < 4; ++i) {
        if (in_cluster[i]) continue;
        for (int it = 0; it < 5; ++it) {
            const Cx val = pv(z[i]);
            const Cx der = pd(z[i]);
            if (val == Cx(0) || std::abs(der) < 1e-300) break;
            const Cx cand = z[i] - val / der;
            if (std::abs(pv(cand)) < std::abs(val))
                z[i] = cand;
            else
                break;
        }
    }

    const double vieta_scale = std::max(1.0, bound);
    if (vieta_residual(z, m) > 1e-10 * vieta_scale)
        fail(Err::no_convergence, "quartic root iteration did not meet the Vieta certificate");

    std::sort(z.begin(), z.end(), lex_less);
    return z;
}

Mat4c Mat4c::identity() {
    Mat4c r;
    for (int i = 0; i < 4; ++i) r(i, i) = Cx(1);
    return r;
}

double norm_fro(const Mat4c& m) {
    double s = 0.0;
    for (Cx z : m.e) s += std::norm(z);
    return std::sqrt(s);
}

Mat4c operator+(const Mat4c& a, const Mat4c& b) {
    Mat4c r;
    for (size_t i = 0; i < 16; ++i) r.e[i] = a.e[i] + b.e[i];
    return r;
}

Mat4c operator-(const Mat4c& a, const Mat4c& b) {
    Mat4c r;
    for (size_t i = 0; i < 16; ++i) r.e[i] = a.e[i] - b.e[i];
    return r;
}

Vec4c operator*(const Mat4c& a, const Vec4c& v) {
    Vec4c r;
    for (int i = 0; i < 4; ++i) {
        Cx s = Cx(0);
        for (int j = 0; j < 4; ++j) s += a(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

Vec4c lin_solve4(const Mat4c& a, const Vec4c& b) {
    for (Cx z : a.e)
        if (!is_finite(z)) fail(Err::validation_error, "lin_solve4: non-finite matrix entry");
    for (Cx z : b.e)
        if (!is_finite(z)) fail(Err::validation_error, "lin_solve4: non-finite rhs entry");

    const double pivot_floor = 1e-13 * norm_fro(a);
    Mat4c u = a;
    Vec4c x = b;

    for (int col = 0; col < 4; ++col) {
        int piv = col;
        double best = std::abs(u(col, col));
        for (int r = col + 1; r < 4; ++r) {
            const double cand = std::abs(u(r, col));
            if (cand > best) {
                best = cand;
                piv = r;
            }
        }
        if (best <= pivot_floor)
            fail(Err::singular_system, "pivot below threshold in 4x4 elimination");
        if (piv != col) {
            for (int c = col; c < 4; ++c) std::swap(u(piv, c), u(col, c));
            std::swap(x[piv], x[col]);
        }
        for (int r = col + 1; r < 4; ++r) {
            const Cx f = u(r, col) / u(col, col);
            u(r, col) = Cx(0);
            for (int c = col + 1; c < 4; ++c) u(r, c) -= f * u(col, c);
            x[r] -= f * x[col];
        }
    }
    for (int r = 3; r >= 0; --r) {
        Cx s = x[r];
        for (int c = r + 1; c < 4; ++c) s -= u(r, c) * x[c];
        x[r] = s / u(r, r);
    }
    return x;
}

} // namespace anisored
