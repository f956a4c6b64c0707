#include "anisored/gridlab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace anisored {

Scalar2Field diff_field(const Scalar2Field& f, int axis, int order) {
    return f.derivative(axis, order);
}

namespace {

Vec4cField block_equation_residual(const ReductionData& rd, const Vec4cField& w) {
    return w.derivative(1) + rd.m1_block * w.derivative(2) - rd.m0_block * w;
}

// One-sided border stencils compose at reduced order, so the identity
// residuals are measured a few layers inside the boundary in grid mode.
std::vector<Vec2> identity_eval_points(const ReductionData& rd) {
    if (!rd.grid) return rd.eval_points();
    const Grid2& g = *rd.grid;
    const int margin = std::min(4, (g.n - 1) / 4);
    std::vector<Vec2> pts;
    for (int i2 = margin; i2 < g.n - margin; ++i2)
        for (int i1 = margin; i1 < g.n - margin; ++i1) pts.push_back(g.node(i1, i2));
    return pts;
}

} // namespace

RowResiduals block_residual(const ReductionData& rd, const Vec2cField& u) {
    const StateVectorW w = build_w(u, rd);
    const Vec4cField e = block_equation_residual(rd, w.stacked());
    const Vec2cField target = rd.lam11_inv * apply_system(rd.sys, u);
    const std::vector<Vec2> pts = identity_eval_points(rd);
    RowResiduals out;
    out.row1 = max_norm_at(upper_half(e), pts);
    out.row2 = max_norm_at(lower_half(e) - target, pts);
    return out;
}

Vec4cField apply_diagonal_op(const ReductionData& rd, const Vec4cField& w) {
    // second derivatives as composed first-derivative stencils, so the
    // discrete operator cancels term-by-term against the factored form in
    // the identity residual (a direct 3-point stencil would differ by
    // border terms that do not vanish under refinement)
    Vec4cField out;
    for (int comp = 0; comp < 4; ++comp) {
        const Scalar2Field& tr = (comp < 2) ? rd.p1_tr : rd.p2_tr;
        const Scalar2Field& dt = (comp < 2) ? rd.p1_det : rd.p2_det;
        const Scalar2Field d1 = w(comp, 0).derivative(1);
        const Scalar2Field d2 = w(comp, 0).derivative(2);
        out(comp, 0) = -(d1.derivative(1) + tr * d2.derivative(1) + dt * d2.derivative(2));
    }
    return out;
}

double diagonal_residual(const ReductionData& rd, const Vec4cField& w) {
    const Vec4cField pw = apply_diagonal_op(rd, w);

    const Cx mi(0, -1);
    const Vec4cField sum_k = rd.k10 * (mi * w.derivative(1)) + rd.k01 * (mi * w.derivative(2)) +
                             rd.k00 * w;

    const Vec4cField e = block_equation_residual(rd, w);
    const Mat4cField ccof = block_diag(rd.cof_t, rd.cof_s);
    const Vec4cField rhs = -(e.derivative(1) + ccof * e.derivative(2));

    return max_norm_at(pw - sum_k - rhs, identity_eval_points(rd));
}

double flat_fn_eval(const FlatFn& f, Vec2 x) {
    const double r = std::hypot(x.x1, x.x2);
    if (r == 0.0 || r >= f.cutoff_r) return 0.0;
    const double expo = -std::pow(r, -f.nu);
    const Cx v = f.v.eval(x);
    return std::exp(expo) * v.real();
}

Vec4cField flat_field4(const FlatFn& f, const Grid2& g) {
    std::vector<Cx> vals(static_cast<size_t>(g.size()));
    for (int i2 = 0; i2 < g.n; ++i2)
        for (int i1 = 0; i1 < g.n; ++i1)
            vals[static_cast<size_t>(g.index(i1, i2))] = Cx(flat_fn_eval(f, g.node(i1, i2)));
    const Scalar2Field s = Scalar2Field::on_grid(g, std::move(vals));
    Vec4cField w;
    for (int c = 0; c < 4; ++c) w(c, 0) = s;
    return w;
}

double cell_coverage(Vec2 node, double h, Vec2 center, double r_in, double r_out) {
    const double dist = std::hypot(node.x1 - center.x1, node.x2 - center.x2);
    const double circ = 0.5 * h * M_SQRT2;
    if (dist - circ >= r_out || dist + circ <= r_in) return 0.0;
    if (dist + circ <= r_out && dist - circ >= r_in) return 1.0;
    int inside = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const double x1 = node.x1 + ((i + 0.5) / 4.0 - 0.5) * h;
            const double x2 = node.x2 + ((j + 0.5) / 4.0 - 0.5) * h;
            const double r = std::hypot(x1 - center.x1, x2 - center.x2);
            if (r >= r_in && r <= r_out) ++inside;
        }
    return inside / 16.0;
}

VanishingOrder vanishing_order(const std::vector<Scalar2Field>& u, const Grid2& g,
                               const std::vector<double>& radii) {
    if (radii.size() < 4) fail(Err::validation_error, "need at least 4 radii");
    for (double r : radii)
        if (!(r > 0.0) || r > g.half_width)
            fail(Err::validation_error, "radius outside the grid");

    std::vector<std::vector<Cx>> samples;
    samples.reserve(u.size());
    for (const Scalar2Field& f : u) samples.push_back(f.sample(g));

    const double h = g.h();
    const double cell_area = h * h;
    VanishingOrder out;
    out.v_values.resize(radii.size());
    for (size_t k = 0; k < radii.size(); ++k) {
        double v = 0.0;
        for (int i2 = 0; i2 < g.n; ++i2)
            for (int i1 = 0; i1 < g.n; ++i1) {
                const Vec2 x = g.node(i1, i2);
                const double frac = cell_coverage(x, h, g.center, 0.0, radii[k]);
                if (frac == 0.0) continue;
                double density = 0.0;
                for (const auto& comp : samples)
                    density += std::norm(comp[static_cast<size_t>(g.index(i1, i2))]);
                v += frac * cell_area * density;
            }
        out.v_values[k] = v;
    }

    bool all_zero = true;
    for (double v : out.v_values)
        if (v > 1e-300) all_zero = false;
    if (all_zero) fail(Err::all_zero_field, "field mass below representable threshold");

    // least-squares slope of log V against log r
    const size_t m = radii.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t k = 0; k < m; ++k) {
        const double lx = std::log(radii[k]);
        const double ly = std::log(std::max(out.v_values[k], 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    out.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);

    // slopes between consecutive radii, outermost pair first
    std::vector<size_t> order(m);
    for (size_t k = 0; k < m; ++k) order[k] = k;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return radii[a] > radii[b]; });
    for (size_t k = 0; k + 1 < m; ++k) {
        const double r0 = radii[order[k]], r1 = radii[order[k + 1]];
        const double v0 = std::max(out.v_values[order[k]], 1e-300);
        const double v1 = std::max(out.v_values[order[k + 1]], 1e-300);
        out.pair_slopes.push_back((std::log(v1) - std::log(v0)) / (std::log(r1) - std::log(r0)));
    }
    return out;
}

namespace {

/// Scaled sum of squares (dnrm2-style): returns the norm of the term list
/// without forming overflowing squares.
class ScaledNorm {
public:
    void add(double term) {
        const double t = std::abs(term);
        if (t == 0.0) return;
        if (t > scale_) {
            const double r = scale_ / t;
            ssq_ = 1.0 + ssq_ * r * r;
            scale_ = t;
        } else {
            const double r = t / scale_;
            ssq_ += r * r;
        }
    }
    double value() const { return (scale_ == 0.0) ? 0.0 : scale_ * std::sqrt(ssq_); }

private:
    double scale_ = 0.0;
    double ssq_ = 0.0;
};

/// log(sum exp(t_k)) accumulated in fixed order with a running maximum.
class LogSumExp {
public:
    void add(double t) {
        if (t == -std::numeric_limits<double>::infinity()) return;
        if (empty_) {
            max_ = t;
            sum_ = 1.0;
            empty_ = false;
            return;
        }
        if (t > max_) {
            sum_ = sum_ * std::exp(max_ - t) + 1.0;
            max_ = t;
        } else {
            sum_ += std::exp(t - max_);
        }
    }
    bool empty() const { return empty_; }
    double value() const {
        return empty_ ? -std::numeric_limits<double>::infinity() : max_ + std::log(sum_);
    }

private:
    bool empty_ = true;
    double max_ = 0.0;
    double sum_ = 0.0;
};

} // namespace

std::vector<CarlemanRow> carleman_ratio(const ReductionData& rd, const Vec4cField& w,
                                        const CarlemanProbe& probe) {
    const FieldMode mode = mode_of(w);
    if (mode != FieldMode::grid)
        fail(Err::validation_error, "the Carleman probe needs a grid-sampled field");
    const Grid2& g = w(0, 0).grid();
    const double h = g.h();
    const double r_out = (probe.r_max > 0.0) ? probe.r_max : g.half_width;
    if (!(probe.nu > 0.0)) fail(Err::validation_error, "nu must be positive");
    if (probe.r_min < 2.0 * h)
        fail(Err::validation_error, "r_min must be at least two grid spacings");
    if (!(probe.r_min < r_out)) fail(Err::validation_error, "empty annulus");
    if (probe.tau_list.empty()) fail(Err::validation_error, "tau list is empty");

    // derivative and operator fields, shared across all tau
    std::array<std::vector<Cx>, 4> wv, d1v, d2v, pwv;
    const Vec4cField pw = apply_diagonal_op(rd, w);
    for (int c = 0; c < 4; ++c) {
        wv[static_cast<size_t>(c)] = w(c, 0).sample(g);
        d1v[static_cast<size_t>(c)] = w(c, 0).derivative(1).sample(g);
        d2v[static_cast<size_t>(c)] = w(c, 0).derivative(2).sample(g);
        pwv[static_cast<size_t>(c)] = pw(c, 0).sample(g);
    }

    struct CellData {
        double log_area;   // log(coverage * h^2)
        double exponent1;  // r^-nu (weight exponent without tau/nu)
        double g_grad;     // r^-1 |grad w|
        double g_w;        // r^-nu-2 |w|
        double g_pw;       // |P w|
    };
    std::vector<CellData> cells;
    for (int i2 = 0; i2 < g.n; ++i2)
        for (int i1 = 0; i1 < g.n; ++i1) {
            const Vec2 x = g.node(i1, i2);
            const double frac = cell_coverage(x, h, g.center, probe.r_min, r_out);
            if (frac == 0.0) continue;
            const double r = std::hypot(x.x1 - g.center.x1, x.x2 - g.center.x2);
            if (r <= 0.0) continue;
            const size_t k = static_cast<size_t>(g.index(i1, i2));
            double grad2 = 0.0, w2 = 0.0, pw2 = 0.0;
            for (size_t c = 0; c < 4; ++c) {
                grad2 += std::norm(d1v[c][k]) + std::norm(d2v[c][k]);
                w2 += std::norm(wv[c][k]);
                pw2 += std::norm(pwv[c][k]);
            }
            CellData cd;
            cd.log_area = std::log(frac * h * h);
            cd.exponent1 = std::pow(r, -probe.nu);
            cd.g_grad = std::sqrt(grad2) / r;
            cd.g_w = std::sqrt(w2) * std::pow(r, -probe.nu - 2.0);
            cd.g_pw = std::sqrt(pw2);
            cells.push_back(cd);
        }

    std::vector<CarlemanRow> rows;
    for (double tau : probe.tau_list) {
        const double tn = tau / probe.nu;
        double e_max = 0.0;
        for (const CellData& cd : cells) e_max = std::max(e_max, tn * cd.exponent1);
        // beyond this the log values themselves lose the mantissa bits the
        // norms need
        if (2.0 * e_max > 7e2 * 1e6)
            fail(Err::weight_overflow_unavoidable,
                 "weight exponent too large even for log-domain evaluation; increase r_min");

        CarlemanRow row;
        row.tau = tau;
        if (probe.log_domain) {
            LogSumExp n_grad, n_w, n_pw;
            for (const CellData& cd : cells) {
                const double e2 = 2.0 * tn * cd.exponent1 + cd.log_area;
                if (cd.g_grad > 0.0) n_grad.add(e2 + 2.0 * std::log(cd.g_grad));
                if (cd.g_w > 0.0) n_w.add(e2 + 2.0 * std::log(cd.g_w));
                if (cd.g_pw > 0.0) n_pw.add(e2 + 2.0 * std::log(cd.g_pw));
            }
            const double inf = std::numeric_limits<double>::infinity();
            const double log_ngrad = n_grad.empty() ? -inf : 0.5 * n_grad.value();
            const double log_nw = n_w.empty() ? -inf : 0.5 * n_w.value();
            const double log_npw = n_pw.empty() ? -inf : 0.5 * n_pw.value();

            LogSumExp lhs;
            lhs.add(log_ngrad);
            lhs.add(std::log(tau) + log_nw);
            row.lhs_log = lhs.empty() ? -inf : lhs.value();
            row.rhs_log = log_npw;
            row.lhs = std::exp(row.lhs_log);
            row.rhs = std::exp(row.rhs_log);
            row.defined = std::isfinite(row.lhs_log) && std::isfinite(row.rhs_log);
            row.ratio = row.defined ? std::exp(row.lhs_log - row.rhs_log)
                                    : std::numeric_limits<double>::quiet_NaN();
        } else {
            ScaledNorm n_grad, n_w, n_pw;
            for (const CellData& cd : cells) {
                const double weight = std::exp(tn * cd.exponent1);
                const double sq_area = std::exp(0.5 * cd.log_area);
                n_grad.add(weight * cd.g_grad * sq_area);
                n_w.add(weight * cd.g_w * sq_area);
                n_pw.add(weight * cd.g_pw * sq_area);
            }
            row.lhs = n_grad.value() + tau * n_w.value();
            row.rhs = n_pw.value();
            row.lhs_log = std::log(row.lhs);
            row.rhs_log = std::log(row.rhs);
            row.defined = row.lhs > 0.0 && row.rhs > 0.0 && std::isfinite(row.lhs) &&
                          std::isfinite(row.rhs);
            row.ratio = row.defined ? row.lhs / row.rhs
                                    : std::numeric_limits<double>::quiet_NaN();
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<double> observed_orders(const std::vector<double>& residuals) {
    std::vector<double> orders;
    for (size_t k = 0; k + 1 < residuals.size(); ++k)
        orders.push_back(std::log2(residuals[k] / residuals[k + 1]));
    return orders;
}

} // namespace anisored
