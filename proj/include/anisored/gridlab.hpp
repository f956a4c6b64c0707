#pragma once

#include <vector>

#include "anisored/reduction.hpp"

namespace anisored {

/// Discrete differentiation with the library-wide stencils. Polynomial and
/// constant fields differentiate exactly.
Scalar2Field diff_field(const Scalar2Field& f, int axis, int order = 1);

struct RowResiduals {
    double row1 = 0.0;
    double row2 = 0.0;
};

/// Residual of the first-order block system against the manufactured field
/// u. row1 is the norm of the defining identity of w2 (zero by construction
/// up to discretization), row2 compares the second block row with
/// L11^-1 (L u + F u). In grid mode the norm is taken over nodes a few
/// layers inside the boundary, where the composed stencils keep 2nd order.
RowResiduals block_residual(const ReductionData& rd, const Vec2cField& u);

/// Residual of the operator identity
///   P(x,D) W - sum K_alpha D^alpha W = (-d1 - Ccof d2)(d1 W + M1 d2 W - M0 W),
/// which vanishes for every smooth W, not only solutions. Same interior
/// norm convention as block_residual.
double diagonal_residual(const ReductionData& rd, const Vec4cField& w);

/// Diagonal second-order operator applied to a 4-component field.
Vec4cField apply_diagonal_op(const ReductionData& rd, const Vec4cField& w);

/// exp(-|x|^-nu) * v(x), zero at the origin and beyond cutoff_r.
struct FlatFn {
    double nu = 1.0;
    Poly2c v = Poly2c::constant(Cx(1));
    double cutoff_r = std::numeric_limits<double>::infinity();
};

double flat_fn_eval(const FlatFn& f, Vec2 x);

/// Sample a flat function into every component of a 4-component grid field.
Vec4cField flat_field4(const FlatFn& f, const Grid2& g);

struct VanishingOrder {
    double slope = 0.0;               // least-squares fit of log V vs log r
    std::vector<double> pair_slopes;  // between consecutive radii, outermost first
    std::vector<double> v_values;     // V(r) per radius, same order as input
};

/// Local L2 mass V(r) over balls B_r around the grid center, midpoint
/// quadrature with subsampled boundary-cell coverage. Needs >= 4 radii
/// inside the grid; throws Err::all_zero_field for an identically tiny u.
VanishingOrder vanishing_order(const std::vector<Scalar2Field>& u, const Grid2& g,
                               const std::vector<double>& radii);

struct CarlemanProbe {
    std::vector<double> tau_list;
    double nu = 1.0;
    double r_min = 0.05;
    double r_max = 0.0;       // 0 means: use the grid half-width
    bool log_domain = true;
};

struct CarlemanRow {
    double tau = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    double lhs_log = 0.0;
    double rhs_log = 0.0;
    bool defined = false;
};

/// Weighted-norm ratio diagnostic for the Carleman-type inequality: per tau,
/// lhs = ||e^E r^-1 grad w|| + tau ||e^E r^-nu-2 w|| and rhs = ||e^E P w||
/// over the annulus [r_min, r_max], with E = (tau/nu) r^-nu. The log_domain
/// flag selects log-sum-exp accumulation (mandatory for large tau).
std::vector<CarlemanRow> carleman_ratio(const ReductionData& rd, const Vec4cField& w,
                                        const CarlemanProbe& probe);

/// Fraction of the h x h cell centered at `node` inside the annulus
/// r_in <= |x - center| <= r_out (4x4 subsampling near the boundary).
double cell_coverage(Vec2 node, double h, Vec2 center, double r_in, double r_out);

/// log2(e_k / e_{k+1}) for a refinement sequence of residuals.
std::vector<double> observed_orders(const std::vector<double>& residuals);

} // namespace anisored
