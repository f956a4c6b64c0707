#pragma once

#include <string>
#include <vector>

#include "anisored/field.hpp"
#include "anisored/quadpoly.hpp"

namespace anisored {

/// Coefficient tensor of the second-order system: a(alpha,beta,j,l) are the
/// leading entries, b(alpha,beta,l) the first-order ones, c(alpha,beta) the
/// zero-order ones. All entries are real-valued scalar fields sharing one
/// representation mode. Indices are 1-based to match the usual notation.
struct CoefficientTensor {
    std::array<Scalar2Field, 16> a{};
    std::array<Scalar2Field, 8> b{};
    std::array<Scalar2Field, 4> c{};

    Scalar2Field& aref(int alpha, int beta, int j, int l);
    const Scalar2Field& aref(int alpha, int beta, int j, int l) const;
    Scalar2Field& bref(int alpha, int beta, int l);
    const Scalar2Field& bref(int alpha, int beta, int l) const;
    Scalar2Field& cref(int alpha, int beta);
    const Scalar2Field& cref(int alpha, int beta) const;

    FieldMode mode() const;

    /// The three leading blocks (L11, [A12]+[A21], L22) plus B1, B2, C as
    /// matrix fields.
    SystemFields fields() const;

    /// Leading blocks evaluated at a point, validated symmetric.
    QuadMatPoly lambdas_at(Vec2 x) const;

    /// Principal symbol contracted with a real direction: sum over j,l of
    /// A^{jl} xi_j xi_l, as a 2x2 matrix over (alpha, beta).
    Mat2r symbol_at(Vec2 x, double xi1, double xi2) const;
};

std::pair<bool, bool> check_symmetries(const CoefficientTensor& t,
                                       const std::vector<Vec2>& pts);

struct EllipticityReport {
    bool major_sym = false;
    bool minor_sym = false;
    bool strong_elliptic = false;
    double delta_est = 0.0;
    Vec2 worst_point{};
    Vec2 worst_a{};  // component direction at the minimum
    Vec2 worst_b{};  // covector direction at the minimum
};

/// Algebraic positivity decision at every sample point plus an angular-grid
/// estimate (locally refined) of the ellipticity constant.
EllipticityReport check_strong_ellipticity(const CoefficientTensor& t,
                                           const std::vector<Vec2>& pts, int n_dirs = 360);

struct SimpleDomainReport {
    struct PointRecord {
        Vec2 x{};
        bool simple = false;
        double separation = 0.0;
        double t_eig_gap = 0.0;
    };
    std::vector<PointRecord> points;
    bool all_simple = false;
    double min_separation = 0.0;
    double min_t_eig_gap = 0.0;
};

/// Distinct-roots test of the characteristic quartic at every sample point,
/// plus the induced distinct-eigenvalue check on T.
SimpleDomainReport check_simple_domain(const CoefficientTensor& t,
                                       const std::vector<Vec2>& pts, double sep_tol = 1e-8);

/// Parameters of the worked elasticity family; e and d are derived.
struct Example5Params {
    Scalar2Field a, b, c, f;
};

struct Example5Result {
    CoefficientTensor tensor;
    bool accepted = false;
    struct Failure {
        std::string hypothesis;
        Vec2 at{};
        double value = 0.0;
    };
    std::vector<Failure> failures;
    double det_factor_mismatch = 0.0;  // coefficient-comparison residual
    double second_factor_coeff = 0.0;  // (a^2 f - b^2 c)/(ac - b^2) at the first sample point
};

/// Builds the tensor from (a, b, c, f) with e = bc/a, d = (2b^2 - ac)/a,
/// verifies the positivity hypotheses and the determinant factorization of
/// the principal symbol pointwise.
Example5Result example5(const Example5Params& params, const std::vector<Vec2>& pts);

} // namespace anisored
