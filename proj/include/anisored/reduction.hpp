#pragma once

#include <optional>

#include "anisored/field.hpp"
#include "anisored/quadpoly.hpp"

namespace anisored {

/// T = -X together with its mate S = L11^-1 L12 - T, plus the residual of
/// the quadratic T^2 - L11^-1 L12 T + L11^-1 L22 = 0 and the spectrum
/// diagnostics used downstream.
struct TS {
    Mat2c t;
    Mat2c s;
    double quad_residual = 0.0;   // relative to 1 + ||T||^2
    double conj_mismatch = 0.0;   // Spec(S) vs conj(Spec(T))
    double spectrum_gap = 0.0;    // min distance between Spec(T) and Spec(S)
    double im_margin = 0.0;
};

TS compute_t_s(const QuadMatPoly& p);

/// Unique solution of Psi A - B Psi + C = 0 via the 4x4 linearization.
/// Throws Err::spectra_not_disjoint when the spectra of A and B touch.
Mat2c solve_sylvester(const Mat2c& a, const Mat2c& b, const Mat2c& c);

/// M = -L11inv B1 T + L11inv B2 - L11inv L12 d2T + T d2T - d1T, evaluated
/// with the supplied derivative fields.
Mat2cField compute_m_field(const Mat2cField& lam11_inv, const Mat2cField& lam12,
                           const Mat2cField& b1, const Mat2cField& b2, const Mat2cField& t,
                           const Mat2cField& d1t, const Mat2cField& d2t);

/// Constant-leading-blocks wrapper over compute_m_field.
Mat2cField compute_m(const QuadMatPoly& p, const Mat2cField& b1, const Mat2cField& b2,
                     const Mat2cField& t, const Mat2cField& d1t, const Mat2cField& d2t);

/// All fields of the reduced system. The coefficient fields are carried so
/// every identity can be re-verified from the structure alone.
struct ReductionData {
    SystemFields sys;
    std::optional<Grid2> grid;  // present for grid-mode data

    Mat2cField lam11_inv;
    Mat2cField t_mat, s_mat, psi, m_src;
    Mat4cField m1_block, m0_block;
    Scalar2Field p1_tr, p1_det, p2_tr, p2_det;
    Mat4cField k10, k01, k00;
    Mat2cField cof_t, cof_s;

    struct Diagnostics {
        double quad_residual = 0.0;
        double conj_mismatch = 0.0;
        double spectrum_gap = 0.0;
        double im_margin = 0.0;
        double sylvester_residual = 0.0;
        double factor_residual = 0.0;
        double diag_conj_mismatch = 0.0;
        double min_separation = 0.0;
    } diag;

    FieldMode mode() const { return grid ? FieldMode::grid : FieldMode::constant; }
    /// Points residual norms are evaluated at (nodes, or a lattice).
    std::vector<Vec2> eval_points() const;
};

struct ReduceOptions {
    double quad_res_tol = 1e-9;
    double conj_tol = 1e-8;
    int lattice_per_axis = 9;    // eval lattice in constant mode
    Vec2 box_center{};
    double box_half_width = 1.0;
};

/// Full reduction pipeline. Constant systems produce constant fields;
/// anything else is sampled onto `grid` (required in that case) and solved
/// pointwise per node.
ReductionData reduce(const SystemFields& sys, const std::optional<Grid2>& grid,
                     const ReduceOptions& opt = {});

struct StateVectorW {
    Vec2cField w1;
    Vec2cField w2;
    Vec4cField stacked() const { return vstack(w1, w2); }
};

/// W = [u, Psi u + d1 u + T d2 u].
StateVectorW build_w(const Vec2cField& u, const ReductionData& rd);

/// (tr, det) coefficient pairs of the two scalar diagonal operators;
/// verifies the second pair is the conjugate of the first.
struct DiagonalCoeffs {
    Scalar2Field p1_tr, p1_det, p2_tr, p2_det;
    double conj_mismatch = 0.0;
};

DiagonalCoeffs assemble_diagonal(const Mat2cField& t, const Mat2cField& s,
                                 const std::vector<Vec2>& pts, double tol = 1e-9);

/// L u + F u for a displacement field u over the system coefficients.
Vec2cField apply_system(const SystemFields& sys, const Vec2cField& u);

} // namespace anisored
