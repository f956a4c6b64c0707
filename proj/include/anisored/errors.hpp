#pragma once

#include <stdexcept>
#include <string>

namespace anisored {

enum class Err {
    singular_matrix,
    degenerate_leading_coefficient,
    no_convergence,
    singular_system,
    real_root_detected,
    contour_construction_failed,
    moment_singular,
    spectrum_leak,
    quadratic_residual_too_large,
    spectra_not_disjoint,
    conjugacy_violated,
    hypothesis_violated,
    grid_too_coarse,
    all_zero_field,
    weight_overflow_unavoidable,
    parse_error,
    validation_error,
    io_error,
    internal_error,
};

const char* err_name(Err code);

/// Every failure the library signals carries one of the Err codes above;
/// the CLI maps codes to process exit status.
class Error : public std::runtime_error {
public:
    Error(Err code, const std::string& msg)
        : std::runtime_error(std::string(err_name(code)) + ": " + msg), code_(code) {}

    Err code() const { return code_; }

private:
    Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& msg) { throw Error(code, msg); }

} // namespace anisored
