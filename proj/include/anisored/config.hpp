#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "anisored/checkers.hpp"

namespace anisored {

/// Parsed, validated run configuration with defaults filled in. `echo` is
/// the effective configuration (defaults included) for reproducibility.
struct RunConfig {
    std::optional<CoefficientTensor> tensor;

    Vec2 domain_center{};
    double domain_half_width = 1.0;
    int grid_n = 17;

    double tol_factor_res = 1e-9;
    double tol_sylvester_res = 1e-10;
    double sep_tol = 1e-8;

    std::vector<double> carleman_tau{20.0, 40.0, 80.0, 160.0};
    double carleman_nu = 1.0;
    double carleman_r_min = 0.0; // 0: use max(2h, 0.05 * half_width)
    bool carleman_log = true;

    int checks_sample_n = 17;
    int checks_n_dirs = 360;
    std::vector<double> vanish_radii{0.4, 0.2, 0.1, 0.05};

    std::optional<double> sigma;
    std::optional<double> nu;
    std::optional<double> nu0;

    nlohmann::json echo;

    Grid2 make_grid() const;
    double effective_r_min() const;
    /// Check sample points: the tensor's own grid nodes in grid mode, a
    /// lattice over the domain box otherwise.
    std::vector<Vec2> sample_points() const;
};

/// Load and strictly parse a config file: unknown keys are rejected, every
/// invariant is validated, defaults are filled and echoed.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_json(const nlohmann::json& j);

/// A grid-sampled multi-component field file
/// {"grid": {...}, "components": [{"re": [...], "im": [...]?}, ...]}.
struct FieldFile {
    Grid2 grid{{}, 1.0, 9};
    std::vector<Scalar2Field> components;
};

FieldFile load_field_file(const std::string& path);

} // namespace anisored
