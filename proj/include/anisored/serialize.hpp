#pragma once

#include <json.hpp>

#include "anisored/reduction.hpp"

namespace anisored {

nlohmann::json to_json(const Scalar2Field& f);
Scalar2Field scalar_field_from_json(const nlohmann::json& j, const std::optional<Grid2>& g);

nlohmann::json to_json(const Grid2& g);
Grid2 grid_from_json(const nlohmann::json& j);

/// Full dump of the reduced system, sufficient to re-verify every residual.
nlohmann::json to_json(const ReductionData& rd);
ReductionData reduction_from_json(const nlohmann::json& j);

/// Recompute the structural residuals of a (possibly deserialized)
/// ReductionData from its stored fields alone.
ReductionData::Diagnostics verify_reduction_data(const ReductionData& rd);

} // namespace anisored
