#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "anisored/algebra.hpp"

namespace anisored {

struct CheckRecord {
    enum class Status { pass, fail, skip };

    std::string name;
    Status status = Status::skip;
    std::optional<double> value;
    std::optional<double> residual;
    std::optional<Vec2> location;
    std::string tag;
};

/// Machine-readable run record: one entry per executed check plus a
/// subcommand-specific results payload.
struct CheckReport {
    std::string subcommand;
    std::vector<CheckRecord> checks;
    nlohmann::json results = nlohmann::json::object();

    CheckRecord& add(const std::string& name, CheckRecord::Status status, const std::string& tag);
    int failed() const;
    int passed() const;
    int skipped() const;

    nlohmann::json to_json(const nlohmann::json& config_echo, int exit_code,
                           bool with_timestamp = true) const;
};

const char* status_name(CheckRecord::Status s);

/// Exit-code mapping documented in the README.
int exit_code_for(Err code);

} // namespace anisored
