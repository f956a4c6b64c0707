#include "anisored/report.hpp"

#include <chrono>
#include <ctime>

namespace anisored {

using nlohmann::json;

const char* status_name(CheckRecord::Status s) {
    switch (s) {
        case CheckRecord::Status::pass: return "pass";
        case CheckRecord::Status::fail: return "fail";
        case CheckRecord::Status::skip: return "skip";
    }
    return "unknown";
}

CheckRecord& CheckReport::add(const std::string& name, CheckRecord::Status status,
                              const std::string& tag) {
    for (const CheckRecord& c : checks)
        if (c.name == name) fail(Err::internal_error, "duplicate check record: " + name);
    CheckRecord rec;
    rec.name = name;
    rec.status = status;
    rec.tag = tag;
    checks.push_back(rec);
    return checks.back();
}

int CheckReport::failed() const {
    int n = 0;
    for (const auto& c : checks) n += (c.status == CheckRecord::Status::fail);
    return n;
}

int CheckReport::passed() const {
    int n = 0;
    for (const auto& c : checks) n += (c.status == CheckRecord::Status::pass);
    return n;
}

int CheckReport::skipped() const {
    int n = 0;
    for (const auto& c : checks) n += (c.status == CheckRecord::Status::skip);
    return n;
}

json CheckReport::to_json(const json& config_echo, int exit_code, bool with_timestamp) const {
    json j;
    j["tool"] = "anisored";
    j["version"] = "0.1.0";
    j["subcommand"] = subcommand;
    if (with_timestamp) {
        const auto now = std::chrono::system_clock::now();
        const std::time_t t = std::chrono::system_clock::to_time_t(now);
        char buf[32];
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
        j["timestamp"] = buf;
    }
    j["config"] = config_echo;
    json arr = json::array();
    for (const CheckRecord& c : checks) {
        json rec;
        rec["name"] = c.name;
        rec["status"] = status_name(c.status);
        rec["value"] = c.value ? json(*c.value) : json(nullptr);
        rec["residual"] = c.residual ? json(*c.residual) : json(nullptr);
        rec["location"] =
            c.location ? json::array({c.location->x1, c.location->x2}) : json(nullptr);
        rec["tag"] = c.tag;
        arr.push_back(rec);
    }
    j["checks"] = arr;
    j["results"] = results;
    j["summary"] = {{"pass", passed()}, {"fail", failed()}, {"skip", skipped()}};
    j["exit_code"] = exit_code;
    return j;
}

int exit_code_for(Err code) {
    switch (code) {
        case Err::parse_error: return 3;
        case Err::validation_error: return 4;
        case Err::singular_matrix:
        case Err::singular_system:
        case Err::no_convergence:
        case Err::degenerate_leading_coefficient: return 5;
        case Err::real_root_detected: return 6;
        case Err::contour_construction_failed:
        case Err::moment_singular:
        case Err::spectrum_leak: return 7;
        case Err::quadratic_residual_too_large:
        case Err::spectra_not_disjoint:
        case Err::conjugacy_violated: return 8;
        case Err::io_error:
        case Err::grid_too_coarse:
        case Err::all_zero_field:
        case Err::weight_overflow_unavoidable:
        case Err::hypothesis_violated: return 9;
        case Err::internal_error: return 70;
    }
    return 70;
}

} // namespace anisored
