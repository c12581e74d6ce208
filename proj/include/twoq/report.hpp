#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace twoq {

/**
 * Machine-readable command report. The payload is deterministic per (command,
 * seed); only metadata.timestamp varies between runs.
 */
struct Report {
    nlohmann::json metadata;
    nlohmann::json payload;

    // Flat tabular projection used by the CSV format.
    std::vector<std::string> csv_header;
    std::vector<std::vector<std::string>> csv_rows;

    nlohmann::json full() const;
};

Report make_report(const std::string& command_line, std::uint64_t seed);

std::string render_json(const Report& report);

/// Scalar payload fields become '# key=value' comment lines, followed by the
/// tabular projection.
std::string render_csv(const Report& report);

} // namespace twoq
