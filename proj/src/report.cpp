#include "twoq/report.hpp"

#include <chrono>
#include <ctime>

namespace twoq {

namespace {

std::string iso8601_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace

nlohmann::json Report::full() const {
    return nlohmann::json{{"metadata", metadata}, {"payload", payload}};
}

Report make_report(const std::string& command_line, std::uint64_t seed) {
    Report r;
    r.metadata = {
        {"artifact", "twoq"},
        {"version", "0.1.0"},
        {"command", command_line},
        {"seed", seed},
        {"timestamp", iso8601_now()},
    };
    r.payload = nlohmann::json::object();
    return r;
}

std::string render_json(const Report& report) { return report.full().dump(2) + "\n"; }

std::string render_csv(const Report& report) {
    std::string out;
    for (auto it = report.payload.begin(); it != report.payload.end(); ++it) {
        if (it.value().is_primitive()) {
            out += "# " + it.key() + "=" + it.value().dump() + "\n";
        }
    }
    auto join = [](const std::vector<std::string>& fields) {
        std::string line;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) line += ",";
            line += fields[i];
        }
        return line;
    };
    if (!report.csv_header.empty()) out += join(report.csv_header) + "\n";
    for (const auto& row : report.csv_rows) out += join(row) + "\n";
    return out;
}

} // namespace twoq
