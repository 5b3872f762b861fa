#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace bubble {

inline constexpr int report_schema_version = 1;

using Cell = std::variant<double, std::int64_t, std::string, bool>;

struct Table {
    std::string name;  // file stem
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row);
};

// %.17g; nan and inf spelled out.
std::string format_real(double v);
std::string to_csv(const Table& t);

struct Check {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct RunReport {
    std::string subcommand;
    nlohmann::ordered_json config;
    std::vector<Check> checks;
    nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
    std::vector<Table> tables;
    nlohmann::ordered_json error;  // null unless the run failed
    int exit_code = 0;

    bool all_pass() const;
    // checks, metrics and table names; generated_at is the only time-dependent field
    nlohmann::ordered_json summary(const std::string& generated_at) const;
};

// JSON text with every floating-point number at 17 significant digits.
std::string dump_json(const nlohmann::ordered_json& j, int indent = 2);

// Writes <dir>/<table>.csv for every table and <dir>/<subcommand>.json.
void write_report(const RunReport& r, const std::string& dir);

std::string utc_timestamp();

}  // namespace bubble
