#include "bubble/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bubble/errors.hpp"

namespace bubble {

void Table::add(std::vector<Cell> row) {
    if (row.size() != columns.size())
        throw invariant_error("TableShape", "row width does not match the columns of table " + name);
    rows.push_back(std::move(row));
}

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

std::string cell_text(const Cell& c) {
    if (auto d = std::get_if<double>(&c)) return format_real(*d);
    if (auto i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    if (auto b = std::get_if<bool>(&c)) return *b ? "true" : "false";
    return csv_field(std::get<std::string>(c));
}

void dump_rec(const nlohmann::ordered_json& j, int indent, int depth, std::string& out) {
    const std::string pad = indent > 0 ? std::string(static_cast<size_t>(indent) * (depth + 1), ' ') : "";
    const std::string close = indent > 0 ? std::string(static_cast<size_t>(indent) * depth, ' ') : "";
    const char* nl = indent > 0 ? "\n" : "";
    switch (j.type()) {
        case nlohmann::json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{";
            out += nl;
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) {
                    out += ",";
                    out += nl;
                }
                first = false;
                out += pad + nlohmann::json(it.key()).dump() + (indent > 0 ? ": " : ":");
                dump_rec(it.value(), indent, depth + 1, out);
            }
            out += nl + close + "}";
            return;
        }
        case nlohmann::json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[";
            out += nl;
            for (size_t i = 0; i < j.size(); ++i) {
                if (i) {
                    out += ",";
                    out += nl;
                }
                out += pad;
                dump_rec(j[i], indent, depth + 1, out);
            }
            out += nl + close + "]";
            return;
        }
        case nlohmann::json::value_t::number_float: {
            const double v = j.get<double>();
            out += std::isfinite(v) ? format_real(v) : "null";
            return;
        }
        default: out += j.dump();
    }
}

}  // namespace

std::string to_csv(const Table& t) {
    std::string s;
    for (size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + csv_field(t.columns[i]);
    s += "\n";
    for (const auto& row : t.rows) {
        for (size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + cell_text(row[i]);
        s += "\n";
    }
    return s;
}

std::string dump_json(const nlohmann::ordered_json& j, int indent) {
    std::string out;
    dump_rec(j, indent, 0, out);
    return out;
}

bool RunReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

nlohmann::ordered_json RunReport::summary(const std::string& generated_at) const {
    using J = nlohmann::ordered_json;
    J j;
    j["schema_version"] = report_schema_version;
    j["tool"] = "bubble-lab";
    j["subcommand"] = subcommand;
    j["generated_at"] = generated_at;
    j["status"] = error.is_null() ? (all_pass() ? "pass" : "fail") : "error";
    j["exit_code"] = exit_code;
    j["config"] = config;
    J cs = J::array();
    for (const auto& c : checks)
        cs.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"tolerance", c.tolerance}, {"detail", c.detail}});
    j["checks"] = cs;
    j["metrics"] = metrics;
    J ts = J::array();
    for (const auto& t : tables) ts.push_back({{"name", t.name}, {"file", t.name + ".csv"}, {"rows", t.rows.size()}});
    j["tables"] = ts;
    j["error"] = error;
    return j;
}

void write_report(const RunReport& r, const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw validation_error("OutputDirInvalid", "cannot create output directory " + dir + ": " + ec.message());
    auto write = [&](const std::string& name, const std::string& body) {
        const std::filesystem::path p = std::filesystem::path(dir) / name;
        std::ofstream out(p, std::ios::binary);
        out << body;
        if (!out) throw validation_error("OutputWriteFailed", "cannot write " + p.string());
    };
    for (const auto& t : r.tables) write(t.name + ".csv", to_csv(t));
    write(r.subcommand + ".json", dump_json(r.summary(utc_timestamp())) + "\n");
}

std::string utc_timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace bubble
