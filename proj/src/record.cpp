#include "mauc/harness.hpp"

#include "mauc/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

#ifndef MAUC_VERSION_STRING
#define MAUC_VERSION_STRING "0.0.0+gunknown"
#endif

namespace mauc::harness {

namespace {

void check_finite(const ResultRecord& record)
{
    for (const auto& row : record.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (const auto* v = std::get_if<double>(&row[i]); v && !std::isfinite(*v)) {
                throw NumericError("non-finite value in output column '" + record.columns[i] + "'");
            }
        }
    }
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (const char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

std::string csv_cell(const Cell& cell)
{
    struct Visitor {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(double v) const { return format_double(v); }
        std::string operator()(const std::string& v) const { return csv_field(v); }
    };
    return std::visit(Visitor{}, cell);
}

nlohmann::json json_cell(const Cell& cell)
{
    struct Visitor {
        nlohmann::json operator()(std::monostate) const { return nullptr; }
        nlohmann::json operator()(std::int64_t v) const { return v; }
        nlohmann::json operator()(double v) const { return v; }
        nlohmann::json operator()(const std::string& v) const { return v; }
    };
    return std::visit(Visitor{}, cell);
}

// Config echo as written to output files. The thread count and the output
// path do not affect results, so they are left out and files match across
// --threads values and destinations.
nlohmann::json config_echo(const ExperimentConfig& c)
{
    nlohmann::json j = c;
    j.erase("threads");
    j.erase("output_path");
    return j;
}

} // namespace

void ResultRecord::add_row(std::vector<Cell> row)
{
    if (row.size() != columns.size()) throw std::logic_error("row width does not match the column list");
    rows.push_back(std::move(row));
}

std::string artifact_version() { return MAUC_VERSION_STRING; }

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const ResultRecord& record)
{
    check_finite(record);
    out << "# version: " << record.version << '\n';
    out << "# config: " << config_echo(record.config).dump() << '\n';
    for (const auto& [key, value] : record.metadata) out << "# " << key << ": " << value << '\n';
    if (record.config.record_timing && record.wall_clock_seconds) out << "# wall_clock_seconds: " << format_double(*record.wall_clock_seconds) << '\n';

    for (std::size_t i = 0; i < record.columns.size(); ++i) {
        out << (i ? "," : "") << csv_field(record.columns[i]);
    }
    out << "\r\n";
    for (const auto& row : record.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
        out << "\r\n";
    }
}

void write_json(std::ostream& out, const ResultRecord& record)
{
    check_finite(record);
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    meta["version"] = record.version;
    for (const auto& [key, value] : record.metadata) meta[key] = value;
    if (record.config.record_timing && record.wall_clock_seconds) meta["wall_clock_seconds"] = *record.wall_clock_seconds;

    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : record.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) obj[record.columns[i]] = json_cell(row[i]);
        rows.push_back(std::move(obj));
    }

    nlohmann::ordered_json doc = nlohmann::ordered_json::object();
    doc["config"] = config_echo(record.config);
    doc["metadata"] = std::move(meta);
    doc["columns"] = record.columns;
    doc["rows"] = std::move(rows);
    out << doc.dump(2) << '\n';
}

void emit(const ResultRecord& record, std::ostream& fallback)
{
    const auto write = [&](std::ostream& os) {
        if (record.config.format == OutputFormat::csv) {
            write_csv(os, record);
        } else {
            write_json(os, record);
        }
    };
    if (record.config.output_path.empty()) {
        write(fallback);
        return;
    }
    std::ofstream file(record.config.output_path, std::ios::binary);
    if (!file) throw UsageError("cannot open output file '" + record.config.output_path + "'");
    write(file);
    if (!file) throw std::runtime_error("failed writing '" + record.config.output_path + "'");
}

} // namespace mauc::harness
