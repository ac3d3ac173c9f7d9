#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace mauc::harness {

/// Bad command line or configuration; exit code 2.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Command { bound, simulate, sweep, entropy_check, reproduce_paper, roundtrip_fuzz };
enum class OutputFormat { csv, json };

std::string to_string(Command c);
Command parse_command(const std::string& name);
std::string to_string(OutputFormat f);
OutputFormat parse_format(const std::string& name);

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitFuzzFailure = 4;

/// Defaults used when a field is left unset.
inline constexpr std::uint64_t kDefaultN = 1024;
inline constexpr std::uint64_t kDefaultM = 65536;
inline constexpr unsigned kDefaultK = 2;
inline constexpr double kDefaultEpsilon = 0.05;
/// Headline sizes for reproduce-paper, in bytes (1 kB = 1024 B, 1 MB = 2^20 B).
inline constexpr std::uint64_t kHeadlineNBytes = 128 * 1024;
inline constexpr std::uint64_t kHeadlineMBytes = 8 * 1024 * 1024;

struct ExperimentConfig {
    Command command = Command::bound;
    std::optional<std::uint64_t> n;
    std::vector<std::uint64_t> m;  // one value, or a schedule
    std::optional<unsigned> k;
    std::optional<unsigned> order;
    double epsilon = kDefaultEpsilon;
    std::size_t theta_trials = 200;
    std::size_t x_trials = 20;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string output_path;  // empty: stdout
    OutputFormat format = OutputFormat::csv;
    std::optional<unsigned> symbol_width;  // bits per symbol (reproduce-paper)
    std::optional<double> entropy_rate;    // bits per symbol
    std::uint64_t scale = 64;              // reproduce-paper desk-size divisor
    std::size_t fuzz_cases = 10000;
    bool inject_corruption = false;
    bool record_timing = false;

    std::uint64_t n_or_default() const { return n.value_or(kDefaultN); }
    unsigned k_or_default() const { return k.value_or(kDefaultK); }
    unsigned order_or_default() const { return order.value_or(0); }
    std::vector<std::uint64_t> m_or_default() const { return m.empty() ? std::vector<std::uint64_t>{kDefaultM} : m; }

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);

/// Throws UsageError when a field is outside what the command accepts.
void validate(const ExperimentConfig& c);

using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

struct ResultRecord {
    ExperimentConfig config;
    std::string version;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::pair<std::string, std::string>> metadata;
    std::optional<double> wall_clock_seconds;  // written only when config.record_timing
    std::size_t failures = 0;                  // roundtrip-fuzz only

    void add_row(std::vector<Cell> row);
};

/// "<semver>+g<short git revision>".
std::string artifact_version();

/// Floats use 17 significant digits. CSV starts with '#' comment lines for
/// the version, the config (compact JSON) and each metadata entry, then a
/// header row and RFC 4180 quoted records. JSON is one object with
/// "config", "metadata" and "rows". Non-finite numbers raise NumericError.
void write_csv(std::ostream& out, const ResultRecord& record);
void write_json(std::ostream& out, const ResultRecord& record);
std::string format_double(double v);

ResultRecord run_bound(const ExperimentConfig& c);
ResultRecord run_simulate(const ExperimentConfig& c);
ResultRecord run_sweep(const ExperimentConfig& c);
ResultRecord run_entropy_check(const ExperimentConfig& c);
ResultRecord run_reproduce_paper(const ExperimentConfig& c);
ResultRecord run_roundtrip_fuzz(const ExperimentConfig& c);

/// Validates, dispatches on c.command and fills wall_clock_seconds.
ResultRecord run(const ExperimentConfig& c);

/// Writes the record to c.output_path (or `fallback` when empty) in c.format.
void emit(const ResultRecord& record, std::ostream& fallback);

} // namespace mauc::harness
