#include "mauc/harness.hpp"

#include "mauc/source_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>

namespace mauc::harness {

namespace {

constexpr std::array<std::pair<Command, const char*>, 6> kCommandNames{{
    {Command::bound, "bound"},
    {Command::simulate, "simulate"},
    {Command::sweep, "sweep"},
    {Command::entropy_check, "entropy-check"},
    {Command::reproduce_paper, "reproduce-paper"},
    {Command::roundtrip_fuzz, "roundtrip-fuzz"},
}};

template <class T>
void put_optional(nlohmann::json& j, const char* key, const std::optional<T>& v)
{
    if (v) {
        j[key] = *v;
    } else {
        j[key] = nullptr;
    }
}

template <class T>
void get_optional(const nlohmann::json& j, const char* key, std::optional<T>& v)
{
    if (!j.contains(key) || j.at(key).is_null()) {
        v.reset();
    } else {
        v = j.at(key).get<T>();
    }
}

} // namespace

std::string to_string(Command c)
{
    for (const auto& [cmd, name] : kCommandNames) {
        if (cmd == c) return name;
    }
    return "unknown";
}

Command parse_command(const std::string& name)
{
    for (const auto& [cmd, n] : kCommandNames) {
        if (name == n) return cmd;
    }
    throw UsageError("unknown command '" + name + "'");
}

std::string to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

OutputFormat parse_format(const std::string& name)
{
    if (name == "csv") return OutputFormat::csv;
    if (name == "json") return OutputFormat::json;
    throw UsageError("unknown output format '" + name + "' (expected csv or json)");
}

void to_json(nlohmann::json& j, const ExperimentConfig& c)
{
    j = nlohmann::json::object();
    j["command"] = to_string(c.command);
    put_optional(j, "n", c.n);
    j["m"] = c.m;
    put_optional(j, "k", c.k);
    put_optional(j, "order", c.order);
    j["epsilon"] = c.epsilon;
    j["theta_trials"] = c.theta_trials;
    j["x_trials"] = c.x_trials;
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    j["output_path"] = c.output_path;
    j["format"] = to_string(c.format);
    put_optional(j, "symbol_width", c.symbol_width);
    put_optional(j, "entropy_rate", c.entropy_rate);
    j["scale"] = c.scale;
    j["fuzz_cases"] = c.fuzz_cases;
    j["inject_corruption"] = c.inject_corruption;
    j["record_timing"] = c.record_timing;
}

void from_json(const nlohmann::json& j, ExperimentConfig& c)
{
    c.command = parse_command(j.at("command").get<std::string>());
    get_optional(j, "n", c.n);
    c.m = j.at("m").get<std::vector<std::uint64_t>>();
    get_optional(j, "k", c.k);
    get_optional(j, "order", c.order);
    c.epsilon = j.at("epsilon").get<double>();
    c.theta_trials = j.at("theta_trials").get<std::size_t>();
    c.x_trials = j.at("x_trials").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.threads = j.value("threads", 1u);
    c.output_path = j.value("output_path", std::string{});
    c.format = parse_format(j.at("format").get<std::string>());
    get_optional(j, "symbol_width", c.symbol_width);
    get_optional(j, "entropy_rate", c.entropy_rate);
    c.scale = j.at("scale").get<std::uint64_t>();
    c.fuzz_cases = j.at("fuzz_cases").get<std::size_t>();
    c.inject_corruption = j.at("inject_corruption").get<bool>();
    c.record_timing = j.at("record_timing").get<bool>();
}

void validate(const ExperimentConfig& c)
{
    const auto require = [](bool ok, const std::string& msg) {
        if (!ok) throw UsageError(msg);
    };
    require(c.threads >= 1, "--threads must be >= 1");
    require(c.epsilon > 0.0 && c.epsilon < 1.0, "--epsilon must lie in (0, 1)");

    if (c.command == Command::roundtrip_fuzz) {
        require(c.fuzz_cases >= 1, "--cases must be >= 1");
        return;
    }

    if (c.command == Command::reproduce_paper) {
        std::vector<std::string> missing;
        if (!c.symbol_width) missing.emplace_back("--symbol-width <bits per symbol>");
        if (!c.k) missing.emplace_back("--k <alphabet size>");
        if (!c.order) missing.emplace_back("--order 1");
        if (!c.entropy_rate) missing.emplace_back("--entropy-rate <bits per symbol>");
        if (!missing.empty()) {
            std::string msg =
                "reproduce-paper needs an explicit interpretation of the headline experiment "
                "(n = 128 kB, m = 8 MB, first-order Markov source), which does not state the symbol "
                "width, alphabet size or entropy rate. Missing:";
            for (const auto& m : missing) msg += "\n  " + m;
            throw UsageError(msg);
        }
        require(*c.order == 1, "reproduce-paper models a first-order Markov source: use --order 1");
        require(*c.symbol_width >= 1 && *c.symbol_width <= 16, "--symbol-width must be in 1..16 bits");
        require(*c.k >= 2 && (std::uint64_t{*c.k} <= (std::uint64_t{1} << *c.symbol_width)),
                "--k must be in 2..2^symbol-width");
        require(*c.entropy_rate >= 0.0 && *c.entropy_rate <= std::log2(static_cast<double>(*c.k)),
                "--entropy-rate must lie in [0, log2 k]");
        require(c.scale >= 1, "--scale must be >= 1");
        require(c.m.size() <= 1, "reproduce-paper takes a single --m (bytes)");
        require(c.theta_trials >= 10, "--theta-trials must be >= 10");
        require(c.x_trials >= 1, "--x-trials must be >= 1");
        const std::uint64_t n_bytes = c.n.value_or(kHeadlineNBytes);
        const std::uint64_t m_bytes = c.m.empty() ? kHeadlineMBytes : c.m.front();
        require(n_bytes * 8 / *c.symbol_width / c.scale >= 2, "scaled n must be at least 2 symbols");
        require(m_bytes * 8 / *c.symbol_width / c.scale >= 1, "scaled m must be at least 1 symbol");
        return;
    }

    const unsigned k = c.k_or_default();
    const unsigned order = c.order_or_default();
    require(k >= 2 && k <= 0xFFFF, "--k must be in 2..65535");
    require(order <= 1, "--order must be 0 or 1");
    require(c.n_or_default() >= 2, "--n must be >= 2");
    const auto ms = c.m_or_default();
    if (c.entropy_rate) {
        require(*c.entropy_rate >= 0.0 && *c.entropy_rate <= std::log2(static_cast<double>(k)),
                "--entropy-rate must lie in [0, log2 k]");
    }

    switch (c.command) {
    case Command::bound:
        for (const auto m : ms) require(m >= 1, "--m must be >= 1 for the bound");
        break;
    case Command::simulate:
        require(ms.size() == 1, "simulate takes a single --m");
        require(c.theta_trials >= 10, "--theta-trials must be >= 10");
        require(c.x_trials >= 1, "--x-trials must be >= 1");
        break;
    case Command::sweep:
        for (const auto m : ms) require(m >= 1, "sweep memory sizes must be >= 1");
        require(c.theta_trials >= 10, "--theta-trials must be >= 10");
        require(c.x_trials >= 1, "--x-trials must be >= 1");
        break;
    case Command::entropy_check:
        require(std::adjacent_find(ms.begin(), ms.end(), std::greater_equal<>()) == ms.end(),
                "entropy-check needs a strictly increasing --m schedule");
        require(c.x_trials >= 2, "--x-trials must be >= 2");
        break;
    default:
        break;
    }
}

} // namespace mauc::harness
