// mauc: memory-assisted universal coding experiments.
//
//   mauc <command> [--n N] [--m M|M1,M2,..|LO..HI] [--k K] [--order 0|1]
//        [--epsilon E] [--theta-trials T] [--x-trials X] [--seed S]
//        [--out PATH] [--format csv|json] [--threads J]
//        [--symbol-width BITS] [--entropy-rate H]
//
// Exit codes: 0 ok, 2 usage, 3 numeric failure, 4 fuzz failure.

#include "mauc/errors.hpp"
#include "mauc/harness.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <iostream>
#include <string>
#include <string_view>
#include <vector>

namespace {

using mauc::harness::UsageError;

std::uint64_t parse_u64(std::string_view s)
{
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw UsageError("not an unsigned integer: '" + std::string(s) + "'");
    }
    return v;
}

// "65536", "512,4096,65536", or "1024..8388608" (doubling from LO to HI).
std::vector<std::uint64_t> parse_memory_list(const std::string& spec)
{
    std::vector<std::uint64_t> out;
    if (const auto dots = spec.find(".."); dots != std::string::npos) {
        const auto lo = parse_u64(std::string_view(spec).substr(0, dots));
        const auto hi = parse_u64(std::string_view(spec).substr(dots + 2));
        if (lo == 0 || hi < lo) throw UsageError("range LO..HI needs 1 <= LO <= HI");
        for (std::uint64_t m = lo; m <= hi; m *= 2) {
            out.push_back(m);
            if (m > hi / 2) break;
        }
        return out;
    }
    std::string_view rest(spec);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        out.push_back(parse_u64(rest.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    if (out.empty()) throw UsageError("empty --m list");
    return out;
}

struct Options {
    std::uint64_t n = 0;
    std::string m;
    unsigned k = 0;
    unsigned order = 0;
    unsigned symbol_width = 0;
    double entropy_rate = 0.0;
    std::string format = "csv";
};

void add_common(CLI::App* sub, mauc::harness::ExperimentConfig& cfg, Options& opt)
{
    sub->add_option("--n", opt.n, "sequence length in symbols (reproduce-paper: bytes)");
    sub->add_option("--m", opt.m, "memory length(s): M, M1,M2,... or LO..HI doubling (reproduce-paper: bytes)");
    sub->add_option("--k", opt.k, "alphabet size");
    sub->add_option("--order", opt.order, "source order, 0 or 1");
    sub->add_option("--epsilon", cfg.epsilon, "fraction of sources allowed below the gain")->capture_default_str();
    sub->add_option("--theta-trials", cfg.theta_trials, "number of sampled sources")->capture_default_str();
    sub->add_option("--x-trials", cfg.x_trials, "sequences per source")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "root seed")->envname("MAUC_SEED")->capture_default_str();
    sub->add_option("--out", cfg.output_path, "output file (default: stdout)");
    sub->add_option("--format", opt.format, "csv or json")->capture_default_str();
    sub->add_option("--threads", cfg.threads, "worker threads; output does not depend on it")->capture_default_str();
    sub->add_option("--symbol-width", opt.symbol_width, "bits per symbol (reproduce-paper)");
    sub->add_option("--entropy-rate", opt.entropy_rate, "entropy rate, bits per symbol");
    sub->add_option("--scale", cfg.scale, "reproduce-paper: divisor for the desk-size run")->capture_default_str();
    sub->add_option("--cases", cfg.fuzz_cases, "roundtrip-fuzz: number of cases")->capture_default_str();
    sub->add_flag("--inject-corruption", cfg.inject_corruption, "roundtrip-fuzz: flip a payload bit (negative control)");
    sub->add_flag("--timing", cfg.record_timing, "write wall-clock seconds into the output");
}

} // namespace

int main(int argc, char** argv)
{
    using namespace mauc::harness;

    CLI::App app{"Memory-assisted universal coding: bounds, simulations and coder checks"};
    app.require_subcommand(1);

    ExperimentConfig cfg;
    Options opt;
    const std::vector<std::pair<Command, const char*>> commands{
        {Command::bound, "gain lower bound for given n, m, k, order"},
        {Command::simulate, "empirical memorization gain vs the bound at one m"},
        {Command::sweep, "bound and empirical gain over a memory schedule"},
        {Command::entropy_check, "warm-started code length vs entropy rate as m grows"},
        {Command::reproduce_paper, "bound at 128 kB / 8 MB under explicit interpretation flags"},
        {Command::roundtrip_fuzz, "randomized encode/decode and length checks"},
    };
    std::vector<std::pair<Command, CLI::App*>> subs;
    for (const auto& [cmd, help] : commands) {
        auto* sub = app.add_subcommand(to_string(cmd), help);
        add_common(sub, cfg, opt);
        subs.emplace_back(cmd, sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        for (const auto& [cmd, sub] : subs) {
            if (!sub->parsed()) continue;
            cfg.command = cmd;
            if (sub->count("--n")) cfg.n = opt.n;
            if (sub->count("--m")) cfg.m = parse_memory_list(opt.m);
            if (sub->count("--k")) cfg.k = opt.k;
            if (sub->count("--order")) cfg.order = opt.order;
            if (sub->count("--symbol-width")) cfg.symbol_width = opt.symbol_width;
            if (sub->count("--entropy-rate")) cfg.entropy_rate = opt.entropy_rate;
        }
        cfg.format = parse_format(opt.format);

        const auto record = run(cfg);
        emit(record, std::cout);
        std::cerr << to_string(cfg.command) << ": done in "
                  << format_double(record.wall_clock_seconds.value_or(0.0)) << " s\n";
        if (record.failures > 0) {
            std::cerr << "roundtrip-fuzz: " << record.failures << " failing case(s); first failing seeds:\n";
            for (const auto& row : record.rows) {
                if (std::get<std::string>(row[0]) == "failure") {
                    std::cerr << "  case " << std::get<std::int64_t>(row[1]) << " seed "
                              << std::get<std::string>(row[2]) << ": " << std::get<std::string>(row[6]) << '\n';
                }
            }
            return kExitFuzzFailure;
        }
        return kExitOk;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const mauc::ParameterError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const mauc::InputError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const mauc::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
