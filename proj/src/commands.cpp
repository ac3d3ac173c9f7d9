#include "mauc/harness.hpp"

#include "mauc/block.hpp"
#include "mauc/context_counts.hpp"
#include "mauc/errors.hpp"
#include "mauc/gain.hpp"
#include "mauc/kt.hpp"
#include "mauc/parallel.hpp"
#include "mauc/redundancy.hpp"
#include "mauc/rng.hpp"
#include "mauc/source_model.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <mutex>
#include <string>

namespace mauc::harness {

namespace {

Cell num(double v) { return v; }
Cell integer(std::uint64_t v) { return static_cast<std::int64_t>(v); }
Cell text(std::string s) { return s; }
const Cell none{};

constexpr std::uint64_t kPriorEntropyTag = 0xe47a;
constexpr std::size_t kPriorEntropyTrials = 4000;

ResultRecord make_record(const ExperimentConfig& c, std::vector<std::string> columns)
{
    ResultRecord r;
    r.config = c;
    r.version = artifact_version();
    r.columns = std::move(columns);
    r.metadata = {
        {"log_base", "2 (all lengths, entropies and log(epsilon) in bits)"},
        {"seed_derivation", "trial i uses splitmix64-derived seed derive_seed(seed, i); roles split by fixed tags"},
    };
    return r;
}

void add_theory_metadata(ResultRecord& r)
{
    r.metadata.emplace_back("asymptotic_residual", "O(1/(n sqrt(m))) term of the gain bound ignored");
    r.metadata.emplace_back("minimax_redundancy",
                            "Clarke-Barron asymptotic with Jeffreys constant pi^(k/2)/Gamma(k/2) per state; "
                            "order 1 uses n/k symbols per state; clamped at 0 where the asymptotic form goes negative");
}

void add_gain_metadata(ResultRecord& r)
{
    r.metadata.emplace_back("q_estimation",
                            "one y^m per theta trial; x_trials fresh x^n per theta, the same draws coded "
                            "with and without memory");
    r.metadata.emplace_back("code_length", "ideal KT code length (real-valued bits)");
    r.metadata.emplace_back("quantile", "lower (1-epsilon) quantile: rank ceil((1-epsilon)*T) from the top");
    r.metadata.emplace_back("h_n_convention",
                            "theta rows: H_n = n * entropy_rate(theta); summary rows: n * prior-mean entropy rate");
}

// Order-1 draws cost a k x k stationary solve, so large alphabets get fewer
// trials; the entropy rate concentrates as k grows.
std::size_t prior_entropy_trials(unsigned k, unsigned order)
{
    if (order == 0) return kPriorEntropyTrials;
    const double cube = static_cast<double>(k) * k * k;
    const double budget = static_cast<double>(kPriorEntropyTrials) * 4096.0;
    return std::clamp<std::size_t>(static_cast<std::size_t>(budget / cube), 32, kPriorEntropyTrials);
}

double prior_entropy(const ExperimentConfig& c, unsigned k, unsigned order)
{
    return prior_mean_entropy_rate(k, order, prior_entropy_trials(k, order), derive_seed(c.seed, kPriorEntropyTag),
                                   c.threads);
}

GainBound bound_for(double n, double m, unsigned k, unsigned order, double epsilon, double rate)
{
    BoundInputs in;
    in.n = n;
    in.m = m;
    in.d = static_cast<double>(model_dimension(k, order));
    in.epsilon = epsilon;
    in.source_entropy = n * rate;
    in.minimax_redundancy = average_minimax_redundancy(n, k, order);
    return gain_lower_bound(in);
}

GainExperiment experiment_from(const ExperimentConfig& c)
{
    GainExperiment e;
    e.n = c.n_or_default();
    e.k = c.k_or_default();
    e.order = c.order_or_default();
    e.epsilon = c.epsilon;
    e.theta_trials = c.theta_trials;
    e.x_trials = c.x_trials;
    e.seed = c.seed;
    e.threads = c.threads;
    return e;
}

} // namespace

ResultRecord run_bound(const ExperimentConfig& c)
{
    const unsigned k = c.k_or_default();
    const unsigned order = c.order_or_default();
    const auto n = static_cast<double>(c.n_or_default());

    double rate = 0.0;
    std::string source;
    if (c.entropy_rate) {
        rate = *c.entropy_rate;
        source = "entropy-rate flag";
    } else {
        rate = entropy_rate(sample_jeffreys(k, order, derive_seed(c.seed, stream_tag::theta)));
        source = "sampled theta";
    }

    auto r = make_record(c, {"n", "m", "k", "order", "d", "epsilon", "log2_epsilon", "entropy_rate", "h_n",
                             "r_bar_n", "r_hat", "bound", "h_n_source"});
    add_theory_metadata(r);
    for (const std::uint64_t m : c.m_or_default()) {
        const auto b = bound_for(n, static_cast<double>(m), k, order, c.epsilon, rate);
        r.add_row({integer(c.n_or_default()), integer(m), integer(k), integer(order),
                   integer(model_dimension(k, order)), num(c.epsilon), num(b.log2_epsilon), num(rate),
                   num(b.source_entropy), num(b.minimax_redundancy), num(b.memory_redundancy), num(b.value),
                   text(source)});
    }
    return r;
}

ResultRecord run_simulate(const ExperimentConfig& c)
{
    const auto exp = experiment_from(c);
    const std::uint64_t m = c.m_or_default().front();
    const auto est = empirical_gain(exp, m);
    const auto n = static_cast<double>(exp.n);

    auto r = make_record(c, {"kind", "theta_id", "m", "entropy_rate", "mean_l_n", "mean_l_n_given_m", "q_ratio",
                             "bound", "g_empirical", "difference"});
    add_theory_metadata(r);
    add_gain_metadata(r);

    double cold = 0.0;
    double warm = 0.0;
    for (const auto& s : est.samples) {
        const Cell bound = m >= 1 ? num(bound_for(n, static_cast<double>(m), exp.k, exp.order, c.epsilon,
                                                  s.entropy_rate)
                                            .value)
                                  : none;
        r.add_row({text("theta"), integer(s.theta_id), integer(m), num(s.entropy_rate),
                   num(s.mean_length_without_memory), num(s.mean_length_with_memory), num(s.q_ratio), bound, none,
                   none});
        cold += s.mean_length_without_memory;
        warm += s.mean_length_with_memory;
    }

    const double prior_rate = prior_entropy(c, exp.k, exp.order);
    const auto trials = static_cast<double>(est.samples.size());
    Cell bound = none;
    Cell difference = none;
    if (m >= 1) {
        const double value = bound_for(n, static_cast<double>(m), exp.k, exp.order, c.epsilon, prior_rate).value;
        bound = num(value);
        difference = num(est.g_empirical - value);
    }
    r.add_row({text("summary"), none, integer(m), num(prior_rate), num(cold / trials), num(warm / trials), none,
               bound, num(est.g_empirical), difference});
    r.metadata.emplace_back("quantile_rank", std::to_string(quantile_rank(est.samples.size(), c.epsilon)));
    return r;
}

ResultRecord run_sweep(const ExperimentConfig& c)
{
    const auto exp = experiment_from(c);
    const auto ms = c.m_or_default();
    const auto estimates = empirical_gain_sweep(exp, ms);
    const double prior_rate = prior_entropy(c, exp.k, exp.order);
    const auto n = static_cast<double>(exp.n);

    auto r = make_record(c, {"m", "r_hat", "bound", "g_empirical", "difference"});
    add_theory_metadata(r);
    add_gain_metadata(r);
    r.metadata.emplace_back("pairing", "all memory sizes share theta, x draws and one memory stream (prefixes)");
    for (std::size_t i = 0; i < ms.size(); ++i) {
        const auto b = bound_for(n, static_cast<double>(ms[i]), exp.k, exp.order, c.epsilon, prior_rate);
        r.add_row({integer(ms[i]), num(b.memory_redundancy), num(b.value), num(estimates[i].g_empirical),
                   num(estimates[i].g_empirical - b.value)});
    }
    return r;
}

ResultRecord run_entropy_check(const ExperimentConfig& c)
{
    const auto ms = c.m_or_default();
    const auto check = compression_to_entropy_check(c.n_or_default(), c.k_or_default(), c.order_or_default(), ms,
                                                    c.x_trials, c.seed, c.threads);
    auto r = make_record(c, {"m", "mean_bits_per_symbol", "entropy_rate", "gap_bits_per_symbol", "gap_standard_error"});
    r.metadata.emplace_back("code_length", "ideal KT code length (real-valued bits), warm-started on y^m");
    r.metadata.emplace_back("gap_estimator",
                            "mean of (l(x) + log2 P_theta(x))/n plus (H(X_1) - entropy_rate)/n; unbiased for "
                            "E[l]/n - entropy_rate");
    for (const auto& row : check.rows) {
        r.add_row({integer(row.m), num(row.mean_bits_per_symbol), num(check.entropy_rate),
                   num(row.gap_bits_per_symbol), num(row.gap_standard_error)});
    }
    return r;
}

ResultRecord run_reproduce_paper(const ExperimentConfig& c)
{
    const unsigned width = *c.symbol_width;
    const unsigned k = *c.k;
    const unsigned order = *c.order;
    const double rate = *c.entropy_rate;
    const std::uint64_t n_bytes = c.n.value_or(kHeadlineNBytes);
    const std::uint64_t m_bytes = c.m.empty() ? kHeadlineMBytes : c.m.front();
    const std::uint64_t n_sym = n_bytes * 8 / width;
    const std::uint64_t m_sym = m_bytes * 8 / width;

    auto r = make_record(c, {"kind", "n_symbols", "m_symbols", "d", "epsilon", "log2_epsilon", "entropy_rate", "h_n",
                             "r_bar_n", "r_hat", "numerator", "denominator", "bound", "g_empirical", "flag"});
    add_theory_metadata(r);
    add_gain_metadata(r);
    r.metadata.emplace_back("assumption_symbol_width_bits", std::to_string(width));
    r.metadata.emplace_back("assumption_alphabet_size", std::to_string(k));
    r.metadata.emplace_back("assumption_order", std::to_string(order));
    r.metadata.emplace_back("assumption_entropy_rate_bits_per_symbol", format_double(rate));
    r.metadata.emplace_back("assumption_units", "1 kB = 1024 bytes, 1 MB = 1048576 bytes, 8 bits per byte");
    r.metadata.emplace_back("assumption_n_bytes", std::to_string(n_bytes));
    r.metadata.emplace_back("assumption_m_bytes", std::to_string(m_bytes));
    r.metadata.emplace_back("scaled_run", "n and m divided by " + std::to_string(c.scale)
                                              + "; theta from Jeffreys' prior; bound uses the prior-mean entropy rate");
    r.metadata.emplace_back("prior_entropy_trials", std::to_string(prior_entropy_trials(k, order)));
    r.metadata.emplace_back("pass_threshold", "bound >= 1.5 (more than 50% gain)");

    const auto d = model_dimension(k, order);
    const auto add = [&](const char* kind, std::uint64_t ns, std::uint64_t ms, double h_rate, Cell g) {
        const auto b = bound_for(static_cast<double>(ns), static_cast<double>(ms), k, order, c.epsilon, h_rate);
        const double numerator = b.minimax_redundancy + b.log2_epsilon - b.memory_redundancy;
        const double denominator = b.source_entropy + b.memory_redundancy;
        r.add_row({text(kind), integer(ns), integer(ms), integer(d), num(c.epsilon), num(b.log2_epsilon), num(h_rate),
                   num(b.source_entropy), num(b.minimax_redundancy), num(b.memory_redundancy), num(numerator),
                   num(denominator), num(b.value), std::move(g), text(b.value >= 1.5 ? "PASS" : "INFO")});
    };
    add("headline-bound", n_sym, m_sym, rate, none);

    GainExperiment exp;
    exp.n = n_sym / c.scale;
    exp.k = k;
    exp.order = order;
    exp.epsilon = c.epsilon;
    exp.theta_trials = c.theta_trials;
    exp.x_trials = c.x_trials;
    exp.seed = c.seed;
    exp.threads = c.threads;
    const std::uint64_t m_scaled = m_sym / c.scale;
    const auto est = empirical_gain(exp, m_scaled);
    add("scaled-bound", exp.n, m_scaled, rate, none);
    add("scaled-empirical", exp.n, m_scaled, prior_entropy(c, k, order), num(est.g_empirical));
    return r;
}

namespace {

struct FuzzCase {
    unsigned k;
    unsigned order;
    ContextCounts warm;
    SymbolSequence x;
};

FuzzCase make_fuzz_case(std::uint64_t seed, bool force_empty)
{
    Rng rng(seed);
    const auto k = static_cast<unsigned>(rng.uniform_int(2, 8));
    const auto order = static_cast<unsigned>(rng.uniform_int(0, 1));
    const std::uint64_t n = force_empty ? 0 : rng.uniform_int(0, 4096);

    ContextCounts warm(k, order);
    switch (rng.uniform_int(0, 3)) {
    case 0:
        break;  // cold start
    case 1: {
        const auto theta = sample_jeffreys(k, order, rng.next_u64());
        warm = accumulate_counts(generate(theta, rng.uniform_int(0, 16384), rng.next_u64()), order);
        break;
    }
    case 2: {
        std::vector<std::uint32_t> cells(state_count(k, order) * k);
        const auto bits = rng.uniform_int(0, 24);
        for (auto& v : cells) v = static_cast<std::uint32_t>(rng.uniform_int(0, (std::uint64_t{1} << bits) - 1));
        warm = ContextCounts(k, order, std::move(cells));
        break;
    }
    default: {
        // Cells at or near the cap exercise count halving.
        std::vector<std::uint32_t> cells(state_count(k, order) * k);
        for (auto& v : cells) v = ContextCounts::kCellCap - static_cast<std::uint32_t>(rng.uniform_int(0, 3));
        warm = ContextCounts(k, order, std::move(cells));
        break;
    }
    }

    SymbolSequence x(k);
    if (rng.uniform_int(0, 1) == 0) {
        const auto theta = sample_jeffreys(k, order, rng.next_u64());
        x = generate(theta, n, rng.next_u64());
    } else {
        x.reserve(n);
        for (std::uint64_t t = 0; t < n; ++t) x.push_back(static_cast<Symbol>(rng.uniform_int(0, k - 1)));
    }
    return {k, order, std::move(warm), std::move(x)};
}

struct FuzzOutcome {
    bool ok = true;
    bool sandwich_ok = true;
    std::string reason;
    double ideal_bits = 0.0;
    std::uint64_t actual_bits = 0;
    std::uint64_t n = 0;
};

FuzzOutcome run_fuzz_case(std::uint64_t seed, bool force_empty, bool corrupt)
{
    FuzzOutcome out;
    auto fc = make_fuzz_case(seed, force_empty);
    out.n = fc.x.size();
    try {
        auto block = encode(fc.x, fc.warm);
        out.actual_bits = block.payload_length_bits;
        out.ideal_bits = ideal_length(fc.x, fc.warm);
        if (!(out.ideal_bits <= static_cast<double>(out.actual_bits) + 1.0)) {
            out.ok = out.sandwich_ok = false;
            out.reason = "ideal_bits > actual_bits + 1";
        } else if (!(static_cast<double>(out.actual_bits) <= std::ceil(out.ideal_bits) + 2.0)) {
            out.ok = out.sandwich_ok = false;
            out.reason = "actual_bits > ceil(ideal_bits) + 2";
        }
        if (corrupt && block.payload_length_bits > 0) {
            Rng rng(derive_seed(seed, 0xc0));
            const auto bit = rng.uniform_int(0, block.payload_length_bits - 1);
            block.payload[bit / 8] ^= static_cast<std::uint8_t>(0x80u >> (bit % 8));
        }
        const auto wire = serialize(block);
        const auto decoded = decode(deserialize(wire), fc.warm, fc.x.size());
        if (!(decoded == fc.x)) {
            out.ok = false;
            out.reason += out.reason.empty() ? "round trip mismatch" : "; round trip mismatch";
        }
    } catch (const std::exception& e) {
        out.ok = false;
        out.reason += (out.reason.empty() ? "exception: " : "; exception: ") + std::string(e.what());
    }
    return out;
}

} // namespace

ResultRecord run_roundtrip_fuzz(const ExperimentConfig& c)
{
    const std::size_t cases = c.fuzz_cases;
    const std::uint64_t root = derive_seed(c.seed, stream_tag::fuzz);
    std::vector<FuzzOutcome> outcomes(cases);
    parallel_for(cases, c.threads, [&](std::size_t i) {
        outcomes[i] = run_fuzz_case(derive_seed(root, i), i == 0, c.inject_corruption);
    });

    auto r = make_record(c, {"kind", "case", "case_seed", "n", "ideal_bits", "actual_bits", "detail"});
    r.metadata.emplace_back("case_generator", "k in 2..8, order in {0,1}, n in 0..4096 (case 0 empty), warm counts "
                                              "zero / from a Jeffreys source / random / near the cell cap");
    r.metadata.emplace_back("checks", "serialize+deserialize+decode identity; ideal <= actual + 1; "
                                      "actual <= ceil(ideal) + 2");
    if (c.inject_corruption) r.metadata.emplace_back("negative_control", "one payload bit flipped per case");

    std::size_t failures = 0;
    std::size_t sandwich_failures = 0;
    std::size_t empty_cases = 0;
    double worst_excess = -1e300;
    for (std::size_t i = 0; i < cases; ++i) {
        const auto& o = outcomes[i];
        if (o.n == 0) ++empty_cases;
        worst_excess = std::max(worst_excess, static_cast<double>(o.actual_bits) - o.ideal_bits);
        if (!o.sandwich_ok) ++sandwich_failures;
        if (!o.ok) {
            ++failures;
            if (failures <= 50) {
                r.add_row({text("failure"), integer(i), text(std::to_string(derive_seed(root, i))), integer(o.n),
                           num(o.ideal_bits), integer(o.actual_bits), text(o.reason)});
            }
        }
    }
    r.add_row({text("summary"), none, none, none, none, none,
               text("cases=" + std::to_string(cases) + " failures=" + std::to_string(failures)
                    + " sandwich_failures=" + std::to_string(sandwich_failures) + " empty_cases="
                    + std::to_string(empty_cases) + " worst_actual_minus_ideal=" + format_double(worst_excess))});
    r.failures = failures;
    return r;
}

ResultRecord run(const ExperimentConfig& c)
{
    validate(c);
    const auto start = std::chrono::steady_clock::now();
    ResultRecord r;
    switch (c.command) {
    case Command::bound: r = run_bound(c); break;
    case Command::simulate: r = run_simulate(c); break;
    case Command::sweep: r = run_sweep(c); break;
    case Command::entropy_check: r = run_entropy_check(c); break;
    case Command::reproduce_paper: r = run_reproduce_paper(c); break;
    case Command::roundtrip_fuzz: r = run_roundtrip_fuzz(c); break;
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    r.wall_clock_seconds = elapsed.count();
    return r;
}

} // namespace mauc::harness
