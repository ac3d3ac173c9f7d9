#include "mauc/gain.hpp"

#include "mauc/context_counts.hpp"
#include "mauc/errors.hpp"
#include "mauc/kt.hpp"
#include "mauc/parallel.hpp"
#include "mauc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace mauc {

std::size_t quantile_rank(std::size_t count, double epsilon)
{
    if (count == 0) throw ParameterError("quantile of an empty sample");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("epsilon must lie in (0, 1)");
    const double target = (1.0 - epsilon) * static_cast<double>(count);
    auto rank = static_cast<std::size_t>(std::ceil(target));
    // (1 - eps) * T can land just above an integer through rounding.
    if (rank > 0 && static_cast<double>(rank - 1) >= target - 1e-9 * std::max(1.0, target)) --rank;
    return std::clamp<std::size_t>(rank, 1, count);
}

double lower_quantile(std::span<const double> values, double epsilon)
{
    const std::size_t rank = quantile_rank(values.size(), epsilon);
    std::vector<double> sorted(values.begin(), values.end());
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank - 1), sorted.end(),
                     std::greater<>());
    return sorted[rank - 1];
}

namespace {

// Extends counts built from y[0, from) to y[0, to).
void extend_counts(ContextCounts& counts, const SymbolSequence& y, std::uint64_t from, std::uint64_t to)
{
    if (counts.order() == 0) {
        for (std::uint64_t t = from; t < to; ++t) counts.increment(0, y[t]);
    } else {
        for (std::uint64_t t = std::max<std::uint64_t>(from, 1); t < to; ++t) counts.increment(y[t - 1], y[t]);
    }
}

// Warm counts for each memory size, in the caller's order, from one stream.
std::vector<ContextCounts> warm_counts_for(const SymbolSequence& y, unsigned order,
                                           std::span<const std::uint64_t> memory_sizes)
{
    std::vector<std::size_t> by_size(memory_sizes.size());
    std::iota(by_size.begin(), by_size.end(), std::size_t{0});
    std::stable_sort(by_size.begin(), by_size.end(),
                     [&](std::size_t a, std::size_t b) { return memory_sizes[a] < memory_sizes[b]; });

    std::vector<ContextCounts> out(memory_sizes.size(), ContextCounts(y.alphabet_size(), order));
    ContextCounts running(y.alphabet_size(), order);
    std::uint64_t done = 0;
    for (const std::size_t j : by_size) {
        extend_counts(running, y, done, memory_sizes[j]);
        done = memory_sizes[j];
        out[j] = running;
    }
    return out;
}

void check_experiment(const GainExperiment& exp)
{
    (void)state_count(exp.k, exp.order);
    if (exp.n < 1) throw ParameterError("n must be >= 1");
    if (exp.theta_trials < 10) throw ParameterError("theta_trials must be >= 10");
    if (exp.x_trials < 1) throw ParameterError("x_trials must be >= 1");
    if (!(exp.epsilon > 0.0 && exp.epsilon < 1.0)) throw ParameterError("epsilon must lie in (0, 1)");
}

} // namespace

GainEstimate empirical_gain(const GainExperiment& exp, std::uint64_t m)
{
    const std::uint64_t sizes[] = {m};
    return std::move(empirical_gain_sweep(exp, sizes).front());
}

std::vector<GainEstimate> empirical_gain_sweep(const GainExperiment& exp, std::span<const std::uint64_t> memory_sizes)
{
    check_experiment(exp);
    if (memory_sizes.empty()) throw ParameterError("at least one memory size is required");
    const std::uint64_t longest = *std::max_element(memory_sizes.begin(), memory_sizes.end());
    const std::size_t sizes = memory_sizes.size();

    // samples[trial][size]
    std::vector<std::vector<GainSample>> samples(exp.theta_trials, std::vector<GainSample>(sizes));
    parallel_for(exp.theta_trials, exp.threads, [&](std::size_t i) {
        const std::uint64_t trial_seed = derive_seed(exp.seed, i);
        const auto theta = sample_jeffreys(exp.k, exp.order, derive_seed(trial_seed, stream_tag::theta));
        const SequenceSampler sampler(theta);
        const double rate = entropy_rate(theta);
        const auto y = sampler.sample(longest, derive_seed(trial_seed, stream_tag::memory));
        const auto warm = warm_counts_for(y, exp.order, memory_sizes);
        const ContextCounts zero(exp.k, exp.order);

        const std::uint64_t x_root = derive_seed(trial_seed, stream_tag::sequence);
        double cold_sum = 0.0;
        std::vector<double> warm_sum(sizes, 0.0);
        for (std::size_t j = 0; j < exp.x_trials; ++j) {
            const auto x = sampler.sample(exp.n, derive_seed(x_root, j));
            cold_sum += ideal_length(x, zero);
            for (std::size_t s = 0; s < sizes; ++s) {
                warm_sum[s] += ideal_length(x, warm[s]);
            }
        }
        const auto trials = static_cast<double>(exp.x_trials);
        for (std::size_t s = 0; s < sizes; ++s) {
            auto& out = samples[i][s];
            out.theta_id = i;
            out.mean_length_without_memory = cold_sum / trials;
            out.mean_length_with_memory = warm_sum[s] / trials;
            out.q_ratio = out.mean_length_without_memory / out.mean_length_with_memory;
            out.entropy_rate = rate;
        }
    });

    std::vector<GainEstimate> out(sizes);
    for (std::size_t s = 0; s < sizes; ++s) {
        auto& est = out[s];
        est.memory_length = memory_sizes[s];
        est.epsilon = exp.epsilon;
        est.samples.reserve(exp.theta_trials);
        std::vector<double> q;
        q.reserve(exp.theta_trials);
        for (std::size_t i = 0; i < exp.theta_trials; ++i) {
            est.samples.push_back(samples[i][s]);
            q.push_back(samples[i][s].q_ratio);
        }
        est.g_empirical = lower_quantile(q, exp.epsilon);
    }
    return out;
}

EntropyCheck compression_to_entropy_check(const MarkovParameter& theta, std::uint64_t n,
                                          std::span<const std::uint64_t> memory_schedule, std::size_t x_trials,
                                          std::uint64_t seed, unsigned threads)
{
    if (n < 1) throw ParameterError("n must be >= 1");
    if (x_trials < 2) throw ParameterError("x_trials must be >= 2");
    if (memory_schedule.empty()) throw ParameterError("memory schedule is empty");
    for (std::size_t i = 1; i < memory_schedule.size(); ++i) {
        if (memory_schedule[i] <= memory_schedule[i - 1]) {
            throw ParameterError("memory schedule must be strictly increasing");
        }
    }

    const SequenceSampler sampler(theta);
    EntropyCheck out{theta, entropy_rate(theta), x_trials, {}};
    const auto y = sampler.sample(memory_schedule.back(), derive_seed(seed, stream_tag::memory));
    const auto warm = warm_counts_for(y, theta.order(), memory_schedule);

    const std::size_t sizes = memory_schedule.size();
    std::vector<double> length(x_trials * sizes);
    std::vector<double> pointwise(x_trials * sizes);
    const std::uint64_t x_root = derive_seed(seed, stream_tag::sequence);
    parallel_for(x_trials, threads, [&](std::size_t j) {
        const auto x = sampler.sample(n, derive_seed(x_root, j));
        const double info = self_information(theta, x, sampler.initial_distribution());
        for (std::size_t s = 0; s < sizes; ++s) {
            const double l = ideal_length(x, warm[s]);
            length[j * sizes + s] = l;
            pointwise[j * sizes + s] = l - info;
        }
    });

    // H(X^n) - n * rate: the initial symbol's excess entropy for order 1.
    const double offset = theta.order() == 1 ? entropy_bits(sampler.initial_distribution()) - out.entropy_rate : 0.0;
    const auto nd = static_cast<double>(n);
    const auto td = static_cast<double>(x_trials);
    for (std::size_t s = 0; s < sizes; ++s) {
        double l_sum = 0.0;
        double r_sum = 0.0;
        for (std::size_t j = 0; j < x_trials; ++j) {
            l_sum += length[j * sizes + s];
            r_sum += pointwise[j * sizes + s];
        }
        const double r_mean = r_sum / td;
        double ss = 0.0;
        for (std::size_t j = 0; j < x_trials; ++j) {
            const double dev = pointwise[j * sizes + s] - r_mean;
            ss += dev * dev;
        }
        EntropyCheckRow row;
        row.m = memory_schedule[s];
        row.mean_bits_per_symbol = l_sum / td / nd;
        row.gap_bits_per_symbol = (r_mean + offset) / nd;
        row.gap_standard_error = std::sqrt(ss / (td - 1.0) / td) / nd;
        out.rows.push_back(row);
    }
    return out;
}

EntropyCheck compression_to_entropy_check(std::uint64_t n, unsigned k, unsigned order,
                                          std::span<const std::uint64_t> memory_schedule, std::size_t x_trials,
                                          std::uint64_t seed, unsigned threads)
{
    const auto theta = sample_jeffreys(k, order, derive_seed(seed, stream_tag::theta));
    return compression_to_entropy_check(theta, n, memory_schedule, x_trials, seed, threads);
}

} // namespace mauc
