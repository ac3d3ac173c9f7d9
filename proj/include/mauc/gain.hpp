#pragma once

#include "mauc/source_model.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mauc {

/// Expected-length ratio for one sampled source.
struct GainSample {
    std::size_t theta_id = 0;
    double mean_length_without_memory = 0.0;  // bits, cold-start KT
    double mean_length_with_memory = 0.0;     // bits, KT warm-started on y^m
    double q_ratio = 1.0;
    double entropy_rate = 0.0;                // of this theta, bits/symbol
};

struct GainEstimate {
    std::uint64_t memory_length = 0;
    double epsilon = 0.05;
    std::vector<GainSample> samples;
    double g_empirical = 1.0;
};

/// 1-based rank from the top that defines the lower (1 - epsilon) quantile of
/// `count` values: ceil((1 - epsilon) * count), at least 1.
std::size_t quantile_rank(std::size_t count, double epsilon);

/// Largest z such that at least quantile_rank(values.size(), epsilon) of the
/// values are >= z.
double lower_quantile(std::span<const double> values, double epsilon);

struct GainExperiment {
    std::uint64_t n = 512;
    unsigned k = 2;
    unsigned order = 0;
    double epsilon = 0.05;
    std::size_t theta_trials = 200;
    std::size_t x_trials = 20;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

/// Monte Carlo estimate of the memorization gain. Per theta trial: one y^m
/// builds the warm counts; x_trials fresh x^n are coded with and without
/// them (the same draws for both); Q is the ratio of the two means. g is the
/// lower (1 - epsilon) quantile of Q over theta trials.
GainEstimate empirical_gain(const GainExperiment& exp, std::uint64_t m);

/// empirical_gain at several memory sizes on paired randomness: the same
/// theta, x draws and memory stream, with y^m a prefix of y^m' for m < m'.
std::vector<GainEstimate> empirical_gain_sweep(const GainExperiment& exp, std::span<const std::uint64_t> memory_sizes);

struct EntropyCheckRow {
    std::uint64_t m = 0;
    double mean_bits_per_symbol = 0.0;  // mean of l_{n|m}(x)/n over x trials
    double gap_bits_per_symbol = 0.0;   // estimate of E[l_{n|m}]/n - entropy rate
    double gap_standard_error = 0.0;
};

struct EntropyCheck {
    MarkovParameter theta;
    double entropy_rate = 0.0;
    std::size_t x_trials = 0;
    std::vector<EntropyCheckRow> rows;
};

/// Warm-started per-symbol code length against the entropy rate for a fixed
/// source as memory grows. All rows share one memory stream (prefixes) and
/// the same x draws. The gap is estimated through the pointwise redundancy
/// l(x) + log2 P_theta(x), whose mean equals E[l] - H(X^n) with far smaller
/// variance than l(x) itself; the exact offset H(X^n) - n*rate (initial
/// state entropy, order 1 only) is added back.
EntropyCheck compression_to_entropy_check(const MarkovParameter& theta, std::uint64_t n,
                                          std::span<const std::uint64_t> memory_schedule, std::size_t x_trials,
                                          std::uint64_t seed, unsigned threads = 1);

/// As above with theta drawn from Jeffreys' prior under `seed`.
EntropyCheck compression_to_entropy_check(std::uint64_t n, unsigned k, unsigned order,
                                          std::span<const std::uint64_t> memory_schedule, std::size_t x_trials,
                                          std::uint64_t seed, unsigned threads = 1);

} // namespace mauc
