#pragma once

#include <cstddef>
#include <cstdint>

namespace mauc {

/// Redundancy of coding n symbols after m memorized ones:
/// (d/2) log2(1 + n/m) + 2 bits. Strictly decreasing in m, tends to 2.
double memory_assisted_redundancy(double n, double m, double d);

/// Clarke-Barron asymptotic of the average minimax redundancy (bits) of the
/// order-r, k-ary family under Jeffreys' prior. Order-1 chains are treated as
/// k independent multinomial blocks of n/k symbols each. Clamped at 0.
double average_minimax_redundancy(double n, unsigned k, unsigned order);

struct MonteCarloEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    std::size_t trials = 0;
};

/// Average KT redundancy E[l_n(X^n)] - H_n(theta) with theta drawn from
/// Jeffreys' prior, the least favourable prior asymptotically. Deterministic
/// given the seed at any thread count.
MonteCarloEstimate average_redundancy_monte_carlo(std::size_t n, unsigned k, unsigned order, std::size_t trials,
                                                  std::uint64_t seed, unsigned threads = 1);

/// E[entropy_rate(theta)] under Jeffreys' prior. Exact (digamma identity) for
/// order 0; Monte Carlo over `trials` draws for order 1.
double prior_mean_entropy_rate(unsigned k, unsigned order, std::size_t trials = 4000, std::uint64_t seed = 0,
                               unsigned threads = 1);

struct BoundInputs {
    double n = 1;             // sequence length, symbols
    double m = 1;             // memory length, symbols
    double d = 1;             // model dimension
    double epsilon = 0.05;    // fraction of sources allowed below the bound
    double source_entropy = 0;  // H_n, bits
    double minimax_redundancy = 0;  // average minimax redundancy, bits

    /// Throws ParameterError unless n, m, d >= 1, 0 < epsilon < 1 and the
    /// entropy and redundancy are finite and nonnegative.
    void validate() const;
};

struct GainBound {
    double value = 1.0;
    double memory_redundancy = 0.0;
    double minimax_redundancy = 0.0;
    double log2_epsilon = 0.0;
    double source_entropy = 0.0;
};

/// Lower bound on the memorization gain holding for a 1 - epsilon fraction of
/// Jeffreys-distributed sources:
///   1 + (R_minimax + log2(epsilon) - R_memory) / (H_n + R_memory).
/// The O(1/(n sqrt m)) correction is not included.
GainBound gain_lower_bound(const BoundInputs& in);

} // namespace mauc
