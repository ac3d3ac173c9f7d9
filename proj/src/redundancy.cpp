#include "mauc/redundancy.hpp"

#include "mauc/context_counts.hpp"
#include "mauc/errors.hpp"
#include "mauc/kt.hpp"
#include "mauc/parallel.hpp"
#include "mauc/rng.hpp"
#include "mauc/source_model.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace mauc {

namespace {

// Digamma for x > 0: shift up to x >= 6, then the asymptotic series.
double digamma(double x)
{
    double acc = 0.0;
    while (x < 10.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    return acc + std::log(x) - 0.5 * inv
           - inv2 * (1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 - inv2 * (1.0 / 240 - inv2 / 132))));
}

// log2 of the Jeffreys normalizer for a k-ary multinomial, pi^{k/2} / Gamma(k/2).
double jeffreys_log2_constant(unsigned k)
{
    const double half_k = 0.5 * k;
    return (half_k * std::log(std::numbers::pi) - std::lgamma(half_k)) / std::numbers::ln2;
}

} // namespace

double memory_assisted_redundancy(double n, double m, double d)
{
    if (!(n >= 1 && m >= 1 && d >= 1)) throw ParameterError("memory redundancy requires n, m, d >= 1");
    return 0.5 * d * std::log1p(n / m) / std::numbers::ln2 + 2.0;
}

double average_minimax_redundancy(double n, unsigned k, unsigned order)
{
    if (!(n >= 2)) throw ParameterError("minimax redundancy requires n >= 2");
    const auto states = static_cast<double>(state_count(k, order));
    const double per_state_n = n / states;
    const double two_pi_e = 2.0 * std::numbers::pi * std::numbers::e;
    const double per_state = 0.5 * (k - 1) * std::log2(per_state_n / two_pi_e) + jeffreys_log2_constant(k);
    return std::max(0.0, states * per_state);
}

MonteCarloEstimate average_redundancy_monte_carlo(std::size_t n, unsigned k, unsigned order, std::size_t trials,
                                                  std::uint64_t seed, unsigned threads)
{
    if (trials < 2) throw ParameterError("Monte Carlo redundancy needs at least 2 trials");
    const ContextCounts zero(k, order);
    std::vector<double> redundancy(trials);
    parallel_for(trials, threads, [&](std::size_t i) {
        const std::uint64_t trial_seed = derive_seed(seed, i);
        const auto theta = sample_jeffreys(k, order, derive_seed(trial_seed, stream_tag::theta));
        const auto x = generate(theta, n, derive_seed(trial_seed, stream_tag::sequence));
        redundancy[i] = ideal_length(x, zero) - static_cast<double>(n) * entropy_rate(theta);
    });

    double mean = 0.0;
    for (const double r : redundancy) mean += r;
    mean /= static_cast<double>(trials);
    double ss = 0.0;
    for (const double r : redundancy) ss += (r - mean) * (r - mean);
    const double variance = ss / static_cast<double>(trials - 1);
    return {mean, std::sqrt(variance / static_cast<double>(trials)), trials};
}

double prior_mean_entropy_rate(unsigned k, unsigned order, std::size_t trials, std::uint64_t seed, unsigned threads)
{
    (void)state_count(k, order);
    if (order == 0) {
        // E[H] of Dirichlet(1/2, ..., 1/2) = psi(k/2 + 1) - psi(3/2) nats.
        return (digamma(0.5 * k + 1.0) - digamma(1.5)) / std::numbers::ln2;
    }
    if (trials < 1) throw ParameterError("prior mean entropy rate needs at least one trial");
    std::vector<double> rates(trials);
    parallel_for(trials, threads, [&](std::size_t i) {
        const std::uint64_t trial_seed = derive_seed(seed, i);
        rates[i] = entropy_rate(sample_jeffreys(k, order, derive_seed(trial_seed, stream_tag::theta)));
    });
    double sum = 0.0;
    for (const double r : rates) sum += r;
    return sum / static_cast<double>(trials);
}

void BoundInputs::validate() const
{
    if (!(n >= 1)) throw ParameterError("n must be >= 1");
    if (!(m >= 1)) throw ParameterError("m must be >= 1");
    if (!(d >= 1)) throw ParameterError("d must be >= 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("epsilon must lie in (0, 1)");
    if (!(source_entropy >= 0.0 && std::isfinite(source_entropy))) {
        throw ParameterError("source entropy must be finite and nonnegative");
    }
    if (!(minimax_redundancy >= 0.0 && std::isfinite(minimax_redundancy))) {
        throw ParameterError("minimax redundancy must be finite and nonnegative");
    }
}

GainBound gain_lower_bound(const BoundInputs& in)
{
    in.validate();
    GainBound out;
    out.memory_redundancy = memory_assisted_redundancy(in.n, in.m, in.d);
    out.minimax_redundancy = in.minimax_redundancy;
    out.log2_epsilon = std::log2(in.epsilon);
    out.source_entropy = in.source_entropy;
    out.value = 1.0
                + (out.minimax_redundancy + out.log2_epsilon - out.memory_redundancy)
                      / (out.source_entropy + out.memory_redundancy);
    return out;
}

} // namespace mauc
