#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mauc {

using Symbol = std::uint32_t;

/// Symbol space {0, ..., size-1}, size >= 2.
class Alphabet {
public:
    explicit Alphabet(unsigned size);

    unsigned size() const noexcept { return size_; }
    bool contains(Symbol s) const noexcept { return s < size_; }

    friend bool operator==(const Alphabet&, const Alphabet&) = default;

private:
    unsigned size_;
};

/// k^order for order in {0, 1}; throws ParameterError otherwise.
std::size_t state_count(unsigned k, unsigned order);

/// Free dimension of the order-r, k-ary family: k^r * (k - 1).
std::size_t model_dimension(unsigned k, unsigned order);

/// Parameter of a k-ary source of order 0 (i.i.d.) or 1 (Markov chain).
/// Row s holds the next-symbol distribution in state s; order-0 sources have
/// a single row.
class MarkovParameter {
public:
    static constexpr double kRowSumTolerance = 1e-12;

    /// `rows` is state-major, state_count(k, order) * k entries.
    MarkovParameter(unsigned k, unsigned order, std::vector<double> rows);

    static MarkovParameter memoryless(std::vector<double> row);
    static MarkovParameter first_order(const std::vector<std::vector<double>>& rows);

    unsigned alphabet_size() const noexcept { return k_; }
    unsigned order() const noexcept { return order_; }
    std::size_t states() const noexcept { return rows_.size() / k_; }
    std::size_t dimension() const noexcept { return states() * (k_ - 1); }

    std::span<const double> row(std::size_t state) const;
    double probability(std::size_t state, Symbol next) const { return row(state)[next]; }
    std::span<const double> flat() const noexcept { return rows_; }

    friend bool operator==(const MarkovParameter&, const MarkovParameter&) = default;

private:
    unsigned k_;
    unsigned order_;
    std::vector<double> rows_;
};

/// Sequence of symbols from a fixed alphabet.
class SymbolSequence {
public:
    explicit SymbolSequence(unsigned k);
    SymbolSequence(unsigned k, std::vector<Symbol> symbols);

    unsigned alphabet_size() const noexcept { return k_; }
    std::size_t size() const noexcept { return symbols_.size(); }
    bool empty() const noexcept { return symbols_.empty(); }
    Symbol operator[](std::size_t i) const { return symbols_[i]; }
    std::span<const Symbol> symbols() const noexcept { return symbols_; }

    void push_back(Symbol s);
    void reserve(std::size_t n) { symbols_.reserve(n); }

    /// Concatenation `*this` followed by `tail`; alphabets must match.
    SymbolSequence concat(const SymbolSequence& tail) const;

    friend bool operator==(const SymbolSequence&, const SymbolSequence&) = default;

private:
    unsigned k_;
    std::vector<Symbol> symbols_;
};

/// Each row drawn independently from the symmetric Dirichlet(1/2, ..., 1/2),
/// i.e. Jeffreys' prior per multinomial row.
MarkovParameter sample_jeffreys(unsigned k, unsigned order, std::uint64_t seed);

/// Precomputed sampling tables (cumulative rows, initial distribution) for
/// drawing many sequences from one parameter.
class SequenceSampler {
public:
    explicit SequenceSampler(const MarkovParameter& theta);

    SymbolSequence sample(std::size_t n, std::uint64_t seed) const;
    std::span<const double> initial_distribution() const noexcept { return initial_; }

private:
    Symbol draw(std::span<const double> cumulative, double u) const;

    unsigned k_;
    unsigned order_;
    std::vector<double> cumulative_;
    std::vector<double> initial_;
    std::vector<double> initial_cumulative_;
};

/// n symbols from `theta`. Order-1 chains start in a state drawn from the
/// stationary distribution. generate(theta, m, s) is a prefix of
/// generate(theta, m', s) for m <= m'.
SymbolSequence generate(const MarkovParameter& theta, std::size_t n, std::uint64_t seed);

/// Stationary distribution of an order-1 chain. Throws NumericError when the
/// chain has more than one closed class or the solve is inaccurate.
std::vector<double> stationary_distribution(const MarkovParameter& theta);

/// Shannon entropy of a probability vector in bits, 0 log 0 = 0.
double entropy_bits(std::span<const double> p);

/// Entropy rate in bits per symbol. H_n(theta) is n * entropy_rate(theta).
double entropy_rate(const MarkovParameter& theta);

/// -log2 P_theta(x). For order 1 the first symbol is charged -log2 pi(x_1).
/// Returns +inf for a sequence with probability zero.
double self_information(const MarkovParameter& theta, const SymbolSequence& x);
/// Same, with the order-1 initial distribution supplied by the caller.
double self_information(const MarkovParameter& theta, const SymbolSequence& x, std::span<const double> initial);

} // namespace mauc
