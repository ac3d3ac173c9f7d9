#include "mauc/source_model.hpp"

#include "mauc/errors.hpp"
#include "mauc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mauc {

Alphabet::Alphabet(unsigned size) : size_(size)
{
    if (size < 2) throw ParameterError("alphabet size must be at least 2, got " + std::to_string(size));
}

std::size_t state_count(unsigned k, unsigned order)
{
    if (k < 2) throw ParameterError("alphabet size must be at least 2, got " + std::to_string(k));
    if (order > 1) throw ParameterError("model order must be 0 or 1, got " + std::to_string(order));
    return order == 0 ? 1 : k;
}

std::size_t model_dimension(unsigned k, unsigned order)
{
    return state_count(k, order) * (k - 1);
}

MarkovParameter::MarkovParameter(unsigned k, unsigned order, std::vector<double> rows)
    : k_(k), order_(order), rows_(std::move(rows))
{
    const std::size_t states = state_count(k, order);
    if (rows_.size() != states * k) {
        throw ParameterError("expected " + std::to_string(states * k) + " probabilities, got "
                             + std::to_string(rows_.size()));
    }
    for (std::size_t s = 0; s < states; ++s) {
        double sum = 0.0;
        for (std::size_t a = 0; a < k; ++a) {
            const double p = rows_[s * k + a];
            if (!(p >= 0.0 && p <= 1.0)) {
                throw ParameterError("probability out of [0,1] in row " + std::to_string(s));
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > kRowSumTolerance) {
            throw ParameterError("row " + std::to_string(s) + " does not sum to 1");
        }
    }
}

MarkovParameter MarkovParameter::memoryless(std::vector<double> row)
{
    const auto k = static_cast<unsigned>(row.size());
    return MarkovParameter(k, 0, std::move(row));
}

MarkovParameter MarkovParameter::first_order(const std::vector<std::vector<double>>& rows)
{
    const auto k = static_cast<unsigned>(rows.size());
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(k) * k);
    for (const auto& r : rows) {
        if (r.size() != k) throw ParameterError("transition matrix must be square");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return MarkovParameter(k, 1, std::move(flat));
}

std::span<const double> MarkovParameter::row(std::size_t state) const
{
    return std::span<const double>(rows_).subspan(state * k_, k_);
}

SymbolSequence::SymbolSequence(unsigned k) : k_(Alphabet(k).size()) {}

SymbolSequence::SymbolSequence(unsigned k, std::vector<Symbol> symbols)
    : k_(Alphabet(k).size()), symbols_(std::move(symbols))
{
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
        if (symbols_[i] >= k_) {
            throw InputError("symbol " + std::to_string(symbols_[i]) + " at position "
                             + std::to_string(i) + " outside alphabet of size " + std::to_string(k_));
        }
    }
}

void SymbolSequence::push_back(Symbol s)
{
    if (s >= k_) throw InputError("symbol " + std::to_string(s) + " outside alphabet");
    symbols_.push_back(s);
}

SymbolSequence SymbolSequence::concat(const SymbolSequence& tail) const
{
    if (tail.k_ != k_) throw InputError("cannot concatenate sequences over different alphabets");
    SymbolSequence out(k_);
    out.symbols_.reserve(size() + tail.size());
    out.symbols_.insert(out.symbols_.end(), symbols_.begin(), symbols_.end());
    out.symbols_.insert(out.symbols_.end(), tail.symbols_.begin(), tail.symbols_.end());
    return out;
}

MarkovParameter sample_jeffreys(unsigned k, unsigned order, std::uint64_t seed)
{
    const std::size_t states = state_count(k, order);
    Rng rng(seed);
    std::vector<double> rows(states * k);
    for (std::size_t s = 0; s < states; ++s) {
        const auto row = std::span<double>(rows).subspan(s * k, k);
        double sum = 0.0;
        // Gamma(1/2) draws are zero with probability 0; guard the all-zero
        // row anyway so normalization is always defined.
        do {
            sum = 0.0;
            for (auto& v : row) {
                v = rng.gamma_half();
                sum += v;
            }
        } while (!(sum > 0.0));
        for (auto& v : row) v /= sum;
    }
    return MarkovParameter(k, order, std::move(rows));
}

namespace {

void cumulate(std::span<const double> p, std::span<double> out)
{
    double acc = 0.0;
    for (std::size_t a = 0; a < p.size(); ++a) {
        acc += p[a];
        out[a] = acc;
    }
}

} // namespace

SequenceSampler::SequenceSampler(const MarkovParameter& theta)
    : k_(theta.alphabet_size()), order_(theta.order()), cumulative_(theta.flat().size())
{
    for (std::size_t s = 0; s < theta.states(); ++s) {
        cumulate(theta.row(s), std::span<double>(cumulative_).subspan(s * k_, k_));
    }
    if (order_ == 1) {
        initial_ = stationary_distribution(theta);
        initial_cumulative_.resize(k_);
        cumulate(initial_, initial_cumulative_);
    }
}

Symbol SequenceSampler::draw(std::span<const double> cumulative, double u) const
{
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it != cumulative.end()) return static_cast<Symbol>(it - cumulative.begin());
    // u landed above the rounded total; take the last symbol with mass.
    std::size_t a = cumulative.size() - 1;
    while (a > 0 && cumulative[a] == cumulative[a - 1]) --a;
    return static_cast<Symbol>(a);
}

SymbolSequence SequenceSampler::sample(std::size_t n, std::uint64_t seed) const
{
    Rng rng(seed);
    std::vector<Symbol> out(n);
    const std::span<const double> table(cumulative_);
    if (order_ == 0) {
        for (auto& s : out) s = draw(table, rng.uniform());
    } else if (n > 0) {
        out[0] = draw(initial_cumulative_, rng.uniform());
        for (std::size_t t = 1; t < n; ++t) {
            out[t] = draw(table.subspan(static_cast<std::size_t>(out[t - 1]) * k_, k_), rng.uniform());
        }
    }
    return SymbolSequence(k_, std::move(out));
}

SymbolSequence generate(const MarkovParameter& theta, std::size_t n, std::uint64_t seed)
{
    return SequenceSampler(theta).sample(n, seed);
}

namespace {

// Number of closed communicating classes of the chain restricted to edges
// with positive probability.
std::size_t closed_class_count(const MarkovParameter& theta)
{
    const std::size_t n = theta.states();
    std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
    std::vector<std::size_t> stack;
    for (std::size_t src = 0; src < n; ++src) {
        auto& seen = reach[src];
        seen[src] = 1;
        stack.assign(1, src);
        while (!stack.empty()) {
            const std::size_t s = stack.back();
            stack.pop_back();
            const auto row = theta.row(s);
            for (std::size_t t = 0; t < n; ++t) {
                if (row[t] > 0.0 && !seen[t]) {
                    seen[t] = 1;
                    stack.push_back(t);
                }
            }
        }
    }
    std::vector<char> assigned(n, 0);
    std::size_t closed = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (assigned[i]) continue;
        bool recurrent = true;
        for (std::size_t j = 0; j < n && recurrent; ++j) {
            if (reach[i][j] && !reach[j][i]) recurrent = false;
        }
        if (!recurrent) continue;
        ++closed;
        for (std::size_t j = 0; j < n; ++j) {
            if (reach[i][j]) assigned[j] = 1;
        }
    }
    return closed;
}

} // namespace

std::vector<double> stationary_distribution(const MarkovParameter& theta)
{
    if (theta.order() != 1) throw ParameterError("stationary distribution requires an order-1 chain");
    const std::size_t n = theta.states();

    if (const auto classes = closed_class_count(theta); classes != 1) {
        throw NumericError("stationary distribution not unique: chain has " + std::to_string(classes)
                           + " closed classes");
    }

    // Solve pi (P - I) = 0 with the last balance equation replaced by
    // sum(pi) = 1. Row-major n x (n+1) augmented system, partial pivoting.
    const std::size_t w = n + 1;
    std::vector<double> a(n * w, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a[i * w + j] = theta.probability(j, static_cast<Symbol>(i));
        a[i * w + i] -= 1.0;
    }
    for (std::size_t j = 0; j < n; ++j) a[(n - 1) * w + j] = 1.0;
    a[(n - 1) * w + n] = 1.0;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r * w + col]) > std::abs(a[pivot * w + col])) pivot = r;
        }
        if (a[pivot * w + col] == 0.0) throw NumericError("singular balance equations");
        if (pivot != col) {
            std::swap_ranges(a.begin() + static_cast<std::ptrdiff_t>(col * w),
                             a.begin() + static_cast<std::ptrdiff_t>((col + 1) * w),
                             a.begin() + static_cast<std::ptrdiff_t>(pivot * w));
        }
        const double inv = 1.0 / a[col * w + col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * w + col] * inv;
            if (f == 0.0) continue;
            for (std::size_t j = col; j < w; ++j) a[r * w + j] -= f * a[col * w + j];
        }
    }
    std::vector<double> pi(n);
    for (std::size_t i = n; i-- > 0;) {
        double v = a[i * w + n];
        for (std::size_t j = i + 1; j < n; ++j) v -= a[i * w + j] * pi[j];
        pi[i] = v / a[i * w + i];
    }

    double sum = 0.0;
    for (auto& p : pi) {
        if (p < 0.0) {
            if (p < -1e-9) throw NumericError("stationary solve produced a negative probability");
            p = 0.0;
        }
        sum += p;
    }
    for (auto& p : pi) p /= sum;

    double residual = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double v = -pi[j];
        for (std::size_t i = 0; i < n; ++i) v += pi[i] * theta.probability(i, static_cast<Symbol>(j));
        residual += std::abs(v);
    }
    if (!(residual <= 1e-10)) {
        throw NumericError("stationary distribution residual " + std::to_string(residual) + " exceeds 1e-10");
    }
    return pi;
}

double entropy_bits(std::span<const double> p)
{
    double h = 0.0;
    for (const double v : p) {
        if (v > 0.0) h -= v * std::log2(v);
    }
    return h;
}

double entropy_rate(const MarkovParameter& theta)
{
    if (theta.order() == 0) return entropy_bits(theta.row(0));
    const auto pi = stationary_distribution(theta);
    double h = 0.0;
    for (std::size_t s = 0; s < pi.size(); ++s) h += pi[s] * entropy_bits(theta.row(s));
    return h;
}

double self_information(const MarkovParameter& theta, const SymbolSequence& x)
{
    if (theta.order() == 0 || x.empty()) return self_information(theta, x, {});
    return self_information(theta, x, stationary_distribution(theta));
}

double self_information(const MarkovParameter& theta, const SymbolSequence& x, std::span<const double> initial)
{
    if (x.alphabet_size() != theta.alphabet_size()) throw InputError("alphabet mismatch");
    if (x.empty()) return 0.0;
    double bits = 0.0;
    std::size_t start = 0;
    if (theta.order() == 1) {
        if (initial.size() != theta.states()) throw InputError("initial distribution has the wrong size");
        bits -= std::log2(initial[x[0]]);
        start = 1;
    }
    for (std::size_t t = start; t < x.size(); ++t) {
        const std::size_t state = theta.order() == 0 ? 0 : x[t - 1];
        bits -= std::log2(theta.probability(state, x[t]));
    }
    return bits;
}

} // namespace mauc
