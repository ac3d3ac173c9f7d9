#include "mauc/context_counts.hpp"

#include "mauc/errors.hpp"

#include <numeric>
#include <string>

namespace mauc {

ContextCounts::ContextCounts(unsigned k, unsigned order)
    : k_(k), order_(order), counts_(state_count(k, order) * k, 0), totals_(state_count(k, order), 0)
{
    if (k > 0xFFFF) throw ParameterError("alphabet size must fit in 16 bits");
}

ContextCounts::ContextCounts(unsigned k, unsigned order, std::vector<std::uint32_t> counts)
    : ContextCounts(k, order)
{
    if (counts.size() != counts_.size()) {
        throw InputError("expected " + std::to_string(counts_.size()) + " count cells, got "
                         + std::to_string(counts.size()));
    }
    counts_ = std::move(counts);
    for (std::size_t s = 0; s < totals_.size(); ++s) {
        const auto r = row(s);
        totals_[s] = std::accumulate(r.begin(), r.end(), std::uint64_t{0});
    }
}

void ContextCounts::increment(std::size_t state, Symbol a)
{
    auto& cell = counts_[state * k_ + a];
    if (cell == kCellCap) {
        std::uint64_t total = 0;
        for (std::size_t b = 0; b < k_; ++b) {
            auto& c = counts_[state * k_ + b];
            c >>= 1;
            total += c;
        }
        totals_[state] = total;
    }
    ++cell;
    ++totals_[state];
}

bool ContextCounts::is_zero() const noexcept
{
    for (const auto t : totals_) {
        if (t != 0) return false;
    }
    return true;
}

std::uint64_t ContextCounts::fingerprint() const
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const auto mix = [&h](std::uint8_t byte) {
        h ^= byte;
        h *= 0x100000001b3ULL;
    };
    mix(static_cast<std::uint8_t>(k_));
    mix(static_cast<std::uint8_t>(k_ >> 8));
    mix(static_cast<std::uint8_t>(order_));
    for (const std::uint32_t c : counts_) {
        for (int i = 0; i < 4; ++i) mix(static_cast<std::uint8_t>(c >> (8 * i)));
    }
    return h;
}

ContextCounts accumulate_counts(const SymbolSequence& y, unsigned order)
{
    ContextCounts counts(y.alphabet_size(), order);
    if (order == 0) {
        for (const Symbol s : y.symbols()) counts.increment(0, s);
    } else {
        for (std::size_t t = 1; t < y.size(); ++t) counts.increment(y[t - 1], y[t]);
    }
    return counts;
}

} // namespace mauc
