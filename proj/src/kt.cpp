#include "mauc/kt.hpp"

#include "mauc/errors.hpp"

#include <cmath>

namespace mauc {

double kt_conditional(const ContextCounts& counts, std::size_t state, Symbol symbol)
{
    const double k = counts.alphabet_size();
    return (static_cast<double>(counts.count(state, symbol)) + 0.5)
           / (static_cast<double>(counts.total(state)) + 0.5 * k);
}

KtModel::KtModel(ContextCounts warm) : counts_(std::move(warm)) {}

std::uint64_t KtModel::frequencies(std::span<std::uint64_t> freq) const
{
    const unsigned k = alphabet_size();
    if (uniform_step()) {
        for (unsigned a = 0; a < k; ++a) freq[a] = 1;
        return k;
    }
    const auto r = counts_.row(state());
    for (unsigned a = 0; a < k; ++a) freq[a] = 2 * std::uint64_t{r[a]} + 1;
    return 2 * counts_.total(state()) + k;
}

double KtModel::cost_bits(Symbol a) const
{
    const unsigned k = alphabet_size();
    if (uniform_step()) return std::log2(static_cast<double>(k));
    const std::size_t s = state();
    const auto total = 2 * counts_.total(s) + k;
    const auto freq = 2 * std::uint64_t{counts_.count(s, a)} + 1;
    return std::log2(static_cast<double>(total)) - std::log2(static_cast<double>(freq));
}

void KtModel::update(Symbol a)
{
    if (!uniform_step()) counts_.increment(state(), a);
    previous_ = a;
    has_previous_ = true;
}

double ideal_length(const SymbolSequence& x, const ContextCounts& warm)
{
    if (x.alphabet_size() != warm.alphabet_size()) {
        throw InputError("sequence alphabet does not match the warm-start counts");
    }
    KtModel model(warm);
    double bits = 0.0;
    for (const Symbol a : x.symbols()) {
        bits += model.cost_bits(a);
        model.update(a);
    }
    return bits;
}

} // namespace mauc
