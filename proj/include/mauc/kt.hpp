#pragma once

#include "mauc/context_counts.hpp"
#include "mauc/source_model.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mauc {

/// KT estimate (c + 1/2) / (T + k/2) of `symbol` in `state`.
double kt_conditional(const ContextCounts& counts, std::size_t state, Symbol symbol);

/// Sequential KT model with integer frequencies. The KT probability of symbol
/// a is freq(a) / total with freq(a) = 2c_a + 1 and total = 2T + k, so the
/// arithmetic coder sees exactly the rational probabilities the ideal length
/// is computed from. For order 1 the first symbol is uniform (freq 1, total k).
class KtModel {
public:
    explicit KtModel(ContextCounts warm);

    /// Fills `freq` (size k) for the next symbol and returns their sum.
    std::uint64_t frequencies(std::span<std::uint64_t> freq) const;
    /// -log2 of the probability the model assigns to `a` next.
    double cost_bits(Symbol a) const;
    void update(Symbol a);

    unsigned alphabet_size() const noexcept { return counts_.alphabet_size(); }
    const ContextCounts& counts() const noexcept { return counts_; }

private:
    bool uniform_step() const noexcept { return counts_.order() == 1 && !has_previous_; }
    std::size_t state() const noexcept { return counts_.order() == 0 ? 0 : previous_; }

    ContextCounts counts_;
    Symbol previous_ = 0;
    bool has_previous_ = false;
};

/// Sum over x of -log2 of the sequential KT probability, starting from a
/// copy of `warm`. Zero warm counts give the cold-start (no memory) length.
double ideal_length(const SymbolSequence& x, const ContextCounts& warm);

} // namespace mauc
