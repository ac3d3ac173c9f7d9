#pragma once

#include "mauc/source_model.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mauc {

/// Per-state symbol occurrence counts. Serves both as the memory distilled
/// from a context sequence and as the running state of the KT estimator.
/// An all-zero instance is the cold-start state.
class ContextCounts {
public:
    /// Per-cell ceiling. Incrementing a cell past it halves the whole state row.
    static constexpr std::uint32_t kCellCap = 0xFFFFFFFFu;

    ContextCounts(unsigned k, unsigned order);
    /// `counts` is state-major, state_count(k, order) * k cells.
    ContextCounts(unsigned k, unsigned order, std::vector<std::uint32_t> counts);

    unsigned alphabet_size() const noexcept { return k_; }
    unsigned order() const noexcept { return order_; }
    std::size_t states() const noexcept { return totals_.size(); }

    std::uint32_t count(std::size_t state, Symbol a) const { return counts_[state * k_ + a]; }
    std::uint64_t total(std::size_t state) const { return totals_[state]; }
    std::span<const std::uint32_t> row(std::size_t state) const
    {
        return std::span<const std::uint32_t>(counts_).subspan(state * k_, k_);
    }
    std::span<const std::uint32_t> cells() const noexcept { return counts_; }

    void increment(std::size_t state, Symbol a);
    bool is_zero() const noexcept;

    /// FNV-1a over the little-endian serialization: k (u16), order (u8),
    /// then every cell as u32 in state-major order.
    std::uint64_t fingerprint() const;

    friend bool operator==(const ContextCounts&, const ContextCounts&) = default;

private:
    unsigned k_;
    unsigned order_;
    std::vector<std::uint32_t> counts_;
    std::vector<std::uint64_t> totals_;
};

/// counts[s][a] = number of positions t >= order with state(t) = s and y_t = a.
ContextCounts accumulate_counts(const SymbolSequence& y, unsigned order);

} // namespace mauc
