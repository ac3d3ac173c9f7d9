#pragma once

#include "mauc/arithmetic_coder.hpp"
#include "mauc/context_counts.hpp"
#include "mauc/source_model.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace mauc {

struct BlockHeader {
    std::uint16_t k = 0;
    std::uint8_t order = 0;
    std::uint64_t n = 0;
    std::uint64_t context_fingerprint = 0;

    friend bool operator==(const BlockHeader&, const BlockHeader&) = default;
};

/// Self-describing compressed sequence.
struct EncodedBlock {
    BlockHeader header;
    std::vector<std::uint8_t> payload;   // MSB-first, last byte zero-padded
    std::uint64_t payload_length_bits = 0;

    friend bool operator==(const EncodedBlock&, const EncodedBlock&) = default;
};

/// Ideal (real-valued) and emitted (integer) lengths of one coded sequence.
struct CodeLength {
    double ideal_bits = 0.0;
    std::uint64_t actual_bits = 0;
};

inline constexpr std::array<std::uint8_t, 4> kBlockMagic{'M', 'A', 'U', 'C'};
inline constexpr std::uint8_t kBlockVersion = 1;
inline constexpr std::size_t kBlockHeaderBytes = 4 + 1 + 2 + 1 + 8 + 8 + 8;

EncodedBlock encode(const SymbolSequence& x, const ContextCounts& warm);

/// Inverse of encode. Requires the same warm counts (checked through the
/// fingerprint) and the original length. The payload is verified to be the
/// exact encoding of the result, so truncation and bit flips are reported
/// rather than returned as a wrong sequence of the right length.
SymbolSequence decode(const EncodedBlock& block, const ContextCounts& warm, std::uint64_t n);

CodeLength measure(const SymbolSequence& x, const ContextCounts& warm);

/// Little-endian wire format:
///   "MAUC" | version u8 | k u16 | order u8 | n u64 | fingerprint u64 |
///   payload_length_bits u64 | payload bytes
std::vector<std::uint8_t> serialize(const EncodedBlock& block);
EncodedBlock deserialize(std::span<const std::uint8_t> bytes);

} // namespace mauc
