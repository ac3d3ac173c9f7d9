#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mauc {

/// MSB-first bit buffer.
class BitString {
public:
    BitString() = default;
    BitString(std::vector<std::uint8_t> bytes, std::uint64_t bit_count);

    std::uint64_t size() const noexcept { return bit_count_; }
    bool bit(std::uint64_t i) const { return (bytes_[i >> 3] >> (7 - (i & 7))) & 1u; }
    const std::vector<std::uint8_t>& bytes() const noexcept { return bytes_; }

    void push_back(bool b);
    /// Adds one at the least significant emitted bit.
    void increment();

    friend bool operator==(const BitString&, const BitString&) = default;

private:
    std::vector<std::uint8_t> bytes_;
    std::uint64_t bit_count_ = 0;
};

/// Multi-symbol arithmetic coder over a 62-bit integer interval, low/range
/// form with carry propagation into the emitted bits. Symbol intervals are
/// floor(range * cum / total) wide steps computed with 128-bit products, so
/// totals up to 2^60 are exact. Termination emits at most one extra bit.
class ArithmeticEncoder {
public:
    static constexpr int kPrecision = 62;
    static constexpr std::uint64_t kTop = std::uint64_t{1} << kPrecision;
    static constexpr std::uint64_t kHalf = kTop >> 1;
    static constexpr std::uint64_t kMaxTotal = std::uint64_t{1} << 60;

    void encode(std::uint64_t cum, std::uint64_t freq, std::uint64_t total);
    BitString finish();

private:
    std::uint64_t low_ = 0;
    std::uint64_t range_ = kTop;
    BitString out_;
};

class ArithmeticDecoder {
public:
    explicit ArithmeticDecoder(const BitString& in);

    /// Index of the symbol whose interval holds the code point. Throws
    /// DecodeError when the point falls between symbol intervals.
    std::size_t decode(std::span<const std::uint64_t> freq, std::uint64_t total);

    /// Bits consumed beyond the end of the input (read as zeros).
    std::uint64_t overrun() const noexcept { return pos_ > in_.size() ? pos_ - in_.size() : 0; }

private:
    bool next_bit();

    const BitString& in_;
    std::uint64_t pos_ = 0;
    std::uint64_t code_ = 0;
    std::uint64_t range_ = ArithmeticEncoder::kTop;
};

} // namespace mauc
