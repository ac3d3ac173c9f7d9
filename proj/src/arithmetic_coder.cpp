#include "mauc/arithmetic_coder.hpp"

#include "mauc/errors.hpp"

#include <cassert>

namespace mauc {

namespace {

__extension__ using u128 = unsigned __int128;

std::uint64_t scale(std::uint64_t range, std::uint64_t part, std::uint64_t total)
{
    return static_cast<std::uint64_t>(static_cast<u128>(range) * part / total);
}

} // namespace

BitString::BitString(std::vector<std::uint8_t> bytes, std::uint64_t bit_count)
    : bytes_(std::move(bytes)), bit_count_(bit_count)
{
    if ((bit_count_ + 7) / 8 != bytes_.size()) throw DecodeError("bit count does not match byte count");
}

void BitString::push_back(bool b)
{
    if ((bit_count_ & 7) == 0) bytes_.push_back(0);
    if (b) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (bit_count_ & 7));
    ++bit_count_;
}

void BitString::increment()
{
    for (std::uint64_t i = bit_count_; i-- > 0;) {
        auto& byte = bytes_[i >> 3];
        const auto mask = static_cast<std::uint8_t>(0x80u >> (i & 7));
        if (byte & mask) {
            byte &= static_cast<std::uint8_t>(~mask);
        } else {
            byte |= mask;
            return;
        }
    }
    // The code value stays below 1, so a carry never leaves the buffer.
    assert(false && "carry out of the bit buffer");
}

void ArithmeticEncoder::encode(std::uint64_t cum, std::uint64_t freq, std::uint64_t total)
{
    assert(freq > 0 && cum + freq <= total && total <= kMaxTotal);
    // Intervals [scale(cum), scale(cum) + scale(freq)) never overlap and are
    // never wider than the exact rational share.
    low_ += scale(range_, cum, total);
    range_ = scale(range_, freq, total);
    if (low_ >= kTop) {
        out_.increment();
        low_ -= kTop;
    }
    while (range_ <= kHalf) {
        out_.push_back((low_ >> (kPrecision - 1)) & 1u);
        low_ = (low_ << 1) & (kTop - 1);
        range_ <<= 1;
    }
}

BitString ArithmeticEncoder::finish()
{
    // Shortest t such that some multiple of 2^(62-t) lies in [low, low+range);
    // the decoder reads zeros past the end. range > 2^61 gives t <= 1.
    const std::uint64_t high = low_ + range_;
    int t = 0;
    std::uint64_t value = 0;
    for (; t <= kPrecision; ++t) {
        const std::uint64_t step = std::uint64_t{1} << (kPrecision - t);
        value = (low_ + step - 1) / step * step;
        if (value < high) break;
    }
    if (value >= kTop) {
        out_.increment();
        value -= kTop;
    }
    for (int i = 0; i < t; ++i) out_.push_back((value >> (kPrecision - 1 - i)) & 1u);
    low_ = 0;
    range_ = kTop;
    return std::move(out_);
}

ArithmeticDecoder::ArithmeticDecoder(const BitString& in) : in_(in)
{
    for (int i = 0; i < ArithmeticEncoder::kPrecision; ++i) code_ = (code_ << 1) | next_bit();
}

bool ArithmeticDecoder::next_bit()
{
    const bool b = pos_ < in_.size() && in_.bit(pos_);
    ++pos_;
    return b;
}

std::size_t ArithmeticDecoder::decode(std::span<const std::uint64_t> freq, std::uint64_t total)
{
    // Locate the last symbol whose interval starts at or below the code point.
    std::uint64_t cum = 0;
    std::size_t symbol = freq.size();
    std::uint64_t start = 0;
    for (std::size_t a = 0; a < freq.size(); ++a) {
        const std::uint64_t s = scale(range_, cum, total);
        if (s > code_) break;
        if (freq[a] > 0) {
            symbol = a;
            start = s;
        }
        cum += freq[a];
    }
    if (symbol == freq.size()) throw DecodeError("code point outside every symbol interval");
    const std::uint64_t width = scale(range_, freq[symbol], total);
    if (code_ - start >= width) throw DecodeError("code point falls in an interval gap");

    code_ -= start;
    range_ = width;
    while (range_ <= ArithmeticEncoder::kHalf) {
        code_ = (code_ << 1) | next_bit();
        range_ <<= 1;
    }
    return symbol;
}

} // namespace mauc
