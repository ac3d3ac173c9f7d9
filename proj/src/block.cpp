#include "mauc/block.hpp"

#include "mauc/errors.hpp"
#include "mauc/kt.hpp"

#include <algorithm>
#include <string>

namespace mauc {

namespace {

BitString encode_bits(const SymbolSequence& x, const ContextCounts& warm)
{
    KtModel model(warm);
    std::vector<std::uint64_t> freq(x.alphabet_size());
    ArithmeticEncoder enc;
    for (const Symbol a : x.symbols()) {
        const std::uint64_t total = model.frequencies(freq);
        std::uint64_t cum = 0;
        for (Symbol b = 0; b < a; ++b) cum += freq[b];
        enc.encode(cum, freq[a], total);
        model.update(a);
    }
    return enc.finish();
}

void check_warm(const SymbolSequence& x, const ContextCounts& warm)
{
    if (x.alphabet_size() != warm.alphabet_size()) {
        throw InputError("sequence alphabet does not match the warm-start counts");
    }
}

template <class T>
void put_le(std::vector<std::uint8_t>& out, T v)
{
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

template <class T>
T get_le(std::span<const std::uint8_t> in, std::size_t& pos)
{
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(T{in[pos + i]} << (8 * i));
    pos += sizeof(T);
    return v;
}

} // namespace

EncodedBlock encode(const SymbolSequence& x, const ContextCounts& warm)
{
    check_warm(x, warm);
    BitString bits = encode_bits(x, warm);
    EncodedBlock block;
    block.header.k = static_cast<std::uint16_t>(warm.alphabet_size());
    block.header.order = static_cast<std::uint8_t>(warm.order());
    block.header.n = x.size();
    block.header.context_fingerprint = warm.fingerprint();
    block.payload_length_bits = bits.size();
    block.payload = bits.bytes();
    return block;
}

SymbolSequence decode(const EncodedBlock& block, const ContextCounts& warm, std::uint64_t n)
{
    if (block.header.k != warm.alphabet_size() || block.header.order != warm.order()) {
        throw ContextMismatchError("block alphabet/order differ from the decoder's context");
    }
    if (block.header.context_fingerprint != warm.fingerprint()) {
        throw ContextMismatchError("context fingerprint mismatch: encoder and decoder memories differ");
    }
    if (block.header.n != n) {
        throw InputError("requested length " + std::to_string(n) + " differs from block length "
                         + std::to_string(block.header.n));
    }
    if ((block.payload_length_bits + 7) / 8 > block.payload.size()) {
        throw DecodeError("truncated payload");
    }
    if ((block.payload_length_bits + 7) / 8 != block.payload.size()) {
        throw DecodeError("payload has trailing bytes");
    }

    const BitString bits(block.payload, block.payload_length_bits);
    ArithmeticDecoder dec(bits);
    KtModel model(warm);
    std::vector<std::uint64_t> freq(warm.alphabet_size());
    std::vector<Symbol> out;
    out.reserve(n);
    for (std::uint64_t t = 0; t < n; ++t) {
        const std::uint64_t total = model.frequencies(freq);
        const auto a = static_cast<Symbol>(dec.decode(freq, total));
        out.push_back(a);
        model.update(a);
    }
    SymbolSequence x(warm.alphabet_size(), std::move(out));

    // The encoder's output is canonical, so a valid payload re-encodes to
    // itself bit for bit.
    if (!(encode_bits(x, warm) == bits)) {
        throw DecodeError("payload is not a valid encoding of any length-" + std::to_string(n) + " sequence");
    }
    return x;
}

CodeLength measure(const SymbolSequence& x, const ContextCounts& warm)
{
    check_warm(x, warm);
    return {ideal_length(x, warm), encode_bits(x, warm).size()};
}

std::vector<std::uint8_t> serialize(const EncodedBlock& block)
{
    if ((block.payload_length_bits + 7) / 8 != block.payload.size()) {
        throw InputError("payload_length_bits does not match payload size");
    }
    std::vector<std::uint8_t> out;
    out.reserve(kBlockHeaderBytes + block.payload.size());
    out.insert(out.end(), kBlockMagic.begin(), kBlockMagic.end());
    out.push_back(kBlockVersion);
    put_le(out, block.header.k);
    put_le(out, block.header.order);
    put_le(out, block.header.n);
    put_le(out, block.header.context_fingerprint);
    put_le(out, block.payload_length_bits);
    out.insert(out.end(), block.payload.begin(), block.payload.end());
    return out;
}

EncodedBlock deserialize(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < kBlockHeaderBytes) throw DecodeError("truncated block header");
    if (!std::equal(kBlockMagic.begin(), kBlockMagic.end(), bytes.begin())) {
        throw DecodeError("bad magic");
    }
    std::size_t pos = 4;
    const auto version = get_le<std::uint8_t>(bytes, pos);
    if (version != kBlockVersion) throw DecodeError("unsupported block version " + std::to_string(version));

    EncodedBlock block;
    block.header.k = get_le<std::uint16_t>(bytes, pos);
    block.header.order = get_le<std::uint8_t>(bytes, pos);
    block.header.n = get_le<std::uint64_t>(bytes, pos);
    block.header.context_fingerprint = get_le<std::uint64_t>(bytes, pos);
    block.payload_length_bits = get_le<std::uint64_t>(bytes, pos);
    if (block.header.k < 2 || block.header.order > 1) throw DecodeError("invalid alphabet or order in header");

    const std::uint64_t need = block.payload_length_bits / 8 + (block.payload_length_bits % 8 != 0);
    const std::size_t have = bytes.size() - pos;
    if (have < need) throw DecodeError("truncated payload");
    if (have > need) throw DecodeError("trailing bytes after payload");
    block.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
    if (const unsigned used = block.payload_length_bits % 8; used != 0) {
        if (block.payload.back() & (0xFFu >> used)) throw DecodeError("nonzero padding bits");
    }
    return block;
}

} // namespace mauc
