#include "mauc/arithmetic_coder.hpp"
#include "mauc/block.hpp"
#include "mauc/context_counts.hpp"
#include "mauc/errors.hpp"
#include "mauc/kt.hpp"
#include "mauc/redundancy.hpp"
#include "mauc/rng.hpp"
#include "mauc/source_model.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <numeric>
#include <string>
#include <vector>

using namespace mauc;

namespace {

// KT probability of a sequence with symbol counts c over k symbols, from the
// Dirichlet(1/2) integral: prod Gamma(c_a + 1/2) / (Gamma(1/2)^k) * Gamma(k/2) / Gamma(n + k/2).
double kt_block_bits(const std::vector<double>& counts)
{
    const double k = counts.size();
    double n = 0.0;
    double ln = std::lgamma(k / 2);
    for (const double c : counts) {
        ln += std::lgamma(c + 0.5) - std::lgamma(0.5);
        n += c;
    }
    ln -= std::lgamma(n + k / 2);
    return -ln / std::log(2.0);
}

SymbolSequence zeros(std::size_t n) { return SymbolSequence(2, std::vector<Symbol>(n, 0)); }

// Drops the last `bits` payload bits of an encoded block.
EncodedBlock truncate_bits(EncodedBlock block, std::uint64_t bits)
{
    block.payload_length_bits -= bits;
    block.payload.resize((block.payload_length_bits + 7) / 8);
    if (const unsigned used = block.payload_length_bits % 8; used != 0) {
        block.payload.back() &= static_cast<std::uint8_t>(0xFFu << (8 - used));
    }
    return block;
}

struct RandomCase {
    SymbolSequence x;
    ContextCounts warm;
};

RandomCase random_case(std::uint64_t seed, std::uint64_t max_n)
{
    Rng rng(seed);
    const auto k = static_cast<unsigned>(rng.uniform_int(2, 8));
    const auto r = static_cast<unsigned>(rng.uniform_int(0, 1));
    const auto theta = sample_jeffreys(k, r, rng.next_u64());
    const auto y = generate(theta, rng.uniform_int(0, 3000), rng.next_u64());
    return {generate(theta, rng.uniform_int(0, max_n), rng.next_u64()), accumulate_counts(y, r)};
}

} // namespace

TEST_CASE("accumulate_counts")
{
    CHECK(accumulate_counts(SymbolSequence(2), 0).is_zero());

    const SymbolSequence y(2, {0, 0, 1, 0});
    const auto c0 = accumulate_counts(y, 0);
    CHECK(c0.count(0, 0) == 3);
    CHECK(c0.count(0, 1) == 1);
    CHECK(c0.total(0) == 4);

    // Transitions 0->0, 0->1, 1->0.
    const auto c1 = accumulate_counts(y, 1);
    CHECK(c1.count(0, 0) == 1);
    CHECK(c1.count(0, 1) == 1);
    CHECK(c1.count(1, 0) == 1);
    CHECK(c1.count(1, 1) == 0);
    CHECK(c1.total(0) == 2);
    CHECK(c1.total(1) == 1);
}

TEST_CASE("context counts: construction and halving at the cell cap")
{
    CHECK_THROWS_AS(ContextCounts(2, 0, {1, 2, 3}), InputError);

    ContextCounts c(2, 0, {ContextCounts::kCellCap, 6});
    CHECK(c.total(0) == std::uint64_t{ContextCounts::kCellCap} + 6);
    c.increment(0, 0);
    CHECK(c.count(0, 0) == ContextCounts::kCellCap / 2 + 1);
    CHECK(c.count(0, 1) == 3);
    CHECK(c.total(0) == c.count(0, 0) + std::uint64_t{c.count(0, 1)});
}

TEST_CASE("context fingerprint separates different memories")
{
    const ContextCounts a(2, 0, {3, 1});
    const ContextCounts b(2, 0, {1, 3});
    CHECK(a.fingerprint() == ContextCounts(2, 0, {3, 1}).fingerprint());
    CHECK(a.fingerprint() != b.fingerprint());
    CHECK(ContextCounts(2, 0).fingerprint() != ContextCounts(2, 1).fingerprint());
}

TEST_CASE("kt_conditional")
{
    const ContextCounts zero(2, 1);
    CHECK(kt_conditional(zero, 0, 0) == 0.5);
    CHECK(kt_conditional(zero, 1, 1) == 0.5);
    CHECK(kt_conditional(ContextCounts(2, 0, {1, 0}), 0, 0) == 0.75);
    CHECK(kt_conditional(ContextCounts(2, 0, {3, 1}), 0, 1) == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("kt_conditional normalizes at every step")
{
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const auto k = static_cast<unsigned>(rng.uniform_int(2, 12));
        const auto r = static_cast<unsigned>(rng.uniform_int(0, 1));
        std::vector<std::uint32_t> cells(state_count(k, r) * k);
        for (auto& v : cells) v = static_cast<std::uint32_t>(rng.uniform_int(0, 1u << rng.uniform_int(0, 30)));
        const ContextCounts counts(k, r, cells);
        for (std::size_t s = 0; s < counts.states(); ++s) {
            double sum = 0.0;
            for (Symbol a = 0; a < k; ++a) {
                const double p = kt_conditional(counts, s, a);
                CHECK(p > 0.0);
                CHECK(p < 1.0);
                sum += p;
            }
            CHECK(std::abs(sum - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("ideal_length: hand-computed and closed-form values")
{
    const ContextCounts zero(2, 0);
    // 1/2 * 3/4 = 3/8.
    CHECK(std::abs(ideal_length(zeros(2), zero) - std::log2(8.0 / 3.0)) <= 1e-12);
    CHECK(ideal_length(SymbolSequence(2), zero) == 0.0);

    const double oracle = kt_block_bits({1000, 0});
    CHECK(std::abs(ideal_length(zeros(1000), zero) - oracle) <= 1e-6);
    CHECK(oracle == doctest::Approx(5.8088205439).epsilon(1e-9));

    // Arbitrary counts, k = 3.
    const SymbolSequence x(3, {0, 2, 2, 1, 0, 2, 2, 2, 1, 0, 0, 2});
    CHECK(std::abs(ideal_length(x, ContextCounts(3, 0)) - kt_block_bits({4, 2, 6})) <= 1e-9);

    CHECK_THROWS_AS(ideal_length(SymbolSequence(3, {0}), zero), InputError);
}

TEST_CASE("ideal_length: order 1 charges log2 k for the first symbol")
{
    const SymbolSequence x(4, {3});
    CHECK(ideal_length(x, ContextCounts(4, 1)) == doctest::Approx(2.0));
    // The first symbol stays uniform even with memory.
    CHECK(ideal_length(x, ContextCounts(4, 1, std::vector<std::uint32_t>(16, 50))) == doctest::Approx(2.0));
}

TEST_CASE("warm start helps on a constant sequence")
{
    const ContextCounts zero(2, 0);
    const auto warm = accumulate_counts(zeros(4096), 0);
    CHECK(ideal_length(zeros(64), warm) < ideal_length(zeros(64), zero));
}

TEST_CASE("warm start equals the conditional length of the concatenation (order 0)")
{
    Rng rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const auto k = static_cast<unsigned>(rng.uniform_int(2, 8));
        const auto theta = sample_jeffreys(k, 0, rng.next_u64());
        const auto y = generate(theta, rng.uniform_int(0, 2000), rng.next_u64());
        const auto x = generate(theta, rng.uniform_int(0, 2000), rng.next_u64());
        const ContextCounts zero(k, 0);
        const double warm = ideal_length(x, accumulate_counts(y, 0));
        const double telescoped = ideal_length(y.concat(x), zero) - ideal_length(y, zero);
        CHECK(std::abs(warm - telescoped) <= 1e-9 * std::max(1.0, telescoped));
    }
}

TEST_CASE("warm start vs concatenation (order 1) differs only at the boundary")
{
    // Rows bounded away from 0 keep the boundary transition within log2 k bits
    // of the uniform first-symbol charge.
    Rng rng(78);
    for (int trial = 0; trial < 200; ++trial) {
        const auto k = static_cast<unsigned>(rng.uniform_int(2, 6));
        std::vector<double> rows(k * k);
        for (std::size_t s = 0; s < k; ++s) {
            double sum = 0.0;
            for (std::size_t a = 0; a < k; ++a) sum += rows[s * k + a] = 1.0 + rng.uniform();
            for (std::size_t a = 0; a < k; ++a) rows[s * k + a] /= sum;
        }
        const MarkovParameter theta(k, 1, rows);
        const auto y = generate(theta, rng.uniform_int(200, 3000), rng.next_u64());
        const auto x = generate(theta, rng.uniform_int(1, 2000), rng.next_u64());
        const ContextCounts zero(k, 1);
        const double warm = ideal_length(x, accumulate_counts(y, 1));
        const double telescoped = ideal_length(y.concat(x), zero) - ideal_length(y, zero);
        CHECK(std::abs(warm - telescoped) <= 2 * std::log2(double(k)));
    }
}

TEST_CASE("arithmetic coder: equiprobable symbols cost exactly their width")
{
    ArithmeticEncoder enc;
    for (int i = 0; i < 100; ++i) enc.encode(i % 4, 1, 4);
    const auto bits = enc.finish();
    CHECK(bits.size() == 200);

    ArithmeticDecoder dec(bits);
    const std::uint64_t freq[] = {1, 1, 1, 1};
    for (int i = 0; i < 100; ++i) CHECK(dec.decode(freq, 4) == static_cast<std::size_t>(i % 4));
}

TEST_CASE("encode/decode round trip and length sandwich")
{
    for (std::uint64_t i = 0; i < 2000; ++i) {
        const auto c = random_case(derive_seed(2024, i), 1500);
        const auto block = encode(c.x, c.warm);
        CHECK(decode(block, c.warm, c.x.size()) == c.x);
        CHECK(deserialize(serialize(block)) == block);

        const auto len = measure(c.x, c.warm);
        CHECK(len.actual_bits == block.payload_length_bits);
        CHECK(len.ideal_bits <= double(len.actual_bits) + 1.0);
        CHECK(double(len.actual_bits) <= std::ceil(len.ideal_bits) + 2.0);
    }
}

TEST_CASE("all-zeros block: length close to the closed form")
{
    const auto x = zeros(1000);
    const ContextCounts zero(2, 0);
    const auto len = measure(x, zero);
    CHECK(double(len.actual_bits) <= std::ceil(len.ideal_bits) + 2.0);
    CHECK(len.ideal_bits == doctest::Approx(kt_block_bits({1000, 0})).epsilon(1e-12));
    CHECK(decode(encode(x, zero), zero, 1000) == x);
}

TEST_CASE("empty sequence")
{
    for (unsigned r = 0; r <= 1; ++r) {
        const ContextCounts warm(5, r);
        const auto block = encode(SymbolSequence(5), warm);
        CHECK(block.payload_length_bits <= 2);
        CHECK(decode(block, warm, 0).empty());
    }
}

TEST_CASE("decode rejects a different memory")
{
    const SymbolSequence x(2, {0, 1, 1, 0, 1});
    const auto warm = accumulate_counts(SymbolSequence(2, {0, 0, 1}), 0);
    const auto other = accumulate_counts(SymbolSequence(2, {0, 1, 1}), 0);
    const auto block = encode(x, warm);
    CHECK_THROWS_AS(decode(block, other, x.size()), ContextMismatchError);
    CHECK_THROWS_AS(decode(block, ContextCounts(2, 1), x.size()), ContextMismatchError);
    CHECK_THROWS_AS(decode(block, warm, x.size() + 1), InputError);
}

TEST_CASE("truncated payloads are reported")
{
    const auto theta = MarkovParameter::memoryless({0.9, 0.1});
    const auto x = generate(theta, 1000, 31);
    const ContextCounts zero(2, 0);
    const auto block = encode(x, zero);

    // Fewer payload bytes than the header announces.
    auto wire = serialize(block);
    wire.pop_back();
    CHECK_THROWS_AS(deserialize(wire), DecodeError);
    auto short_block = block;
    short_block.payload.pop_back();
    CHECK_THROWS_AS(decode(short_block, zero, x.size()), DecodeError);

    // One bit dropped with a consistent header.
    CHECK_THROWS_AS(decode(truncate_bits(block, 1), zero, x.size()), DecodeError);
}

TEST_CASE("truncation fuzz: never a silent wrong answer")
{
    // A truncated payload either fails to decode or is itself the canonical
    // encoding of the sequence returned; it never reproduces the original.
    std::size_t detected = 0;
    std::size_t total = 0;
    for (std::uint64_t i = 0; i < 300; ++i) {
        const auto c = random_case(derive_seed(555, i), 800);
        const auto block = encode(c.x, c.warm);
        for (std::uint64_t cut = 1; cut <= std::min<std::uint64_t>(block.payload_length_bits, 4); ++cut) {
            const auto truncated = truncate_bits(block, cut);
            ++total;
            try {
                const auto y = decode(truncated, c.warm, c.x.size());
                CHECK_FALSE(y == c.x);
                CHECK(encode(y, c.warm) == truncated);
            } catch (const DecodeError&) {
                ++detected;
            }
        }
    }
    CHECK(total > 0);
    MESSAGE("truncations detected: " << detected << " / " << total);
    CHECK(detected * 2 > total);
}

TEST_CASE("deserialize rejects malformed headers")
{
    const auto block = encode(SymbolSequence(2, {1, 0, 1}), ContextCounts(2, 0));
    const auto wire = serialize(block);

    auto bad_magic = wire;
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(deserialize(bad_magic), DecodeError);

    auto bad_version = wire;
    bad_version[4] = 2;
    CHECK_THROWS_AS(deserialize(bad_version), DecodeError);

    auto trailing = wire;
    trailing.push_back(0);
    CHECK_THROWS_AS(deserialize(trailing), DecodeError);

    CHECK_THROWS_AS(deserialize(std::vector<std::uint8_t>(wire.begin(), wire.begin() + 10)), DecodeError);

    if (block.payload_length_bits % 8 != 0) {
        auto padding = wire;
        padding.back() |= 1;
        CHECK_THROWS_AS(deserialize(padding), DecodeError);
    }
}

TEST_CASE("wire format header layout")
{
    const SymbolSequence x(3, {0, 1, 2, 2, 1});
    const auto warm = accumulate_counts(SymbolSequence(3, {0, 1, 2, 0}), 1);
    const auto block = encode(x, warm);
    const auto wire = serialize(block);

    REQUIRE(wire.size() == kBlockHeaderBytes + block.payload.size());
    CHECK(std::string(wire.begin(), wire.begin() + 4) == "MAUC");
    CHECK(wire[4] == 1);
    CHECK(wire[5] == 3);
    CHECK(wire[6] == 0);
    CHECK(wire[7] == 1);
    CHECK(wire[8] == 5);
    for (int i = 9; i < 16; ++i) CHECK(wire[i] == 0);
    std::uint64_t fp = 0;
    for (int i = 0; i < 8; ++i) fp |= std::uint64_t{wire[16 + i]} << (8 * i);
    CHECK(fp == warm.fingerprint());
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= std::uint64_t{wire[24 + i]} << (8 * i);
    CHECK(bits == block.payload_length_bits);
}

TEST_CASE("golden block")
{
    // Fixed input; the serialized bytes are frozen in tests/data.
    std::vector<Symbol> xs;
    for (int i = 0; i < 200; ++i) xs.push_back(static_cast<Symbol>((i * i + i / 3) % 3));
    const SymbolSequence x(3, xs);
    const auto warm = accumulate_counts(SymbolSequence(3, {0, 1, 2, 2, 1, 0, 0, 0, 1, 2, 2, 2}), 1);
    const auto wire = serialize(encode(x, warm));

    const std::string path = std::string(MAUC_TEST_DATA_DIR) + "/golden_block_v1.bin";
    if (std::getenv("MAUC_UPDATE_GOLDEN")) {
        std::ofstream(path, std::ios::binary).write(reinterpret_cast<const char*>(wire.data()),
                                                    static_cast<std::streamsize>(wire.size()));
    }
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    const std::vector<std::uint8_t> golden((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(wire == golden);
    CHECK(decode(deserialize(golden), warm, x.size()) == x);
}

TEST_CASE("redundancy of the cold-start coder under Jeffreys sources")
{
    const std::size_t n = 1024;
    const ContextCounts zero(2, 0);
    double sum = 0.0;
    const int trials = 400;
    for (int i = 0; i < trials; ++i) {
        const auto theta = sample_jeffreys(2, 0, derive_seed(900, i));
        const auto x = generate(theta, n, derive_seed(901, i));
        sum += ideal_length(x, zero) - n * entropy_rate(theta);
    }
    const double mean = sum / trials;
    const double closed = average_minimax_redundancy(n, 2, 0);
    CHECK(mean > 0.0);
    CHECK(mean >= closed - 1.0);
    CHECK(mean <= closed + 1.0);
}
