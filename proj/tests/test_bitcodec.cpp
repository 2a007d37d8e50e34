#include "relusynth/bitcodec.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace relusynth;

namespace {

std::vector<mpq_class> run(const Network& n, std::vector<mpq_class> x) {
    std::vector<Scalar> in(x.begin(), x.end());
    std::vector<mpq_class> out;
    for (const auto& s : Evaluator(n)(in)) out.push_back(s.to_rational());
    return out;
}

// Digit-extraction oracle straight from the definitions.
mpq_class binary_prefix(const BitStream& b, std::size_t ell) {
    mpq_class v = 0;
    for (std::size_t j = 0; j < ell && j < b.size(); ++j)
        if (b[j]) v += pow2q(-static_cast<long>(j + 1));
    return v;
}

BitStream drop(const BitStream& b, std::size_t k) {
    return k >= b.size() ? BitStream{} : BitStream(b.begin() + static_cast<long>(k), b.end());
}

}  // namespace

TEST(Ternary, Encode) {
    EXPECT_EQ(ternary_encode({1, 0, 1}), mpq_class(10, 27));
    EXPECT_EQ(ternary_encode({}), 0);
    BitStream ones(10, 1);
    mpq_class want = (pow3q(10) - 1) / (2 * pow3q(10));
    EXPECT_EQ(ternary_encode(ones), want);
    EXPECT_THROW(ternary_encode({2}), std::invalid_argument);
}

TEST(Ternary, BlockEncode) {
    EXPECT_EQ(block_encode({mpq_class(1, 2)}, 2).value, mpq_class(1, 3));
    EXPECT_EQ(block_encode({mpq_class(1, 2), mpq_class(1, 4)}, 2).value, mpq_class(28, 81));
    EXPECT_EQ(block_encode({}, 3).value, 0);
    EXPECT_THROW(block_encode({mpq_class(1)}, 2), std::invalid_argument);
    auto code = block_encode({mpq_class(3, 8), mpq_class(5, 8), mpq_class(0)}, 3);
    EXPECT_EQ(block_decode(code), (std::vector<mpq_class>{mpq_class(3, 8), mpq_class(5, 8), mpq_class(0)}));
}

TEST(BitSum, Examples) {
    Network n2 = bit_sum_net(2);
    auto r = run(n2, {ternary_encode({1, 0, 1}), 2});
    EXPECT_EQ(r[0], 1);
    EXPECT_EQ(r[1], mpq_class(1, 3));
    r = run(n2, {0, 2});
    EXPECT_EQ(r[0], 0);
    EXPECT_EQ(r[1], 0);
    r = run(n2, {ternary_encode({1, 1, 0, 1}), 0});
    EXPECT_EQ(r[0], 0);
    EXPECT_EQ(r[1], ternary_encode({0, 1}));
    EXPECT_EQ(n2.depth(), 2u);
}

TEST(BitSum, AllPrefixesAndIndices) {
    std::mt19937_64 rng(4);
    for (std::size_t n = 1; n <= 4; ++n) {
        Network net = bit_sum_net(n);
        EXPECT_LE(size_report(net).max_magnitude.to_rational(), 8 * pow3q(static_cast<long>(n)));
        for (int t = 0; t < 40; ++t) {
            BitStream b(n + 5);
            for (auto& x : b) x = static_cast<int>(rng() & 1);
            for (std::size_t i = 0; i <= n + 1; ++i) {
                auto r = run(net, {ternary_encode(b), static_cast<long>(i)});
                int want = 0;
                for (std::size_t j = 0; j < std::min(i, n); ++j) want += b[j];
                EXPECT_EQ(r[0], want);
                EXPECT_EQ(r[1], ternary_encode(drop(b, n)));
            }
        }
    }
}

TEST(BitDecode, Examples) {
    auto r = run(bit_decode_net(2, 2), {ternary_encode({1, 1})});
    EXPECT_EQ(r[0], mpq_class(3, 4));
    EXPECT_EQ(r[1], 0);
    r = run(bit_decode_net(2, 2), {ternary_encode({1, 0, 1, 1})});
    EXPECT_EQ(r[0], mpq_class(1, 2));
    EXPECT_EQ(r[1], mpq_class(4, 9));
    EXPECT_EQ(bit_decode_net(2, 5).depth(), 3u);
}

TEST(BitDecode, RandomStreamsExact) {
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<std::size_t> len(0, 48), nd(1, 3), ld(1, 12);
    for (int t = 0; t < 60; ++t) {
        std::size_t n = nd(rng), ell = ld(rng);
        Network net = bit_decode_net(n, ell);
        BitStream b(len(rng));
        for (auto& x : b) x = static_cast<int>(rng() & 1);
        auto r = run(net, {ternary_encode(b)});
        EXPECT_EQ(r[0], binary_prefix(b, ell));
        EXPECT_EQ(r[1], ternary_encode(drop(b, ell)));
        // Iterating on the tail walks down the stream.
        auto r2 = run(net, {r[1]});
        EXPECT_EQ(r2[0], binary_prefix(drop(b, ell), ell));
    }
}

TEST(BitDecode, BlockCodeAgreement) {
    std::vector<mpq_class> vals{mpq_class(5, 8), mpq_class(1, 8), mpq_class(7, 8)};
    auto code = block_encode(vals, 3);
    Network dec = bit_decode_net(2, 3);
    mpq_class x = code.value;
    for (const auto& v : vals) {
        auto r = run(dec, {x});
        EXPECT_EQ(r[0], v);
        x = r[1];
    }
}
