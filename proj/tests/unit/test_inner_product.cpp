#include "ecds/inner_product.hpp"

#include <gtest/gtest.h>

using namespace ecds;

namespace {

std::vector<BitString> all_queries(std::size_t n, std::size_t r)
{
    const BoundedWeightSpace space(n, r);
    std::vector<BitString> out;
    for (std::uint64_t k = 0; k < space.size_u64(); ++k) {
        out.push_back(space.unrank(k));
    }
    return out;
}

Ratio poly_error(const PolyIpLayout& layout, const BitString& word, const BitString& x, const BitString& y)
{
    return exact_probability(
        [&](Randomness& rng) {
            ProbeOracle o(word, layout.probes());
            return layout.decode(o, y, rng) != dot_mod2(x, y);
        },
        kExactLeafLimit);
}

} // namespace

TEST(IpTable, LengthsFollowTheChunkWeight)
{
    EXPECT_EQ(IpTableLayout(4, 2, 1).length(), 11u);
    EXPECT_EQ(IpTableLayout(6, 4, 2).length(), 22u);  // B(6,2)
    EXPECT_EQ(IpTableLayout(6, 5, 3).length(), 22u);  // B(6,2)
    EXPECT_EQ(IpTableLayout(8, 8, 1).length(), 256u);
    EXPECT_THROW(IpTableLayout(4, 5, 1), InconsistentParameters);
}

TEST(IpTable, ZeroQueryReadsTheZeroEntry)
{
    const IpTableLayout layout(5, 3, 2);
    const Codeword c = layout.encode(BitString::from_string("11011"));
    ProbeOracle o(c.bits(), 2);
    EXPECT_FALSE(layout.decode(o, BitString(5)));
    EXPECT_EQ(o.trace(), (std::vector<std::size_t>{0, 0}));
}

TEST(IpTable, NoiselessDecodingIsExhaustivelyCorrect)
{
    for (std::size_t n = 1; n <= 6; ++n) {
        for (std::size_t r = 0; r <= n; ++r) {
            for (std::size_t p = 1; p <= 3; ++p) {
                const IpTableLayout layout(n, r, p);
                const auto queries = all_queries(n, r);
                for (std::uint64_t v = 0; v < (1u << n); ++v) {
                    const BitString x = BitString::from_index(v, n);
                    const Codeword c = layout.encode(x);
                    for (const auto& y : queries) {
                        ProbeOracle o(c.bits(), p);
                        ASSERT_EQ(layout.decode(o, y), dot_mod2(x, y)) << n << r << p;
                        ASSERT_LE(o.used(), p);
                    }
                }
            }
        }
    }
}

TEST(IpHadamard, MatchesTheBitDecoderOnUnitQueries)
{
    SeededRandomness rng(6);
    for (std::size_t n = 1; n <= 8; ++n) {
        const BitString x = rng.bits(n);
        const BitString word = HadamardCode(n).encode(x);
        for (std::uint64_t v = 0; v < (1u << n); ++v) {
            const BitString y = BitString::from_index(v, n);
            const Ratio e = exact_probability(
                [&](Randomness& r) {
                    ProbeOracle o(word, 2);
                    return ip_hadamard_decode(o, y, r) != dot_mod2(x, y);
                },
                1024);
            ASSERT_EQ(e, Ratio(0, 1));
        }
    }
}

TEST(PolyIp, SetUniverseIsTheLeastValidM)
{
    EXPECT_EQ(poly_ip_set_universe(4, 1), 4u);
    EXPECT_EQ(poly_ip_set_universe(4, 2), 4u);
    EXPECT_EQ(poly_ip_set_universe(5, 2), 5u);  // 25 >= 20 > 16
    EXPECT_EQ(poly_ip_set_universe(10, 3), 7u);  // 343 >= 270 > 216
}

TEST(PolyIp, LengthExamples)
{
    const PolyIpLayout p2(2, 1, 2);
    EXPECT_EQ(p2.m(), 2u);
    EXPECT_EQ(p2.length(), 8u);
    const PolyIpLayout p3(4, 1, 3);
    EXPECT_EQ(p3.m(), 4u);
    EXPECT_EQ(p3.length(), 768u);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(p3.sets()[i].weight(), 2u);
    }
    EXPECT_THROW(PolyIpLayout(4, 1, 1), std::invalid_argument);
}

TEST(PolyIp, ZeroDataGivesZeroTables)
{
    const PolyIpLayout layout(4, 1, 3);
    EXPECT_EQ(layout.encode(BitString(4)).bits().weight(), 0u);
}

TEST(PolyIp, EveryMonomialIsAssignedToABlockItAvoids)
{
    const PolyIpLayout layout(4, 2, 3);
    for (const auto& mono : layout.monomials()) {
        ASSERT_LT(mono.block, 3u);
        for (auto share : mono.shares) {
            ASSERT_NE(share, mono.block);
        }
        // least such block
        for (std::size_t j = 0; j < mono.block; ++j) {
            EXPECT_NE(std::find(mono.shares.begin(), mono.shares.end(), j), mono.shares.end());
        }
    }
}

TEST(PolyIp, IndicatorSetsRecoverTheData)
{
    for (auto [n, p] : {std::pair<std::size_t, std::size_t>{4, 3}, {3, 2}, {6, 4}}) {
        const PolyIpLayout layout(n, 1, p);
        for (std::uint64_t v = 0; v < (1u << n); ++v) {
            const BitString x = BitString::from_index(v, n);
            for (std::size_t i = 0; i < n; ++i) {
                ASSERT_EQ(layout.eval_px(x, layout.sets()[i]), x[i]);
            }
        }
    }
}

TEST(PolyIp, QueryPointEvaluatesToTheInnerProduct)
{
    const PolyIpLayout layout(4, 2, 3);
    for (std::uint64_t v = 0; v < 16; ++v) {
        const BitString x = BitString::from_index(v, 4);
        for (const auto& y : all_queries(4, 2)) {
            ASSERT_EQ(layout.eval_pxr(x, layout.query_point(y)), dot_mod2(x, y));
        }
    }
}

TEST(PolyIp, NoiselessDecodingIsExhaustivelyCorrect)
{
    for (std::size_t p : {2u, 3u}) {
        for (std::size_t n = 1; n <= 4; ++n) {
            for (std::size_t r = 1; r <= std::min<std::size_t>(2, n); ++r) {
                const PolyIpLayout layout(n, r, p);
                if (layout.table_inputs() > 16) {
                    continue;  // enumeration of share randomness too wide for a unit test
                }
                const auto queries = all_queries(n, r);
                for (std::uint64_t v = 0; v < (1u << n); ++v) {
                    const BitString x = BitString::from_index(v, n);
                    const Codeword c = layout.encode(x);
                    for (const auto& y : queries) {
                        ASSERT_EQ(poly_error(layout, c.bits(), x, y), Ratio(0, 1)) << p << n << r;
                    }
                }
            }
        }
    }
}

TEST(PolyIp, ErrorBoundedBySummedBlockCorruption)
{
    const PolyIpLayout layout(2, 1, 2);
    const std::size_t block = layout.table_length();
    for (std::uint64_t v = 0; v < 4; ++v) {
        const BitString x = BitString::from_index(v, 2);
        const BitString clean = layout.encode(x).bits();
        for (std::uint64_t mask = 0; mask < 256; ++mask) {
            BitString word = clean;
            std::size_t per_block[2] = {0, 0};
            for (std::size_t k = 0; k < 8; ++k) {
                if ((mask >> k) & 1u) {
                    word.flip(k);
                    ++per_block[k / block];
                }
            }
            const Ratio bound(per_block[0] + per_block[1], block);
            for (const auto& y : all_queries(2, 1)) {
                ASSERT_LE(poly_error(layout, word, x, y).value(), bound.value() + 1e-12);
            }
        }
    }
}

TEST(Substring, Lengths)
{
    EXPECT_EQ(SubstringLayout(8, 4).length(), 16u);   // 4 * 2^2
    EXPECT_EQ(SubstringLayout(10, 4).length(), 32u);  // 4 * 2^3, zero padded
    EXPECT_EQ(SubstringLayout(16, 1).length(), 65536u);
    EXPECT_EQ(SubstringLayout::budget(3, 5), 30u);
}

TEST(Substring, NoiselessRecoveryExhaustive)
{
    for (std::size_t r = 1; r <= 4; ++r) {
        const SubstringLayout layout(8, r);
        const auto queries = all_queries(8, r);
        for (std::uint64_t v = 0; v < 256; ++v) {
            const BitString x = BitString::from_index(v, 8);
            const Codeword c = layout.encode(x);
            SeededRandomness rng(v);
            for (const auto& y : queries) {
                ProbeOracle o(c.bits(), SubstringLayout::budget(y.weight(), 1));
                ASSERT_EQ(layout.decode(o, y, 1, rng), extract_substring(x, y));
            }
        }
    }
}

TEST(Substring, MildNoiseWithElevenRepetitions)
{
    const std::size_t n = 16;
    const std::size_t r = 4;
    const SubstringLayout layout(n, r);
    SeededRandomness setup(8);
    const BitString x = setup.bits(n);
    const Codeword c = layout.encode(x);
    // delta = 1/(8r): 2 flips in 64 positions
    BitString word = c.bits();
    word.flip(5);
    word.flip(37);
    const BitString y = BitString::from_string("1000100010001000");
    std::size_t failures = 0;
    const std::size_t trials = 100'000;
    for (std::size_t t = 0; t < trials; ++t) {
        auto rng = SeededRandomness::for_trial(2, t);
        ProbeOracle o(word, SubstringLayout::budget(4, 11));
        failures += layout.decode(o, y, 11, rng) != extract_substring(x, y);
    }
    EXPECT_LT(static_cast<double>(failures) / trials, 0.05);
}
