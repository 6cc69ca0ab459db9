#include "ecds/hadamard.hpp"
#include "ecds/inner_product.hpp"
#include "ecds/membership.hpp"
#include "ecds/oracle.hpp"

#include <gtest/gtest.h>

using namespace ecds;

TEST(Corrupt, FlipsExactlyThePattern)
{
    const BitString zero(8);
    EXPECT_EQ(corrupt(zero, CorruptionPattern({1, 4}, 8)).to_string(), "01001000");
    EXPECT_EQ(corrupt(zero, CorruptionPattern({}, 8)), zero);
    std::vector<std::size_t> all(8);
    for (std::size_t k = 0; k < 8; ++k) {
        all[k] = k;
    }
    const BitString w = BitString::from_string("10110010");
    EXPECT_EQ(corrupt(w, CorruptionPattern(all, 8)).to_string(), "01001101");
}

TEST(Corrupt, IsAnInvolution)
{
    SeededRandomness rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        const BitString w = rng.bits(100);
        std::vector<std::size_t> flips;
        for (int k = 0; k < 10; ++k) {
            flips.push_back(rng.below(100));
        }
        const CorruptionPattern p(flips, 100);
        EXPECT_EQ(corrupt(corrupt(w, p), p), w);
    }
}

TEST(Corrupt, RejectsOutOfRangeAndMergesDuplicates)
{
    EXPECT_THROW(CorruptionPattern({8}, 8), std::out_of_range);
    const CorruptionPattern p({3, 1, 3}, 8);
    EXPECT_EQ(p.weight(), 2u);
    EXPECT_EQ(p.positions(), (std::vector<std::size_t>{1, 3}));
}

TEST(NoiseBudget, FloorsWithoutRepresentationLoss)
{
    EXPECT_EQ(noise_budget(0.05, 256), 12u);
    EXPECT_EQ(noise_budget(0.1, 256), 25u);
    EXPECT_EQ(noise_budget(0.01, 256), 2u);
    EXPECT_EQ(noise_budget(1.0 / 16.0, 64), 4u);
    EXPECT_EQ(noise_budget(0.0, 1000), 0u);
}

TEST(ProbeOracle, ReadsAndCounts)
{
    const Codeword c(BitString::from_string("0110"));
    const CorruptionPattern p({1}, 4);
    ProbeOracle o(c, p, 3);
    EXPECT_FALSE(o.probe(0));
    EXPECT_FALSE(o.probe(1));  // flipped
    EXPECT_TRUE(o.probe(2));
    EXPECT_EQ(o.used(), 3u);
    EXPECT_EQ(o.trace(), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(ProbeOracle, BudgetIsHard)
{
    const BitString w(4);
    ProbeOracle o(w, 2);
    o.probe(0);
    o.probe(1);
    const auto before = probe_budget_violations();
    EXPECT_THROW(o.probe(2), ProbeBudgetExceeded);
    EXPECT_EQ(probe_budget_violations(), before + 1);
    EXPECT_THROW(
        {
            ProbeOracle fresh(w, 1);
            fresh.probe(9);
        },
        std::out_of_range);
}

TEST(ProbeOracle, WindowsChargeTheParent)
{
    const BitString w = BitString::from_string("00001111");
    ProbeOracle root(w, 3);
    {
        ProbeOracle window(root, 4, 4, 2);
        EXPECT_TRUE(window.probe(0));
        EXPECT_TRUE(window.probe(3));
        EXPECT_THROW(window.probe(1), ProbeBudgetExceeded);
    }
    EXPECT_EQ(root.used(), 2u);
    EXPECT_EQ(root.trace(), (std::vector<std::size_t>{4, 7}));
    ProbeOracle last(root, 0, 4, 5);
    last.probe(0);
    EXPECT_THROW(last.probe(1), ProbeBudgetExceeded);  // parent exhausted
}

TEST(ProbeDistribution, HadamardProbesAreUniform)
{
    const HadamardCode code(3);
    const BitString word = code.encode(BitString::from_string("101"));
    for (std::size_t i = 0; i < 3; ++i) {
        const auto dist = probe_distribution(
            [&](ProbeOracle& o, Randomness& rng) { had_decode_bit(o, 3, i, rng); }, word, 2);
        ASSERT_TRUE(dist.enumerable);
        ASSERT_EQ(dist.slots.size(), 2u);
        for (const auto& slot : dist.slots) {
            ASSERT_EQ(slot.size(), 8u);
            for (const auto& [pos, p] : slot) {
                EXPECT_EQ(p, Ratio(1, 8)) << pos;
            }
        }
    }
}

TEST(ProbeDistribution, DeterministicTableIsAPointMass)
{
    const IpTableLayout layout(4, 2, 2);
    const Codeword c = layout.encode(BitString::from_string("1011"));
    const BitString y = BitString::from_string("0110");
    const auto dist = probe_distribution([&](ProbeOracle& o, Randomness&) { layout.decode(o, y); }, c.bits(), 2);
    ASSERT_TRUE(dist.enumerable);
    ASSERT_EQ(dist.slots.size(), 2u);
    const auto parts = split_query(y, 2);
    for (std::size_t t = 0; t < 2; ++t) {
        ASSERT_EQ(dist.slots[t].size(), 1u);
        EXPECT_EQ(dist.slots[t].begin()->first, layout.space().rank(parts[t]));
        EXPECT_EQ(dist.slots[t].begin()->second, Ratio(1, 1));
    }
}

TEST(ProbeDistribution, ComposedDecoderSlotsSumToOne)
{
    ComposedParams params;
    params.n = 2;
    params.s = 1;
    params.block_size = 3;
    params.blocks = 4;
    params.bmrv_eps = 0.5;
    params.universe_scale = 2;
    params.seed = 5;
    const ComposedBuild build = composed_build(params);
    const Codeword c = build.structure.encode(BitString::from_string("10"));
    for (std::size_t i = 0; i < 2; ++i) {
        const auto dist = probe_distribution(
            [&](ProbeOracle& o, Randomness& rng) { build.structure.decode_block(o, i, rng); }, c.bits(), 2);
        ASSERT_TRUE(dist.enumerable);
        ASSERT_FALSE(dist.slots.empty());
        for (const auto& slot : dist.slots) {
            Ratio total(0, 1);
            for (const auto& [pos, p] : slot) {
                total += p;
            }
            EXPECT_EQ(total, Ratio(1, 1));
        }
    }
}

TEST(ProbeDistribution, ReportsNotEnumerable)
{
    const BitString w(4);
    const auto dist = probe_distribution(
        [](ProbeOracle& o, Randomness& rng) { o.probe(static_cast<std::size_t>(rng.below(1u << 22) % 4)); }, w, 1);
    EXPECT_FALSE(dist.enumerable);
    EXPECT_FALSE(dist.note.empty());
}
