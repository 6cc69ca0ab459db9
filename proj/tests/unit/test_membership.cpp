#include "ecds/membership.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

using namespace ecds;

namespace {

Ratio exact_error(const std::function<bool(ProbeOracle&, Randomness&)>& decode, const BitString& word,
                  std::size_t budget, bool truth)
{
    return exact_probability(
        [&](Randomness& rng) {
            ProbeOracle o(word, budget);
            return decode(o, rng) != truth;
        },
        kExactLeafLimit);
}

ComposedParams tiny_params()
{
    ComposedParams p;
    p.n = 2;
    p.s = 1;
    p.block_size = 3;
    p.blocks = 4;
    p.bmrv_eps = 0.5;
    p.universe_scale = 2;
    p.seed = 5;
    return p;
}

} // namespace

TEST(BmrvShape, StandardConstants)
{
    const auto shape = standard_bmrv_shape(64, 2, 0.1);
    EXPECT_EQ(shape.n_prime, 120000u);
    EXPECT_EQ(shape.d, 60u);
    EXPECT_THROW(standard_bmrv_shape(1, 1, 0.1), std::invalid_argument);
}

TEST(BmrvStructure, RejectsMalformedProbeSets)
{
    EXPECT_THROW(BmrvStructure(2, 1, 0.1, 4, {{0, 1}, {2}}), std::invalid_argument);
    EXPECT_THROW(BmrvStructure(2, 1, 0.1, 4, {{0, 0}, {1, 2}}), std::invalid_argument);
    EXPECT_THROW(BmrvStructure(2, 1, 0.1, 4, {{0, 4}, {1, 2}}), std::invalid_argument);
    EXPECT_THROW(BmrvStructure(2, 3, 0.1, 4, {{0, 1}, {1, 2}}), std::invalid_argument);
}

TEST(BmrvVerify, CrossingExplicitGraphIsRejected)
{
    // P_2 shares one position with P_0, so storing {0} leaves index 2 at agreement 1/2
    const BmrvStructure st(4, 1, 0.25, 4, {{0, 1}, {2, 3}, {0, 2}, {1, 3}});
    const auto v = verify_bmrv(st, 1);
    EXPECT_FALSE(v.passed);
    EXPECT_TRUE(v.exhaustive);
    EXPECT_EQ(v.sets_checked, 5u);
    EXPECT_EQ(v.min_agreement[2], Ratio(1, 2));
    try {
        bmrv_encode(st, BitString::from_string("1000"));
        FAIL() << "expected BmrvViolation";
    } catch (const BmrvViolation& e) {
        EXPECT_EQ(e.index(), 2u);
    }
}

TEST(BmrvVerify, DisjointGraphPasses)
{
    const BmrvStructure st(4, 2, 0.1, 8, {{0, 1}, {2, 3}, {4, 5}, {6, 7}});
    const auto v = verify_bmrv(st, 1);
    EXPECT_TRUE(v.passed);
    EXPECT_EQ(v.sets_checked, 11u);
    for (const auto& a : v.min_agreement) {
        EXPECT_EQ(a, Ratio(1, 1));
    }
}

TEST(BmrvBuild, EmptySetStoresZeros)
{
    const auto build = bmrv_build(16, 0, 0.2, 3, BmrvShape{64, 8});
    const auto enc = bmrv_encode(build.structure, BitString(16));
    EXPECT_EQ(enc.y.weight(), 0u);
    for (const auto& a : enc.agreement) {
        EXPECT_EQ(a, Ratio(1, 1));
    }
}

TEST(BmrvBuild, StandardShapeVerifiesAndDecodes)
{
    const auto build = bmrv_build(64, 2, 0.1, 1);
    const auto& st = build.structure;
    ASSERT_TRUE(build.verification.passed);
    EXPECT_TRUE(build.verification.exhaustive);
    EXPECT_EQ(build.verification.sets_checked, 2081u);
    EXPECT_EQ(st.n_prime(), 120000u);
    EXPECT_EQ(st.d(), 60u);

    const BitString x = [] {
        BitString b(64);
        b.set(3, true);
        b.set(40, true);
        return b;
    }();
    const auto enc = bmrv_encode(st, x);
    EXPECT_LE(enc.y.weight(), 120u);
    for (std::size_t i = 0; i < 64; ++i) {
        EXPECT_GE(enc.agreement[i], Ratio(54, 60));
        const Ratio e = exact_error([&](ProbeOracle& o, Randomness& r) { return bmrv_decode(o, st, i, r); }, enc.y,
                                    1, x[i]);
        EXPECT_EQ(e + enc.agreement[i], Ratio(1, 1));
    }
}

TEST(BmrvDecode, FlippingTheProbeSetBreaksOneIndex)
{
    const auto build = bmrv_build(32, 1, 0.2, 4, BmrvShape{2000, 25});
    const auto& st = build.structure;
    const BitString x(32);
    BitString y = bmrv_encode(st, x).y;
    for (auto j : st.probe_set(7)) {
        y.flip(j);
    }
    const Ratio e = exact_error([&](ProbeOracle& o, Randomness& r) { return bmrv_decode(o, st, 7, r); }, y, 1, false);
    EXPECT_EQ(e, Ratio(1, 1));
}

TEST(BmrvBuild, ImpossibleTargetThrowsConstructionFailure)
{
    // d = 1 with 2 positions for 8 indices: overlaps are unavoidable
    try {
        bmrv_build(8, 1, 0.1, 1, BmrvShape{2, 1}, 3);
        FAIL() << "expected ConstructionFailure";
    } catch (const ConstructionFailure& e) {
        EXPECT_FALSE(e.report().empty());
    }
}

TEST(GoodBlocks, CountsMatchBruteForce)
{
    SeededRandomness rng(12);
    const auto st = BmrvStructure::sample(40, 2, 0.3, BmrvShape{120, 10}, rng);
    std::vector<std::uint32_t> perm(120);
    std::iota(perm.begin(), perm.end(), 0u);
    for (std::size_t k = perm.size(); k > 1; --k) {
        std::swap(perm[k - 1], perm[rng.below(k)]);
    }
    const auto counts = good_block_counts(st, perm, 12);
    for (std::size_t i = 0; i < 40; ++i) {
        std::size_t expected = 0;
        for (std::size_t block = 0; block < 10; ++block) {
            std::size_t load = 0;
            for (auto j : st.probe_set(i)) {
                load += perm[j] / 12 == block;
            }
            expected += load == 1;
        }
        EXPECT_EQ(counts[i], expected) << i;
    }
    EXPECT_THROW(good_block_counts(st, perm, 7), std::invalid_argument);
}

TEST(Composed, DefaultsFollowTheDeskGeometry)
{
    ComposedParams p;
    p.n = 64;
    p.s = 2;
    const auto r = p.resolved();
    EXPECT_EQ(r.block_size, 16u);
    EXPECT_EQ(r.blocks, 104u);
    p.s = 0;
    EXPECT_THROW(p.resolved(), std::invalid_argument);
}

TEST(Composed, DeskBuildAccounting)
{
    ComposedParams p;
    p.n = 64;
    p.s = 2;
    const auto build = composed_build(p);
    const auto& cm = build.structure;
    EXPECT_EQ(cm.length(), 104u * 65536u);
    EXPECT_EQ(cm.bmrv().n(), 1280u);
    EXPECT_GE(build.good_count, 64u);
    std::set<std::size_t> served(cm.served_indices().begin(), cm.served_indices().end());
    EXPECT_EQ(served.size(), 64u);
    for (std::size_t i = 0; i < 64; ++i) {
        EXPECT_TRUE(cm.is_good(cm.internal_index(i)));
        const auto loads = cm.block_loads(i);
        std::size_t ones = 0;
        std::size_t total = 0;
        for (auto l : loads) {
            ones += l == 1;
            total += l;
        }
        EXPECT_EQ(total, 104u);
        EXPECT_EQ(ones, cm.good_blocks()[cm.internal_index(i)]);
        EXPECT_GE(4 * ones, 104u);
        EXPECT_LE(crowded_block_mass(cm, i, 2), 1.0);
    }
    const auto report = build_report(build);
    EXPECT_EQ(report["length"], 6815744u);
    EXPECT_TRUE(report["verification"]["passed"].get<bool>());
}

TEST(Composed, NoiselessDecodingOnATinyBuild)
{
    const auto build = composed_build(tiny_params());
    const auto& cm = build.structure;
    for (std::uint64_t v = 0; v < 4; ++v) {
        const BitString x = BitString::from_index(v, 2);
        if (x.weight() > 1) {
            continue;
        }
        const Codeword c = cm.encode(x);
        const BitString y = bmrv_encode(cm.bmrv(), cm.internal_message(x)).y;
        for (std::size_t i = 0; i < 2; ++i) {
            const auto& set = cm.bmrv().probe_set(cm.internal_index(i));
            // direct decoder reads y_j exactly, so its error is the disagreement rate
            std::size_t wrong = 0;
            for (auto j : set) {
                wrong += y[j] != x[i];
            }
            const Ratio direct =
                exact_error([&](ProbeOracle& o, Randomness& r) { return cm.decode_direct(o, i, r); }, c.bits(), 2, x[i]);
            EXPECT_EQ(direct, Ratio(wrong, set.size()));
            const Ratio block =
                exact_error([&](ProbeOracle& o, Randomness& r) { return cm.decode_block(o, i, r); }, c.bits(), 2, x[i]);
            EXPECT_LT(block.value(), 0.5);
        }
    }
    EXPECT_THROW(cm.encode(BitString::from_string("11")), std::invalid_argument);
}

TEST(Composed, PlacementIsTheBlockOfThePermutedPosition)
{
    const auto build = composed_build(tiny_params());
    const auto& cm = build.structure;
    for (std::size_t j = 0; j < cm.bmrv().n_prime(); ++j) {
        const auto where = cm.place(j);
        EXPECT_EQ(where.block * cm.block_size() + where.offset, cm.position_of()[j]);
    }
}

TEST(Composed, SingleBlockDegenerates)
{
    // b = 1 and |P_i| = 1: the one block holds P_i alone
    ComposedParams p = tiny_params();
    p.blocks = 1;
    p.universe_scale = 1;
    const auto build = composed_build(p);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(build.structure.block_loads(i), std::vector<std::size_t>{1});
        EXPECT_TRUE(build.structure.is_good(build.structure.internal_index(i)));
    }
}
