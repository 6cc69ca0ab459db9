#include "ecds/hadamard.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ecds;

namespace {

// x . y over every y, built without the encoder.
BitString reference_hadamard(const BitString& x)
{
    const std::size_t s = x.size();
    BitString out(std::size_t{1} << s);
    for (std::uint64_t y = 0; y < out.size(); ++y) {
        out.set(y, dot_mod2(x, BitString::from_index(y, s)));
    }
    return out;
}

Ratio exact_bit_error(const BitString& word, std::size_t s, std::size_t i, bool truth)
{
    return exact_probability(
        [&](Randomness& rng) {
            ProbeOracle o(word, 2);
            return had_decode_bit(o, s, i, rng) != truth;
        },
        kExactLeafLimit);
}

CorruptionPattern random_pattern(std::size_t length, std::size_t weight, Randomness& rng)
{
    std::vector<std::size_t> flips;
    while (CorruptionPattern(flips, length).weight() < weight) {
        flips.push_back(rng.below(length));
    }
    return CorruptionPattern(flips, length);
}

double majority_error(double p, std::size_t t)
{
    double total = 0.0;
    for (std::size_t k = (t + 1) / 2; k <= t; ++k) {
        total += std::exp(std::lgamma(t + 1.0) - std::lgamma(k + 1.0) - std::lgamma(t - k + 1.0)) *
                 std::pow(p, static_cast<double>(k)) * std::pow(1.0 - p, static_cast<double>(t - k));
    }
    return total;
}

} // namespace

TEST(Hadamard, EncodeExamples)
{
    const HadamardCode code(2);
    EXPECT_EQ(code.encode(BitString::from_string("00")).to_string(), "0000");
    EXPECT_EQ(code.encode(BitString::from_string("10")).to_string(), "0011");
    SeededRandomness rng(1);
    for (std::size_t s = 1; s <= 10; ++s) {
        const BitString x = rng.bits(s);
        const BitString c = HadamardCode(s).encode(x);
        EXPECT_FALSE(c[0]);
        EXPECT_EQ(c, reference_hadamard(x));
    }
}

TEST(Hadamard, MinimumDistanceIsHalfTheLength)
{
    for (std::size_t s = 1; s <= 6; ++s) {
        EXPECT_EQ(LinearCode::hadamard(s).min_distance(), std::size_t{1} << (s - 1));
        // pairwise, by brute force
        const HadamardCode code(s);
        std::size_t best = code.length();
        for (std::uint64_t a = 0; a < (1u << s); ++a) {
            for (std::uint64_t b = a + 1; b < (1u << s); ++b) {
                const auto d = (code.encode(BitString::from_index(a, s)) ^ code.encode(BitString::from_index(b, s)))
                                   .weight();
                best = std::min(best, d);
            }
        }
        EXPECT_EQ(best, std::size_t{1} << (s - 1));
    }
}

TEST(Hadamard, NoiselessDecodingIsExact)
{
    for (std::size_t s = 1; s <= 6; ++s) {
        const HadamardCode code(s);
        for (std::uint64_t v = 0; v < (1u << s); ++v) {
            const BitString x = BitString::from_index(v, s);
            const BitString word = code.encode(x);
            for (std::size_t i = 0; i < s; ++i) {
                ASSERT_EQ(exact_bit_error(word, s, i, x[i]), Ratio(0, 1));
            }
        }
    }
}

TEST(Hadamard, FullCorruptionAlwaysWrongForBits)
{
    // complementing every position leaves each pair's XOR unchanged; a
    // complement of one half-cube instead is the "always wrong" pattern
    const std::size_t s = 4;
    const BitString x = BitString::from_string("1010");
    const BitString word = HadamardCode(s).encode(x);
    for (std::size_t i = 0; i < s; ++i) {
        std::vector<std::size_t> flips;
        for (std::size_t z = 0; z < word.size(); ++z) {
            if ((z >> (s - 1 - i)) & 1u) {
                flips.push_back(z);
            }
        }
        const BitString bad = corrupt(word, CorruptionPattern(flips, word.size()));
        EXPECT_EQ(exact_bit_error(bad, s, i, x[i]), Ratio(1, 1));
    }
}

TEST(Hadamard, ExactErrorAtMostTwiceTheNoise)
{
    SeededRandomness rng(21);
    for (std::size_t s : {4u, 6u, 8u}) {
        const HadamardCode code(s);
        const std::size_t len = code.length();
        for (int trial = 0; trial < 20; ++trial) {
            const BitString x = rng.bits(s);
            const std::size_t w = rng.below(len / 8 + 1);
            const BitString word = corrupt(code.encode(x), random_pattern(len, w, rng));
            for (std::size_t i = 0; i < s; ++i) {
                const Ratio e = exact_bit_error(word, s, i, x[i]);
                ASSERT_LE(e, Ratio(2 * w, len));
            }
            const BitString y = rng.bits(s);
            const Ratio e = exact_probability(
                [&](Randomness& r) {
                    ProbeOracle o(word, 2);
                    return had_decode_ip(o, y, r) != dot_mod2(x, y);
                },
                kExactLeafLimit);
            ASSERT_LE(e, Ratio(2 * w, len));
        }
    }
}

TEST(Hadamard, InnerProductExamples)
{
    const BitString x = BitString::from_string("10");
    const BitString word = HadamardCode(2).encode(x);
    EXPECT_EQ(exact_probability(
                  [&](Randomness& r) {
                      ProbeOracle o(word, 2);
                      return had_decode_ip(o, BitString::from_string("11"), r);
                  },
                  64),
              Ratio(1, 1));
    // y = e_i reduces to bit decoding on every coin
    SeededRandomness a(4);
    SeededRandomness b(4);
    const BitString word8 = HadamardCode(8).encode(BitString::from_string("11001010"));
    for (std::size_t i = 0; i < 8; ++i) {
        ProbeOracle o1(word8, 2);
        ProbeOracle o2(word8, 2);
        EXPECT_EQ(had_decode_bit(o1, 8, i, a), had_decode_ip(o2, BitString::unit(8, i), b));
        EXPECT_EQ(o1.trace(), o2.trace());
    }
}

TEST(Hadamard, ProbesAreMarginallyUniform)
{
    const std::size_t s = 5;
    const BitString word = HadamardCode(s).encode(BitString::from_string("01101"));
    const BitString y = BitString::from_string("11010");
    const auto dist =
        probe_distribution([&](ProbeOracle& o, Randomness& rng) { had_decode_ip(o, y, rng); }, word, 2);
    ASSERT_TRUE(dist.enumerable);
    for (const auto& slot : dist.slots) {
        ASSERT_EQ(slot.size(), 32u);
        for (const auto& [pos, p] : slot) {
            EXPECT_EQ(p, Ratio(1, 32));
        }
    }
}

TEST(Amplified, BasicContracts)
{
    const std::size_t s = 4;
    const BitString x = BitString::from_string("0110");
    const BitString word = HadamardCode(s).encode(x);
    const BitDecoder base = [&](ProbeOracle& o, Randomness& r) { return had_decode_bit(o, s, 2, r); };
    ProbeOracle o(word, 4);
    SeededRandomness rng(1);
    EXPECT_THROW(amplified_decode(o, 2, 2, base, rng), std::invalid_argument);

    // t = 1 is the base decoder, draw for draw
    SeededRandomness r1(8);
    SeededRandomness r2(8);
    ProbeOracle a(word, 2);
    ProbeOracle b(word, 2);
    EXPECT_EQ(amplified_decode(a, 1, 2, base, r1), base(b, r2));
    EXPECT_EQ(a.trace(), b.trace());

    // t = 3 without noise is always right
    for (int k = 0; k < 50; ++k) {
        ProbeOracle c(word, 6);
        EXPECT_EQ(amplified_decode(c, 3, 2, base, rng), x[2]);
        EXPECT_EQ(c.used(), 6u);
    }
}

TEST(Amplified, MonotoneInRepetitions)
{
    const std::size_t s = 6;
    SeededRandomness rng(31);
    const BitString x = rng.bits(s);
    const BitString word = corrupt(HadamardCode(s).encode(x), random_pattern(64, 6, rng));
    // exact base error, then the exact majority law for each odd t
    const double p = exact_bit_error(word, s, 0, x[0]).value();
    ASSERT_LT(p, 0.5);
    double previous = 1.0;
    for (std::size_t t = 1; t <= 31; t += 2) {
        const double e = majority_error(p, t);
        EXPECT_LE(e, previous + 1e-15);
        previous = e;
    }
    // and the exact t = 3 decoder matches the law
    const Ratio e3 = exact_probability(
        [&](Randomness& r) {
            ProbeOracle o(word, 6);
            return amplified_decode(o, 3, 2, [&](ProbeOracle& w, Randomness& c) { return had_decode_bit(w, s, 0, c); },
                                    r) != x[0];
        },
        kExactLeafLimit);
    EXPECT_NEAR(e3.value(), majority_error(p, 3), 1e-12);
}

TEST(Amplified, FifteenRepetitionsAtFivePercent)
{
    const std::size_t s = 8;
    SeededRandomness rng(77);
    const BitString x = rng.bits(s);
    const BitString word = corrupt(HadamardCode(s).encode(x), random_pattern(256, 12, rng));
    std::size_t failures = 0;
    const std::size_t trials = 100'000;
    for (std::size_t t = 0; t < trials; ++t) {
        auto r = SeededRandomness::for_trial(5, t);
        ProbeOracle o(word, 30);
        failures += amplified_decode(o, 15, 2, [&](ProbeOracle& w, Randomness& c) { return had_decode_bit(w, s, 3, c); },
                                     r) != x[3];
    }
    EXPECT_LT(static_cast<double>(failures) / trials, 0.01);
}

TEST(Equality, UnbalancedComparison)
{
    const auto eq = EqualityStructure::hadamard(4);
    EXPECT_EQ(eq.gamma(), 0.0);
    const BitString x = BitString::from_string("1001");
    const Codeword c = eq.encode(x);
    const auto agree = [&](const BitString& y) {
        return exact_probability(
            [&](Randomness& r) {
                ProbeOracle o(c.bits(), 1);
                return eq.compare(o, y, r);
            },
            kExactLeafLimit);
    };
    EXPECT_EQ(agree(x), Ratio(1, 1));
    for (std::uint64_t v = 0; v < 16; ++v) {
        const BitString y = BitString::from_index(v, 4);
        if (y != x) {
            EXPECT_EQ(agree(y), Ratio(1, 2));
        }
    }
}

TEST(Equality, BalancedErrorBound)
{
    const auto eq = EqualityStructure::hadamard(5);
    SeededRandomness rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const BitString x = rng.bits(5);
        const std::size_t w = rng.below(5);
        const BitString word = corrupt(eq.encode(x).bits(), random_pattern(32, w, rng));
        const double delta = static_cast<double>(w) / 32.0;
        for (std::uint64_t v = 0; v < 32; ++v) {
            const BitString y = BitString::from_index(v, 5);
            const Ratio e = exact_probability(
                [&](Randomness& r) {
                    ProbeOracle o(word, 1);
                    return eq.decode(o, y, r) != (x == y);
                },
                kExactLeafLimit);
            ASSERT_LE(e.value(), 1.0 / 3.0 + 2.0 * delta / 3.0 + 1e-12);
        }
    }
}

TEST(Equality, RandomLinearCodeHasMeasuredGamma)
{
    const auto eq = EqualityStructure::random_linear(6, 256, 0.2, 9);
    EXPECT_LE(eq.gamma(), 0.2);
    EXPECT_EQ(eq.gamma(), 0.5 - static_cast<double>(eq.code().min_distance()) / 256.0);
    const BitString x = BitString::from_string("110100");
    const Codeword c = eq.encode(x);
    for (std::uint64_t v = 0; v < 64; ++v) {
        const BitString y = BitString::from_index(v, 6);
        const Ratio e = exact_probability(
            [&](Randomness& r) {
                ProbeOracle o(c.bits(), 1);
                return eq.decode(o, y, r) != (x == y);
            },
            kExactLeafLimit);
        ASSERT_LE(e.value(), 1.0 / 3.0 + 2.0 * eq.gamma() / 3.0 + 1e-12);
    }
    EXPECT_THROW(EqualityStructure::random_linear(6, 8, 0.0, 1, 3), std::runtime_error);
}
