#pragma once

#include "ecds/bits.hpp"
#include "ecds/oracle.hpp"
#include "ecds/random.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace ecds {

/// Hadamard code of s-bit messages: position y (as a binary number, position
/// 0 most significant) holds x . y mod 2.
class HadamardCode {
public:
    static constexpr std::size_t kMaxMessageLength = 30;

    explicit HadamardCode(std::size_t message_length);

    std::size_t message_length() const noexcept { return s_; }
    std::size_t length() const noexcept { return std::size_t{1} << s_; }

    BitString encode(const BitString& x) const;
    /// Codeword position of y.
    static std::size_t position(const BitString& y) { return static_cast<std::size_t>(y.to_index()); }
    /// Bit mask that flips coordinate i of a position.
    std::size_t coordinate_mask(std::size_t i) const { return std::size_t{1} << (s_ - 1 - i); }

private:
    std::size_t s_;
};

/// Two probes: z and z xor e_i for uniform z.
bool had_decode_bit(ProbeOracle& oracle, std::size_t message_length, std::size_t i, Randomness& rng);

/// Two probes: z and z xor y for uniform z. Recovers x . y.
bool had_decode_ip(ProbeOracle& oracle, const BitString& y, Randomness& rng);

using BitDecoder = std::function<bool(ProbeOracle&, Randomness&)>;

/// Majority of `repetitions` independent runs of `base`, each through its own
/// window oracle with budget `probes_per_run`. repetitions must be odd.
bool amplified_decode(ProbeOracle& oracle, std::size_t repetitions, std::size_t probes_per_run,
                      const BitDecoder& base, Randomness& rng);

/// Binary linear code given by its k x N generator matrix.
class LinearCode {
public:
    LinearCode(std::size_t dimension, std::vector<BitString> rows);

    /// Hadamard code viewed as a linear code.
    static LinearCode hadamard(std::size_t message_length);
    /// Uniform random generator matrix.
    static LinearCode random(std::size_t dimension, std::size_t length, Randomness& rng);

    std::size_t dimension() const noexcept { return k_; }
    std::size_t length() const noexcept { return rows_.empty() ? 0 : rows_.front().size(); }

    BitString encode(const BitString& x) const;
    bool bit(const BitString& x, std::size_t position) const;
    /// Exact minimum distance by enumerating all nonzero messages (dimension <= 24).
    std::size_t min_distance() const;

private:
    std::size_t k_;
    std::vector<BitString> rows_;
    std::vector<BitString> columns_;
};

/// One-probe Equality structure over a code whose distinct codewords are
/// at distance >= (1/2 - gamma) N.
///
/// Decoder: probe a uniform position j, compare with the query's codeword;
/// on agreement answer 1 with probability 2/3, on disagreement answer 0.
/// Two-sided error is at most 1/3 + 2 delta / 3 + 2 gamma / 3.
class EqualityStructure {
public:
    /// Hadamard code on s bits (gamma = 0).
    static EqualityStructure hadamard(std::size_t message_length);
    /// Samples random linear codes until the measured gamma is <= max_gamma.
    /// Throws std::runtime_error after `retries` failed samples.
    static EqualityStructure random_linear(std::size_t dimension, std::size_t length, double max_gamma,
                                           std::uint64_t seed, std::size_t retries = 64);

    const LinearCode& code() const noexcept { return code_; }
    std::size_t message_length() const noexcept { return code_.dimension(); }
    std::size_t length() const noexcept { return code_.length(); }
    std::size_t min_distance() const noexcept { return min_distance_; }
    /// 1/2 - min_distance / N.
    double gamma() const noexcept;

    Codeword encode(const BitString& x) const { return Codeword(code_.encode(x)); }
    bool decode(ProbeOracle& oracle, const BitString& y, Randomness& rng) const;
    /// Unbalanced comparison: one uniform probe, 1 iff it matches y's codeword.
    bool compare(ProbeOracle& oracle, const BitString& y, Randomness& rng) const;

private:
    explicit EqualityStructure(LinearCode code);

    LinearCode code_;
    std::size_t min_distance_;
};

} // namespace ecds
