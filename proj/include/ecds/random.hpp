#pragma once

#include "ecds/bits.hpp"

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ecds {

/// Source of decoder coins. Every random choice a decoder makes goes through
/// below(), which is what lets EnumeratedRandomness walk the full choice tree.
class Randomness {
public:
    virtual ~Randomness() = default;
    /// Uniform in [0, bound). bound must be >= 1.
    virtual std::uint64_t below(std::uint64_t bound) = 0;

    bool coin() { return below(2) == 1; }
    /// Uniform string of the given length, drawn in chunks of at most 32 bits.
    BitString bits(std::size_t length);
};

/// SplitMix64 stream with a portable rejection sampler. Seeding is a single
/// word, so a fresh stream per trial costs nothing.
class SeededRandomness final : public Randomness {
public:
    explicit SeededRandomness(std::uint64_t seed) : state_(seed) {}
    /// Independent stream for trial `index` of a run seeded with `seed`.
    static SeededRandomness for_trial(std::uint64_t seed, std::uint64_t index);

    std::uint64_t below(std::uint64_t bound) override;
    std::uint64_t next();

private:
    std::uint64_t state_;
};

/// SplitMix64 finalizer; used to derive stream seeds.
std::uint64_t mix64(std::uint64_t value);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Non-negative rational with 64-bit numerator and denominator, always reduced.
/// Used for exact probabilities; throws std::overflow_error instead of rounding.
class Ratio {
public:
    Ratio() = default;
    Ratio(std::uint64_t num, std::uint64_t den);

    std::uint64_t num() const noexcept { return num_; }
    std::uint64_t den() const noexcept { return den_; }
    double value() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
    std::string to_string() const;

    Ratio& operator+=(const Ratio& other);
    friend Ratio operator+(Ratio a, const Ratio& b) { return a += b; }
    friend Ratio operator*(const Ratio& a, const Ratio& b);
    friend bool operator==(const Ratio&, const Ratio&) = default;
    friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b);

private:
    std::uint64_t num_ = 0;
    std::uint64_t den_ = 1;
};

class NotEnumerable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Replays one path of the decoder's choice tree. Driven by enumerate_choices().
class EnumeratedRandomness final : public Randomness {
public:
    std::uint64_t below(std::uint64_t bound) override;

private:
    friend class ChoiceEnumerator;
    struct Choice {
        std::uint64_t value;
        std::uint64_t arity;
    };
    std::vector<Choice> path_;
    std::size_t cursor_ = 0;
    std::uint64_t max_leaves_ = 0;
};

/// Calls `body` once per leaf of the choice tree, passing the leaf's exact
/// probability. Throws NotEnumerable once more than `max_leaves` leaves (or a
/// single draw wider than that) would be needed.
void enumerate_choices(const std::function<void(Randomness&)>& body,
                       const std::function<void(const Ratio&)>& on_leaf,
                       std::uint64_t max_leaves);

/// Exact probability that `event` returns true over the body's randomness.
Ratio exact_probability(const std::function<bool(Randomness&)>& event, std::uint64_t max_leaves);

/// Default cap on enumerated randomness states.
inline constexpr std::uint64_t kExactLeafLimit = std::uint64_t{1} << 20;

} // namespace ecds
