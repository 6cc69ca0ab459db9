#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <stdexcept>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ecds {

/// Parameters are individually valid but do not fit together (e.g. r > n).
class InconsistentParameters : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using BigInt = boost::multiprecision::cpp_int;

/// Fixed-length string over {0,1}.
///
/// Positions are 0-based in the API. Position 0 is the first (leftmost)
/// character of the text form and is the most significant bit whenever a
/// string is read as a binary number (lexicographic order, cube addressing).
class BitString {
public:
    BitString() = default;
    explicit BitString(std::size_t length, bool value = false);

    /// Parses ASCII '0'/'1'. Throws std::invalid_argument on anything else.
    static BitString from_string(std::string_view text);
    /// The length-`length` string whose binary value (position 0 most
    /// significant) is `value`. Requires length <= 64.
    static BitString from_index(std::uint64_t value, std::size_t length);
    static BitString unit(std::size_t length, std::size_t position);
    static BitString ones(std::size_t length) { return BitString(length, true); }

    std::size_t size() const noexcept { return length_; }
    bool empty() const noexcept { return length_ == 0; }

    bool operator[](std::size_t pos) const noexcept
    {
        return (words_[pos >> 6] >> (pos & 63)) & 1u;
    }
    bool at(std::size_t pos) const;
    void set(std::size_t pos, bool value);
    void flip(std::size_t pos);

    std::size_t weight() const noexcept;
    /// Sorted positions holding a 1.
    std::vector<std::size_t> support() const;
    /// Binary value with position 0 most significant. Requires size() <= 64.
    std::uint64_t to_index() const;

    std::string to_string() const;

    BitString& operator^=(const BitString& other);
    BitString& operator&=(const BitString& other);
    BitString& operator|=(const BitString& other);
    friend BitString operator^(BitString a, const BitString& b) { return a ^= b; }
    friend BitString operator&(BitString a, const BitString& b) { return a &= b; }
    friend BitString operator|(BitString a, const BitString& b) { return a |= b; }

    friend bool operator==(const BitString&, const BitString&) = default;
    /// Lexicographic order, shorter-is-smaller on a common prefix.
    friend std::strong_ordering operator<=>(const BitString& a, const BitString& b);

    BitString concat(const BitString& tail) const;
    BitString slice(std::size_t offset, std::size_t length) const;

    /// Packed bytes, position 0 in the most significant bit of byte 0.
    std::vector<std::uint8_t> to_bytes() const;
    static BitString from_bytes(const std::vector<std::uint8_t>& bytes, std::size_t length);

    const std::vector<std::uint64_t>& words() const noexcept { return words_; }

private:
    void check_same_length(const BitString& other) const;

    std::size_t length_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Parity of the AND of `a` and `b`.
bool dot_mod2(const BitString& a, const BitString& b);

/// The bits of `x` at the 1-positions of `mask`, in increasing position order.
BitString extract_substring(const BitString& x, const BitString& mask);

BigInt binomial(std::size_t n, std::size_t k);
/// B(n, r) = sum_{i=0..r} C(n, i).
BigInt bounded_weight_count(std::size_t n, std::size_t r);

/// The strings of length n and weight at most r, in lexicographic order.
class BoundedWeightSpace {
public:
    BoundedWeightSpace(std::size_t n, std::size_t r);

    std::size_t n() const noexcept { return n_; }
    std::size_t r() const noexcept { return r_; }
    const BigInt& size() const noexcept { return size_; }
    /// size() as a machine integer; throws std::overflow_error if it does not fit.
    std::uint64_t size_u64() const;

    std::uint64_t rank(const BitString& v) const;
    BitString unrank(std::uint64_t index) const;

private:
    std::uint64_t count(std::size_t free_positions, std::size_t weight_left) const;

    std::size_t n_;
    std::size_t r_;
    BigInt size_;
    // table_[m][w] = B(m, w) for m <= n, w <= r, saturating at UINT64_MAX
    std::vector<std::vector<std::uint64_t>> table_;
};

/// Splits `y` into `parts` strings with disjoint supports that XOR to `y`.
/// z_1 takes the first ceil(|y|/parts) one-positions, z_2 the next, and so on.
std::vector<BitString> split_query(const BitString& y, std::size_t parts);

} // namespace ecds
