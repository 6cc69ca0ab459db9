#include "ecds/bits.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <stdexcept>

namespace ecds {

namespace {

std::size_t word_count(std::size_t length) { return (length + 63) / 64; }

} // namespace

BitString::BitString(std::size_t length, bool value)
    : length_(length), words_(word_count(length), value ? ~std::uint64_t{0} : 0)
{
    if (value && length % 64 != 0) {
        words_.back() &= (std::uint64_t{1} << (length % 64)) - 1;
    }
}

BitString BitString::from_string(std::string_view text)
{
    BitString out(text.size());
    for (std::size_t k = 0; k < text.size(); ++k) {
        if (text[k] == '1') {
            out.set(k, true);
        } else if (text[k] != '0') {
            throw std::invalid_argument("bit string may only contain '0' and '1'");
        }
    }
    return out;
}

BitString BitString::from_index(std::uint64_t value, std::size_t length)
{
    if (length > 64) {
        throw std::invalid_argument("from_index supports at most 64 bits");
    }
    if (length < 64 && (value >> length) != 0) {
        throw std::out_of_range("index does not fit in the requested length");
    }
    BitString out(length);
    for (std::size_t k = 0; k < length; ++k) {
        if ((value >> (length - 1 - k)) & 1u) {
            out.set(k, true);
        }
    }
    return out;
}

BitString BitString::unit(std::size_t length, std::size_t position)
{
    BitString out(length);
    out.set(position, true);
    return out;
}

bool BitString::at(std::size_t pos) const
{
    if (pos >= length_) {
        throw std::out_of_range("bit position out of range");
    }
    return (*this)[pos];
}

void BitString::set(std::size_t pos, bool value)
{
    if (pos >= length_) {
        throw std::out_of_range("bit position out of range");
    }
    const std::uint64_t mask = std::uint64_t{1} << (pos & 63);
    if (value) {
        words_[pos >> 6] |= mask;
    } else {
        words_[pos >> 6] &= ~mask;
    }
}

void BitString::flip(std::size_t pos)
{
    if (pos >= length_) {
        throw std::out_of_range("bit position out of range");
    }
    words_[pos >> 6] ^= std::uint64_t{1} << (pos & 63);
}

std::size_t BitString::weight() const noexcept
{
    std::size_t total = 0;
    for (auto w : words_) {
        total += static_cast<std::size_t>(std::popcount(w));
    }
    return total;
}

std::vector<std::size_t> BitString::support() const
{
    std::vector<std::size_t> out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
        std::uint64_t word = words_[w];
        while (word != 0) {
            out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(word)));
            word &= word - 1;
        }
    }
    return out;
}

std::uint64_t BitString::to_index() const
{
    if (length_ > 64) {
        throw std::invalid_argument("to_index supports at most 64 bits");
    }
    std::uint64_t value = 0;
    for (std::size_t k = 0; k < length_; ++k) {
        value = (value << 1) | static_cast<std::uint64_t>((*this)[k]);
    }
    return value;
}

std::string BitString::to_string() const
{
    std::string out(length_, '0');
    for (std::size_t k = 0; k < length_; ++k) {
        if ((*this)[k]) {
            out[k] = '1';
        }
    }
    return out;
}

void BitString::check_same_length(const BitString& other) const
{
    if (length_ != other.length_) {
        throw std::invalid_argument("bit strings have different lengths");
    }
}

BitString& BitString::operator^=(const BitString& other)
{
    check_same_length(other);
    for (std::size_t w = 0; w < words_.size(); ++w) {
        words_[w] ^= other.words_[w];
    }
    return *this;
}

BitString& BitString::operator&=(const BitString& other)
{
    check_same_length(other);
    for (std::size_t w = 0; w < words_.size(); ++w) {
        words_[w] &= other.words_[w];
    }
    return *this;
}

BitString& BitString::operator|=(const BitString& other)
{
    check_same_length(other);
    for (std::size_t w = 0; w < words_.size(); ++w) {
        words_[w] |= other.words_[w];
    }
    return *this;
}

std::strong_ordering operator<=>(const BitString& a, const BitString& b)
{
    const std::size_t common = std::min(a.size(), b.size());
    for (std::size_t k = 0; k < common; ++k) {
        if (a[k] != b[k]) {
            return a[k] ? std::strong_ordering::greater : std::strong_ordering::less;
        }
    }
    return a.size() <=> b.size();
}

BitString BitString::concat(const BitString& tail) const
{
    BitString out(length_ + tail.length_);
    out.words_.assign(out.words_.size(), 0);
    std::copy(words_.begin(), words_.end(), out.words_.begin());
    for (auto pos : tail.support()) {
        out.set(length_ + pos, true);
    }
    return out;
}

BitString BitString::slice(std::size_t offset, std::size_t length) const
{
    if (offset + length > length_) {
        throw std::out_of_range("slice out of range");
    }
    BitString out(length);
    for (std::size_t k = 0; k < length; ++k) {
        if ((*this)[offset + k]) {
            out.set(k, true);
        }
    }
    return out;
}

std::vector<std::uint8_t> BitString::to_bytes() const
{
    std::vector<std::uint8_t> out((length_ + 7) / 8, 0);
    for (std::size_t k = 0; k < length_; ++k) {
        if ((*this)[k]) {
            out[k / 8] |= static_cast<std::uint8_t>(0x80u >> (k % 8));
        }
    }
    return out;
}

BitString BitString::from_bytes(const std::vector<std::uint8_t>& bytes, std::size_t length)
{
    if (bytes.size() * 8 < length) {
        throw std::invalid_argument("payload shorter than declared length");
    }
    BitString out(length);
    for (std::size_t k = 0; k < length; ++k) {
        if (bytes[k / 8] & (0x80u >> (k % 8))) {
            out.set(k, true);
        }
    }
    return out;
}

bool dot_mod2(const BitString& a, const BitString& b)
{
    if (a.size() != b.size()) {
        throw std::invalid_argument("dot_mod2: length mismatch");
    }
    std::uint64_t acc = 0;
    for (std::size_t w = 0; w < a.words().size(); ++w) {
        acc ^= a.words()[w] & b.words()[w];
    }
    return std::popcount(acc) & 1;
}

BitString extract_substring(const BitString& x, const BitString& mask)
{
    if (x.size() != mask.size()) {
        throw std::invalid_argument("extract_substring: length mismatch");
    }
    const auto positions = mask.support();
    BitString out(positions.size());
    for (std::size_t k = 0; k < positions.size(); ++k) {
        out.set(k, x[positions[k]]);
    }
    return out;
}

BigInt binomial(std::size_t n, std::size_t k)
{
    if (k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    BigInt value = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        value *= n - k + i;
        value /= i;
    }
    return value;
}

BigInt bounded_weight_count(std::size_t n, std::size_t r)
{
    BigInt total = 0;
    for (std::size_t i = 0; i <= std::min(n, r); ++i) {
        total += binomial(n, i);
    }
    return total;
}

BoundedWeightSpace::BoundedWeightSpace(std::size_t n, std::size_t r)
    : n_(n), r_(r), size_(bounded_weight_count(n, r))
{
    constexpr auto cap = std::numeric_limits<std::uint64_t>::max();
    table_.assign(n + 1, std::vector<std::uint64_t>(r + 1, 0));
    for (std::size_t m = 0; m <= n; ++m) {
        for (std::size_t w = 0; w <= r; ++w) {
            if (m == 0 || w == 0) {
                table_[m][w] = 1;
                continue;
            }
            // B(m, w) = B(m-1, w) + B(m-1, w-1)
            const std::uint64_t a = table_[m - 1][w];
            const std::uint64_t b = table_[m - 1][w - 1];
            table_[m][w] = (a > cap - b) ? cap : a + b;
        }
    }
}

std::uint64_t BoundedWeightSpace::size_u64() const
{
    if (size_ > std::numeric_limits<std::uint64_t>::max()) {
        throw std::overflow_error("B(n, r) does not fit in 64 bits");
    }
    return size_.convert_to<std::uint64_t>();
}

std::uint64_t BoundedWeightSpace::count(std::size_t free_positions, std::size_t weight_left) const
{
    return table_[free_positions][std::min(weight_left, r_)];
}

std::uint64_t BoundedWeightSpace::rank(const BitString& v) const
{
    if (v.size() != n_) {
        throw std::invalid_argument("rank: length mismatch");
    }
    if (v.weight() > r_) {
        throw std::invalid_argument("rank: weight exceeds the space bound");
    }
    (void)size_u64();
    std::uint64_t index = 0;
    std::size_t used = 0;
    for (std::size_t k = 0; k < n_; ++k) {
        if (v[k]) {
            // every string sharing the prefix with a 0 here comes first
            index += count(n_ - k - 1, r_ - used);
            ++used;
        }
    }
    return index;
}

BitString BoundedWeightSpace::unrank(std::uint64_t index) const
{
    if (index >= size_u64()) {
        throw std::out_of_range("unrank: index out of range");
    }
    BitString out(n_);
    std::size_t used = 0;
    for (std::size_t k = 0; k < n_; ++k) {
        const std::uint64_t zero_branch = count(n_ - k - 1, r_ - used);
        if (index >= zero_branch) {
            index -= zero_branch;
            out.set(k, true);
            ++used;
        }
    }
    return out;
}

std::vector<BitString> split_query(const BitString& y, std::size_t parts)
{
    if (parts < 1) {
        throw std::invalid_argument("split_query: need at least one part");
    }
    const auto ones = y.support();
    const std::size_t chunk = (ones.size() + parts - 1) / parts;
    std::vector<BitString> out(parts, BitString(y.size()));
    for (std::size_t k = 0; k < ones.size(); ++k) {
        out[k / chunk].set(ones[k], true);
    }
    return out;
}

} // namespace ecds
