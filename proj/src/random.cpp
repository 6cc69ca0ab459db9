#include "ecds/random.hpp"

#include <limits>
#include <numeric>

namespace ecds {

BitString Randomness::bits(std::size_t length)
{
    BitString out(length);
    std::size_t filled = 0;
    while (filled < length) {
        const std::size_t chunk = std::min<std::size_t>(32, length - filled);
        const std::uint64_t value = below(std::uint64_t{1} << chunk);
        for (std::size_t k = 0; k < chunk; ++k) {
            if ((value >> (chunk - 1 - k)) & 1u) {
                out.set(filled + k, true);
            }
        }
        filled += chunk;
    }
    return out;
}

std::uint64_t mix64(std::uint64_t value)
{
    value += 0x9e3779b97f4a7c15ULL;
    value = (value ^ (value >> 30)) * 0xbf58476d1ce4e5b9ULL;
    value = (value ^ (value >> 27)) * 0x94d049bb133111ebULL;
    return value ^ (value >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
{
    return mix64(mix64(mix64(seed) ^ a) ^ (b * 0xd1342543de82ef95ULL));
}

SeededRandomness SeededRandomness::for_trial(std::uint64_t seed, std::uint64_t index)
{
    return SeededRandomness(derive_seed(seed, index, 0x7472));
}

std::uint64_t SeededRandomness::next()
{
    const std::uint64_t out = mix64(state_);
    state_ += 0x9e3779b97f4a7c15ULL;
    return out;
}

std::uint64_t SeededRandomness::below(std::uint64_t bound)
{
    if (bound == 0) {
        throw std::invalid_argument("below: bound must be positive");
    }
    if ((bound & (bound - 1)) == 0) {
        return next() & (bound - 1);
    }
    // 2^64 mod bound; values below it would bias the low residues
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t v = next();
        if (v >= threshold) {
            return v % bound;
        }
    }
}

Ratio::Ratio(std::uint64_t num, std::uint64_t den) : num_(num), den_(den)
{
    if (den == 0) {
        throw std::invalid_argument("Ratio: zero denominator");
    }
    const std::uint64_t g = std::gcd(num_, den_);
    if (g > 1) {
        num_ /= g;
        den_ /= g;
    }
}

std::string Ratio::to_string() const
{
    return std::to_string(num_) + "/" + std::to_string(den_);
}

namespace {

std::uint64_t narrow(unsigned __int128 v)
{
    if (v > std::numeric_limits<std::uint64_t>::max()) {
        throw std::overflow_error("Ratio arithmetic overflow");
    }
    return static_cast<std::uint64_t>(v);
}

} // namespace

Ratio& Ratio::operator+=(const Ratio& other)
{
    const std::uint64_t g = std::gcd(den_, other.den_);
    const unsigned __int128 lcm = static_cast<unsigned __int128>(den_ / g) * other.den_;
    const unsigned __int128 num = static_cast<unsigned __int128>(num_) * (other.den_ / g) +
                                  static_cast<unsigned __int128>(other.num_) * (den_ / g);
    // reduce in 128 bits before narrowing
    unsigned __int128 a = num;
    unsigned __int128 b = lcm;
    while (b != 0) {
        const unsigned __int128 t = a % b;
        a = b;
        b = t;
    }
    const unsigned __int128 common = a == 0 ? 1 : a;
    num_ = narrow(num / common);
    den_ = narrow(lcm / common);
    return *this;
}

Ratio operator*(const Ratio& a, const Ratio& b)
{
    const std::uint64_t g1 = std::gcd(a.num_, b.den_);
    const std::uint64_t g2 = std::gcd(b.num_, a.den_);
    const auto num = static_cast<unsigned __int128>(a.num_ / (g1 ? g1 : 1)) * (b.num_ / (g2 ? g2 : 1));
    const auto den = static_cast<unsigned __int128>(a.den_ / (g2 ? g2 : 1)) * (b.den_ / (g1 ? g1 : 1));
    return Ratio(narrow(num), narrow(den));
}

std::strong_ordering operator<=>(const Ratio& a, const Ratio& b)
{
    const auto lhs = static_cast<unsigned __int128>(a.num_) * b.den_;
    const auto rhs = static_cast<unsigned __int128>(b.num_) * a.den_;
    return lhs <=> rhs;
}

std::uint64_t EnumeratedRandomness::below(std::uint64_t bound)
{
    if (bound == 0) {
        throw std::invalid_argument("below: bound must be positive");
    }
    if (bound > max_leaves_) {
        throw NotEnumerable("a single random draw has " + std::to_string(bound) +
                            " outcomes, above the enumeration limit");
    }
    if (cursor_ < path_.size()) {
        if (path_[cursor_].arity != bound) {
            throw std::logic_error("decoder randomness is not a deterministic function of prior draws");
        }
        return path_[cursor_++].value;
    }
    path_.push_back({0, bound});
    ++cursor_;
    return 0;
}

class ChoiceEnumerator {
public:
    static void run(const std::function<void(Randomness&)>& body,
                    const std::function<void(const Ratio&)>& on_leaf,
                    std::uint64_t max_leaves)
    {
        EnumeratedRandomness source;
        source.max_leaves_ = max_leaves;
        std::uint64_t leaves = 0;
        for (;;) {
            source.cursor_ = 0;
            body(source);
            source.path_.resize(source.cursor_);
            if (++leaves > max_leaves) {
                throw NotEnumerable("decoder randomness exceeds " + std::to_string(max_leaves) +
                                    " enumerated states");
            }
            unsigned __int128 den = 1;
            for (const auto& choice : source.path_) {
                den *= choice.arity;
                if (den > std::numeric_limits<std::uint64_t>::max()) {
                    throw NotEnumerable("leaf probability below 2^-64");
                }
            }
            on_leaf(Ratio(1, static_cast<std::uint64_t>(den)));

            while (!source.path_.empty() &&
                   source.path_.back().value + 1 == source.path_.back().arity) {
                source.path_.pop_back();
            }
            if (source.path_.empty()) {
                return;
            }
            ++source.path_.back().value;
        }
    }
};

void enumerate_choices(const std::function<void(Randomness&)>& body,
                       const std::function<void(const Ratio&)>& on_leaf,
                       std::uint64_t max_leaves)
{
    ChoiceEnumerator::run(body, on_leaf, max_leaves);
}

Ratio exact_probability(const std::function<bool(Randomness&)>& event, std::uint64_t max_leaves)
{
    Ratio total(0, 1);
    bool hit = false;
    enumerate_choices([&](Randomness& rng) { hit = event(rng); },
                      [&](const Ratio& p) {
                          if (hit) {
                              total += p;
                          }
                      },
                      max_leaves);
    return total;
}

} // namespace ecds
