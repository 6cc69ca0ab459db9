#include "ecds/hadamard.hpp"

#include <bit>
#include <stdexcept>

namespace ecds {

HadamardCode::HadamardCode(std::size_t message_length) : s_(message_length)
{
    if (s_ < 1 || s_ > kMaxMessageLength) {
        throw std::invalid_argument("Hadamard message length must be in [1, 30]");
    }
}

BitString HadamardCode::encode(const BitString& x) const
{
    if (x.size() != s_) {
        throw std::invalid_argument("Hadamard encode: message length mismatch");
    }
    const std::size_t n = length();
    std::vector<std::uint8_t> value(n, 0);
    BitString out(n);
    for (std::size_t y = 1; y < n; ++y) {
        // peel the lowest set bit: x.y = x.(y minus that bit) xor x_i
        const auto low = static_cast<std::size_t>(std::countr_zero(y));
        value[y] = value[y & (y - 1)] ^ static_cast<std::uint8_t>(x[s_ - 1 - low]);
        if (value[y]) {
            out.set(y, true);
        }
    }
    return out;
}

bool had_decode_bit(ProbeOracle& oracle, std::size_t message_length, std::size_t i, Randomness& rng)
{
    if (i >= message_length) {
        throw std::out_of_range("Hadamard decode: index outside the message");
    }
    const std::size_t n = std::size_t{1} << message_length;
    const auto z = static_cast<std::size_t>(rng.below(n));
    const bool a = oracle.probe(z);
    const bool b = oracle.probe(z ^ (std::size_t{1} << (message_length - 1 - i)));
    return a != b;
}

bool had_decode_ip(ProbeOracle& oracle, const BitString& y, Randomness& rng)
{
    const std::size_t n = std::size_t{1} << y.size();
    if (oracle.length() != n) {
        throw std::invalid_argument("Hadamard decode: query length does not match the codeword");
    }
    const auto z = static_cast<std::size_t>(rng.below(n));
    const bool a = oracle.probe(z);
    const bool b = oracle.probe(z ^ HadamardCode::position(y));
    return a != b;
}

bool amplified_decode(ProbeOracle& oracle, std::size_t repetitions, std::size_t probes_per_run,
                      const BitDecoder& base, Randomness& rng)
{
    if (repetitions % 2 == 0) {
        throw std::invalid_argument("amplified_decode: repetition count must be odd");
    }
    std::size_t ones = 0;
    for (std::size_t t = 0; t < repetitions; ++t) {
        ProbeOracle run(oracle, 0, oracle.length(), probes_per_run);
        if (base(run, rng)) {
            ++ones;
        }
    }
    return 2 * ones > repetitions;
}

LinearCode::LinearCode(std::size_t dimension, std::vector<BitString> rows) : k_(dimension), rows_(std::move(rows))
{
    if (rows_.size() != k_ || k_ == 0) {
        throw std::invalid_argument("LinearCode: need exactly `dimension` generator rows");
    }
    const std::size_t n = rows_.front().size();
    for (const auto& row : rows_) {
        if (row.size() != n) {
            throw std::invalid_argument("LinearCode: generator rows differ in length");
        }
    }
    columns_.assign(n, BitString(k_));
    for (std::size_t i = 0; i < k_; ++i) {
        for (auto j : rows_[i].support()) {
            columns_[j].set(i, true);
        }
    }
}

LinearCode LinearCode::hadamard(std::size_t message_length)
{
    const HadamardCode h(message_length);
    std::vector<BitString> rows;
    for (std::size_t i = 0; i < message_length; ++i) {
        rows.push_back(h.encode(BitString::unit(message_length, i)));
    }
    return LinearCode(message_length, std::move(rows));
}

LinearCode LinearCode::random(std::size_t dimension, std::size_t length, Randomness& rng)
{
    std::vector<BitString> rows;
    for (std::size_t i = 0; i < dimension; ++i) {
        rows.push_back(rng.bits(length));
    }
    return LinearCode(dimension, std::move(rows));
}

BitString LinearCode::encode(const BitString& x) const
{
    if (x.size() != k_) {
        throw std::invalid_argument("LinearCode encode: message length mismatch");
    }
    BitString out(length());
    for (auto i : x.support()) {
        out ^= rows_[i];
    }
    return out;
}

bool LinearCode::bit(const BitString& x, std::size_t position) const
{
    return dot_mod2(x, columns_.at(position));
}

std::size_t LinearCode::min_distance() const
{
    if (k_ > 24) {
        throw std::invalid_argument("min_distance: dimension too large to enumerate");
    }
    // Gray-code walk: consecutive messages differ in one generator row
    BitString word(length());
    std::size_t best = length();
    for (std::uint64_t g = 1; g < (std::uint64_t{1} << k_); ++g) {
        const auto row = static_cast<std::size_t>(std::countr_zero(g));
        word ^= rows_[row];
        best = std::min(best, word.weight());
    }
    return best;
}

EqualityStructure::EqualityStructure(LinearCode code) : code_(std::move(code)), min_distance_(code_.min_distance()) {}

EqualityStructure EqualityStructure::hadamard(std::size_t message_length)
{
    return EqualityStructure(LinearCode::hadamard(message_length));
}

EqualityStructure EqualityStructure::random_linear(std::size_t dimension, std::size_t length, double max_gamma,
                                                   std::uint64_t seed, std::size_t retries)
{
    SeededRandomness rng(seed);
    double best = 1.0;
    for (std::size_t attempt = 0; attempt < retries; ++attempt) {
        EqualityStructure candidate(LinearCode::random(dimension, length, rng));
        if (candidate.gamma() <= max_gamma) {
            return candidate;
        }
        best = std::min(best, candidate.gamma());
    }
    throw std::runtime_error("random linear code: no sample reached gamma <= " + std::to_string(max_gamma) +
                             " in " + std::to_string(retries) + " tries (best " + std::to_string(best) + ")");
}

double EqualityStructure::gamma() const noexcept
{
    return 0.5 - static_cast<double>(min_distance_) / static_cast<double>(length());
}

bool EqualityStructure::compare(ProbeOracle& oracle, const BitString& y, Randomness& rng) const
{
    const auto j = static_cast<std::size_t>(rng.below(length()));
    return oracle.probe(j) == code_.bit(y, j);
}

bool EqualityStructure::decode(ProbeOracle& oracle, const BitString& y, Randomness& rng) const
{
    const auto j = static_cast<std::size_t>(rng.below(length()));
    const bool stored = oracle.probe(j);
    if (stored != code_.bit(y, j)) {
        return false;
    }
    return rng.below(3) < 2;
}

} // namespace ecds
