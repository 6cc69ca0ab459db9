#include "ecds/inner_product.hpp"

#include <algorithm>
#include <stdexcept>

namespace ecds {

IpTableLayout::IpTableLayout(std::size_t n, std::size_t r, std::size_t p)
    : n_(n), r_(r), p_(p), space_(n, p == 0 ? 0 : std::min(n, (r + p - 1) / p)), length_(0)
{
    if (n == 0) {
        throw std::invalid_argument("inner-product table: need n >= 1");
    }
    if (r > n) {
        throw InconsistentParameters("inner-product table: need r <= n");
    }
    if (p < 1) {
        throw std::invalid_argument("inner-product table: need at least one probe");
    }
    if (space_.size() > kMaxMaterializedBits) {
        throw std::length_error("inner-product table: B(n, ceil(r/p)) = " + space_.size().str() +
                                " bits exceeds the materialization limit");
    }
    length_ = static_cast<std::size_t>(space_.size_u64());
}

Codeword IpTableLayout::encode(const BitString& x) const
{
    if (x.size() != n_) {
        throw std::invalid_argument("inner-product table: data length differs from n");
    }
    BitString table(length_);
    for (std::uint64_t k = 0; k < length_; ++k) {
        if (dot_mod2(x, space_.unrank(k))) {
            table.set(static_cast<std::size_t>(k), true);
        }
    }
    return Codeword(std::move(table));
}

bool IpTableLayout::decode(ProbeOracle& oracle, const BitString& y) const
{
    if (y.size() != n_ || y.weight() > r_) {
        throw std::invalid_argument("inner-product table: query must have length n and weight <= r");
    }
    bool acc = false;
    for (const auto& part : split_query(y, p_)) {
        acc ^= oracle.probe(static_cast<std::size_t>(space_.rank(part)));
    }
    return acc;
}

bool ip_hadamard_decode(ProbeOracle& oracle, const BitString& y, Randomness& rng)
{
    return had_decode_ip(oracle, y, rng);
}

std::size_t poly_ip_set_universe(std::size_t n, std::size_t d)
{
    if (d == 0) {
        throw std::invalid_argument("polynomial degree must be positive");
    }
    BigInt target = n;
    for (std::size_t k = 0; k < d; ++k) {
        target *= d;
    }
    std::size_t m = 1;
    for (;;) {
        BigInt power = 1;
        for (std::size_t k = 0; k < d; ++k) {
            power *= m;
        }
        if (power >= target) {
            return m;
        }
        ++m;
    }
}

namespace {

/// All k-subsets of {0..m-1} as sorted tuples, lexicographic, stopping after `limit`.
std::vector<std::vector<std::size_t>> first_subsets(std::size_t m, std::size_t k, std::size_t limit)
{
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> current(k);
    for (std::size_t i = 0; i < k; ++i) {
        current[i] = i;
    }
    while (out.size() < limit) {
        out.push_back(current);
        std::size_t pos = k;
        while (pos > 0 && current[pos - 1] == m - k + pos - 1) {
            --pos;
        }
        if (pos == 0) {
            break;
        }
        ++current[pos - 1];
        for (std::size_t i = pos; i < k; ++i) {
            current[i] = current[i - 1] + 1;
        }
    }
    return out;
}

} // namespace

PolyIpLayout::PolyIpLayout(std::size_t n, std::size_t r, std::size_t p) : n_(n), r_(r), p_(p), m_(0)
{
    if (p < 2) {
        throw std::invalid_argument("polynomial scheme needs p >= 2");
    }
    if (n == 0 || r == 0) {
        throw std::invalid_argument("polynomial scheme needs n, r >= 1");
    }
    if (r > n) {
        throw InconsistentParameters("polynomial scheme needs r <= n");
    }
    const std::size_t d = p - 1;
    m_ = poly_ip_set_universe(n, d);
    if (binomial(m_, d) < n) {
        throw std::invalid_argument("polynomial scheme: C(m, d) < n, no set system");
    }
    if (table_inputs() > 26 || length() > kMaxMaterializedBits) {
        throw std::length_error("polynomial scheme: tables of 2^" + std::to_string(table_inputs()) +
                                " bits exceed the materialization limit");
    }
    for (const auto& subset : first_subsets(m_, d, n)) {
        BitString s(m_);
        for (auto l : subset) {
            s.set(l, true);
        }
        sets_.push_back(std::move(s));
    }

    // Expand prod_{l in S_i} (w^(1)_{t,l} + ... + w^(p)_{t,l}): one monomial per
    // map from S_i to shares. Distinct (t, i, map) give distinct monomials.
    for (std::size_t t = 0; t < r_; ++t) {
        for (std::size_t i = 0; i < n_; ++i) {
            const auto elements = sets_[i].support();
            std::vector<std::size_t> choice(d, 0);
            for (;;) {
                Monomial mono{i, 0, {}, {}};
                std::vector<char> used(p_, 0);
                for (std::size_t q = 0; q < d; ++q) {
                    mono.shares.push_back(choice[q]);
                    mono.coords.push_back(t * m_ + elements[q]);
                    used[choice[q]] = 1;
                }
                while (used[mono.block]) {
                    ++mono.block;
                }
                monomials_.push_back(std::move(mono));

                std::size_t q = 0;
                while (q < d && ++choice[q] == p_) {
                    choice[q++] = 0;
                }
                if (q == d) {
                    break;
                }
            }
        }
    }
}

std::size_t PolyIpLayout::address(std::size_t block, const std::vector<BitString>& shares) const
{
    const std::size_t inputs = table_inputs();
    const std::size_t bits = share_bits();
    std::size_t value = 0;
    std::size_t slot = 0;
    for (std::size_t k = 0; k < p_; ++k) {
        if (k == block) {
            continue;
        }
        for (auto c : shares.at(k).support()) {
            value |= std::size_t{1} << (inputs - 1 - (slot * bits + c));
        }
        ++slot;
    }
    return value;
}

Codeword PolyIpLayout::encode(const BitString& x) const
{
    if (x.size() != n_) {
        throw std::invalid_argument("polynomial scheme: data length differs from n");
    }
    const std::size_t len = table_length();
    const std::size_t inputs = table_inputs();
    const std::size_t bits = share_bits();
    BitString out(length());
    std::vector<std::uint8_t> table(len);
    for (std::size_t j = 0; j < p_; ++j) {
        std::fill(table.begin(), table.end(), 0);
        for (const auto& mono : monomials_) {
            if (mono.block != j || !x[mono.data_index]) {
                continue;
            }
            std::size_t mask = 0;
            for (std::size_t q = 0; q < mono.coords.size(); ++q) {
                const std::size_t slot = mono.shares[q] < j ? mono.shares[q] : mono.shares[q] - 1;
                mask |= std::size_t{1} << (inputs - 1 - (slot * bits + mono.coords[q]));
            }
            table[mask] ^= 1;
        }
        // algebraic normal form -> truth table: value(u) = xor of coef(v), v subset of u
        for (std::size_t bit = 1; bit < len; bit <<= 1) {
            for (std::size_t u = 0; u < len; ++u) {
                if (u & bit) {
                    table[u] ^= table[u ^ bit];
                }
            }
        }
        for (std::size_t u = 0; u < len; ++u) {
            if (table[u]) {
                out.set(j * len + u, true);
            }
        }
    }
    return Codeword(std::move(out));
}

BitString PolyIpLayout::query_point(const BitString& y) const
{
    if (y.size() != n_ || y.weight() > r_) {
        throw std::invalid_argument("polynomial scheme: query must have length n and weight <= r");
    }
    BitString w(share_bits());
    std::size_t slot = 0;
    for (auto i : y.support()) {
        for (auto l : sets_[i].support()) {
            w.set(slot * m_ + l, true);
        }
        ++slot;
    }
    return w;
}

bool PolyIpLayout::decode(ProbeOracle& oracle, const BitString& y, Randomness& rng) const
{
    const BitString w = query_point(y);
    std::vector<BitString> shares;
    BitString last = w;
    for (std::size_t k = 0; k + 1 < p_; ++k) {
        shares.push_back(rng.bits(share_bits()));
        last ^= shares.back();
    }
    shares.push_back(std::move(last));
    bool acc = false;
    for (std::size_t j = 0; j < p_; ++j) {
        acc ^= oracle.probe(j * table_length() + address(j, shares));
    }
    return acc;
}

bool PolyIpLayout::eval_px(const BitString& x, const BitString& z) const
{
    bool acc = false;
    for (std::size_t i = 0; i < n_; ++i) {
        if (x[i] && (sets_[i] & z) == sets_[i]) {
            acc = !acc;
        }
    }
    return acc;
}

bool PolyIpLayout::eval_pxr(const BitString& x, const BitString& w) const
{
    bool acc = false;
    for (std::size_t t = 0; t < r_; ++t) {
        acc ^= eval_px(x, w.slice(t * m_, m_));
    }
    return acc;
}

bool PolyIpLayout::eval_block_polynomial(const BitString& x, std::size_t block,
                                         const std::vector<BitString>& shares) const
{
    bool acc = false;
    for (const auto& mono : monomials_) {
        if (mono.block != block || !x[mono.data_index]) {
            continue;
        }
        bool term = true;
        for (std::size_t q = 0; q < mono.coords.size() && term; ++q) {
            term = shares.at(mono.shares[q])[mono.coords[q]];
        }
        acc ^= term;
    }
    return acc;
}

SubstringLayout::SubstringLayout(std::size_t n, std::size_t r)
    : n_(n), r_(r), piece_(r == 0 || n == 0 ? 1 : (n + r - 1) / r)
{
    if (n == 0 || r == 0) {
        throw std::invalid_argument("substring structure needs n, r >= 1");
    }
    if (r > n) {
        throw InconsistentParameters("substring structure needs r <= n");
    }
    if (length() > kMaxMaterializedBits) {
        throw std::length_error("substring structure exceeds the materialization limit");
    }
}

Codeword SubstringLayout::encode(const BitString& x) const
{
    if (x.size() != n_) {
        throw std::invalid_argument("substring structure: data length differs from n");
    }
    const std::size_t piece_bits_ = piece_bits();
    BitString out(length());
    for (std::size_t k = 0; k < r_; ++k) {
        BitString piece(piece_bits_);
        for (std::size_t c = 0; c < piece_bits_; ++c) {
            const std::size_t i = k * piece_bits_ + c;
            if (i < n_ && x[i]) {
                piece.set(c, true);
            }
        }
        for (auto pos : piece_.encode(piece).support()) {
            out.set(k * piece_length() + pos, true);
        }
    }
    return Codeword(std::move(out));
}

BitString SubstringLayout::decode(ProbeOracle& oracle, const BitString& y, std::size_t repetitions,
                                  Randomness& rng) const
{
    if (y.size() != n_ || y.weight() > r_) {
        throw std::invalid_argument("substring structure: query must have length n and weight <= r");
    }
    const auto wanted = y.support();
    BitString out(wanted.size());
    for (std::size_t q = 0; q < wanted.size(); ++q) {
        const std::size_t i = wanted[q];
        const std::size_t coord = coordinate_of(i);
        ProbeOracle piece(oracle, piece_of(i) * piece_length(), piece_length(), 2 * repetitions);
        const bool bit = amplified_decode(
            piece, repetitions, 2,
            [&](ProbeOracle& o, Randomness& coins) { return had_decode_bit(o, piece_bits(), coord, coins); }, rng);
        out.set(q, bit);
    }
    return out;
}

} // namespace ecds
