#pragma once

#include "ecds/bits.hpp"
#include "ecds/hadamard.hpp"
#include "ecds/oracle.hpp"
#include "ecds/random.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ecds {

/// Largest structure (in bits) the inner-product layouts will materialize.
inline constexpr std::uint64_t kMaxMaterializedBits = std::uint64_t{1} << 28;

/// Noiseless p-probe inner-product table: one bit x . z for every z of weight
/// at most ceil(r/p), at index rank(z).
class IpTableLayout {
public:
    IpTableLayout(std::size_t n, std::size_t r, std::size_t p);

    std::size_t n() const noexcept { return n_; }
    std::size_t r() const noexcept { return r_; }
    std::size_t probes() const noexcept { return p_; }
    std::size_t chunk_weight() const noexcept { return space_.r(); }
    std::size_t length() const noexcept { return length_; }
    const BoundedWeightSpace& space() const noexcept { return space_; }

    Codeword encode(const BitString& x) const;
    /// Splits y greedily into p pieces and XORs one probe per piece.
    bool decode(ProbeOracle& oracle, const BitString& y) const;

private:
    std::size_t n_;
    std::size_t r_;
    std::size_t p_;
    BoundedWeightSpace space_;
    std::size_t length_;
};

/// Two-probe inner product over the full Hadamard code of x.
bool ip_hadamard_decode(ProbeOracle& oracle, const BitString& y, Randomness& rng);

/// p-probe inner-product structure from a degree-(p-1) polynomial over GF(2)
/// whose evaluation point is XOR secret-shared into p pieces.
///
/// Index i owns a (p-1)-subset S_i of [m]; these are the first n such subsets
/// in lexicographic order. A query y with one-positions i_1 < ... < i_k is the
/// point w = (S_{i_1}, ..., S_{i_k}, 0, ..., 0) in {0,1}^{rm}; the zero slots
/// play the role of a dummy variable fixed to 0.
///
/// Block j is the truth table of q^(j), whose input is the concatenation of
/// the shares w^(k), k != j, in increasing k, each laid out slot by slot.
class PolyIpLayout {
public:
    /// One monomial of q_{x,r} = p_{x,r}(w^(1) + ... + w^(p)).
    struct Monomial {
        std::size_t data_index;           // coefficient is x_{data_index}
        std::size_t block;                // least j whose share it avoids
        std::vector<std::size_t> shares;  // share of each variable, parallel to `coords`
        std::vector<std::size_t> coords;  // coordinate within the rm-bit share
    };

    PolyIpLayout(std::size_t n, std::size_t r, std::size_t p);

    std::size_t n() const noexcept { return n_; }
    std::size_t r() const noexcept { return r_; }
    std::size_t probes() const noexcept { return p_; }
    std::size_t degree() const noexcept { return p_ - 1; }
    std::size_t m() const noexcept { return m_; }
    std::size_t share_bits() const noexcept { return r_ * m_; }
    std::size_t table_inputs() const noexcept { return (p_ - 1) * r_ * m_; }
    std::size_t table_length() const noexcept { return std::size_t{1} << table_inputs(); }
    std::size_t length() const noexcept { return p_ * table_length(); }

    const std::vector<BitString>& sets() const noexcept { return sets_; }
    const std::vector<Monomial>& monomials() const noexcept { return monomials_; }

    Codeword encode(const BitString& x) const;
    bool decode(ProbeOracle& oracle, const BitString& y, Randomness& rng) const;

    /// The evaluation point for query y.
    BitString query_point(const BitString& y) const;
    /// Table address in block j of the share tuple (shares[j] is ignored).
    std::size_t address(std::size_t block, const std::vector<BitString>& shares) const;

    /// p_x(z) for z in {0,1}^m, evaluated from its defining sum.
    bool eval_px(const BitString& x, const BitString& z) const;
    /// p_{x,r}(w) for w in {0,1}^{rm}.
    bool eval_pxr(const BitString& x, const BitString& w) const;
    /// q^(j)_{x,r} evaluated from the monomial list.
    bool eval_block_polynomial(const BitString& x, std::size_t block, const std::vector<BitString>& shares) const;

private:
    std::size_t n_;
    std::size_t r_;
    std::size_t p_;
    std::size_t m_;
    std::vector<BitString> sets_;
    std::vector<Monomial> monomials_;
};

/// m = ceil(d * n^(1/d)), computed exactly as the least m with m^d >= d^d * n.
std::size_t poly_ip_set_universe(std::size_t n, std::size_t d);

/// Substring structure: x cut into r pieces of ceil(n/r) bits (zero padded),
/// each piece Hadamard-encoded.
class SubstringLayout {
public:
    SubstringLayout(std::size_t n, std::size_t r);

    std::size_t n() const noexcept { return n_; }
    std::size_t r() const noexcept { return r_; }
    std::size_t piece_bits() const noexcept { return piece_.message_length(); }
    std::size_t piece_length() const noexcept { return piece_.length(); }
    std::size_t length() const noexcept { return r_ * piece_.length(); }
    /// Probe budget for a query of weight k with t repetitions per bit.
    static std::size_t budget(std::size_t query_weight, std::size_t repetitions)
    {
        return 2 * repetitions * query_weight;
    }

    /// Piece holding bit i, and its coordinate inside that piece.
    std::size_t piece_of(std::size_t i) const { return i / piece_bits(); }
    std::size_t coordinate_of(std::size_t i) const { return i % piece_bits(); }

    Codeword encode(const BitString& x) const;
    /// Each requested bit is the majority of `repetitions` two-probe decodes
    /// inside its piece.
    BitString decode(ProbeOracle& oracle, const BitString& y, std::size_t repetitions, Randomness& rng) const;

private:
    std::size_t n_;
    std::size_t r_;
    HadamardCode piece_;
};

} // namespace ecds
