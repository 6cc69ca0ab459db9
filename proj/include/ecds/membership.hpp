#pragma once

#include "ecds/bits.hpp"
#include "ecds/hadamard.hpp"
#include "ecds/oracle.hpp"
#include "ecds/random.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ecds {

/// A randomized construction that did not verify within its retry cap.
class ConstructionFailure : public std::runtime_error {
public:
    ConstructionFailure(const std::string& message, nlohmann::json report)
        : std::runtime_error(message), report_(std::move(report))
    {
    }
    const nlohmann::json& report() const noexcept { return report_; }

private:
    nlohmann::json report_;
};

/// Length and probe-set size of the one-probe membership structure at the
/// standard constants: n' = ceil(100/eps^2 * s * log2 n), d = ceil(log2(n)/eps).
struct BmrvShape {
    std::size_t n_prime = 0;
    std::size_t d = 0;
};
BmrvShape standard_bmrv_shape(std::size_t n, std::size_t s, double eps);

/// One-probe s-out-of-n membership structure: each index i owns a probe set
/// P_i of d positions in [n']. A set S is stored as the characteristic vector
/// of the union of P_i over i in S.
class BmrvStructure {
public:
    /// Throws std::invalid_argument unless every set has exactly d distinct
    /// positions below n_prime.
    BmrvStructure(std::size_t n, std::size_t s, double eps, std::size_t n_prime,
                  std::vector<std::vector<std::uint32_t>> probe_sets, std::uint64_t seed = 0);

    /// Samples each P_i uniformly among d-subsets of [n'].
    static BmrvStructure sample(std::size_t n, std::size_t s, double eps, BmrvShape shape, Randomness& rng,
                                std::uint64_t seed = 0);

    std::size_t n() const noexcept { return n_; }
    std::size_t s() const noexcept { return s_; }
    double eps() const noexcept { return eps_; }
    std::size_t n_prime() const noexcept { return n_prime_; }
    std::size_t d() const noexcept { return d_; }
    std::uint64_t seed() const noexcept { return seed_; }
    const std::vector<std::uint32_t>& probe_set(std::size_t i) const { return sets_.at(i); }
    const std::vector<std::vector<std::uint32_t>>& probe_sets() const noexcept { return sets_; }

    /// Largest number of positions of P_i that may disagree with x_i.
    std::size_t tolerated_misses() const noexcept;

private:
    std::size_t n_;
    std::size_t s_;
    double eps_;
    std::size_t n_prime_;
    std::size_t d_;
    std::vector<std::vector<std::uint32_t>> sets_;
    std::uint64_t seed_;
};

/// Outcome of checking Pr_{j in P_i}[y_j = x_i] >= 1 - eps for stored sets.
struct BmrvVerification {
    bool passed = false;
    bool exhaustive = false;
    std::uint64_t sets_checked = 0;
    std::string sets_total;  // B(n, s), exact decimal
    /// Per index: worst agreement over the checked sets, as a fraction of d.
    std::vector<Ratio> min_agreement;
    std::size_t worst_index = 0;
    /// A set realizing the worst agreement of worst_index (0-based indices).
    std::vector<std::size_t> worst_set;
};

/// Exhaustive when B(n, s) <= sample_limit, otherwise `sample_limit` uniform
/// sets of size s drawn from `seed`.
BmrvVerification verify_bmrv(const BmrvStructure& st, std::uint64_t seed,
                             std::uint64_t sample_limit = 1'000'000);

struct BmrvBuild {
    BmrvStructure structure;
    BmrvVerification verification;
    std::size_t attempts = 0;
};

/// Las Vegas construction: sample, verify, resample up to `retries` times.
/// Throws ConstructionFailure when no sample verifies.
BmrvBuild bmrv_build(std::size_t n, std::size_t s, double eps, std::uint64_t seed,
                     std::optional<BmrvShape> shape = std::nullopt, std::size_t retries = 64);

class BmrvViolation : public std::runtime_error {
public:
    BmrvViolation(std::size_t index, const Ratio& agreement);
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

struct BmrvEncoding {
    BitString y;
    /// agreement[i] = Pr_{j in P_i}[y_j = x_i]
    std::vector<Ratio> agreement;
};

/// Union rule. Throws BmrvViolation naming the first index below 1 - eps.
BmrvEncoding bmrv_encode(const BmrvStructure& st, const BitString& x);

/// One probe at a uniform element of P_i.
bool bmrv_decode(ProbeOracle& oracle, const BmrvStructure& st, std::size_t i, Randomness& rng);

/// Counts, for every index, the blocks holding exactly one element of P_i
/// when position j of the BMRV string moves to position_of[j] and the
/// permuted string is cut into consecutive blocks of `block_size`.
std::vector<std::size_t> good_block_counts(const BmrvStructure& st, const std::vector<std::uint32_t>& position_of,
                                           std::size_t block_size);

/// Block geometry and search limits for the composed structure.
struct ComposedParams {
    std::size_t n = 0;
    std::size_t s = 0;
    /// Inner Hadamard message length a; 0 selects 8 * s.
    std::size_t block_size = 0;
    /// Number of blocks b, also |P_i|; 0 selects ceil(10 * log2(universe_scale * n)).
    std::size_t blocks = 0;
    /// Agreement target 1 - bmrv_eps for the internal one-probe structure.
    double bmrv_eps = 0.35;
    std::size_t universe_scale = 20;
    std::uint64_t seed = 1;
    std::size_t graph_retries = 64;
    std::size_t pi_trials = 256;

    ComposedParams resolved() const;
};

/// Membership structure built from a one-probe structure on universe_scale * n
/// indices, a fixed permutation of its n' positions, and one Hadamard code per
/// block. Public index i is served by the i-th good internal index.
class ComposedMembership {
public:
    struct Placement {
        std::size_t block;
        std::size_t offset;
    };

    ComposedMembership(BmrvStructure bmrv, std::vector<std::uint32_t> position_of, std::size_t block_size,
                       std::size_t n, std::vector<std::size_t> served_indices);

    std::size_t n() const noexcept { return n_; }
    std::size_t s() const noexcept { return bmrv_.s(); }
    std::size_t block_size() const noexcept { return a_; }
    std::size_t blocks() const noexcept { return b_; }
    std::size_t block_length() const noexcept { return inner_.length(); }
    std::size_t length() const noexcept { return b_ * inner_.length(); }
    std::size_t probes() const noexcept { return 2; }

    const BmrvStructure& bmrv() const noexcept { return bmrv_; }
    const std::vector<std::uint32_t>& position_of() const noexcept { return position_of_; }
    /// Internal index serving public index i.
    std::size_t internal_index(std::size_t i) const { return served_.at(i); }
    const std::vector<std::size_t>& served_indices() const noexcept { return served_; }
    const std::vector<std::size_t>& good_blocks() const noexcept { return good_blocks_; }
    bool is_good(std::size_t internal) const;

    Placement place(std::size_t bmrv_position) const;
    /// Number of elements of P_{internal i} in each block.
    std::vector<std::size_t> block_loads(std::size_t i) const;

    /// Embeds x (length n, weight <= s) into the internal universe.
    BitString internal_message(const BitString& x) const;
    Codeword encode(const BitString& x) const;

    /// Pick a uniform block; decode through it if it holds exactly one
    /// element of P_i, else answer a fair coin.
    bool decode_block(ProbeOracle& oracle, std::size_t i, Randomness& rng) const;
    /// Pick a uniform j in P_i and decode y_j from its block.
    bool decode_direct(ProbeOracle& oracle, std::size_t i, Randomness& rng) const;

private:
    bool decode_position(ProbeOracle& oracle, std::size_t bmrv_position, Randomness& rng) const;

    BmrvStructure bmrv_;
    std::vector<std::uint32_t> position_of_;
    std::size_t a_;
    std::size_t b_;
    std::size_t n_;
    std::vector<std::size_t> served_;
    std::vector<std::size_t> good_blocks_;
    HadamardCode inner_;
};

struct ComposedBuild {
    ComposedMembership structure;
    ComposedParams params;
    BmrvVerification verification;
    std::size_t graph_attempts = 0;
    std::size_t pi_attempts = 0;
    std::size_t good_count = 0;
};

/// Builds the one-probe structure for universe_scale * n indices, then tries
/// up to pi_trials uniform permutations and keeps the first one with at least
/// (universe_scale * n) / 20 good indices. Throws ConstructionFailure with the
/// best count seen otherwise.
ComposedBuild composed_build(const ComposedParams& params);

/// Fraction of P_i lying in blocks that hold at least `threshold` elements of P_i.
double crowded_block_mass(const ComposedMembership& cm, std::size_t i, std::size_t threshold);

nlohmann::json to_json(const BmrvVerification& v);
nlohmann::json build_report(const ComposedBuild& build);

} // namespace ecds
