#pragma once

#include "ecds/bits.hpp"
#include "ecds/random.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace ecds {

/// Encoded structure. Immutable and cheap to copy; copies share storage.
class Codeword {
public:
    Codeword() : bits_(std::make_shared<const BitString>()) {}
    explicit Codeword(BitString bits) : bits_(std::make_shared<const BitString>(std::move(bits))) {}

    const BitString& bits() const noexcept { return *bits_; }
    std::size_t size() const noexcept { return bits_->size(); }

private:
    std::shared_ptr<const BitString> bits_;
};

/// Set of distinct flipped positions, kept sorted.
class CorruptionPattern {
public:
    CorruptionPattern() = default;
    /// Throws std::out_of_range if any position is >= length. Duplicates are merged.
    CorruptionPattern(std::vector<std::size_t> positions, std::size_t length);

    const std::vector<std::size_t>& positions() const noexcept { return flips_; }
    std::size_t weight() const noexcept { return flips_.size(); }
    std::size_t length() const noexcept { return length_; }
    bool contains(std::size_t pos) const;

    friend bool operator==(const CorruptionPattern&, const CorruptionPattern&) = default;

private:
    std::vector<std::size_t> flips_;
    std::size_t length_ = 0;
};

/// floor(delta * length), the flip budget at noise level delta.
std::size_t noise_budget(double delta, std::size_t length);

/// The word seen by a decoder after the adversary flips `pattern`.
BitString corrupt(const BitString& word, const CorruptionPattern& pattern);
inline BitString corrupt(const Codeword& c, const CorruptionPattern& pattern)
{
    return corrupt(c.bits(), pattern);
}

class ProbeBudgetExceeded : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Number of budget violations raised process-wide since start-up.
std::uint64_t probe_budget_violations() noexcept;

/// The only way a decoder reads the stored word. Counts probes and fails hard
/// on the (budget+1)-th one. Single-use and single-threaded.
///
/// A window oracle exposes `length` positions starting at `offset` of its
/// parent, with its own budget; each of its probes is also charged to the parent.
class ProbeOracle {
public:
    ProbeOracle(const BitString& word, std::size_t budget);
    /// Reads `codeword` with `pattern` applied on the fly.
    ProbeOracle(const Codeword& codeword, const CorruptionPattern& pattern, std::size_t budget);
    ProbeOracle(ProbeOracle& parent, std::size_t offset, std::size_t length, std::size_t budget);

    ProbeOracle(const ProbeOracle&) = delete;
    ProbeOracle& operator=(const ProbeOracle&) = delete;

    bool probe(std::size_t pos);

    std::size_t length() const noexcept { return length_; }
    std::size_t budget() const noexcept { return budget_; }
    std::size_t used() const noexcept { return used_; }
    std::size_t remaining() const noexcept { return budget_ - used_; }
    /// Absolute positions probed so far (root oracle only).
    const std::vector<std::size_t>& trace() const noexcept { return trace_; }

private:
    bool read(std::size_t pos);

    const BitString* word_ = nullptr;
    const CorruptionPattern* pattern_ = nullptr;
    ProbeOracle* parent_ = nullptr;
    std::size_t offset_ = 0;
    std::size_t length_ = 0;
    std::size_t budget_ = 0;
    std::size_t used_ = 0;
    std::vector<std::size_t> trace_;
};

/// A decoder run: probes through the oracle, draws coins from the randomness.
using DecodeRun = std::function<void(ProbeOracle&, Randomness&)>;

/// Exact marginal distribution of each probe slot.
struct ProbeDistribution {
    static constexpr std::size_t kNoProbe = std::numeric_limits<std::size_t>::max();

    bool enumerable = false;
    std::string note;
    /// slots[t][pos] = Pr[the t-th probe is at pos]; kNoProbe collects runs
    /// that stopped before their t-th probe, so every slot sums to 1.
    std::vector<std::map<std::size_t, Ratio>> slots;
};

ProbeDistribution probe_distribution(const DecodeRun& run, const BitString& word, std::size_t budget,
                                     std::uint64_t max_leaves = kExactLeafLimit);

} // namespace ecds
