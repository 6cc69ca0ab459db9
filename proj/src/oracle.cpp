#include "ecds/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

namespace ecds {

namespace {

std::atomic<std::uint64_t> g_violations{0};

} // namespace

CorruptionPattern::CorruptionPattern(std::vector<std::size_t> positions, std::size_t length)
    : flips_(std::move(positions)), length_(length)
{
    std::sort(flips_.begin(), flips_.end());
    flips_.erase(std::unique(flips_.begin(), flips_.end()), flips_.end());
    if (!flips_.empty() && flips_.back() >= length) {
        throw std::out_of_range("corruption position " + std::to_string(flips_.back()) +
                                " outside a word of length " + std::to_string(length));
    }
}

bool CorruptionPattern::contains(std::size_t pos) const
{
    return std::binary_search(flips_.begin(), flips_.end(), pos);
}

std::size_t noise_budget(double delta, std::size_t length)
{
    if (delta < 0.0) {
        throw std::invalid_argument("noise level must be non-negative");
    }
    // tolerate representation error in products such as 0.05 * 256
    const double raw = delta * static_cast<double>(length);
    return static_cast<std::size_t>(std::floor(raw + 1e-9 * std::max(1.0, raw)));
}

BitString corrupt(const BitString& word, const CorruptionPattern& pattern)
{
    if (pattern.length() != 0 && pattern.length() != word.size()) {
        throw std::invalid_argument("corruption pattern built for a different length");
    }
    BitString out = word;
    for (auto pos : pattern.positions()) {
        out.flip(pos);
    }
    return out;
}

std::uint64_t probe_budget_violations() noexcept
{
    return g_violations.load();
}

ProbeOracle::ProbeOracle(const BitString& word, std::size_t budget)
    : word_(&word), length_(word.size()), budget_(budget)
{
    trace_.reserve(budget);
}

ProbeOracle::ProbeOracle(const Codeword& codeword, const CorruptionPattern& pattern, std::size_t budget)
    : word_(&codeword.bits()), pattern_(&pattern), length_(codeword.size()), budget_(budget)
{
    if (pattern.length() != 0 && pattern.length() != codeword.size()) {
        throw std::invalid_argument("corruption pattern built for a different length");
    }
    trace_.reserve(budget);
}

ProbeOracle::ProbeOracle(ProbeOracle& parent, std::size_t offset, std::size_t length, std::size_t budget)
    : parent_(&parent), offset_(offset), length_(length), budget_(budget)
{
    if (offset + length > parent.length()) {
        throw std::out_of_range("oracle window outside the parent word");
    }
}

bool ProbeOracle::probe(std::size_t pos)
{
    if (used_ >= budget_) {
        g_violations.fetch_add(1);
        throw ProbeBudgetExceeded("probe budget of " + std::to_string(budget_) + " exhausted");
    }
    if (pos >= length_) {
        throw std::out_of_range("probe position " + std::to_string(pos) + " outside the word");
    }
    ++used_;
    return read(pos);
}

bool ProbeOracle::read(std::size_t pos)
{
    if (parent_ != nullptr) {
        return parent_->probe(offset_ + pos);
    }
    trace_.push_back(pos);
    bool bit = (*word_)[pos];
    if (pattern_ != nullptr && pattern_->contains(pos)) {
        bit = !bit;
    }
    return bit;
}

ProbeDistribution probe_distribution(const DecodeRun& run, const BitString& word, std::size_t budget,
                                     std::uint64_t max_leaves)
{
    ProbeDistribution out;
    std::vector<std::size_t> trace;
    Ratio seen(0, 1);
    try {
        enumerate_choices(
            [&](Randomness& rng) {
                ProbeOracle oracle(word, budget);
                run(oracle, rng);
                trace = oracle.trace();
            },
            [&](const Ratio& p) {
                // earlier leaves made fewer probes: they count as "no probe" in new slots
                while (out.slots.size() < trace.size()) {
                    out.slots.emplace_back();
                    if (seen.num() != 0) {
                        out.slots.back()[ProbeDistribution::kNoProbe] = seen;
                    }
                }
                seen += p;
                for (std::size_t t = 0; t < out.slots.size(); ++t) {
                    const std::size_t key = t < trace.size() ? trace[t] : ProbeDistribution::kNoProbe;
                    out.slots[t][key] += p;
                }
            },
            max_leaves);
        out.enumerable = true;
    } catch (const NotEnumerable& e) {
        out.enumerable = false;
        out.note = e.what();
        out.slots.clear();
    }
    return out;
}

} // namespace ecds
