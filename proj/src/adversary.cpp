#include "ecds/adversary.hpp"

#include "ecds/harness.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

namespace ecds {

namespace {

struct KindName {
    AdversaryKind kind;
    const char* name;
};

constexpr KindName kKindNames[] = {
    {AdversaryKind::none, "none"},
    {AdversaryKind::random_flips, "random_flips"},
    {AdversaryKind::block_killer, "block_killer"},
    {AdversaryKind::piece_killer, "piece_killer"},
    {AdversaryKind::probe_set_killer, "probe_set_killer"},
    {AdversaryKind::greedy_local, "greedy_local"},
};

/// First `count` entries of a seeded permutation of [length].
std::vector<std::size_t> permutation_prefix(std::size_t length, std::size_t count, Randomness& rng)
{
    std::unordered_map<std::size_t, std::size_t> moved;
    const auto value_at = [&](std::size_t k) {
        const auto it = moved.find(k);
        return it == moved.end() ? k : it->second;
    };
    std::vector<std::size_t> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const auto j = k + static_cast<std::size_t>(rng.below(length - k));
        const std::size_t vj = value_at(j);
        moved[j] = value_at(k);
        out.push_back(vj);
    }
    return out;
}

/// Positions base + u, u < 2^a increasing, with coordinates o and c of u set
/// (position 0 is the most significant coordinate). `c == o` means "just o".
void append_quarter(std::vector<std::size_t>& out, std::size_t base, std::size_t a, std::size_t o, std::size_t c,
                    std::size_t limit)
{
    const std::size_t len = std::size_t{1} << a;
    const std::size_t mask = (std::size_t{1} << (a - 1 - o)) | (std::size_t{1} << (a - 1 - c));
    for (std::size_t u = 0; u < len && out.size() < limit; ++u) {
        if ((u & mask) == mask) {
            out.push_back(base + u);
        }
    }
}

std::size_t partner_coordinate(std::size_t a, std::size_t o)
{
    return a < 2 ? o : (o + 1) % a;
}

std::size_t require_target(const Scheme& scheme, std::optional<std::size_t> target, AdversaryKind kind)
{
    if (!target) {
        throw std::invalid_argument(to_string(kind) + " needs a target query");
    }
    if (*target >= scheme.query_count()) {
        throw std::out_of_range("target query outside the scheme's query set");
    }
    return *target;
}

std::vector<std::size_t> block_killer(const ComposedScheme& scheme, std::size_t target, std::size_t budget)
{
    const auto& cm = scheme.structure();
    std::vector<std::vector<std::size_t>> offsets(cm.blocks());
    for (auto j : cm.bmrv().probe_set(cm.internal_index(target))) {
        const auto where = cm.place(j);
        offsets[where.block].push_back(where.offset);
    }
    std::vector<std::size_t> order;
    for (std::size_t k = 0; k < cm.blocks(); ++k) {
        const std::size_t load = offsets[k].size();
        // the block decoder never reads blocks with two or more elements
        if (load == 1 || (load > 1 && scheme.direct())) {
            order.push_back(k);
        }
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return offsets[x].size() > offsets[y].size(); });
    std::vector<std::size_t> out;
    for (auto k : order) {
        if (out.size() >= budget) {
            break;
        }
        auto& offs = offsets[k];
        std::sort(offs.begin(), offs.end());
        const std::size_t o = offs[0];
        const std::size_t c = offs.size() > 1 ? offs[1] : partner_coordinate(cm.block_size(), o);
        append_quarter(out, k * cm.block_length(), cm.block_size(), o, c, budget);
    }
    return out;
}

std::vector<std::size_t> piece_killer(const Scheme& scheme, std::size_t target, std::size_t budget)
{
    std::vector<std::size_t> out;
    if (const auto* sub = dynamic_cast<const SubstringScheme*>(&scheme)) {
        const auto ones = sub->query(target).support();
        if (ones.empty()) {
            return out;
        }
        const auto& layout = sub->layout();
        const std::size_t o = layout.coordinate_of(ones.front());
        append_quarter(out, layout.piece_of(ones.front()) * layout.piece_length(), layout.piece_bits(), o,
                       partner_coordinate(layout.piece_bits(), o), budget);
        return out;
    }
    if (dynamic_cast<const HadamardBitScheme*>(&scheme) != nullptr) {
        const std::size_t a = scheme.data().size();
        append_quarter(out, 0, a, target, partner_coordinate(a, target), budget);
        return out;
    }
    throw std::invalid_argument("piece_killer applies to the substring and had-bit schemes");
}

std::vector<std::size_t> greedy_local(const AdversaryStrategy& strategy, const Scheme& scheme, std::size_t target,
                                      std::size_t budget)
{
    const std::size_t length = scheme.length();
    SeededRandomness rng(derive_seed(strategy.seed, 0x67726479, target));
    std::vector<std::size_t> flips = permutation_prefix(length, budget, rng);
    if (budget == 0 || budget >= length) {
        return flips;
    }
    std::unordered_set<std::size_t> in_pattern(flips.begin(), flips.end());
    BitString word = corrupt(scheme.codeword(), CorruptionPattern(flips, length));
    const std::uint64_t score_seed = derive_seed(strategy.seed, 0x73636f7265, target);
    const auto score = [&] {
        return evaluate_query(scheme, word, target, strategy.evaluation_trials, score_seed).error;
    };
    double current = score();
    for (std::size_t e = 0; e < strategy.evaluations; ++e) {
        const auto slot = static_cast<std::size_t>(rng.below(flips.size()));
        std::size_t candidate = 0;
        if (rng.coin()) {
            // a position the decoder actually reads on the current word
            ProbeOracle oracle(word, scheme.probes_for(target));
            scheme.decode(oracle, target, rng);
            const auto& trace = oracle.trace();
            candidate = trace.empty() ? static_cast<std::size_t>(rng.below(length))
                                      : trace[static_cast<std::size_t>(rng.below(trace.size()))];
        } else {
            candidate = static_cast<std::size_t>(rng.below(length));
        }
        if (in_pattern.count(candidate)) {
            continue;
        }
        const std::size_t removed = flips[slot];
        word.flip(removed);
        word.flip(candidate);
        const double next = score();
        if (next >= current) {
            current = next;
            in_pattern.erase(removed);
            in_pattern.insert(candidate);
            flips[slot] = candidate;
        } else {
            word.flip(removed);
            word.flip(candidate);
        }
    }
    return flips;
}

} // namespace

std::string to_string(AdversaryKind kind)
{
    for (const auto& entry : kKindNames) {
        if (entry.kind == kind) {
            return entry.name;
        }
    }
    return "unknown";
}

AdversaryKind adversary_kind_from_string(const std::string& name)
{
    std::string normalized = name;
    std::replace(normalized.begin(), normalized.end(), '-', '_');
    if (normalized == "random") {
        normalized = "random_flips";
    }
    for (const auto& entry : kKindNames) {
        if (normalized == entry.name) {
            return entry.kind;
        }
    }
    throw std::invalid_argument("unknown adversary '" + name + "'");
}

bool is_targeted(AdversaryKind kind)
{
    return kind != AdversaryKind::none && kind != AdversaryKind::random_flips;
}

nlohmann::json to_json(const AdversaryStrategy& strategy)
{
    nlohmann::json j = {{"kind", to_string(strategy.kind)}, {"delta", strategy.delta}, {"seed", strategy.seed}};
    if (strategy.budget) {
        j["budget_override"] = *strategy.budget;
    }
    if (strategy.kind == AdversaryKind::greedy_local) {
        j["evaluations"] = strategy.evaluations;
        j["evaluation_trials"] = strategy.evaluation_trials;
        j["heuristic"] = true;
    }
    return j;
}

std::size_t resolved_budget(const AdversaryStrategy& strategy, std::size_t length)
{
    if (!(strategy.delta >= 0.0 && strategy.delta <= 1.0)) {
        throw std::invalid_argument("noise level delta must lie in [0, 1]");
    }
    const std::size_t cap = noise_budget(strategy.delta, length);
    if (strategy.budget) {
        if (*strategy.budget > cap) {
            throw std::invalid_argument("adversary budget " + std::to_string(*strategy.budget) +
                                        " exceeds floor(delta N) = " + std::to_string(cap));
        }
        return *strategy.budget;
    }
    return cap;
}

CorruptionPattern attack(const AdversaryStrategy& strategy, const Scheme& scheme, std::optional<std::size_t> target)
{
    const std::size_t length = scheme.length();
    const std::size_t budget = resolved_budget(strategy, length);
    std::vector<std::size_t> flips;
    switch (strategy.kind) {
    case AdversaryKind::none:
        break;
    case AdversaryKind::random_flips: {
        SeededRandomness rng(derive_seed(strategy.seed, 0x726e64));
        flips = permutation_prefix(length, budget, rng);
        break;
    }
    case AdversaryKind::block_killer: {
        const std::size_t q = require_target(scheme, target, strategy.kind);
        const auto* composed = dynamic_cast<const ComposedScheme*>(&scheme);
        if (composed == nullptr) {
            throw std::invalid_argument("block_killer applies to the composed membership schemes");
        }
        flips = block_killer(*composed, q, budget);
        break;
    }
    case AdversaryKind::piece_killer:
        flips = piece_killer(scheme, require_target(scheme, target, strategy.kind), budget);
        break;
    case AdversaryKind::probe_set_killer: {
        const std::size_t q = require_target(scheme, target, strategy.kind);
        const auto* bmrv = dynamic_cast<const BmrvScheme*>(&scheme);
        if (bmrv == nullptr) {
            throw std::invalid_argument("probe_set_killer applies to the bmrv scheme");
        }
        const auto& set = bmrv->structure().probe_set(q);
        flips.assign(set.begin(), set.end());
        std::sort(flips.begin(), flips.end());
        flips.resize(std::min(flips.size(), budget));
        break;
    }
    case AdversaryKind::greedy_local:
        flips = greedy_local(strategy, scheme, require_target(scheme, target, strategy.kind), budget);
        break;
    }
    CorruptionPattern pattern(std::move(flips), length);
    if (pattern.weight() > budget) {
        throw BudgetViolation(to_string(strategy.kind) + " emitted " + std::to_string(pattern.weight()) +
                              " flips with budget " + std::to_string(budget));
    }
    return pattern;
}

} // namespace ecds
