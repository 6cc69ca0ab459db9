#pragma once

#include "ecds/oracle.hpp"
#include "ecds/schemes.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace ecds {

enum class AdversaryKind { none, random_flips, block_killer, piece_killer, probe_set_killer, greedy_local };

std::string to_string(AdversaryKind kind);
/// Accepts the names above with '_' or '-'. Throws std::invalid_argument.
AdversaryKind adversary_kind_from_string(const std::string& name);
/// Kinds that aim at one query and so produce one pattern per query.
bool is_targeted(AdversaryKind kind);

struct AdversaryStrategy {
    AdversaryKind kind = AdversaryKind::none;
    double delta = 0.0;
    /// Optional flip budget below floor(delta N).
    std::optional<std::size_t> budget;
    std::uint64_t seed = 1;
    /// greedy_local: number of candidate patterns scored.
    std::size_t evaluations = 200;
    /// greedy_local: trials per score when exact scoring is infeasible.
    std::size_t evaluation_trials = 256;
};

nlohmann::json to_json(const AdversaryStrategy& strategy);

/// floor(delta N), or the explicit budget if it is not larger.
/// Throws std::invalid_argument for delta outside [0, 1] or a budget above floor(delta N).
std::size_t resolved_budget(const AdversaryStrategy& strategy, std::size_t length);

/// An emitted pattern broke its budget. Never expected; raised by the emission check.
class BudgetViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Deterministic given the strategy seed. Targeted kinds need `target`.
///
/// random_flips: the first `budget` entries of a seeded permutation of [N],
///   so patterns for growing budgets are nested.
/// block_killer (composed): within the blocks the decoder would read for the
///   target, most-loaded first, flips the quarter {u : u_o = u_c = 1} of the
///   block code, o the target's offset and c a second offset in that block
///   (or the next coordinate); the last block may be partially flipped.
/// piece_killer (substring, had-bit): the same quarter inside the piece that
///   holds the target's first requested bit.
/// probe_set_killer (bmrv): flips P_i.
/// greedy_local (any scheme): swap-based hill climbing on the target's
///   decoding error from a random start; a heuristic, not a worst case.
CorruptionPattern attack(const AdversaryStrategy& strategy, const Scheme& scheme,
                         std::optional<std::size_t> target = std::nullopt);

} // namespace ecds
