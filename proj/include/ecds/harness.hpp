#pragma once

#include "ecds/adversary.hpp"
#include "ecds/oracle.hpp"
#include "ecds/random.hpp"
#include "ecds/schemes.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ecds {

struct ConfidenceInterval {
    double lower = 0.0;
    double upper = 0.0;
    double half_width() const noexcept { return (upper - lower) / 2.0; }
};

/// Two-sided Clopper-Pearson interval for `failures` out of `trials`.
ConfidenceInterval clopper_pearson(std::uint64_t failures, std::uint64_t trials, double confidence = 0.99);

struct QueryEstimate {
    std::size_t query = 0;
    std::string label;
    bool exact = false;
    /// Exact mode: the error as a reduced fraction.
    std::string exact_error;
    std::uint64_t trials = 0;
    std::uint64_t failures = 0;
    double error = 0.0;
    ConfidenceInterval ci;
    std::size_t pattern_weight = 0;
    std::vector<std::size_t> pattern;  // targeted patterns only
    std::string note;
};

/// Decoding error of one query on a fixed (corrupted) word. Exact when the
/// scheme's randomness for the query has at most `exact_limit` states,
/// otherwise `trials` seeded runs; trial k draws from (seed, query, k).
QueryEstimate evaluate_query(const Scheme& scheme, const BitString& word, std::size_t query, std::uint64_t trials,
                             std::uint64_t seed, std::uint64_t exact_limit = kExactLeafLimit);

struct EstimateOptions {
    std::uint64_t trials = 100'000;
    std::uint64_t seed = 1;
    std::uint64_t exact_limit = kExactLeafLimit;
    /// Queries to measure; all of the scheme's queries when absent.
    std::optional<std::vector<std::size_t>> queries;
    /// Aim a targeted adversary at this query for all measured queries,
    /// instead of one pattern per query.
    std::optional<std::size_t> target;
    /// Use this pattern and skip the adversary.
    std::optional<CorruptionPattern> pattern;
    /// Record wall-clock time (breaks byte-identical reruns).
    bool timing = false;
};

struct ExperimentReport {
    std::string scheme;
    nlohmann::json config;
    nlohmann::json build;
    std::size_t length = 0;
    std::size_t probes = 0;
    double delta = 0.0;
    AdversaryStrategy adversary;
    std::size_t budget = 0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::uint64_t exact_limit = 0;
    std::vector<QueryEstimate> queries;
    std::size_t worst_query = 0;
    double worst_error = 0.0;
    double worst_ci_half_width = 0.0;
    /// Global (untargeted) pattern.
    std::optional<std::vector<std::size_t>> pattern;
    std::vector<std::string> notes;
    std::optional<double> wall_time_seconds;
};

/// Patterns longer than this are summarized by weight and digest in JSON.
inline constexpr std::size_t kMaxRecordedPattern = 4096;

ExperimentReport estimate_error(const Scheme& scheme, const AdversaryStrategy& strategy,
                                const EstimateOptions& options);

nlohmann::json to_json(const ExperimentReport& report);
std::string csv_header();
/// One row per query.
std::string to_csv_rows(const ExperimentReport& report);

struct SweepGrid {
    std::vector<SchemeConfig> schemes;
    std::vector<double> deltas;
    std::vector<AdversaryStrategy> adversaries;
    EstimateOptions options;
};

/// {"schemes": [config...], "deltas": [...], "adversaries": ["none" | {"kind": ...}],
///  "trials": T, "seed": S, "exact_limit": L}. Missing lists are empty.
SweepGrid sweep_grid_from_json(const nlohmann::json& j);

struct SweepEntry {
    nlohmann::json cell;
    std::optional<ExperimentReport> report;
    /// {"code": ..., "message": ...} when the cell failed.
    std::optional<nlohmann::json> error;
};

/// One entry per (scheme, delta, adversary) cell in that nesting order.
std::vector<SweepEntry> sweep(const SweepGrid& grid);
nlohmann::json to_json(const SweepEntry& entry);

/// Machine-readable classification shared by the CLI and sweep.
struct ErrorClass {
    int exit_code;
    std::string code;
};
ErrorClass classify_error(const std::exception& e);

} // namespace ecds
