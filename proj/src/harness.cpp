#include "ecds/harness.hpp"

#include "ecds/membership.hpp"
#include "ecds/storage.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <chrono>
#include <cstdio>
#include <sstream>

namespace ecds {

ConfidenceInterval clopper_pearson(std::uint64_t failures, std::uint64_t trials, double confidence)
{
    if (trials == 0 || failures > trials) {
        throw std::invalid_argument("confidence interval needs 0 <= failures <= trials, trials >= 1");
    }
    const double alpha = 1.0 - confidence;
    const auto k = static_cast<double>(failures);
    const auto n = static_cast<double>(trials);
    ConfidenceInterval ci;
    ci.lower = failures == 0 ? 0.0 : boost::math::ibeta_inv(k, n - k + 1.0, alpha / 2.0);
    ci.upper = failures == trials ? 1.0 : boost::math::ibeta_inv(k + 1.0, n - k, 1.0 - alpha / 2.0);
    return ci;
}

QueryEstimate evaluate_query(const Scheme& scheme, const BitString& word, std::size_t query, std::uint64_t trials,
                             std::uint64_t seed, std::uint64_t exact_limit)
{
    if (trials == 0) {
        throw std::invalid_argument("need at least one trial");
    }
    QueryEstimate out;
    out.query = query;
    out.label = scheme.query_label(query);
    const BitString expected = scheme.expected(query);
    const std::size_t budget = scheme.probes_for(query);

    if (scheme.randomness_states(query) <= exact_limit) {
        try {
            const Ratio error = exact_probability(
                [&](Randomness& rng) {
                    ProbeOracle oracle(word, budget);
                    return scheme.decode(oracle, query, rng) != expected;
                },
                exact_limit);
            out.exact = true;
            out.exact_error = error.to_string();
            out.error = error.value();
            out.ci = {out.error, out.error};
            return out;
        } catch (const NotEnumerable& e) {
            out.note = std::string("exact enumeration infeasible (") + e.what() + "), sampled instead";
        }
    }

    const std::uint64_t stream = derive_seed(seed, 0x71, query);
    std::uint64_t failures = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        SeededRandomness rng = SeededRandomness::for_trial(stream, t);
        ProbeOracle oracle(word, budget);
        if (scheme.decode(oracle, query, rng) != expected) {
            ++failures;
        }
    }
    out.trials = trials;
    out.failures = failures;
    out.error = static_cast<double>(failures) / static_cast<double>(trials);
    out.ci = clopper_pearson(failures, trials);
    return out;
}

ExperimentReport estimate_error(const Scheme& scheme, const AdversaryStrategy& strategy,
                                const EstimateOptions& options)
{
    const auto started = std::chrono::steady_clock::now();
    ExperimentReport report;
    report.scheme = scheme.id();
    report.config = to_json(scheme.config());
    report.build = scheme.build_info();
    report.length = scheme.length();
    report.probes = scheme.probes();
    report.delta = strategy.delta;
    report.adversary = strategy;
    report.budget = resolved_budget(strategy, scheme.length());
    report.trials = options.trials;
    report.seed = options.seed;
    report.exact_limit = options.exact_limit;

    std::vector<std::size_t> queries;
    if (options.queries) {
        queries = *options.queries;
    } else {
        queries.resize(scheme.query_count());
        for (std::size_t q = 0; q < queries.size(); ++q) {
            queries[q] = q;
        }
    }
    for (auto q : queries) {
        if (q >= scheme.query_count()) {
            throw std::out_of_range("query " + std::to_string(q) + " outside the scheme's query set");
        }
    }

    std::optional<CorruptionPattern> global;
    if (options.pattern) {
        if (options.pattern->length() != scheme.length()) {
            throw std::invalid_argument("explicit pattern built for a different length");
        }
        if (options.pattern->weight() > report.budget) {
            throw BudgetViolation("explicit pattern exceeds floor(delta N)");
        }
        global = options.pattern;
        report.notes.push_back("explicit corruption pattern; adversary not run");
    } else if (!is_targeted(strategy.kind)) {
        global = attack(strategy, scheme);
    } else if (options.target) {
        global = attack(strategy, scheme, options.target);
        report.notes.push_back("one pattern aimed at query " + scheme.query_label(*options.target));
    }
    if (strategy.kind == AdversaryKind::greedy_local && !options.pattern) {
        report.notes.push_back("greedy_local is a heuristic lower bound on adversarial power");
    }

    std::optional<BitString> global_word;
    if (global) {
        global_word = corrupt(scheme.codeword(), *global);
        report.pattern = global->positions();
    }

    for (auto q : queries) {
        QueryEstimate est;
        if (global_word) {
            est = evaluate_query(scheme, *global_word, q, options.trials, options.seed, options.exact_limit);
            est.pattern_weight = global->weight();
        } else {
            const CorruptionPattern pattern = attack(strategy, scheme, q);
            est = evaluate_query(scheme, corrupt(scheme.codeword(), pattern), q, options.trials, options.seed,
                                 options.exact_limit);
            est.pattern_weight = pattern.weight();
            est.pattern = pattern.positions();
        }
        est.query = q;
        if (report.queries.empty() || est.error > report.worst_error) {
            report.worst_error = est.error;
            report.worst_query = q;
            report.worst_ci_half_width = est.ci.half_width();
        }
        report.queries.push_back(std::move(est));
    }

    if (options.timing) {
        report.wall_time_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    }
    return report;
}

namespace {

std::string fnv1a(const std::vector<std::size_t>& positions)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto p : positions) {
        for (int k = 0; k < 8; ++k) {
            h ^= (static_cast<std::uint64_t>(p) >> (8 * k)) & 0xffu;
            h *= 0x100000001b3ULL;
        }
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void put_pattern(nlohmann::json& j, const std::vector<std::size_t>& positions)
{
    j["pattern_weight"] = positions.size();
    if (positions.size() <= kMaxRecordedPattern) {
        j["pattern"] = positions;
    } else {
        j["pattern_digest"] = fnv1a(positions);
    }
}

nlohmann::json to_json(const QueryEstimate& q, bool with_pattern)
{
    nlohmann::json j = {{"query", q.query},
                        {"label", q.label},
                        {"mode", q.exact ? "exact" : "sampled"},
                        {"error", q.error},
                        {"ci_low", q.ci.lower},
                        {"ci_high", q.ci.upper},
                        {"ci_half_width", q.ci.half_width()}};
    if (q.exact) {
        j["exact_error"] = q.exact_error;
    } else {
        j["trials"] = q.trials;
        j["failures"] = q.failures;
    }
    if (with_pattern) {
        put_pattern(j, q.pattern);
    } else {
        j["pattern_weight"] = q.pattern_weight;
    }
    if (!q.note.empty()) {
        j["note"] = q.note;
    }
    return j;
}

std::string number(double v)
{
    return nlohmann::json(v).dump();
}

} // namespace

nlohmann::json to_json(const ExperimentReport& r)
{
    nlohmann::json queries = nlohmann::json::array();
    for (const auto& q : r.queries) {
        queries.push_back(to_json(q, !r.pattern.has_value()));
    }
    nlohmann::json adversary = to_json(r.adversary);
    adversary["budget"] = r.budget;
    nlohmann::json j = {{"kind", "experiment"},
                        {"provenance", "measurement"},
                        {"scheme", r.scheme},
                        {"config", r.config},
                        {"build", r.build},
                        {"N", r.length},
                        {"p", r.probes},
                        {"delta", r.delta},
                        {"adversary", adversary},
                        {"trials", r.trials},
                        {"seed", r.seed},
                        {"exact_limit", r.exact_limit},
                        {"confidence", 0.99},
                        {"queries", queries},
                        {"worst_query", r.worst_query},
                        {"worst_label", r.queries.empty() ? "" : r.queries.front().label},
                        {"worst_error", r.worst_error},
                        {"worst_ci_half_width", r.worst_ci_half_width},
                        {"notes", r.notes}};
    for (const auto& q : r.queries) {
        if (q.query == r.worst_query) {
            j["worst_label"] = q.label;
            break;
        }
    }
    if (r.pattern) {
        nlohmann::json pattern;
        put_pattern(pattern, *r.pattern);
        j["corruption"] = pattern;
    }
    if (r.wall_time_seconds) {
        j["wall_time_seconds"] = *r.wall_time_seconds;
    }
    return j;
}

std::string csv_header()
{
    return "scheme,N,p,delta,adversary,budget,trials,seed,query,label,mode,error,ci_low,ci_high,ci_half_width,"
           "failures,pattern_weight\n";
}

std::string to_csv_rows(const ExperimentReport& r)
{
    std::ostringstream out;
    for (const auto& q : r.queries) {
        out << r.scheme << ',' << r.length << ',' << r.probes << ',' << number(r.delta) << ','
            << to_string(r.adversary.kind) << ',' << r.budget << ',' << r.trials << ',' << r.seed << ',' << q.query
            << ',' << q.label << ',' << (q.exact ? "exact" : "sampled") << ',' << number(q.error) << ','
            << number(q.ci.lower) << ',' << number(q.ci.upper) << ',' << number(q.ci.half_width()) << ','
            << (q.exact ? std::string() : std::to_string(q.failures)) << ',' << q.pattern_weight << '\n';
    }
    return out.str();
}

SweepGrid sweep_grid_from_json(const nlohmann::json& j)
{
    SweepGrid grid;
    if (j.is_array() && j.empty()) {
        return grid;
    }
    if (!j.is_object()) {
        throw std::invalid_argument("sweep grid must be a JSON object");
    }
    try {
        grid.options.trials = j.value("trials", grid.options.trials);
        grid.options.seed = j.value("seed", grid.options.seed);
        grid.options.exact_limit = j.value("exact_limit", grid.options.exact_limit);
        if (j.contains("schemes")) {
            for (const auto& s : j.at("schemes")) {
                grid.schemes.push_back(scheme_config_from_json(s));
            }
        }
        if (j.contains("deltas")) {
            grid.deltas = j.at("deltas").get<std::vector<double>>();
        }
        if (j.contains("adversaries")) {
            for (const auto& a : j.at("adversaries")) {
                AdversaryStrategy strategy;
                strategy.seed = grid.options.seed;
                if (a.is_string()) {
                    strategy.kind = adversary_kind_from_string(a.get<std::string>());
                } else {
                    strategy.kind = adversary_kind_from_string(a.at("kind").get<std::string>());
                    strategy.seed = a.value("seed", strategy.seed);
                    strategy.evaluations = a.value("evaluations", strategy.evaluations);
                    strategy.evaluation_trials = a.value("evaluation_trials", strategy.evaluation_trials);
                    if (a.contains("budget")) {
                        strategy.budget = a.at("budget").get<std::size_t>();
                    }
                }
                grid.adversaries.push_back(strategy);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad sweep grid: ") + e.what());
    }
    if (grid.options.trials == 0) {
        throw std::invalid_argument("sweep needs at least one trial");
    }
    return grid;
}

std::vector<SweepEntry> sweep(const SweepGrid& grid)
{
    std::vector<SweepEntry> out;
    for (const auto& config : grid.schemes) {
        std::unique_ptr<Scheme> scheme;
        std::optional<nlohmann::json> build_error;
        try {
            scheme = make_scheme(config);
        } catch (const std::exception& e) {
            const ErrorClass c = classify_error(e);
            build_error = nlohmann::json{{"code", c.code}, {"message", e.what()}};
        }
        for (double delta : grid.deltas) {
            for (const auto& adversary : grid.adversaries) {
                SweepEntry entry;
                entry.cell = {{"scheme", to_json(config)}, {"delta", delta}, {"adversary", to_string(adversary.kind)}};
                if (build_error) {
                    entry.error = build_error;
                } else {
                    AdversaryStrategy strategy = adversary;
                    strategy.delta = delta;
                    try {
                        entry.report = estimate_error(*scheme, strategy, grid.options);
                    } catch (const std::exception& e) {
                        const ErrorClass c = classify_error(e);
                        entry.error = nlohmann::json{{"code", c.code}, {"message", e.what()}};
                    }
                }
                out.push_back(std::move(entry));
            }
        }
    }
    return out;
}

nlohmann::json to_json(const SweepEntry& entry)
{
    if (entry.report) {
        nlohmann::json j = to_json(*entry.report);
        j["cell"] = entry.cell;
        return j;
    }
    return {{"kind", "experiment"}, {"cell", entry.cell}, {"error", entry.error.value_or(nlohmann::json())}};
}

ErrorClass classify_error(const std::exception& e)
{
    if (dynamic_cast<const InconsistentParameters*>(&e)) {
        return {3, "inconsistent_parameters"};
    }
    if (dynamic_cast<const ConstructionFailure*>(&e)) {
        return {5, "construction_failure"};
    }
    if (dynamic_cast<const IoError*>(&e)) {
        return {6, "io_error"};
    }
    if (dynamic_cast<const std::length_error*>(&e)) {
        return {4, "infeasible_size"};
    }
    if (dynamic_cast<const ProbeBudgetExceeded*>(&e) || dynamic_cast<const BudgetViolation*>(&e)) {
        return {7, "budget_violation"};
    }
    if (dynamic_cast<const std::invalid_argument*>(&e) || dynamic_cast<const std::out_of_range*>(&e)) {
        return {2, "invalid_argument"};
    }
    return {1, "internal_error"};
}

} // namespace ecds
