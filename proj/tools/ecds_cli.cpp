// Command-line front end: build, decode, attack, experiment, sweep, bounds.

#include "ecds/bounds.hpp"
#include "ecds/harness.hpp"
#include "ecds/schemes.hpp"
#include "ecds/storage.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using nlohmann::json;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

std::uint64_t default_seed()
{
    const char* env = std::getenv("ECDS_SEED");
    if (env == nullptr || *env == '\0') {
        return 1;
    }
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0') {
        throw UsageError("ECDS_SEED must be a non-negative integer");
    }
    return v;
}

void add_scheme_flags(CLI::App* cmd, ecds::SchemeConfig& c, std::string& data)
{
    cmd->add_option("--scheme", c.scheme, "had-bit, had-ip, equality, ip-table, poly-ip, substring, bmrv, "
                                          "composed, composed-direct")
        ->required();
    cmd->add_option("--n", c.n, "data length / universe size");
    cmd->add_option("--s", c.s, "membership set size bound");
    cmd->add_option("--r", c.r, "query weight bound");
    cmd->add_option("--p", c.p, "probes");
    cmd->add_option("--t", c.t, "substring repetitions per bit (odd)");
    cmd->add_option("--eps", c.eps, "one-probe membership error target");
    cmd->add_option("--data", data, "stored data as a 0/1 string (default: derived from the seed)");
    cmd->add_option("--n-prime", c.n_prime, "one-probe membership length override");
    cmd->add_option("--d", c.d, "one-probe membership probe-set size override");
    cmd->add_option("--block-size", c.block_size, "composed: inner message length a (0 = 8s)");
    cmd->add_option("--blocks", c.blocks, "composed: block count b (0 = default)");
    cmd->add_option("--bmrv-eps", c.bmrv_eps, "composed: agreement target of the internal structure");
    cmd->add_option("--pi-trials", c.pi_trials, "composed: permutation trials");
    cmd->add_option("--graph-retries", c.graph_retries, "membership graph / code resamples");
    cmd->add_option("--code", c.code, "equality: hadamard or random-linear");
    cmd->add_option("--code-length", c.code_length, "equality: random-linear code length");
    cmd->add_option("--max-gamma", c.max_gamma, "equality: largest accepted gamma");
}

struct Output {
    std::string format = "json";
    std::string path;

    void emit(const std::string& text) const
    {
        if (path.empty() || path == "-") {
            std::cout << text;
            return;
        }
        std::ofstream file(path, std::ios::binary | std::ios::trunc);
        if (!file) {
            throw ecds::IoError("cannot open '" + path + "' for writing");
        }
        file << text;
    }
};

void add_output_flags(CLI::App* cmd, Output& out, bool csv)
{
    if (csv) {
        cmd->add_option("--format", out.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    }
    cmd->add_option("--output", out.path, "output path (default standard output)");
}

std::string pretty(const json& j)
{
    return j.dump(2) + "\n";
}

std::size_t resolve_query(const ecds::Scheme& scheme, const std::string& label)
{
    return scheme.query_from_label(label);
}

// ---- subcommands ----

int run_build(const ecds::SchemeConfig& config, const std::string& out_path, const Output& out)
{
    const auto scheme = ecds::make_scheme(config);
    ecds::StoredStructure stored{ecds::structure_header(*scheme), scheme->codeword().bits()};
    if (!out_path.empty()) {
        ecds::write_structure(out_path, stored);
    }
    json report = {{"kind", "build"}, {"structure", out_path}, {"header", stored.header}};
    out.emit(pretty(report));
    return 0;
}

int run_decode(const std::string& path, const std::string& label, std::uint64_t seed, const Output& out)
{
    const auto stored = ecds::read_structure(path);
    const auto scheme = ecds::rebuild_scheme(stored);
    const std::size_t q = resolve_query(*scheme, label);
    ecds::ProbeOracle oracle(stored.word, scheme->probes_for(q));
    ecds::SeededRandomness rng(seed);
    const ecds::BitString answer = scheme->decode(oracle, q, rng);
    const ecds::BitString expected = scheme->expected(q);
    json report = {{"kind", "decode"},
                   {"structure", path},
                   {"config", stored.header.at("config")},
                   {"corruption_weight", ecds::stored_corruption(stored).weight()},
                   {"query", q},
                   {"label", scheme->query_label(q)},
                   {"seed", seed},
                   {"answer", answer.to_string()},
                   {"expected", expected.to_string()},
                   {"correct", answer == expected},
                   {"probes_used", oracle.used()},
                   {"budget", oracle.budget()},
                   {"probes", oracle.trace()}};
    out.emit(pretty(report));
    return 0;
}

int run_attack(const std::string& path, const std::string& out_path, ecds::AdversaryStrategy strategy,
               const std::string& target_label, const Output& out)
{
    auto stored = ecds::read_structure(path);
    const auto scheme = ecds::rebuild_scheme(stored);
    std::optional<std::size_t> target;
    if (!target_label.empty()) {
        target = resolve_query(*scheme, target_label);
    }
    const ecds::CorruptionPattern pattern = ecds::attack(strategy, *scheme, target);
    stored.word = ecds::corrupt(scheme->codeword(), pattern);
    stored.header["corruption"] = pattern.positions();
    stored.header["attack"] = ecds::to_json(strategy);
    stored.header["attack"]["budget"] = ecds::resolved_budget(strategy, scheme->length());
    if (target) {
        stored.header["attack"]["target"] = scheme->query_label(*target);
    }
    if (!out_path.empty()) {
        ecds::write_structure(out_path, stored);
    }
    json report = {{"kind", "attack"},
                   {"structure", path},
                   {"output_structure", out_path},
                   {"adversary", stored.header["attack"]},
                   {"pattern_weight", pattern.weight()},
                   {"pattern", pattern.positions()}};
    out.emit(pretty(report));
    return 0;
}

int run_experiment(const ecds::SchemeConfig* config, const std::string& structure_path,
                   const ecds::AdversaryStrategy& strategy, ecds::EstimateOptions options,
                   const std::string& target_label, const std::vector<std::string>& query_labels,
                   const Output& out)
{
    std::unique_ptr<ecds::Scheme> scheme;
    if (!structure_path.empty()) {
        const auto stored = ecds::read_structure(structure_path);
        scheme = ecds::rebuild_scheme(stored);
        const auto pattern = ecds::stored_corruption(stored);
        if (pattern.weight() > 0) {
            options.pattern = pattern;
        }
    } else {
        scheme = ecds::make_scheme(*config);
    }
    if (!target_label.empty()) {
        options.target = resolve_query(*scheme, target_label);
    }
    if (!query_labels.empty()) {
        std::vector<std::size_t> qs;
        for (const auto& label : query_labels) {
            qs.push_back(resolve_query(*scheme, label));
        }
        options.queries = qs;
    }
    ecds::AdversaryStrategy used = strategy;
    if (options.pattern && options.pattern->weight() > ecds::noise_budget(used.delta, scheme->length())) {
        throw ecds::InconsistentParameters("stored corruption exceeds floor(delta N); raise --delta");
    }
    const ecds::ExperimentReport report = ecds::estimate_error(*scheme, used, options);
    if (out.format == "csv") {
        out.emit(ecds::csv_header() + ecds::to_csv_rows(report));
    } else {
        json j = ecds::to_json(report);
        if (!structure_path.empty()) {
            j["structure"] = structure_path;
        }
        out.emit(pretty(j));
    }
    return 0;
}

int run_sweep(const std::string& grid_path, bool timing, const Output& out)
{
    std::ifstream file(grid_path);
    if (!file) {
        throw ecds::IoError("cannot open grid file '" + grid_path + "'");
    }
    json grid_json;
    try {
        std::stringstream buffer;
        buffer << file.rdbuf();
        const std::string text = buffer.str();
        grid_json = text.find_first_not_of(" \t\r\n") == std::string::npos ? json::object() : json::parse(text);
    } catch (const json::exception& e) {
        throw UsageError(std::string("grid file is not JSON: ") + e.what());
    }
    ecds::SweepGrid grid = ecds::sweep_grid_from_json(grid_json);
    grid.options.timing = timing;
    const auto entries = ecds::sweep(grid);
    if (out.format == "csv") {
        std::string text = ecds::csv_header();
        for (const auto& e : entries) {
            if (e.report) {
                text += ecds::to_csv_rows(*e.report);
            }
        }
        out.emit(text);
        return 0;
    }
    json list = json::array();
    for (const auto& e : entries) {
        list.push_back(ecds::to_json(e));
    }
    out.emit(pretty(list));
    return 0;
}

json structure_lengths_ip(std::size_t n, std::size_t r, std::size_t p)
{
    json lengths = json::object();
    lengths["ip_table"] = ecds::bounded_weight_count(n, (r + p - 1) / p).str();
    if (n < 64) {
        lengths["had_ip"] = std::to_string(std::uint64_t{1} << n);
    }
    if (p >= 2 && r >= 1) {
        const std::size_t m = ecds::poly_ip_set_universe(n, p - 1);
        if (ecds::binomial(m, p - 1) >= n) {
            const ecds::BigInt len = ecds::BigInt(p) << ((p - 1) * r * m);
            lengths["poly_ip"] = len.str();
        }
    }
    return lengths;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Error-correcting data structures: build, attack, measure, bound"};
    app.require_subcommand(1);

    std::uint64_t seed = 1;
    ecds::SchemeConfig config;
    std::string data;
    Output out;
    std::string structure_path;
    std::string out_structure;
    std::string query_label;
    std::string target_label;
    std::vector<std::string> query_labels;
    std::string adversary = "none";
    double delta = 0.0;
    std::size_t budget = 0;
    std::size_t evaluations = 200;
    std::size_t evaluation_trials = 256;
    std::uint64_t trials = 100'000;
    std::uint64_t exact_limit = ecds::kExactLeafLimit;
    bool timing = false;
    std::string grid_path;

    try {
        seed = default_seed();
    } catch (const std::exception& e) {
        std::cerr << json{{"error", {{"code", "usage"}, {"message", e.what()}, {"exit_code", 2}}}}.dump() << "\n";
        return 2;
    }
    config.seed = seed;

    auto* build = app.add_subcommand("build", "construct a structure and write it to a file");
    add_scheme_flags(build, config, data);
    build->add_option("--seed", config.seed, "construction and data seed (default $ECDS_SEED or 1)");
    build->add_option("--out", out_structure, "structure file to write");
    add_output_flags(build, out, false);

    auto* decode = app.add_subcommand("decode", "answer one query from a stored structure");
    decode->add_option("--structure", structure_path, "structure file")->required();
    decode->add_option("--query", query_label, "index or 0/1 query string")->required();
    decode->add_option("--seed", seed, "decoder seed");
    add_output_flags(decode, out, false);

    const auto add_adversary_flags = [&](CLI::App* cmd) {
        cmd->add_option("--adversary", adversary,
                        "none, random_flips, block_killer, piece_killer, probe_set_killer, greedy_local");
        cmd->add_option("--delta", delta, "noise level; budget floor(delta N)");
        cmd->add_option("--budget", budget, "explicit flip budget below floor(delta N)");
        cmd->add_option("--target", target_label, "query the adversary aims at");
        cmd->add_option("--evaluations", evaluations, "greedy_local candidate evaluations");
        cmd->add_option("--evaluation-trials", evaluation_trials, "greedy_local trials per sampled evaluation");
    };

    auto* attack = app.add_subcommand("attack", "corrupt a stored structure");
    attack->add_option("--structure", structure_path, "structure file")->required();
    attack->add_option("--out", out_structure, "corrupted structure file to write");
    attack->add_option("--seed", seed, "adversary seed");
    add_adversary_flags(attack);
    add_output_flags(attack, out, false);

    auto* experiment = app.add_subcommand("experiment", "estimate per-query decoding error");
    add_scheme_flags(experiment, config, data);
    experiment->get_option("--scheme")->required(false);
    experiment->add_option("--structure", structure_path, "measure a stored (possibly corrupted) structure");
    experiment->add_option("--seed", seed, "seed for construction, adversary and trials");
    experiment->add_option("--trials", trials, "trials per query in sampling mode");
    experiment->add_option("--exact-limit", exact_limit, "largest randomness space enumerated exactly");
    experiment->add_option("--queries", query_labels, "queries to measure (default all)")->delimiter(',');
    experiment->add_flag("--timing", timing, "record wall-clock time (output no longer reproducible)");
    add_adversary_flags(experiment);
    add_output_flags(experiment, out, true);

    auto* sweep = app.add_subcommand("sweep", "run a grid of experiments");
    sweep->add_option("--grid", grid_path, "grid JSON file")->required();
    sweep->add_flag("--timing", timing, "record wall-clock time");
    add_output_flags(sweep, out, true);

    auto* bounds = app.add_subcommand("bounds", "evaluate lower bounds and check the rectangle discrepancy bound");
    bounds->require_subcommand(1);
    std::size_t bn = 0;
    std::size_t br = 0;
    std::size_t bp = 1;
    std::size_t bs = 0;
    std::string beps = "0";
    std::string bbeta = "1/2";
    double bdelta = 0.0;
    double bkeps = 0.0;
    std::uint64_t samples = 10'000;
    auto* bip = bounds->add_subcommand("ip", "length lower bound for p-probe inner product");
    bip->add_option("--n", bn)->required();
    bip->add_option("--r", br)->required();
    bip->add_option("--eps", beps, "error, decimal or a/b")->required();
    bip->add_option("--p", bp)->required();
    auto* bcomm = bounds->add_subcommand("comm", "communication lower bound for inner product");
    bcomm->add_option("--n", bn)->required();
    bcomm->add_option("--r", br)->required();
    bcomm->add_option("--beta", bbeta, "advantage, decimal or a/b")->required();
    auto* bkt = bounds->add_subcommand("kt", "one-probe membership threshold on s");
    bkt->add_option("--delta", bdelta)->required();
    bkt->add_option("--eps", bkeps)->required();
    auto* bmem = bounds->add_subcommand("membership", "counting lower bound log2 B(n,s)");
    bmem->add_option("--n", bn)->required();
    bmem->add_option("--s", bs)->required();
    auto* bdisc = bounds->add_subcommand("discrepancy", "check M^T M = 2^n I and the rectangle bound");
    bdisc->add_option("--n", bn)->required();
    bdisc->add_option("--r", br)->required();
    bdisc->add_option("--samples", samples, "sampled rectangles beyond the exhaustive cap");
    bdisc->add_option("--seed", seed, "rectangle sampling seed");
    for (auto* cmd : {bip, bcomm, bkt, bmem, bdisc}) {
        add_output_flags(cmd, out, false);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << json{{"error", {{"code", "usage"}, {"message", e.what()}, {"exit_code", 2}}}}.dump() << "\n";
        return 2;
    }

    const auto strategy = [&] {
        ecds::AdversaryStrategy s;
        s.kind = ecds::adversary_kind_from_string(adversary);
        s.delta = delta;
        if (budget > 0) {
            s.budget = budget;
        }
        s.seed = seed;
        s.evaluations = evaluations;
        s.evaluation_trials = evaluation_trials;
        return s;
    };

    try {
        if (!data.empty()) {
            config.data = data;
        }
        if (*build) {
            return run_build(config, out_structure, out);
        }
        if (*decode) {
            return run_decode(structure_path, query_label, seed, out);
        }
        if (*attack) {
            return run_attack(structure_path, out_structure, strategy(), target_label, out);
        }
        if (*experiment) {
            if (structure_path.empty() && config.scheme.empty()) {
                throw UsageError("experiment needs --scheme or --structure");
            }
            config.seed = seed;
            ecds::EstimateOptions options;
            options.trials = trials;
            options.seed = seed;
            options.exact_limit = exact_limit;
            options.timing = timing;
            return run_experiment(&config, structure_path, strategy(), options, target_label, query_labels, out);
        }
        if (*sweep) {
            return run_sweep(grid_path, timing, out);
        }
        json report;
        if (*bip) {
            report = ecds::to_json(ecds::ip_ds_lower_bound(bn, br, ecds::parse_rational(beps), bp));
            report["structure_lengths"] = structure_lengths_ip(bn, br, bp);
        } else if (*bcomm) {
            report = ecds::to_json(ecds::ip_comm_lower_bound(bn, br, ecds::parse_rational(bbeta)));
        } else if (*bkt) {
            report = ecds::to_json(ecds::katz_trevisan_threshold(bdelta, bkeps));
        } else if (*bmem) {
            report = ecds::to_json(ecds::membership_trivial_lb(bn, bs));
            if (bn >= 2 && bs >= 1 && bs <= bn) {
                const auto shape = ecds::standard_bmrv_shape(bn, bs, 0.1);
                report["structure_lengths"] = {{"bmrv_eps_0.1", shape.n_prime}};
            }
        } else if (*bdisc) {
            report = ecds::to_json(ecds::discrepancy_verify(bn, br, samples, seed));
            report["exhaustive_cap"] = ecds::kExhaustiveRectangleLimit;
        }
        out.emit(pretty(report));
        return 0;
    } catch (const std::exception& e) {
        const ecds::ErrorClass c = dynamic_cast<const UsageError*>(&e) ? ecds::ErrorClass{2, "usage"}
                                                                       : ecds::classify_error(e);
        json err = {{"code", c.code}, {"message", e.what()}, {"exit_code", c.exit_code}};
        if (const auto* failure = dynamic_cast<const ecds::ConstructionFailure*>(&e)) {
            err["report"] = failure->report();
        }
        std::cerr << json{{"error", err}}.dump() << "\n";
        return c.exit_code;
    }
}
