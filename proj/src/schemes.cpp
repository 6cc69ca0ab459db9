#include "ecds/schemes.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>

namespace ecds {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b)
{
    if (a != 0 && b > kSaturated / a) {
        return kSaturated;
    }
    return a * b;
}

std::uint64_t sat_pow2(std::size_t bits)
{
    return bits >= 64 ? kSaturated : std::uint64_t{1} << bits;
}

void require(bool ok, const std::string& message)
{
    if (!ok) {
        throw InconsistentParameters(message);
    }
}

BitString parse_bits(const std::string& label, std::size_t length, const std::string& what)
{
    BitString y;
    try {
        y = BitString::from_string(label);
    } catch (const std::exception&) {
        throw std::invalid_argument(what + " must be a '0'/'1' string");
    }
    if (y.size() != length) {
        throw std::invalid_argument(what + " must have length " + std::to_string(length));
    }
    return y;
}

std::size_t parse_index(const std::string& label, std::size_t count)
{
    std::size_t used = 0;
    unsigned long long value = 0;
    try {
        value = std::stoull(label, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != label.size() || label.empty() || value >= count) {
        throw std::invalid_argument("query must be an index below " + std::to_string(count));
    }
    return static_cast<std::size_t>(value);
}

BitString single_bit(bool b)
{
    BitString out(1);
    out.set(0, b);
    return out;
}

} // namespace

nlohmann::json to_json(const SchemeConfig& c)
{
    nlohmann::json j = {{"scheme", c.scheme}, {"n", c.n},   {"s", c.s},       {"r", c.r},
                        {"p", c.p},           {"t", c.t},   {"eps", c.eps},   {"seed", c.seed}};
    if (c.data) {
        j["data"] = *c.data;
    }
    if (c.scheme == "bmrv") {
        j["n_prime"] = c.n_prime;
        j["d"] = c.d;
    }
    if (c.scheme == "composed" || c.scheme == "composed-direct") {
        j["block_size"] = c.block_size;
        j["blocks"] = c.blocks;
        j["bmrv_eps"] = c.bmrv_eps;
        j["pi_trials"] = c.pi_trials;
        j["graph_retries"] = c.graph_retries;
    }
    if (c.scheme == "bmrv") {
        j["graph_retries"] = c.graph_retries;
    }
    if (c.scheme == "equality") {
        j["code"] = c.code;
        j["code_length"] = c.code_length;
        j["max_gamma"] = c.max_gamma;
    }
    return j;
}

SchemeConfig scheme_config_from_json(const nlohmann::json& j)
{
    if (!j.is_object()) {
        throw std::invalid_argument("scheme configuration must be a JSON object");
    }
    static const std::set<std::string> known = {"scheme",     "n",         "s",             "r",    "p",
                                                "t",          "eps",       "seed",          "data", "n_prime",
                                                "d",          "block_size", "blocks",       "bmrv_eps",
                                                "pi_trials",  "graph_retries", "code",      "code_length",
                                                "max_gamma"};
    for (const auto& item : j.items()) {
        if (!known.count(item.key())) {
            throw std::invalid_argument("unknown scheme configuration key '" + item.key() + "'");
        }
    }
    SchemeConfig c;
    try {
        c.scheme = j.at("scheme").get<std::string>();
        const auto get = [&](const char* key, auto& field) {
            if (j.contains(key)) {
                field = j.at(key).get<std::decay_t<decltype(field)>>();
            }
        };
        get("n", c.n);
        get("s", c.s);
        get("r", c.r);
        get("p", c.p);
        get("t", c.t);
        get("eps", c.eps);
        get("seed", c.seed);
        if (j.contains("data")) {
            c.data = j.at("data").get<std::string>();
        }
        get("n_prime", c.n_prime);
        get("d", c.d);
        get("block_size", c.block_size);
        get("blocks", c.blocks);
        get("bmrv_eps", c.bmrv_eps);
        get("pi_trials", c.pi_trials);
        get("graph_retries", c.graph_retries);
        get("code", c.code);
        get("code_length", c.code_length);
        get("max_gamma", c.max_gamma);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad scheme configuration: ") + e.what());
    }
    return c;
}

BitString resolve_data(const SchemeConfig& config, std::size_t length, bool membership)
{
    if (config.data) {
        BitString x = parse_bits(*config.data, length, "data");
        if (membership && x.weight() > config.s) {
            throw InconsistentParameters("data has more than s ones");
        }
        return x;
    }
    SeededRandomness rng(derive_seed(config.seed, 0x64617461));
    if (!membership) {
        return rng.bits(length);
    }
    // partial Fisher-Yates over [length]
    std::vector<std::size_t> order(length);
    for (std::size_t i = 0; i < length; ++i) {
        order[i] = i;
    }
    const std::size_t ones = std::min(config.s, length);
    BitString x(length);
    for (std::size_t k = 0; k < ones; ++k) {
        const auto pick = k + static_cast<std::size_t>(rng.below(length - k));
        std::swap(order[k], order[pick]);
        x.set(order[k], true);
    }
    return x;
}

std::size_t Scheme::query_from_label(const std::string& label) const
{
    return parse_index(label, query_count());
}

VectorQueries::VectorQueries(std::size_t n, std::size_t r, std::uint64_t seed)
    : space_(std::make_shared<BoundedWeightSpace>(n, r))
{
    if (space_->size() <= kMaxEnumeratedQueries) {
        const std::uint64_t size = space_->size_u64();
        ranks_.resize(static_cast<std::size_t>(size));
        for (std::uint64_t k = 0; k < size; ++k) {
            ranks_[static_cast<std::size_t>(k)] = k;
        }
        return;
    }
    complete_ = false;
    const std::uint64_t size = space_->size() > BigInt(kSaturated) ? kSaturated : space_->size_u64();
    SeededRandomness rng(derive_seed(seed, 0x71756572));
    std::set<std::uint64_t> picked;
    while (picked.size() < kMaxEnumeratedQueries) {
        picked.insert(rng.below(size));
    }
    ranks_.assign(picked.begin(), picked.end());
}

std::size_t VectorQueries::find(const BitString& y) const
{
    if (y.size() != space_->n() || y.weight() > space_->r()) {
        throw std::invalid_argument("query outside the query space");
    }
    const std::uint64_t rank = space_->rank(y);
    const auto it = std::lower_bound(ranks_.begin(), ranks_.end(), rank);
    if (it == ranks_.end() || *it != rank) {
        throw std::invalid_argument("query is not in this instance's query set");
    }
    return static_cast<std::size_t>(it - ranks_.begin());
}

// ---- Hadamard bit ----

HadamardBitScheme::HadamardBitScheme(const SchemeConfig& config)
    : Scheme(config, BitString())
{
    require(config.n >= 1, "had-bit needs n >= 1");
    if (config.n > 26) {
        throw std::length_error("had-bit length 2^n exceeds the materialization limit (n <= 26)");
    }
    data_ = resolve_data(config, config.n, false);
    config_.data = data_.to_string();
    codeword_ = Codeword(HadamardCode(config.n).encode(data_));
}

BitString HadamardBitScheme::expected(std::size_t q) const
{
    return single_bit(data_.at(q));
}

BitString HadamardBitScheme::decode(ProbeOracle& oracle, std::size_t q, Randomness& rng) const
{
    return single_bit(had_decode_bit(oracle, data_.size(), q, rng));
}

std::uint64_t HadamardBitScheme::randomness_states(std::size_t) const
{
    return sat_pow2(data_.size());
}

// ---- Hadamard inner product ----

HadamardIpScheme::HadamardIpScheme(const SchemeConfig& config) : Scheme(config, BitString())
{
    require(config.n >= 1, "had-ip needs n >= 1");
    if (config.n > 26) {
        throw std::length_error("had-ip length 2^n exceeds the materialization limit (n <= 26)");
    }
    data_ = resolve_data(config, config.n, false);
    config_.data = data_.to_string();
    codeword_ = Codeword(HadamardCode(config.n).encode(data_));
    queries_ = VectorQueries(config.n, config.n, config.seed);
}

std::size_t HadamardIpScheme::query_from_label(const std::string& label) const
{
    return queries_.find(parse_bits(label, data_.size(), "query"));
}

BitString HadamardIpScheme::expected(std::size_t q) const
{
    return single_bit(dot_mod2(data_, queries_.at(q)));
}

BitString HadamardIpScheme::decode(ProbeOracle& oracle, std::size_t q, Randomness& rng) const
{
    return single_bit(ip_hadamard_decode(oracle, queries_.at(q), rng));
}

std::uint64_t HadamardIpScheme::randomness_states(std::size_t) const
{
    return sat_pow2(data_.size());
}

// ---- Equality ----

EqualityScheme::EqualityScheme(const SchemeConfig& config) : Scheme(config, BitString())
{
    require(config.n >= 1, "equality needs n >= 1");
    if (config.n > 16) {
        throw std::length_error("equality limited to n <= 16 (distance is verified exhaustively)");
    }
    if (config.code == "hadamard") {
        structure_ = std::make_shared<EqualityStructure>(EqualityStructure::hadamard(config.n));
    } else if (config.code == "random-linear") {
        const std::size_t length = config.code_length == 0 ? (std::size_t{1} << config.n) : config.code_length;
        if (length > kMaxMaterializedBits) {
            throw std::length_error("equality code length exceeds the materialization limit");
        }
        try {
            structure_ = std::make_shared<EqualityStructure>(EqualityStructure::random_linear(
                config.n, length, config.max_gamma, derive_seed(config.seed, 0x636f6465), config.graph_retries));
        } catch (const std::runtime_error& e) {
            throw ConstructionFailure(e.what(), {{"n", config.n},
                                                 {"code_length", length},
                                                 {"max_gamma", config.max_gamma},
                                                 {"retries", config.graph_retries}});
        }
    } else {
        throw std::invalid_argument("equality code must be 'hadamard' or 'random-linear'");
    }
    data_ = resolve_data(config, config.n, false);
    config_.data = data_.to_string();
    codeword_ = structure_->encode(data_);
    queries_ = VectorQueries(config.n, config.n, config.seed);
}

std::size_t EqualityScheme::query_from_label(const std::string& label) const
{
    return queries_.find(parse_bits(label, data_.size(), "query"));
}

BitString EqualityScheme::expected(std::size_t q) const
{
    return single_bit(queries_.at(q) == data_);
}

BitString EqualityScheme::decode(ProbeOracle& oracle, std::size_t q, Randomness& rng) const
{
    return single_bit(structure_->decode(oracle, queries_.at(q), rng));
}

std::uint64_t EqualityScheme::randomness_states(std::size_t) const
{
    return sat_mul(structure_->length(), 3);
}

nlohmann::json EqualityScheme::build_info() const
{
    return {{"code", config_.code},
            {"code_length", structure_->length()},
            {"min_distance", structure_->min_distance()},
            {"gamma", structure_->gamma()}};
}

// ---- inner-product table ----

IpTableScheme::IpTableScheme(const SchemeConfig& config) : Scheme(config, BitString())
{
    require(config.n >= 1, "ip-table needs n >= 1");
    require(config.r <= config.n, "ip-table needs r <= n");
    require(config.p >= 1, "ip-table needs p >= 1");
    layout_ = std::make_shared<IpTableLayout>(config.n, config.r, config.p);
    data_ = resolve_data(config, config.n, false);
    config_.data = data_.to_string();
    codeword_ = layout_->encode(data_);
    queries_ = VectorQueries(config.n, config.r, config.seed);
}

std::size_t IpTableScheme::query_from_label(const std::string& label) const
{
    return queries_.find(parse_bits(label, data_.size(), "query"));
}

BitString IpTableScheme::expected(std::size_t q) const
{
    return single_bit(dot_mod2(data_, queries_.at(q)));
}

BitString IpTableScheme::decode(ProbeOracle& oracle, std::size_t q, Randomness&) const
{
    return single_bit(layout_->decode(oracle, queries_.at(q)));
}

nlohmann::json IpTableScheme::build_info() const
{
    return {{"chunk_weight", layout_->chunk_weight()}, {"queries_complete", queries_.complete()}};
}

// ---- polynomial inner product ----

PolyIpScheme::PolyIpScheme(const SchemeConfig& config) : Scheme(config, BitString())
{
    require(config.p >= 2, "poly-ip needs p >= 2");
    require(config.n >= 1 && config.r >= 1, "poly-ip needs n >= 1 and r >= 1");
    require(config.r <= config.n, "poly-ip needs r <= n");
    layout_ = std::make_shared<PolyIpLayout>(config.n, config.r, config.p);
    data_ = resolve_data(config, config.n, false);
    config_.data = data_.to_string();
    codeword_ = layout_->encode(data_);
    queries_ = VectorQueries(config.n, config.r, config.seed);
}

std::size_t PolyIpScheme::query_from_label(const std::string& label) const
{
    return queries_.find(parse_bits(label, data_.size(), "query"));
}

BitString PolyIpScheme::expected(std::size_t q) const
{
    return single_bit(dot_mod2(data_, queries_.at(q)));
}

BitString PolyIpScheme::decode(ProbeOracle& oracle, std::size_t q, Randomness& rng) const
{
    return single_bit(layout_->decode(oracle, queries_.at(q), rng));
}

std::uint64_t PolyIpScheme::randomness_states(std::size_t) const
{
    return sat_pow2(layout_->table_inputs());
}

nlohmann::json PolyIpScheme::build_info() const
{
    return {{"m", layout_->m()},
            {"degree", layout_->degree()},
            {"table_inputs", layout_->table_inputs()},
            {"monomials", layout_->monomials().size()}};
}

// ---- substring ----

SubstringScheme::SubstringScheme(const SchemeConfig& config) : Scheme(config, BitString())
{
    require(config.n >= 1 && config.r >= 1, "substring needs n >= 1 and r >= 1");
    require(config.r <= config.n, "substring needs r <= n");
    require(config.t % 2 == 1, "substring needs an odd repetition count t");
    layout_ = std::make_shared<SubstringLayout>(config.n, config.r);
    data_ = resolve_data(config, config.n, false);
    config_.data = data_.to_string();
    codeword_ = layout_->encode(data_);
    queries_ = VectorQueries(config.n, config.r, config.seed);
}

std::size_t SubstringScheme::probes() const
{
    return SubstringLayout::budget(config_.r, config_.t);
}

std::size_t SubstringScheme::probes_for(std::size_t q) const
{
    return SubstringLayout::budget(queries_.at(q).weight(), config_.t);
}

std::size_t SubstringScheme::query_from_label(const std::string& label) const
{
    return queries_.find(parse_bits(label, data_.size(), "query"));
}

BitString SubstringScheme::expected(std::size_t q) const
{
    return extract_substring(data_, queries_.at(q));
}

BitString SubstringScheme::decode(ProbeOracle& oracle, std::size_t q, Randomness& rng) const
{
    return layout_->decode(oracle, queries_.at(q), config_.t, rng);
}

std::uint64_t SubstringScheme::randomness_states(std::size_t q) const
{
    std::uint64_t states = 1;
    const std::uint64_t per_run = sat_pow2(layout_->piece_bits());
    const std::size_t runs = config_.t * queries_.at(q).weight();
    for (std::size_t k = 0; k < runs && states != kSaturated; ++k) {
        states = sat_mul(states, per_run);
    }
    return states;
}

nlohmann::json SubstringScheme::build_info() const
{
    return {{"piece_bits", layout_->piece_bits()}, {"piece_length", layout_->piece_length()}};
}

// ---- one-probe membership ----

BmrvScheme::BmrvScheme(const SchemeConfig& config) : Scheme(config, BitString())
{
    require(config.n >= 2, "bmrv needs n >= 2");
    require(config.s <= config.n, "bmrv needs s <= n");
    require(config.eps > 0.0 && config.eps < 1.0, "bmrv needs 0 < eps < 1");
    require((config.n_prime == 0) == (config.d == 0), "bmrv shape needs both n_prime and d, or neither");
    std::optional<BmrvShape> shape;
    if (config.n_prime != 0) {
        require(config.d <= config.n_prime, "bmrv needs d <= n_prime");
        shape = BmrvShape{config.n_prime, config.d};
    }
    const BmrvShape resolved = shape ? *shape : standard_bmrv_shape(config.n, config.s, config.eps);
    if (resolved.n_prime > kMaxMaterializedBits) {
        throw std::length_error("bmrv length n' = " + std::to_string(resolved.n_prime) +
                                " exceeds the materialization limit");
    }
    build_ = std::make_shared<BmrvBuild>(
        bmrv_build(config.n, config.s, config.eps, config.seed, shape, config.graph_retries));
    config_.n_prime = build_->structure.n_prime();
    config_.d = build_->structure.d();
    data_ = resolve_data(config, config.n, true);
    config_.data = data_.to_string();
    codeword_ = Codeword(bmrv_encode(build_->structure, data_).y);
}

BitString BmrvScheme::expected(std::size_t q) const
{
    return single_bit(data_.at(q));
}

BitString BmrvScheme::decode(ProbeOracle& oracle, std::size_t q, Randomness& rng) const
{
    return single_bit(bmrv_decode(oracle, build_->structure, q, rng));
}

std::uint64_t BmrvScheme::randomness_states(std::size_t) const
{
    return build_->structure.d();
}

nlohmann::json BmrvScheme::build_info() const
{
    return {{"n_prime", build_->structure.n_prime()},
            {"d", build_->structure.d()},
            {"attempts", build_->attempts},
            {"verification", to_json(build_->verification)}};
}

// ---- composed membership ----

ComposedScheme::ComposedScheme(const SchemeConfig& config, bool direct) : Scheme(config, BitString()), direct_(direct)
{
    require(config.n >= 1 && config.s >= 1, "composed membership needs n >= 1 and s >= 1");
    require(config.s <= config.n, "composed membership needs s <= n");
    ComposedParams params;
    params.n = config.n;
    params.s = config.s;
    params.block_size = config.block_size;
    params.blocks = config.blocks;
    params.bmrv_eps = config.bmrv_eps;
    params.seed = config.seed;
    params.graph_retries = config.graph_retries;
    params.pi_trials = config.pi_trials;
    const ComposedParams resolved = params.resolved();
    if (sat_mul(resolved.blocks, sat_pow2(resolved.block_size)) > kMaxMaterializedBits) {
        throw std::length_error("composed membership length b * 2^a exceeds the materialization limit");
    }
    build_ = std::make_shared<ComposedBuild>(composed_build(params));
    config_.block_size = build_->params.block_size;
    config_.blocks = build_->params.blocks;
    data_ = resolve_data(config, config.n, true);
    config_.data = data_.to_string();
    codeword_ = build_->structure.encode(data_);
}

BitString ComposedScheme::expected(std::size_t q) const
{
    return single_bit(data_.at(q));
}

BitString ComposedScheme::decode(ProbeOracle& oracle, std::size_t q, Randomness& rng) const
{
    const auto& cm = build_->structure;
    return single_bit(direct_ ? cm.decode_direct(oracle, q, rng) : cm.decode_block(oracle, q, rng));
}

std::uint64_t ComposedScheme::randomness_states(std::size_t) const
{
    const auto& cm = build_->structure;
    const std::uint64_t inner = std::max<std::uint64_t>(2, sat_pow2(cm.block_size()));
    return sat_mul(direct_ ? cm.bmrv().d() : cm.blocks(), inner);
}

nlohmann::json ComposedScheme::build_info() const
{
    return build_report(*build_);
}

const std::vector<std::string>& scheme_ids()
{
    static const std::vector<std::string> ids = {"had-bit",   "had-ip", "equality", "ip-table",       "poly-ip",
                                                 "substring", "bmrv",   "composed", "composed-direct"};
    return ids;
}

std::unique_ptr<Scheme> make_scheme(const SchemeConfig& config)
{
    const std::string& id = config.scheme;
    if (id == "had-bit") {
        return std::make_unique<HadamardBitScheme>(config);
    }
    if (id == "had-ip") {
        return std::make_unique<HadamardIpScheme>(config);
    }
    if (id == "equality") {
        return std::make_unique<EqualityScheme>(config);
    }
    if (id == "ip-table") {
        return std::make_unique<IpTableScheme>(config);
    }
    if (id == "poly-ip") {
        return std::make_unique<PolyIpScheme>(config);
    }
    if (id == "substring") {
        return std::make_unique<SubstringScheme>(config);
    }
    if (id == "bmrv") {
        return std::make_unique<BmrvScheme>(config);
    }
    if (id == "composed") {
        return std::make_unique<ComposedScheme>(config, false);
    }
    if (id == "composed-direct") {
        return std::make_unique<ComposedScheme>(config, true);
    }
    throw std::invalid_argument("unknown scheme '" + id + "'");
}

} // namespace ecds
