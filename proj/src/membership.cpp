#include "ecds/membership.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>

namespace ecds {

BmrvShape standard_bmrv_shape(std::size_t n, std::size_t s, double eps)
{
    if (n < 2 || eps <= 0.0 || eps >= 1.0) {
        throw std::invalid_argument("standard_bmrv_shape: need n >= 2 and 0 < eps < 1");
    }
    const double log_n = std::log2(static_cast<double>(n));
    // small slack so that exact products such as 10000 * 2 * 6 do not round up
    const auto ceil_tol = [](double v) { return static_cast<std::size_t>(std::ceil(v - 1e-9 * v)); };
    return {ceil_tol(100.0 / (eps * eps) * static_cast<double>(s) * log_n), ceil_tol(log_n / eps)};
}

BmrvStructure::BmrvStructure(std::size_t n, std::size_t s, double eps, std::size_t n_prime,
                             std::vector<std::vector<std::uint32_t>> probe_sets, std::uint64_t seed)
    : n_(n), s_(s), eps_(eps), n_prime_(n_prime), d_(0), sets_(std::move(probe_sets)), seed_(seed)
{
    if (sets_.size() != n_ || n_ == 0) {
        throw std::invalid_argument("BMRV structure needs one probe set per index");
    }
    if (s_ > n_) {
        throw std::invalid_argument("BMRV structure needs s <= n");
    }
    d_ = sets_.front().size();
    if (d_ == 0 || d_ > n_prime_) {
        throw std::invalid_argument("BMRV probe sets must be non-empty subsets of [n']");
    }
    for (auto& set : sets_) {
        std::sort(set.begin(), set.end());
        if (set.size() != d_ || std::adjacent_find(set.begin(), set.end()) != set.end() ||
            set.back() >= n_prime_) {
            throw std::invalid_argument("BMRV probe sets must hold d distinct positions below n'");
        }
    }
}

BmrvStructure BmrvStructure::sample(std::size_t n, std::size_t s, double eps, BmrvShape shape, Randomness& rng,
                                    std::uint64_t seed)
{
    if (shape.d == 0 || shape.d > shape.n_prime) {
        throw std::invalid_argument("BMRV shape needs 1 <= d <= n'");
    }
    std::vector<std::vector<std::uint32_t>> sets(n);
    for (auto& set : sets) {
        // Floyd's sampler: d distinct positions, uniform over d-subsets
        std::set<std::uint32_t> chosen;
        for (std::size_t j = shape.n_prime - shape.d; j < shape.n_prime; ++j) {
            const auto t = static_cast<std::uint32_t>(rng.below(j + 1));
            if (!chosen.insert(t).second) {
                chosen.insert(static_cast<std::uint32_t>(j));
            }
        }
        set.assign(chosen.begin(), chosen.end());
    }
    return BmrvStructure(n, s, eps, shape.n_prime, std::move(sets), seed);
}

std::size_t BmrvStructure::tolerated_misses() const noexcept
{
    const double raw = eps_ * static_cast<double>(d_);
    return static_cast<std::size_t>(std::floor(raw + 1e-9 * std::max(1.0, raw)));
}

namespace {

std::vector<std::vector<std::uint32_t>> owners_by_position(const BmrvStructure& st)
{
    std::vector<std::vector<std::uint32_t>> owners(st.n_prime());
    for (std::size_t i = 0; i < st.n(); ++i) {
        for (auto j : st.probe_set(i)) {
            owners[j].push_back(static_cast<std::uint32_t>(i));
        }
    }
    return owners;
}

/// Largest |P_i intersect (union of up to `depth_left` chosen sets)| by branch and bound.
struct CoverSearch {
    std::size_t words;
    const std::vector<std::uint64_t>* masks;  // candidate c occupies [c*words, (c+1)*words)
    const std::vector<std::size_t>* weights;  // popcounts, non-increasing
    std::size_t best = 0;
    std::vector<std::size_t> stack;
    std::vector<std::size_t> best_stack;

    void run(std::size_t start, std::size_t depth_left, const std::vector<std::uint64_t>& current,
             std::size_t current_weight)
    {
        if (current_weight > best) {
            best = current_weight;
            best_stack = stack;
        }
        if (depth_left == 0) {
            return;
        }
        std::vector<std::uint64_t> next(words);
        for (std::size_t c = start; c < weights->size(); ++c) {
            if (current_weight + (*weights)[c] * depth_left <= best) {
                break;
            }
            std::size_t w = 0;
            for (std::size_t k = 0; k < words; ++k) {
                next[k] = current[k] | (*masks)[c * words + k];
                w += static_cast<std::size_t>(std::popcount(next[k]));
            }
            stack.push_back(c);
            run(c + 1, depth_left - 1, next, w);
            stack.pop_back();
        }
    }
};

void verify_exhaustive(const BmrvStructure& st, BmrvVerification& out)
{
    const auto owners = owners_by_position(st);
    const std::size_t d = st.d();
    const std::size_t words = (d + 63) / 64;
    std::vector<std::uint64_t> dense(st.n() * words, 0);
    std::vector<std::size_t> touched;
    std::vector<char> seen(st.n(), 0);

    for (std::size_t i = 0; i < st.n(); ++i) {
        const auto& set = st.probe_set(i);
        for (std::size_t slot = 0; slot < d; ++slot) {
            for (auto k : owners[set[slot]]) {
                if (k == i) {
                    continue;
                }
                if (!seen[k]) {
                    seen[k] = 1;
                    touched.push_back(k);
                }
                dense[k * words + slot / 64] |= std::uint64_t{1} << (slot % 64);
            }
        }
        std::vector<std::pair<std::size_t, std::size_t>> order;  // (weight, k)
        for (auto k : touched) {
            std::size_t w = 0;
            for (std::size_t t = 0; t < words; ++t) {
                w += static_cast<std::size_t>(std::popcount(dense[k * words + t]));
            }
            order.emplace_back(w, k);
        }
        std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first > b.first : a.second < b.second;
        });
        std::vector<std::uint64_t> masks(order.size() * words);
        std::vector<std::size_t> weights(order.size());
        for (std::size_t c = 0; c < order.size(); ++c) {
            weights[c] = order[c].first;
            std::copy_n(dense.begin() + static_cast<std::ptrdiff_t>(order[c].second * words), words,
                        masks.begin() + static_cast<std::ptrdiff_t>(c * words));
        }
        CoverSearch search{words, &masks, &weights, 0, {}, {}};
        search.run(0, st.s(), std::vector<std::uint64_t>(words, 0), 0);

        out.min_agreement[i] = Ratio(d - search.best, d);
        if (out.min_agreement[i] < out.min_agreement[out.worst_index] || i == 0) {
            out.worst_index = i;
            out.worst_set.clear();
            for (auto c : search.best_stack) {
                out.worst_set.push_back(order[c].second);
            }
            std::sort(out.worst_set.begin(), out.worst_set.end());
        }

        for (auto k : touched) {
            seen[k] = 0;
            std::fill_n(dense.begin() + static_cast<std::ptrdiff_t>(k * words), words, 0);
        }
        touched.clear();
    }
}

void verify_sampled(const BmrvStructure& st, std::uint64_t seed, std::uint64_t samples, BmrvVerification& out)
{
    const auto owners = owners_by_position(st);
    SeededRandomness rng(derive_seed(seed, 0x76657269));
    std::vector<std::uint64_t> position_stamp(st.n_prime(), 0);
    std::vector<std::uint64_t> index_stamp(st.n(), 0);
    std::vector<std::size_t> covered(st.n(), 0);
    std::vector<std::size_t> misses_worst(st.n(), 0);
    std::vector<std::vector<std::size_t>> witness(st.n());

    for (std::uint64_t t = 1; t <= samples; ++t) {
        std::set<std::size_t> chosen;
        while (chosen.size() < st.s()) {
            chosen.insert(static_cast<std::size_t>(rng.below(st.n())));
        }
        std::vector<std::size_t> touched;
        for (auto k : chosen) {
            for (auto j : st.probe_set(k)) {
                if (position_stamp[j] == t) {
                    continue;
                }
                position_stamp[j] = t;
                for (auto i : owners[j]) {
                    if (index_stamp[i] != t) {
                        index_stamp[i] = t;
                        covered[i] = 0;
                        touched.push_back(i);
                    }
                    ++covered[i];
                }
            }
        }
        for (auto i : touched) {
            if (chosen.count(i) == 0 && covered[i] > misses_worst[i]) {
                misses_worst[i] = covered[i];
                witness[i].assign(chosen.begin(), chosen.end());
            }
        }
    }
    out.sets_checked = samples;
    for (std::size_t i = 0; i < st.n(); ++i) {
        out.min_agreement[i] = Ratio(st.d() - misses_worst[i], st.d());
        if (out.min_agreement[i] < out.min_agreement[out.worst_index]) {
            out.worst_index = i;
        }
    }
    out.worst_set = witness[out.worst_index];
}

} // namespace

BmrvVerification verify_bmrv(const BmrvStructure& st, std::uint64_t seed, std::uint64_t sample_limit)
{
    BmrvVerification out;
    const BigInt total = bounded_weight_count(st.n(), st.s());
    out.sets_total = total.str();
    out.min_agreement.assign(st.n(), Ratio(1, 1));
    if (total <= sample_limit) {
        out.exhaustive = true;
        out.sets_checked = total.convert_to<std::uint64_t>();
        verify_exhaustive(st, out);
    } else {
        verify_sampled(st, seed, sample_limit, out);
    }
    const Ratio floor_value(st.d() - std::min(st.d(), st.tolerated_misses()), st.d());
    out.passed = true;
    for (const auto& a : out.min_agreement) {
        if (a < floor_value) {
            out.passed = false;
            break;
        }
    }
    return out;
}

BmrvBuild bmrv_build(std::size_t n, std::size_t s, double eps, std::uint64_t seed, std::optional<BmrvShape> shape,
                     std::size_t retries)
{
    if (s > n) {
        throw std::invalid_argument("bmrv_build: need s <= n");
    }
    if (!(eps > 0.0 && eps < 1.0)) {
        throw std::invalid_argument("bmrv_build: need 0 < eps < 1");
    }
    const BmrvShape resolved = shape ? *shape : standard_bmrv_shape(n, std::max<std::size_t>(s, 1), eps);
    Ratio best(0, 1);
    for (std::size_t attempt = 1; attempt <= retries; ++attempt) {
        SeededRandomness rng(derive_seed(seed, 0x626d7276, attempt));
        BmrvStructure candidate = BmrvStructure::sample(n, s, eps, resolved, rng, seed);
        BmrvVerification check = verify_bmrv(candidate, derive_seed(seed, attempt));
        if (check.passed) {
            return {std::move(candidate), std::move(check), attempt};
        }
        best = std::max(best, check.min_agreement[check.worst_index]);
    }
    nlohmann::json report = {{"n", n},          {"s", s},           {"eps", eps},
                             {"n_prime", resolved.n_prime},         {"d", resolved.d},
                             {"seed", seed},    {"attempts", retries}, {"best_min_agreement", best.value()}};
    throw ConstructionFailure("one-probe membership structure failed verification in " + std::to_string(retries) +
                                  " samples",
                              std::move(report));
}

BmrvViolation::BmrvViolation(std::size_t index, const Ratio& agreement)
    : std::runtime_error("index " + std::to_string(index) + " has agreement " + agreement.to_string() +
                         ", below 1 - eps"),
      index_(index)
{
}

BmrvEncoding bmrv_encode(const BmrvStructure& st, const BitString& x)
{
    if (x.size() != st.n()) {
        throw std::invalid_argument("bmrv_encode: data length differs from the universe size");
    }
    if (x.weight() > st.s()) {
        throw std::invalid_argument("bmrv_encode: set larger than s");
    }
    BmrvEncoding out{BitString(st.n_prime()), {}};
    for (auto i : x.support()) {
        for (auto j : st.probe_set(i)) {
            out.y.set(j, true);
        }
    }
    const std::size_t d = st.d();
    const std::size_t tolerated = st.tolerated_misses();
    out.agreement.reserve(st.n());
    std::optional<std::size_t> violation;
    for (std::size_t i = 0; i < st.n(); ++i) {
        std::size_t agree = 0;
        for (auto j : st.probe_set(i)) {
            agree += out.y[j] == x[i] ? 1 : 0;
        }
        out.agreement.emplace_back(agree, d);
        if (!violation && d - agree > tolerated) {
            violation = i;
        }
    }
    if (violation) {
        throw BmrvViolation(*violation, out.agreement[*violation]);
    }
    return out;
}

bool bmrv_decode(ProbeOracle& oracle, const BmrvStructure& st, std::size_t i, Randomness& rng)
{
    const auto& set = st.probe_set(i);
    return oracle.probe(set[static_cast<std::size_t>(rng.below(set.size()))]);
}

std::vector<std::size_t> good_block_counts(const BmrvStructure& st, const std::vector<std::uint32_t>& position_of,
                                           std::size_t block_size)
{
    if (position_of.size() != st.n_prime() || block_size == 0 || st.n_prime() % block_size != 0) {
        throw std::invalid_argument("good_block_counts: permutation and block size must tile n'");
    }
    const std::size_t blocks = st.n_prime() / block_size;
    std::vector<std::size_t> out(st.n(), 0);
    std::vector<std::uint32_t> load(blocks, 0);
    for (std::size_t i = 0; i < st.n(); ++i) {
        for (auto j : st.probe_set(i)) {
            ++load[position_of[j] / block_size];
        }
        for (auto j : st.probe_set(i)) {
            auto& l = load[position_of[j] / block_size];
            if (l == 1) {
                ++out[i];
            }
            l = 0;
        }
    }
    return out;
}

ComposedParams ComposedParams::resolved() const
{
    ComposedParams out = *this;
    if (out.n == 0 || out.s == 0 || out.s > out.n) {
        throw std::invalid_argument("composed membership: need 1 <= s <= n");
    }
    if (out.universe_scale == 0) {
        throw std::invalid_argument("composed membership: universe scale must be positive");
    }
    if (out.block_size == 0) {
        out.block_size = 8 * out.s;
    }
    if (out.blocks == 0) {
        const double u = static_cast<double>(out.universe_scale * out.n);
        out.blocks = static_cast<std::size_t>(std::ceil(10.0 * std::log2(std::max(2.0, u))));
    }
    if (out.block_size > HadamardCode::kMaxMessageLength) {
        throw std::invalid_argument("composed membership: block size exceeds the inner Hadamard limit");
    }
    return out;
}

ComposedMembership::ComposedMembership(BmrvStructure bmrv, std::vector<std::uint32_t> position_of,
                                       std::size_t block_size, std::size_t n, std::vector<std::size_t> served_indices)
    : bmrv_(std::move(bmrv)),
      position_of_(std::move(position_of)),
      a_(block_size),
      b_(block_size == 0 ? 0 : bmrv_.n_prime() / block_size),
      n_(n),
      served_(std::move(served_indices)),
      inner_(block_size)
{
    if (b_ * a_ != bmrv_.n_prime() || position_of_.size() != bmrv_.n_prime()) {
        throw std::invalid_argument("composed membership: blocks must tile the permuted string");
    }
    std::vector<char> hit(position_of_.size(), 0);
    for (auto p : position_of_) {
        if (p >= hit.size() || hit[p]) {
            throw std::invalid_argument("composed membership: position map is not a permutation");
        }
        hit[p] = 1;
    }
    if (served_.size() != n_) {
        throw std::invalid_argument("composed membership: need one internal index per public index");
    }
    for (auto i : served_) {
        if (i >= bmrv_.n()) {
            throw std::invalid_argument("composed membership: served index outside the internal universe");
        }
    }
    good_blocks_ = good_block_counts(bmrv_, position_of_, a_);
}

bool ComposedMembership::is_good(std::size_t internal) const
{
    return 4 * good_blocks_.at(internal) >= b_;
}

ComposedMembership::Placement ComposedMembership::place(std::size_t bmrv_position) const
{
    const std::size_t p = position_of_.at(bmrv_position);
    return {p / a_, p % a_};
}

std::vector<std::size_t> ComposedMembership::block_loads(std::size_t i) const
{
    std::vector<std::size_t> loads(b_, 0);
    for (auto j : bmrv_.probe_set(internal_index(i))) {
        ++loads[place(j).block];
    }
    return loads;
}

BitString ComposedMembership::internal_message(const BitString& x) const
{
    if (x.size() != n_) {
        throw std::invalid_argument("composed membership: data length differs from n");
    }
    if (x.weight() > bmrv_.s()) {
        throw std::invalid_argument("composed membership: set larger than s");
    }
    BitString internal(bmrv_.n());
    for (auto i : x.support()) {
        internal.set(served_[i], true);
    }
    return internal;
}

Codeword ComposedMembership::encode(const BitString& x) const
{
    const BitString y = bmrv_encode(bmrv_, internal_message(x)).y;
    BitString permuted(y.size());
    for (auto j : y.support()) {
        permuted.set(position_of_[j], true);
    }
    const std::size_t block_len = inner_.length();
    BitString out(b_ * block_len);
    for (std::size_t k = 0; k < b_; ++k) {
        const BitString block = inner_.encode(permuted.slice(k * a_, a_));
        for (auto pos : block.support()) {
            out.set(k * block_len + pos, true);
        }
    }
    return Codeword(std::move(out));
}

bool ComposedMembership::decode_position(ProbeOracle& oracle, std::size_t bmrv_position, Randomness& rng) const
{
    const Placement where = place(bmrv_position);
    const std::size_t block_len = inner_.length();
    ProbeOracle block(oracle, where.block * block_len, block_len, 2);
    return had_decode_bit(block, a_, where.offset, rng);
}

bool ComposedMembership::decode_block(ProbeOracle& oracle, std::size_t i, Randomness& rng) const
{
    const auto& set = bmrv_.probe_set(internal_index(i));
    const auto k = static_cast<std::size_t>(rng.below(b_));
    std::size_t hits = 0;
    std::size_t found = 0;
    for (auto j : set) {
        if (position_of_[j] / a_ == k) {
            ++hits;
            found = j;
        }
    }
    if (hits != 1) {
        return rng.coin();
    }
    return decode_position(oracle, found, rng);
}

bool ComposedMembership::decode_direct(ProbeOracle& oracle, std::size_t i, Randomness& rng) const
{
    const auto& set = bmrv_.probe_set(internal_index(i));
    return decode_position(oracle, set[static_cast<std::size_t>(rng.below(set.size()))], rng);
}

ComposedBuild composed_build(const ComposedParams& params)
{
    const ComposedParams p = params.resolved();
    const std::size_t universe = p.universe_scale * p.n;
    const BmrvShape shape{p.block_size * p.blocks, p.blocks};
    BmrvBuild graph = bmrv_build(universe, p.s, p.bmrv_eps, derive_seed(p.seed, 0x67), shape, p.graph_retries);

    const std::size_t required = std::max(p.n, (universe + 19) / 20);
    std::size_t best = 0;
    for (std::size_t trial = 1; trial <= p.pi_trials; ++trial) {
        SeededRandomness rng(derive_seed(p.seed, 0x7069, trial));
        std::vector<std::uint32_t> position_of(shape.n_prime);
        std::iota(position_of.begin(), position_of.end(), 0u);
        for (std::size_t k = position_of.size(); k > 1; --k) {
            std::swap(position_of[k - 1], position_of[static_cast<std::size_t>(rng.below(k))]);
        }
        const auto counts = good_block_counts(graph.structure, position_of, p.block_size);
        std::vector<std::size_t> good;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            if (4 * counts[i] >= p.blocks) {
                good.push_back(i);
            }
        }
        best = std::max(best, good.size());
        if (good.size() >= required) {
            const std::size_t good_count = good.size();
            good.resize(p.n);
            ComposedMembership cm(std::move(graph.structure), std::move(position_of), p.block_size, p.n,
                                  std::move(good));
            return {std::move(cm), p, std::move(graph.verification), graph.attempts, trial, good_count};
        }
    }
    nlohmann::json report = {{"n", p.n},           {"s", p.s},         {"block_size", p.block_size},
                             {"blocks", p.blocks}, {"seed", p.seed},   {"pi_trials", p.pi_trials},
                             {"required_good", required},              {"best_good", best}};
    throw ConstructionFailure("no permutation reached " + std::to_string(required) + " good indices in " +
                                  std::to_string(p.pi_trials) + " trials (best " + std::to_string(best) + ")",
                              std::move(report));
}

double crowded_block_mass(const ComposedMembership& cm, std::size_t i, std::size_t threshold)
{
    std::size_t mass = 0;
    for (auto load : cm.block_loads(i)) {
        if (load >= threshold) {
            mass += load;
        }
    }
    return static_cast<double>(mass) / static_cast<double>(cm.bmrv().d());
}

nlohmann::json to_json(const BmrvVerification& v)
{
    Ratio worst = v.min_agreement.empty() ? Ratio(1, 1) : v.min_agreement[v.worst_index];
    return {{"passed", v.passed},
            {"exhaustive", v.exhaustive},
            {"sets_checked", v.sets_checked},
            {"sets_total", v.sets_total},
            {"worst_index", v.worst_index},
            {"worst_set", v.worst_set},
            {"min_agreement", worst.value()},
            {"min_agreement_exact", worst.to_string()}};
}

nlohmann::json build_report(const ComposedBuild& build)
{
    const auto& cm = build.structure;
    return {{"n", build.params.n},
            {"s", build.params.s},
            {"universe", cm.bmrv().n()},
            {"block_size", cm.block_size()},
            {"blocks", cm.blocks()},
            {"n_prime", cm.bmrv().n_prime()},
            {"d", cm.bmrv().d()},
            {"bmrv_eps", build.params.bmrv_eps},
            {"length", cm.length()},
            {"seed", build.params.seed},
            {"graph_attempts", build.graph_attempts},
            {"pi_attempts", build.pi_attempts},
            {"good_count", build.good_count},
            {"verification", to_json(build.verification)}};
}

} // namespace ecds
