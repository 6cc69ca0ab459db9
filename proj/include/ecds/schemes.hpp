#pragma once

#include "ecds/bits.hpp"
#include "ecds/hadamard.hpp"
#include "ecds/inner_product.hpp"
#include "ecds/membership.hpp"
#include "ecds/oracle.hpp"
#include "ecds/random.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ecds {

/// Parameters that determine a scheme instance completely. Zero means
/// "derive the default" for the fields documented as such.
struct SchemeConfig {
    std::string scheme;
    std::size_t n = 0;
    std::size_t s = 0;
    std::size_t r = 0;
    std::size_t p = 0;
    /// Substring repetitions per bit (odd).
    std::size_t t = 1;
    double eps = 0.1;
    std::uint64_t seed = 1;
    /// Stored data as a '0'/'1' string; derived from the seed when absent.
    std::optional<std::string> data;

    // one-probe membership shape overrides (both or neither)
    std::size_t n_prime = 0;
    std::size_t d = 0;

    // composed membership
    std::size_t block_size = 0;
    std::size_t blocks = 0;
    double bmrv_eps = 0.35;
    std::size_t pi_trials = 256;
    std::size_t graph_retries = 64;

    // equality: "hadamard" or "random-linear"
    std::string code = "hadamard";
    std::size_t code_length = 0;
    double max_gamma = 0.1;
};

nlohmann::json to_json(const SchemeConfig& config);
/// Unknown keys are rejected with std::invalid_argument.
SchemeConfig scheme_config_from_json(const nlohmann::json& j);


/// A built data structure together with its data item and query set.
class Scheme {
public:
    virtual ~Scheme() = default;

    virtual std::string id() const = 0;
    /// The resolved configuration, including the data item.
    const SchemeConfig& config() const noexcept { return config_; }
    const BitString& data() const noexcept { return data_; }
    const Codeword& codeword() const noexcept { return codeword_; }
    std::size_t length() const noexcept { return codeword_.size(); }

    /// Largest probe budget over all queries.
    virtual std::size_t probes() const = 0;
    virtual std::size_t probes_for(std::size_t /*query*/) const { return probes(); }

    virtual std::size_t query_count() const = 0;
    virtual std::string query_label(std::size_t query) const = 0;
    /// Query number for a label, or std::invalid_argument.
    virtual std::size_t query_from_label(const std::string& label) const;

    virtual BitString expected(std::size_t query) const = 0;
    virtual BitString decode(ProbeOracle& oracle, std::size_t query, Randomness& rng) const = 0;
    /// Upper bound on the decoder's randomness states, saturating.
    virtual std::uint64_t randomness_states(std::size_t query) const = 0;

    /// Construction details (verification, measured distances, geometry).
    virtual nlohmann::json build_info() const { return nlohmann::json::object(); }

protected:
    Scheme(SchemeConfig config, BitString data) : config_(std::move(config)), data_(std::move(data)) {}

    SchemeConfig config_;
    BitString data_;
    Codeword codeword_;
};

/// Queries enumerated from a bounded-weight space: all of it when it has at
/// most kMaxEnumeratedQueries elements, else that many seeded ranks, sorted.
inline constexpr std::size_t kMaxEnumeratedQueries = 4096;

class VectorQueries {
public:
    VectorQueries() = default;
    VectorQueries(std::size_t n, std::size_t r, std::uint64_t seed);

    std::size_t count() const noexcept { return ranks_.size(); }
    BitString at(std::size_t q) const { return space_->unrank(ranks_.at(q)); }
    std::size_t find(const BitString& y) const;
    bool complete() const noexcept { return complete_; }

private:
    std::shared_ptr<BoundedWeightSpace> space_;
    std::vector<std::uint64_t> ranks_;
    bool complete_ = true;
};

class HadamardBitScheme final : public Scheme {
public:
    explicit HadamardBitScheme(const SchemeConfig& config);
    std::string id() const override { return "had-bit"; }
    std::size_t probes() const override { return 2; }
    std::size_t query_count() const override { return data_.size(); }
    std::string query_label(std::size_t q) const override { return std::to_string(q); }
    BitString expected(std::size_t q) const override;
    BitString decode(ProbeOracle& oracle, std::size_t q, Randomness& rng) const override;
    std::uint64_t randomness_states(std::size_t q) const override;
};

class HadamardIpScheme final : public Scheme {
public:
    explicit HadamardIpScheme(const SchemeConfig& config);
    std::string id() const override { return "had-ip"; }
    std::size_t probes() const override { return 2; }
    std::size_t query_count() const override { return queries_.count(); }
    std::string query_label(std::size_t q) const override { return queries_.at(q).to_string(); }
    std::size_t query_from_label(const std::string& label) const override;
    BitString expected(std::size_t q) const override;
    BitString decode(ProbeOracle& oracle, std::size_t q, Randomness& rng) const override;
    std::uint64_t randomness_states(std::size_t q) const override;

private:
    VectorQueries queries_;
};

class EqualityScheme final : public Scheme {
public:
    explicit EqualityScheme(const SchemeConfig& config);
    std::string id() const override { return "equality"; }
    std::size_t probes() const override { return 1; }
    std::size_t query_count() const override { return queries_.count(); }
    std::string query_label(std::size_t q) const override { return queries_.at(q).to_string(); }
    std::size_t query_from_label(const std::string& label) const override;
    BitString expected(std::size_t q) const override;
    BitString decode(ProbeOracle& oracle, std::size_t q, Randomness& rng) const override;
    std::uint64_t randomness_states(std::size_t q) const override;
    nlohmann::json build_info() const override;
    const EqualityStructure& structure() const noexcept { return *structure_; }

private:
    std::shared_ptr<EqualityStructure> structure_;
    VectorQueries queries_;
};

class IpTableScheme final : public Scheme {
public:
    explicit IpTableScheme(const SchemeConfig& config);
    std::string id() const override { return "ip-table"; }
    std::size_t probes() const override { return layout_->probes(); }
    std::size_t query_count() const override { return queries_.count(); }
    std::string query_label(std::size_t q) const override { return queries_.at(q).to_string(); }
    std::size_t query_from_label(const std::string& label) const override;
    BitString expected(std::size_t q) const override;
    BitString decode(ProbeOracle& oracle, std::size_t q, Randomness& rng) const override;
    std::uint64_t randomness_states(std::size_t) const override { return 1; }
    nlohmann::json build_info() const override;
    const IpTableLayout& layout() const noexcept { return *layout_; }

private:
    std::shared_ptr<IpTableLayout> layout_;
    VectorQueries queries_;
};

class PolyIpScheme final : public Scheme {
public:
    explicit PolyIpScheme(const SchemeConfig& config);
    std::string id() const override { return "poly-ip"; }
    std::size_t probes() const override { return layout_->probes(); }
    std::size_t query_count() const override { return queries_.count(); }
    std::string query_label(std::size_t q) const override { return queries_.at(q).to_string(); }
    std::size_t query_from_label(const std::string& label) const override;
    BitString expected(std::size_t q) const override;
    BitString decode(ProbeOracle& oracle, std::size_t q, Randomness& rng) const override;
    std::uint64_t randomness_states(std::size_t q) const override;
    nlohmann::json build_info() const override;
    const PolyIpLayout& layout() const noexcept { return *layout_; }

private:
    std::shared_ptr<PolyIpLayout> layout_;
    VectorQueries queries_;
};

class SubstringScheme final : public Scheme {
public:
    explicit SubstringScheme(const SchemeConfig& config);
    std::string id() const override { return "substring"; }
    std::size_t probes() const override;
    std::size_t probes_for(std::size_t q) const override;
    std::size_t query_count() const override { return queries_.count(); }
    std::string query_label(std::size_t q) const override { return queries_.at(q).to_string(); }
    std::size_t query_from_label(const std::string& label) const override;
    BitString expected(std::size_t q) const override;
    BitString decode(ProbeOracle& oracle, std::size_t q, Randomness& rng) const override;
    std::uint64_t randomness_states(std::size_t q) const override;
    nlohmann::json build_info() const override;
    const SubstringLayout& layout() const noexcept { return *layout_; }
    BitString query(std::size_t q) const { return queries_.at(q); }

private:
    std::shared_ptr<SubstringLayout> layout_;
    VectorQueries queries_;
};

class BmrvScheme final : public Scheme {
public:
    explicit BmrvScheme(const SchemeConfig& config);
    std::string id() const override { return "bmrv"; }
    std::size_t probes() const override { return 1; }
    std::size_t query_count() const override { return data_.size(); }
    std::string query_label(std::size_t q) const override { return std::to_string(q); }
    BitString expected(std::size_t q) const override;
    BitString decode(ProbeOracle& oracle, std::size_t q, Randomness& rng) const override;
    std::uint64_t randomness_states(std::size_t q) const override;
    nlohmann::json build_info() const override;
    const BmrvStructure& structure() const noexcept { return build_->structure; }
    const BmrvBuild& build() const noexcept { return *build_; }

private:
    std::shared_ptr<BmrvBuild> build_;
};

/// Composed membership; `direct` selects the pick-j decoder instead of the
/// pick-a-block decoder.
class ComposedScheme final : public Scheme {
public:
    ComposedScheme(const SchemeConfig& config, bool direct);
    std::string id() const override { return direct_ ? "composed-direct" : "composed"; }
    std::size_t probes() const override { return 2; }
    std::size_t query_count() const override { return data_.size(); }
    std::string query_label(std::size_t q) const override { return std::to_string(q); }
    BitString expected(std::size_t q) const override;
    BitString decode(ProbeOracle& oracle, std::size_t q, Randomness& rng) const override;
    std::uint64_t randomness_states(std::size_t q) const override;
    nlohmann::json build_info() const override;
    const ComposedMembership& structure() const noexcept { return build_->structure; }
    const ComposedBuild& build() const noexcept { return *build_; }
    bool direct() const noexcept { return direct_; }

private:
    std::shared_ptr<ComposedBuild> build_;
    bool direct_;
};

/// Scheme identifiers accepted by make_scheme.
const std::vector<std::string>& scheme_ids();

/// Builds the scheme named by config.scheme. Throws InconsistentParameters,
/// std::invalid_argument, std::length_error (too large to materialize) or
/// ConstructionFailure.
std::unique_ptr<Scheme> make_scheme(const SchemeConfig& config);

/// The data item a config stores: config.data when present, else seeded
/// (exactly min(s, n) ones for membership schemes, uniform bits otherwise).
BitString resolve_data(const SchemeConfig& config, std::size_t length, bool membership);

} // namespace ecds
