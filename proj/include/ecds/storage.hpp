#pragma once

#include "ecds/bits.hpp"
#include "ecds/oracle.hpp"
#include "ecds/schemes.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace ecds {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A stored structure: one line of JSON header, then the packed payload
/// (position 0 in the most significant bit of the first byte).
///
/// Header keys: format, version, scheme, config (enough to rebuild the scheme),
/// length, probes, payload_bytes, build, and "corruption" (sorted positions)
/// once an attack has been applied.
struct StoredStructure {
    nlohmann::json header;
    BitString word;
};

inline constexpr const char* kStructureFormat = "ecds-structure";
inline constexpr int kStructureVersion = 1;

nlohmann::json structure_header(const Scheme& scheme);

std::string serialize_structure(const StoredStructure& stored);
/// Throws IoError on a malformed header or a truncated payload.
StoredStructure parse_structure(const std::string& bytes);

void write_structure(const std::string& path, const StoredStructure& stored);
StoredStructure read_structure(const std::string& path);

/// Rebuilds the scheme from the header and checks that the rebuilt clean
/// codeword matches the payload outside the recorded corruption.
std::unique_ptr<Scheme> rebuild_scheme(const StoredStructure& stored);

/// The recorded corruption, empty when none.
CorruptionPattern stored_corruption(const StoredStructure& stored);

} // namespace ecds
