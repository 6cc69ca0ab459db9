#include "ecds/storage.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

namespace ecds {

nlohmann::json structure_header(const Scheme& scheme)
{
    return {{"format", kStructureFormat},
            {"version", kStructureVersion},
            {"scheme", scheme.id()},
            {"config", to_json(scheme.config())},
            {"length", scheme.length()},
            {"probes", scheme.probes()},
            {"payload_bytes", (scheme.length() + 7) / 8},
            {"build", scheme.build_info()}};
}

std::string serialize_structure(const StoredStructure& stored)
{
    nlohmann::json header = stored.header;
    header["length"] = stored.word.size();
    header["payload_bytes"] = (stored.word.size() + 7) / 8;
    std::string out = header.dump();
    out.push_back('\n');
    const auto bytes = stored.word.to_bytes();
    out.append(bytes.begin(), bytes.end());
    return out;
}

StoredStructure parse_structure(const std::string& bytes)
{
    const auto newline = bytes.find('\n');
    if (newline == std::string::npos) {
        throw IoError("structure file has no header line");
    }
    StoredStructure out;
    try {
        out.header = nlohmann::json::parse(bytes.substr(0, newline));
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("structure header is not JSON: ") + e.what());
    }
    if (!out.header.is_object() || out.header.value("format", "") != kStructureFormat) {
        throw IoError("not an ecds structure file");
    }
    if (out.header.value("version", 0) != kStructureVersion) {
        throw IoError("unsupported structure file version");
    }
    std::size_t length = 0;
    try {
        length = out.header.at("length").get<std::size_t>();
    } catch (const nlohmann::json::exception&) {
        throw IoError("structure header lacks a length");
    }
    const std::size_t payload = (length + 7) / 8;
    if (bytes.size() - newline - 1 != payload) {
        throw IoError("structure payload has " + std::to_string(bytes.size() - newline - 1) + " bytes, expected " +
                      std::to_string(payload));
    }
    std::vector<std::uint8_t> raw(bytes.begin() + static_cast<std::ptrdiff_t>(newline + 1), bytes.end());
    out.word = BitString::from_bytes(raw, length);
    return out;
}

void write_structure(const std::string& path, const StoredStructure& stored)
{
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    const std::string data = serialize_structure(stored);
    file.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!file) {
        throw IoError("failed writing '" + path + "'");
    }
}

StoredStructure read_structure(const std::string& path)
{
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    std::string data((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
    return parse_structure(data);
}

CorruptionPattern stored_corruption(const StoredStructure& stored)
{
    if (!stored.header.contains("corruption")) {
        return CorruptionPattern({}, stored.word.size());
    }
    try {
        return CorruptionPattern(stored.header.at("corruption").get<std::vector<std::size_t>>(), stored.word.size());
    } catch (const std::exception& e) {
        throw IoError(std::string("bad corruption list: ") + e.what());
    }
}

std::unique_ptr<Scheme> rebuild_scheme(const StoredStructure& stored)
{
    SchemeConfig config;
    try {
        config = scheme_config_from_json(stored.header.at("config"));
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("structure header lacks a config: ") + e.what());
    }
    auto scheme = make_scheme(config);
    if (scheme->length() != stored.word.size()) {
        throw IoError("stored payload length differs from the rebuilt structure");
    }
    if (corrupt(stored.word, stored_corruption(stored)) != scheme->codeword().bits()) {
        throw IoError("stored payload differs from the rebuilt structure outside the recorded corruption");
    }
    return scheme;
}

} // namespace ecds
