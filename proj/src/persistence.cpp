#include "q2m/schema_state.hpp"
#include "state_json.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <system_error>

namespace q2m {

using nlohmann::json;

namespace {

std::string sha256_hex(const std::string &data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string hex;
    hex.reserve(length * 2);
    for (unsigned int i = 0; i < length; ++i) {
        hex += kHex[digest[i] >> 4];
        hex += kHex[digest[i] & 0xF];
    }
    return hex;
}

json id_to_json(const DocumentId &id) {
    switch (id.kind) {
    case DocumentId::Kind::Integer:
        return std::stoll(id.text);
    case DocumentId::Kind::ObjectId:
        return {{"$oid", id.text}};
    case DocumentId::Kind::Text:
        break;
    }
    return id.text;
}

DocumentId id_from_json(const json &j) {
    if (j.is_string()) {
        return DocumentId::of_text(j.get<std::string>());
    }
    if (j.is_number_integer()) {
        return DocumentId::of_integer(j.get<std::int64_t>());
    }
    if (j.is_object() && j.size() == 1 && j.contains("$oid")) {
        return DocumentId::of_object_id(j.at("$oid").get<std::string>());
    }
    throw std::invalid_argument("invalid document id " + j.dump());
}

json payload(const EngineState &state) {
    json metadata_collections = json::array();
    for (const auto &[name, counters] : state.metadata.collections) {
        json list = json::array();
        for (const auto &[entry, count] : counters) {
            list.push_back({{"path", entry.path.str()}, {"type", entry.type.name()}, {"count", count}});
        }
        metadata_collections.push_back({{"name", name}, {"counters", std::move(list)}});
    }

    json signatures = json::array();
    for (const auto &[name, docs] : state.signatures.collections) {
        std::vector<const SignatureMap::value_type *> ordered;
        ordered.reserve(docs.size());
        for (const auto &doc : docs) {
            ordered.push_back(&doc);
        }
        std::sort(ordered.begin(), ordered.end(), [](auto *a, auto *b) { return a->first < b->first; });
        json documents = json::array();
        for (const auto *doc : ordered) {
            json entries = json::array();
            for (const auto &entry : doc->second) {
                entries.push_back(json::array({entry.path.str(), entry.type.name()}));
            }
            documents.push_back({{"id", id_to_json(doc->first)}, {"entries", std::move(entries)}});
        }
        signatures.push_back({{"coll", name}, {"documents", std::move(documents)}});
    }

    return {{"version", kStateFormatVersion},
            {"applied", state.applied_count},
            {"model", detail::model_to_json(state.model)},
            {"metadata", {{"id", state.metadata.id}, {"collections", std::move(metadata_collections)}}},
            {"signatures", std::move(signatures)}};
}

EngineState state_from_payload(const json &j) {
    EngineState state;
    state.applied_count = j.at("applied").get<std::uint64_t>();
    state.model = detail::model_from_json(j.at("model"));

    const auto &metadata = j.at("metadata");
    state.metadata.id = metadata.at("id").get<std::string>();
    for (const auto &coll : metadata.at("collections")) {
        auto &counters = state.metadata.collections[coll.at("name").get<std::string>()];
        for (const auto &c : coll.at("counters")) {
            FlatEntry entry{AttrPath::parse(c.at("path").get<std::string>()),
                            TypeDescriptor::parse(c.at("type").get<std::string>())};
            counters[entry] = c.at("count").get<std::uint64_t>();
        }
    }

    for (const auto &coll : j.at("signatures")) {
        auto &docs = state.signatures.collections[coll.at("coll").get<std::string>()];
        for (const auto &doc : coll.at("documents")) {
            Signature signature;
            for (const auto &e : doc.at("entries")) {
                signature.push_back(
                    {AttrPath::parse(e.at(0).get<std::string>()), TypeDescriptor::parse(e.at(1).get<std::string>())});
            }
            normalize_entries(signature);
            if (!docs.emplace(id_from_json(doc.at("id")), std::move(signature)).second) {
                throw std::invalid_argument("duplicate document id in signatures");
            }
        }
    }
    return state;
}

} // namespace

std::string serialize_state(const EngineState &state) {
    json doc = payload(state);
    const std::string checksum = sha256_hex(doc.dump());
    doc["checksum"] = checksum;
    return doc.dump() + "\n";
}

EngineState deserialize_state(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception &e) {
        throw CorruptStateError(std::string("state file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("version") || !doc.contains("checksum")) {
        throw CorruptStateError("state file lacks version or checksum");
    }
    if (doc["version"] != kStateFormatVersion) {
        throw CorruptStateError("unsupported state format version " + doc["version"].dump());
    }
    const json stored = doc["checksum"];
    doc.erase("checksum");
    if (!stored.is_string() || stored.get<std::string>() != sha256_hex(doc.dump())) {
        throw CorruptStateError("state checksum mismatch");
    }
    EngineState state;
    try {
        state = state_from_payload(doc);
    } catch (const std::exception &e) {
        throw CorruptStateError(std::string("malformed state file: ") + e.what());
    }
    if (auto problems = verify_state(state); !problems.empty()) {
        throw CorruptStateError("inconsistent state file: " + problems.front());
    }
    return state;
}

void save_state(const EngineState &state, const std::filesystem::path &file) {
    const std::string text = serialize_state(state);
    auto tmp = file;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot write " + tmp.string());
        }
        out << text;
        out.flush();
        if (!out) {
            throw IoError("short write to " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, file, ec);
    if (ec) {
        throw IoError("cannot replace " + file.string() + ": " + ec.message());
    }
}

EngineState load_state(const std::filesystem::path &file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + file.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return deserialize_state(buffer.str());
}

} // namespace q2m
