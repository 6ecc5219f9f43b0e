#include "q2m/schema_state.hpp"

#include "json.hpp"
#include "state_json.hpp"

#include <algorithm>

namespace q2m {

using nlohmann::json;

const TypeSet *SchemaModel::find(const std::string &collection, const AttrPath &path) const {
    auto coll = collections.find(collection);
    if (coll == collections.end()) {
        return nullptr;
    }
    auto attr = coll->second.attributes.find(path);
    return attr == coll->second.attributes.end() ? nullptr : &attr->second;
}

std::uint64_t OccurrenceMetadata::count(const std::string &collection, const FlatEntry &entry) const {
    auto coll = collections.find(collection);
    if (coll == collections.end()) {
        return 0;
    }
    auto counter = coll->second.find(entry);
    return counter == coll->second.end() ? 0 : counter->second;
}

const Signature *DocumentSignatureStore::find(const std::string &collection, const DocumentId &id) const {
    auto coll = collections.find(collection);
    if (coll == collections.end()) {
        return nullptr;
    }
    auto doc = coll->second.find(id);
    return doc == coll->second.end() ? nullptr : &doc->second;
}

std::size_t DocumentSignatureStore::document_count() const {
    std::size_t n = 0;
    for (const auto &[name, docs] : collections) {
        n += docs.size();
    }
    return n;
}

EngineState empty_state() { return EngineState{}; }

// ---------------------------------------------------------------------------
// canonical snapshot

namespace detail {

json type_to_json(const TypeDescriptor &type) {
    if (type.kind() == TypeDescriptor::Kind::Reference) {
        json ref = json::object();
        ref["ref"] = type.target();
        ref["multi"] = type.multivalued();
        return ref;
    }
    return type.name();
}

TypeDescriptor type_from_json(const json &j) {
    if (j.is_string()) {
        return TypeDescriptor::parse(j.get<std::string>());
    }
    if (j.is_object() && j.size() == 2 && j.contains("ref") && j.contains("multi") && j["ref"].is_string() &&
        j["multi"].is_boolean()) {
        return TypeDescriptor::reference(j["ref"].get<std::string>(), j["multi"].get<bool>());
    }
    throw std::invalid_argument("invalid type descriptor " + j.dump());
}

json model_to_json(const SchemaModel &model) {
    json collections = json::array();
    for (const auto &[name, schema] : model.collections) {
        json attributes = json::array();
        for (const auto &[path, types] : schema.attributes) {
            json type_list = json::array();
            for (const auto &type : types) {
                type_list.push_back(type_to_json(type));
            }
            attributes.push_back({{"path", path.str()}, {"types", std::move(type_list)}});
        }
        collections.push_back({{"name", name}, {"attributes", std::move(attributes)}});
    }
    return {{"id", model.id}, {"collections", std::move(collections)}};
}

SchemaModel model_from_json(const json &j) {
    SchemaModel model;
    model.id = j.at("id").get<std::string>();
    for (const auto &coll : j.at("collections")) {
        const auto name = coll.at("name").get<std::string>();
        auto [it, inserted] = model.collections.try_emplace(name);
        if (!inserted) {
            throw std::invalid_argument("duplicate collection '" + name + "'");
        }
        for (const auto &attr : coll.at("attributes")) {
            auto path = AttrPath::parse(attr.at("path").get<std::string>());
            TypeSet types;
            for (const auto &t : attr.at("types")) {
                types.insert(type_from_json(t));
            }
            if (types.empty()) {
                throw std::invalid_argument("attribute '" + path.str() + "' has no types");
            }
            if (!it->second.attributes.emplace(std::move(path), std::move(types)).second) {
                throw std::invalid_argument("duplicate attribute in collection '" + name + "'");
            }
        }
    }
    return model;
}

} // namespace detail

std::string export_model(const SchemaModel &model) {
    std::string out = "{\"id\":" + json(model.id).dump() + ",\"collections\":[";
    bool first_coll = true;
    for (const auto &[name, schema] : model.collections) {
        out += first_coll ? "\n" : ",\n";
        first_coll = false;
        out += "  {\"name\":" + json(name).dump() + ",\"attributes\":[";
        bool first_attr = true;
        for (const auto &[path, types] : schema.attributes) {
            out += first_attr ? "\n" : ",\n";
            first_attr = false;
            out += "    {\"path\":" + json(path.str()).dump() + ",\"types\":[";
            bool first_type = true;
            for (const auto &type : types) {
                if (!first_type) {
                    out += ',';
                }
                first_type = false;
                if (type.kind() == TypeDescriptor::Kind::Reference) {
                    out += "{\"ref\":" + json(type.target()).dump() + ",\"multi\":" +
                           (type.multivalued() ? "true" : "false") + "}";
                } else {
                    out += json(type.name()).dump();
                }
            }
            out += "]}";
        }
        out += "]}";
    }
    out += "]}\n";
    return out;
}

SchemaModel parse_model_snapshot(std::string_view text) {
    try {
        return detail::model_from_json(json::parse(text));
    } catch (const json::exception &e) {
        throw SnapshotError(std::string("malformed model snapshot: ") + e.what());
    } catch (const std::invalid_argument &e) {
        throw SnapshotError(std::string("malformed model snapshot: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// invariants

namespace {

// Parent attribute that must carry a container type, with the kind required.
bool structural_parent(const AttrPath &path, AttrPath &parent, TypeDescriptor::Kind &required) {
    if (!path.has_parent()) {
        return false;
    }
    parent = path.parent();
    required = TypeDescriptor::Kind::Document;
    while (parent.str().ends_with(AttrPath::kElementMarker)) {
        parent = parent.parent();
        required = TypeDescriptor::Kind::Array;
    }
    return true;
}

} // namespace

std::vector<std::string> verify_state(const EngineState &state) {
    std::vector<std::string> problems;
    auto where = [](const std::string &coll, const FlatEntry &e) {
        return coll + ":" + e.path.str() + ":" + e.type.name();
    };

    for (const auto &[coll, counters] : state.metadata.collections) {
        if (counters.empty()) {
            problems.push_back("metadata keeps empty collection " + coll);
        }
        for (const auto &[entry, count] : counters) {
            if (count == 0) {
                problems.push_back("zero counter retained for " + where(coll, entry));
            }
            const auto *types = state.model.find(coll, entry.path);
            if (types == nullptr || !types->contains(entry.type)) {
                problems.push_back("counter without model pair " + where(coll, entry));
            }
        }
    }
    for (const auto &[coll, schema] : state.model.collections) {
        if (schema.attributes.empty()) {
            problems.push_back("model keeps empty collection " + coll);
        }
        for (const auto &[path, types] : schema.attributes) {
            if (types.empty()) {
                problems.push_back("empty type set for " + coll + ":" + path.str());
            }
            for (const auto &type : types) {
                if (state.metadata.count(coll, {path, type}) == 0) {
                    problems.push_back("model pair without counter " + where(coll, {path, type}));
                }
            }
            AttrPath parent;
            TypeDescriptor::Kind required{};
            if (structural_parent(path, parent, required)) {
                const auto *parent_types = schema.attributes.count(parent) ? &schema.attributes.at(parent) : nullptr;
                bool ok = parent_types != nullptr &&
                          std::any_of(parent_types->begin(), parent_types->end(),
                                      [required](const TypeDescriptor &t) { return t.kind() == required; });
                if (!ok) {
                    problems.push_back("attribute " + coll + ":" + path.str() + " lacks a container parent");
                }
            }
        }
    }

    for (const auto &[coll, docs] : state.signatures.collections) {
        CounterMap recount;
        for (const auto &[id, signature] : docs) {
            for (const auto &entry : signature) {
                ++recount[entry];
            }
        }
        auto it = state.metadata.collections.find(coll);
        static const CounterMap kNone;
        const CounterMap &stored = it == state.metadata.collections.end() ? kNone : it->second;
        if (recount != stored) {
            for (const auto &[entry, count] : recount) {
                auto s = stored.find(entry);
                std::uint64_t have = s == stored.end() ? 0 : s->second;
                if (have != count) {
                    problems.push_back("counter " + where(coll, entry) + " is " + std::to_string(have) +
                                       ", recount gives " + std::to_string(count));
                }
            }
            for (const auto &[entry, count] : stored) {
                if (!recount.contains(entry)) {
                    problems.push_back("counter " + where(coll, entry) + " is " + std::to_string(count) +
                                       ", recount gives 0");
                }
            }
        }
    }
    for (const auto &[coll, counters] : state.metadata.collections) {
        if (!state.signatures.collections.contains(coll)) {
            problems.push_back("counters for collection " + coll + " without documents");
        }
    }
    return problems;
}

} // namespace q2m
