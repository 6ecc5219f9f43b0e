#include "q2m/engine.hpp"

#include <algorithm>
#include <cctype>

namespace q2m {

LinkMode parse_link_mode(std::string_view text) {
    if (text == "naming") {
        return LinkMode::Naming;
    }
    if (text == "oid") {
        return LinkMode::ObjectId;
    }
    if (text == "off") {
        return LinkMode::Off;
    }
    throw std::invalid_argument("unknown link mode '" + std::string(text) + "'");
}

const char *to_string(LinkMode mode) {
    switch (mode) {
    case LinkMode::Naming:
        return "naming";
    case LinkMode::ObjectId:
        return "oid";
    case LinkMode::Off:
        return "off";
    }
    return "?";
}

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

bool is_identifier_type(const TypeDescriptor &t) {
    return t.kind() == TypeDescriptor::Kind::String || t.kind() == TypeDescriptor::Kind::Integer ||
           t.kind() == TypeDescriptor::Kind::ObjectId;
}

// Collection named by `stem` in singular or plural form.
std::optional<std::string> match_collection(std::string_view stem, const std::set<std::string> &collections) {
    const std::string s = lower(stem);
    if (s.empty()) {
        return std::nullopt;
    }
    std::vector<std::string> forms{s, s + "s", s + "es"};
    if (s.size() > 1 && s.back() == 's') {
        forms.push_back(s.substr(0, s.size() - 1));
    }
    if (s.size() > 1 && s.back() == 'y') {
        forms.push_back(s.substr(0, s.size() - 1) + "ies");
    }
    if (s.size() > 3 && s.ends_with("ies")) {
        forms.push_back(s.substr(0, s.size() - 3) + "y");
    }
    for (const auto &name : collections) {
        if (std::find(forms.begin(), forms.end(), lower(name)) != forms.end()) {
            return name;
        }
    }
    return std::nullopt;
}

// Stem of an identifier-style field name: doctor_id, doctorId, antecedent_ids.
std::string_view id_stem(std::string_view segment) {
    const std::string l = lower(segment);
    for (std::string_view suffix : {"_ids", "_id", "ids", "id"}) {
        if (l.size() > suffix.size() && l.ends_with(suffix)) {
            return segment.substr(0, segment.size() - suffix.size());
        }
    }
    return {};
}

} // namespace

std::optional<TypeDescriptor> detect_reference(const AttrPath &path, const TypeDescriptor &type,
                                               const std::set<std::string> &collections, LinkMode mode) {
    if (mode == LinkMode::Off || path.empty()) {
        return std::nullopt;
    }
    bool multivalued = false;
    TypeDescriptor::Kind id_kind;
    if (is_identifier_type(type)) {
        id_kind = type.kind();
    } else if (type.kind() == TypeDescriptor::Kind::Array &&
               std::all_of(type.elements().begin(), type.elements().end(), is_identifier_type)) {
        multivalued = true;
        id_kind = type.elements().size() == 1 ? type.elements().front().kind() : TypeDescriptor::Kind::Array;
    } else {
        return std::nullopt;
    }

    const std::string segment = path.last_segment();
    if (auto target = match_collection(id_stem(segment), collections)) {
        return TypeDescriptor::reference(*target, multivalued);
    }
    if (mode != LinkMode::ObjectId || id_kind != TypeDescriptor::Kind::ObjectId) {
        return std::nullopt;
    }
    std::string name = segment;
    if (name == "_id" && path.has_parent()) {
        AttrPath owner = path.parent();
        while (owner.str().ends_with(AttrPath::kElementMarker)) {
            owner = owner.parent();
            multivalued = true;
        }
        name = owner.last_segment();
    }
    if (auto target = match_collection(name, collections)) {
        return TypeDescriptor::reference(*target, multivalued);
    }
    return std::nullopt;
}

SchemaModel link_model(const SchemaModel &model, LinkMode mode) {
    if (mode == LinkMode::Off) {
        return model;
    }
    std::set<std::string> names;
    for (const auto &[name, schema] : model.collections) {
        names.insert(name);
    }
    SchemaModel linked;
    linked.id = model.id;
    for (const auto &[name, schema] : model.collections) {
        auto &attributes = linked.collections[name].attributes;
        for (const auto &[path, types] : schema.attributes) {
            auto &out = attributes[path];
            for (const auto &type : types) {
                auto ref = detect_reference(path, type, names, mode);
                out.insert(ref ? *ref : type);
            }
        }
    }
    return linked;
}

std::string export_snapshot(const EngineState &state, LinkMode mode) { return export_model(link_model(state.model, mode)); }

} // namespace q2m
