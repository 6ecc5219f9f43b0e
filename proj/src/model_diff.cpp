#include "q2m/schema_state.hpp"
#include "state_json.hpp"

#include <algorithm>
#include <iterator>

namespace q2m {

using nlohmann::json;

namespace {

std::vector<TypeDescriptor> to_vector(const TypeSet &types) { return {types.begin(), types.end()}; }

std::string type_list(const std::vector<TypeDescriptor> &types, const char *sign = "") {
    std::string out;
    for (std::size_t i = 0; i < types.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        out += sign;
        out += types[i].name();
    }
    return out;
}

json types_json(const std::vector<TypeDescriptor> &types) {
    json out = json::array();
    for (const auto &t : types) {
        out.push_back(detail::type_to_json(t));
    }
    return out;
}

} // namespace

ModelDiff diff_models(const SchemaModel &a, const SchemaModel &b) {
    ModelDiff diff;
    static const CollectionSchema kEmpty;
    std::set<std::string> names;
    for (const auto &[name, schema] : a.collections) {
        names.insert(name);
    }
    for (const auto &[name, schema] : b.collections) {
        names.insert(name);
    }
    for (const auto &name : names) {
        auto ia = a.collections.find(name);
        auto ib = b.collections.find(name);
        const bool in_a = ia != a.collections.end();
        const bool in_b = ib != b.collections.end();
        if (!in_a) {
            diff.added_collections.push_back(name);
        } else if (!in_b) {
            diff.removed_collections.push_back(name);
        }
        const auto &attrs_a = in_a ? ia->second.attributes : kEmpty.attributes;
        const auto &attrs_b = in_b ? ib->second.attributes : kEmpty.attributes;

        for (const auto &[path, types] : attrs_a) {
            auto other = attrs_b.find(path);
            if (other == attrs_b.end()) {
                diff.removed_attributes.push_back({name, path, to_vector(types)});
                continue;
            }
            TypeDelta delta{name, path, {}, {}};
            std::set_difference(other->second.begin(), other->second.end(), types.begin(), types.end(),
                                std::back_inserter(delta.added));
            std::set_difference(types.begin(), types.end(), other->second.begin(), other->second.end(),
                                std::back_inserter(delta.removed));
            if (!delta.added.empty() || !delta.removed.empty()) {
                diff.changed_attributes.push_back(std::move(delta));
            }
        }
        for (const auto &[path, types] : attrs_b) {
            if (!attrs_a.contains(path)) {
                diff.added_attributes.push_back({name, path, to_vector(types)});
            }
        }
    }
    return diff;
}

SchemaModel apply_diff(SchemaModel model, const ModelDiff &diff) {
    for (const auto &name : diff.removed_collections) {
        model.collections.erase(name);
    }
    for (const auto &change : diff.removed_attributes) {
        auto coll = model.collections.find(change.collection);
        if (coll != model.collections.end()) {
            coll->second.attributes.erase(change.path);
        }
    }
    for (const auto &change : diff.added_attributes) {
        auto &types = model.collections[change.collection].attributes[change.path];
        types.insert(change.types.begin(), change.types.end());
    }
    for (const auto &delta : diff.changed_attributes) {
        auto &types = model.collections[delta.collection].attributes[delta.path];
        for (const auto &t : delta.removed) {
            types.erase(t);
        }
        types.insert(delta.added.begin(), delta.added.end());
    }
    return model;
}

std::string diff_to_text(const ModelDiff &diff) {
    std::string out;
    for (const auto &name : diff.added_collections) {
        out += "+ collection " + name + "\n";
    }
    for (const auto &name : diff.removed_collections) {
        out += "- collection " + name + "\n";
    }
    for (const auto &c : diff.added_attributes) {
        out += "+ " + c.collection + " " + c.path.str() + " [" + type_list(c.types) + "]\n";
    }
    for (const auto &c : diff.removed_attributes) {
        out += "- " + c.collection + " " + c.path.str() + " [" + type_list(c.types) + "]\n";
    }
    for (const auto &d : diff.changed_attributes) {
        std::string changes = type_list(d.added, "+");
        if (!d.added.empty() && !d.removed.empty()) {
            changes += ", ";
        }
        changes += type_list(d.removed, "-");
        out += "~ " + d.collection + " " + d.path.str() + " [" + changes + "]\n";
    }
    return out;
}

std::string diff_to_json(const ModelDiff &diff) {
    auto changes = [](const std::vector<AttributeChange> &list) {
        json out = json::array();
        for (const auto &c : list) {
            out.push_back({{"collection", c.collection}, {"path", c.path.str()}, {"types", types_json(c.types)}});
        }
        return out;
    };
    json deltas = json::array();
    for (const auto &d : diff.changed_attributes) {
        deltas.push_back({{"collection", d.collection},
                          {"path", d.path.str()},
                          {"added", types_json(d.added)},
                          {"removed", types_json(d.removed)}});
    }
    json out = {{"added_collections", diff.added_collections},
                {"removed_collections", diff.removed_collections},
                {"added_attributes", changes(diff.added_attributes)},
                {"removed_attributes", changes(diff.removed_attributes)},
                {"changed_attributes", std::move(deltas)}};
    return out.dump(2) + "\n";
}

} // namespace q2m
