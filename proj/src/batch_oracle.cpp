#include "q2m/batch_oracle.hpp"

#include <algorithm>

namespace q2m {

const std::vector<FlatEntry> &StoredDocument::flattened() const {
    if (!flat) {
        flat = flatten_fields(fields);
    }
    return *flat;
}

const Fields *MaterializedStore::find(const std::string &collection, const DocumentId &id) const {
    auto coll = collections.find(collection);
    if (coll == collections.end()) {
        return nullptr;
    }
    auto doc = coll->second.find(id);
    return doc == coll->second.end() ? nullptr : &doc->second.fields;
}

std::size_t MaterializedStore::document_count() const {
    std::size_t n = 0;
    for (const auto &[name, docs] : collections) {
        n += docs.size();
    }
    return n;
}

namespace {

// Walks to the document holding the last segment of `segments`. With
// `create`, absent intermediate levels become empty documents.
Fields *navigate(Fields &root, const std::vector<std::string> &segments, bool create) {
    Fields *current = &root;
    for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
        Value *next = find_field(*current, segments[i]);
        if (next == nullptr) {
            if (!create) {
                return nullptr;
            }
            current->push_back({segments[i], Value(Fields{})});
            current = &current->back().value.as_document();
        } else if (next->is_document()) {
            current = &next->as_document();
        } else {
            return nullptr;
        }
    }
    return current;
}

Fields::iterator field_iter(Fields &fields, const std::string &name) {
    return std::find_if(fields.begin(), fields.end(), [&name](const Field &f) { return f.name == name; });
}

void update_document(Fields &doc, const UpdateOp &op, std::vector<std::string> &warnings) {
    const AttrPath &path = op_path(op);
    if (path.crosses_array()) {
        warnings.push_back("array element path '" + path.str() + "' skipped");
        return;
    }
    const auto segments = path.segments();
    const std::string &last = segments.back();

    if (const auto *set = std::get_if<SetField>(&op)) {
        Fields *parent = navigate(doc, segments, true);
        if (parent == nullptr) {
            warnings.push_back("cannot set '" + path.str() + "' through a non-document");
            return;
        }
        if (Value *existing = find_field(*parent, last)) {
            *existing = set->value;
        } else {
            parent->push_back({last, set->value});
        }
        return;
    }

    Fields *parent = navigate(doc, segments, false);
    auto it = parent == nullptr ? Fields::iterator{} : field_iter(*parent, last);
    if (parent == nullptr || it == parent->end()) {
        warnings.push_back("absent field '" + path.str() + "' skipped");
        return;
    }
    if (std::holds_alternative<UnsetField>(op)) {
        parent->erase(it);
        return;
    }
    const auto &new_name = std::get<RenameField>(op).new_name;
    Value moved = std::move(it->value);
    parent->erase(it);
    auto target = field_iter(*parent, new_name);
    if (target != parent->end()) {
        parent->erase(target);
    }
    parent->push_back({new_name, std::move(moved)});
}

} // namespace

ReplayOutcome replay_query(MaterializedStore &store, const MutationQuery &query) {
    ReplayOutcome outcome;
    if (const auto *insert = std::get_if<InsertQuery>(&query)) {
        DocumentId id = insert->id ? *insert->id : generated_id(store.applied_count);
        auto &docs = store.collections[insert->collection];
        if (docs.contains(id)) {
            outcome.error = "duplicate document id " + id.text;
            if (docs.empty()) {
                store.collections.erase(insert->collection);
            }
            return outcome;
        }
        docs.emplace(std::move(id), StoredDocument{insert->fields, std::nullopt});
    } else if (const auto *del = std::get_if<DeleteQuery>(&query)) {
        auto coll = store.collections.find(del->collection);
        if (coll == store.collections.end() || coll->second.erase(del->id) == 0) {
            outcome.warnings.push_back("delete of unknown document " + del->id.text);
        } else if (coll->second.empty()) {
            store.collections.erase(coll);
        }
    } else {
        const auto &update = std::get<UpdateQuery>(query);
        auto coll = store.collections.find(update.collection);
        StoredDocument *doc = nullptr;
        if (coll != store.collections.end()) {
            auto it = coll->second.find(update.id);
            doc = it == coll->second.end() ? nullptr : &it->second;
        }
        if (doc == nullptr) {
            outcome.warnings.push_back("update of unknown document " + update.id.text);
        } else {
            for (const auto &op : update.ops) {
                update_document(doc->fields, op, outcome.warnings);
            }
            doc->flat.reset();
        }
    }
    ++store.applied_count;
    return outcome;
}

MaterializedStore replay_documents(const std::vector<MutationQuery> &queries) {
    MaterializedStore store;
    for (const auto &q : queries) {
        replay_query(store, q);
    }
    return store;
}

SchemaModel extract_schema_batch(const MaterializedStore &store, LinkMode links) {
    SchemaModel model;
    for (const auto &[name, docs] : store.collections) {
        std::map<AttrPath, TypeSet> attributes;
        for (const auto &[id, doc] : docs) {
            for (const auto &entry : doc.flattened()) {
                attributes[entry.path].insert(entry.type);
            }
        }
        if (!attributes.empty()) {
            model.collections[name].attributes = std::move(attributes);
        }
    }
    return link_model(model, links);
}

VerifyResult verify_log(std::istream &log, LogFormat format, const VerifyOptions &options) {
    VerifyResult result;
    EngineState state = empty_state();
    MaterializedStore store;
    LogReader reader(log, format);
    const std::size_t stride = std::max<std::size_t>(options.stride, 1);
    std::size_t last_line = 0;
    bool checked_last = true;

    auto checkpoint = [&](std::size_t line) {
        ++result.checkpoints;
        checked_last = true;
        const std::string incremental = export_snapshot(state, options.links);
        const std::string batch = export_model(extract_schema_batch(store, options.links));
        if (incremental != batch) {
            result.equivalent = false;
            result.divergence_line = line;
            result.detail = diff_to_text(diff_models(parse_model_snapshot(batch), parse_model_snapshot(incremental)));
            return false;
        }
        if (options.check_invariants) {
            if (auto problems = verify_state(state); !problems.empty()) {
                result.equivalent = false;
                result.divergence_line = line;
                result.detail = problems.front();
                return false;
            }
        }
        return true;
    };

    while (auto item = reader.next()) {
        if (item->is_error()) {
            ++result.parse_errors;
            continue;
        }
        if (!item->is_query()) {
            continue;
        }
        const auto &query = item->query();
        bool engine_rejected = false;
        try {
            apply(state, query);
        } catch (const DuplicateDocumentId &) {
            engine_rejected = true;
        }
        const bool oracle_rejected = replay_query(store, query).error.has_value();
        ++result.queries;
        if (engine_rejected != oracle_rejected) {
            result.equivalent = false;
            result.divergence_line = item->line;
            result.detail = engine_rejected ? "engine rejected a query the oracle accepted"
                                            : "oracle rejected a query the engine accepted";
            return result;
        }
        if (engine_rejected) {
            ++result.rejected;
        } else if (options.after_apply) {
            options.after_apply(state, item->line);
        }
        last_line = item->line;
        checked_last = false;
        if (result.queries % stride == 0 && !checkpoint(item->line)) {
            return result;
        }
    }
    if (!checked_last) {
        checkpoint(last_line);
    } else if (result.queries == 0) {
        checkpoint(0);
    }
    return result;
}

} // namespace q2m
