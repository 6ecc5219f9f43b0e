#include "q2m/engine.hpp"

#include "json.hpp"

#include <algorithm>
#include <iterator>

namespace q2m {

const char *to_string(Rule rule) {
    static constexpr const char *kNames[] = {"R1", "R2", "R3", "R4", "R5", "R6", "R7", "R8"};
    return kNames[static_cast<int>(rule)];
}

const char *to_string(Action::Kind kind) {
    switch (kind) {
    case Action::Kind::CreateCollection:
        return "create-collection";
    case Action::Kind::RemoveCollection:
        return "remove-collection";
    case Action::Kind::AddModelType:
        return "add-pair";
    case Action::Kind::RemoveModelType:
        return "remove-pair";
    case Action::Kind::IncrementCounter:
        return "increment";
    case Action::Kind::DecrementCounter:
        return "decrement";
    case Action::Kind::SetSignature:
        return "set-signature";
    case Action::Kind::RemoveSignature:
        return "remove-signature";
    }
    return "?";
}

DocumentId generated_id(std::uint64_t applied_count) { return DocumentId::of_text("_gen" + std::to_string(applied_count)); }

namespace {

/// Model and metadata edits for one collection; every edit is reported.
class Mutator {
public:
    Mutator(EngineState &state, ApplyReport &report, const std::string &collection)
        : state_(state), report_(report), collection_(collection) {}

    void add(const FlatEntry &entry, Rule model_rule, Rule counter_rule) {
        auto [coll, created] = state_.metadata.collections.try_emplace(collection_);
        if (created) {
            state_.model.collections[collection_];
            record(Action::Kind::CreateCollection, model_rule, {});
        }
        auto &count = coll->second[entry];
        ++count;
        record(Action::Kind::IncrementCounter, counter_rule, entry, count);
        if (count == 1) {
            state_.model.collections[collection_].attributes[entry.path].insert(entry.type);
            record(Action::Kind::AddModelType, model_rule, entry);
        }
    }

    void remove(const FlatEntry &entry, Rule model_rule, Rule counter_rule) {
        auto coll = state_.metadata.collections.find(collection_);
        if (coll == state_.metadata.collections.end()) {
            throw std::logic_error("no counters for collection " + collection_);
        }
        auto counter = coll->second.find(entry);
        if (counter == coll->second.end()) {
            throw std::logic_error("no counter for " + entry.path.str() + ":" + entry.type.name());
        }
        const auto count = --counter->second;
        record(Action::Kind::DecrementCounter, counter_rule, entry, count);
        if (count > 0) {
            return;
        }
        coll->second.erase(counter);
        auto &attributes = state_.model.collections[collection_].attributes;
        auto attr = attributes.find(entry.path);
        attr->second.erase(entry.type);
        if (attr->second.empty()) {
            attributes.erase(attr);
        }
        record(Action::Kind::RemoveModelType, model_rule, entry);
        if (coll->second.empty()) {
            state_.metadata.collections.erase(coll);
            state_.model.collections.erase(collection_);
            record(Action::Kind::RemoveCollection, model_rule, {});
        }
    }

    void apply(const std::vector<FlatEntry> &removed, const std::vector<FlatEntry> &added, Rule model_rule,
               Rule counter_rule) {
        for (const auto &entry : added) {
            add(entry, model_rule, counter_rule);
        }
        for (const auto &entry : removed) {
            remove(entry, model_rule, counter_rule);
        }
    }

private:
    void record(Action::Kind kind, Rule rule, FlatEntry entry, std::uint64_t count = 0) {
        report_.actions.push_back(Action{kind, rule, collection_, std::move(entry), count, std::nullopt, {}});
    }

    EngineState &state_;
    ApplyReport &report_;
    const std::string &collection_;
};

std::vector<FlatEntry> minus(const std::vector<FlatEntry> &a, const std::vector<FlatEntry> &b) {
    std::vector<FlatEntry> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

// Entries of a sorted signature at `path` or below it. Paths below share the
// printed prefix, and all paths with that prefix form one run starting at
// `path` (siblings such as `a0` may be interleaved and are filtered out).
std::vector<FlatEntry> subtree(const Signature &signature, const AttrPath &path) {
    auto it = std::lower_bound(signature.begin(), signature.end(), path,
                               [](const FlatEntry &e, const AttrPath &p) { return e.path < p; });
    std::vector<FlatEntry> out;
    for (; it != signature.end() && it->path.str().starts_with(path.str()); ++it) {
        if (it->path.is_self_or_descendant_of(path)) {
            out.push_back(*it);
        }
    }
    return out;
}

const TypeDescriptor *type_at(const Signature &signature, const AttrPath &path) {
    auto it = std::lower_bound(signature.begin(), signature.end(), path,
                               [](const FlatEntry &e, const AttrPath &p) { return e.path < p; });
    return it != signature.end() && it->path == path ? &it->type : nullptr;
}

/// Net effect of one update op on a document signature.
struct OpPlan {
    Rule rule;
    std::vector<FlatEntry> removed;
    std::vector<FlatEntry> added;
};

void replace_entries(Signature &signature, const std::vector<FlatEntry> &removed, const std::vector<FlatEntry> &added) {
    Signature next = minus(signature, removed);
    next.insert(next.end(), added.begin(), added.end());
    normalize_entries(next);
    signature = std::move(next);
}

OpPlan net_plan(Rule rule, std::vector<FlatEntry> removed, std::vector<FlatEntry> added) {
    normalize_entries(removed);
    normalize_entries(added);
    return {rule, minus(removed, added), minus(added, removed)};
}

std::optional<OpPlan> plan_set(const Signature &signature, const SetField &op, std::vector<std::string> &warnings) {
    std::vector<FlatEntry> added;
    if (op.path.has_parent()) {
        std::vector<AttrPath> ancestors;
        for (auto p = op.path.parent(); !p.empty(); p = p.has_parent() ? p.parent() : AttrPath()) {
            ancestors.push_back(p);
        }
        for (auto it = ancestors.rbegin(); it != ancestors.rend(); ++it) {
            const auto *type = type_at(signature, *it);
            if (type == nullptr) {
                added.push_back({*it, TypeDescriptor::document()});
            } else if (type->kind() != TypeDescriptor::Kind::Document) {
                warnings.push_back("cannot set '" + op.path.str() + "': '" + it->str() + "' holds " + type->name());
                return std::nullopt;
            }
        }
    }
    const Rule rule = type_at(signature, op.path) == nullptr ? Rule::R5 : Rule::R8;
    flatten_value(op.path, op.value, added);
    return net_plan(rule, subtree(signature, op.path), std::move(added));
}

std::optional<OpPlan> plan_unset(const Signature &signature, const UnsetField &op, std::vector<std::string> &warnings) {
    if (type_at(signature, op.path) == nullptr) {
        warnings.push_back("unset of absent field '" + op.path.str() + "' skipped");
        return std::nullopt;
    }
    return net_plan(Rule::R6, subtree(signature, op.path), {});
}

std::optional<OpPlan> plan_rename(const Signature &signature, const RenameField &op,
                                  std::vector<std::string> &warnings) {
    if (type_at(signature, op.path) == nullptr) {
        warnings.push_back("rename of absent field '" + op.path.str() + "' skipped");
        return std::nullopt;
    }
    const AttrPath destination = op.destination();
    std::vector<FlatEntry> moved = subtree(signature, op.path);
    std::vector<FlatEntry> removed = moved;
    auto overwritten = subtree(signature, destination);
    removed.insert(removed.end(), overwritten.begin(), overwritten.end());
    std::vector<FlatEntry> added;
    added.reserve(moved.size());
    for (const auto &entry : moved) {
        added.push_back({entry.path.rebase(op.path, destination), entry.type});
    }
    return net_plan(Rule::R7, std::move(removed), std::move(added));
}

ApplyReport start_report(QueryKind kind, const std::string &collection, std::optional<DocumentId> id) {
    ApplyReport report;
    report.kind = kind;
    report.collection = collection;
    report.id = std::move(id);
    return report;
}

void set_signature(EngineState &state, ApplyReport &report, Rule rule, const DocumentId &id, Signature signature) {
    report.actions.push_back(
        Action{Action::Kind::SetSignature, rule, report.collection, {}, 0, id, signature});
    state.signatures.collections[report.collection][id] = std::move(signature);
}

void remove_signature(EngineState &state, ApplyReport &report, Rule rule, const DocumentId &id) {
    report.actions.push_back(Action{Action::Kind::RemoveSignature, rule, report.collection, {}, 0, id, {}});
    auto coll = state.signatures.collections.find(report.collection);
    coll->second.erase(id);
    if (coll->second.empty()) {
        state.signatures.collections.erase(coll);
    }
}

} // namespace

ApplyReport apply_insert(EngineState &state, const InsertQuery &query) {
    auto report = start_report(QueryKind::Insert, query.collection, query.id);
    DocumentId id = query.id ? *query.id : generated_id(state.applied_count);
    if (state.signatures.find(query.collection, id) != nullptr) {
        throw DuplicateDocumentId("document " + id.text + " already exists in " + query.collection);
    }
    if (!query.id) {
        report.id = id;
        report.warnings.push_back("insert without _id; assigned " + id.text);
    }
    Signature signature = flatten_fields(query.fields);

    Mutator mutator(state, report, query.collection);
    for (const auto &entry : signature) {
        mutator.add(entry, Rule::R1, Rule::R2);
    }
    set_signature(state, report, Rule::R2, id, std::move(signature));
    ++state.applied_count;
    return report;
}

ApplyReport apply_delete(EngineState &state, const DeleteQuery &query) {
    auto report = start_report(QueryKind::Delete, query.collection, query.id);
    const Signature *signature = state.signatures.find(query.collection, query.id);
    if (signature == nullptr) {
        report.warnings.push_back(state.signatures.collections.contains(query.collection)
                                      ? "delete of unknown document " + query.id.text + " ignored"
                                      : "delete in unknown collection " + query.collection + " ignored");
        ++state.applied_count;
        return report;
    }
    Mutator mutator(state, report, query.collection);
    for (const auto &entry : *signature) {
        mutator.remove(entry, Rule::R3, Rule::R4);
    }
    remove_signature(state, report, Rule::R4, query.id);
    ++state.applied_count;
    return report;
}

ApplyReport apply_update(EngineState &state, const UpdateQuery &query) {
    auto report = start_report(QueryKind::Update, query.collection, query.id);
    const Signature *current = state.signatures.find(query.collection, query.id);
    if (current == nullptr) {
        report.warnings.push_back("update of unknown document " + query.id.text + " ignored");
        ++state.applied_count;
        return report;
    }

    // Plan every op against a working copy first so nothing is mutated if
    // planning throws.
    Signature working = *current;
    std::vector<OpPlan> plans;
    for (const auto &op : query.ops) {
        std::optional<OpPlan> plan;
        if (op_path(op).crosses_array()) {
            report.warnings.push_back("array element path '" + op_path(op).str() + "' skipped");
        } else if (const auto *set = std::get_if<SetField>(&op)) {
            plan = plan_set(working, *set, report.warnings);
        } else if (const auto *unset = std::get_if<UnsetField>(&op)) {
            plan = plan_unset(working, *unset, report.warnings);
        } else {
            plan = plan_rename(working, std::get<RenameField>(op), report.warnings);
        }
        if (plan) {
            replace_entries(working, plan->removed, plan->added);
            plans.push_back(std::move(*plan));
        }
    }

    Mutator mutator(state, report, query.collection);
    for (const auto &plan : plans) {
        mutator.apply(plan.removed, plan.added, plan.rule, plan.rule);
    }
    if (!plans.empty()) {
        set_signature(state, report, plans.back().rule, query.id, std::move(working));
    }
    ++state.applied_count;
    return report;
}

ApplyReport apply(EngineState &state, const MutationQuery &query) {
    return std::visit(
        [&state](const auto &q) -> ApplyReport {
            using T = std::decay_t<decltype(q)>;
            if constexpr (std::is_same_v<T, InsertQuery>) {
                return apply_insert(state, q);
            } else if constexpr (std::is_same_v<T, DeleteQuery>) {
                return apply_delete(state, q);
            } else {
                return apply_update(state, q);
            }
        },
        query);
}

void replay_report(EngineState &state, const ApplyReport &report) {
    for (const auto &action : report.actions) {
        const auto &coll = action.collection;
        switch (action.kind) {
        case Action::Kind::CreateCollection:
            state.metadata.collections[coll];
            state.model.collections[coll];
            break;
        case Action::Kind::RemoveCollection:
            state.metadata.collections.erase(coll);
            state.model.collections.erase(coll);
            break;
        case Action::Kind::AddModelType:
            state.model.collections[coll].attributes[action.entry.path].insert(action.entry.type);
            break;
        case Action::Kind::RemoveModelType: {
            auto &attributes = state.model.collections[coll].attributes;
            attributes[action.entry.path].erase(action.entry.type);
            if (attributes[action.entry.path].empty()) {
                attributes.erase(action.entry.path);
            }
            break;
        }
        case Action::Kind::IncrementCounter:
        case Action::Kind::DecrementCounter:
            if (action.count == 0) {
                state.metadata.collections[coll].erase(action.entry);
            } else {
                state.metadata.collections[coll][action.entry] = action.count;
            }
            break;
        case Action::Kind::SetSignature:
            state.signatures.collections[coll][*action.id] = action.signature;
            break;
        case Action::Kind::RemoveSignature: {
            auto &docs = state.signatures.collections[coll];
            docs.erase(*action.id);
            if (docs.empty()) {
                state.signatures.collections.erase(coll);
            }
            break;
        }
        }
    }
    ++state.applied_count;
}

std::string ApplyReport::to_json() const {
    using nlohmann::json;
    json actions_json = json::array();
    for (const auto &a : actions) {
        json entry = {{"action", to_string(a.kind)}, {"rule", to_string(a.rule)}};
        switch (a.kind) {
        case Action::Kind::IncrementCounter:
        case Action::Kind::DecrementCounter:
            entry["count"] = a.count;
            [[fallthrough]];
        case Action::Kind::AddModelType:
        case Action::Kind::RemoveModelType:
            entry["path"] = a.entry.path.str();
            entry["type"] = a.entry.type.name();
            break;
        case Action::Kind::SetSignature:
            entry["entries"] = a.signature.size();
            break;
        default:
            break;
        }
        actions_json.push_back(std::move(entry));
    }
    json out = {{"kind", to_string(kind)}, {"collection", collection}, {"actions", std::move(actions_json)},
                {"warnings", warnings}};
    if (id) {
        out["id"] = id->text;
    }
    return out.dump();
}

} // namespace q2m
