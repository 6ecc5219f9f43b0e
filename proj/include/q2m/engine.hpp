#pragma once

#include "q2m/query.hpp"
#include "q2m/schema_state.hpp"

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace q2m {

// ---------------------------------------------------------------------------
// reference links

enum class LinkMode { Naming, ObjectId, Off };

/// Accepts "naming", "oid" and "off"; throws std::invalid_argument otherwise.
LinkMode parse_link_mode(std::string_view text);
const char *to_string(LinkMode mode);

/// Reference type to present instead of `type`, if the attribute looks like a
/// link to one of `collections`.
///
/// Naming mode matches a last segment of the form `<X>_id`, `<X>Id`, `<X>_ids`
/// or `<X>Ids` (case-insensitive) where X, singular or plural, names a known
/// collection. Object-id mode additionally links ObjectId values whose field
/// (or, for `_id`, enclosing field) is named after a collection. Scalar
/// identifiers give a monovalued reference, arrays of identifiers (empty ones
/// included) a multivalued one.
std::optional<TypeDescriptor> detect_reference(const AttrPath &path, const TypeDescriptor &type,
                                               const std::set<std::string> &collections, LinkMode mode);

/// Presentation view of a model with reference types substituted. Counters
/// and the stored model keep the structural types.
SchemaModel link_model(const SchemaModel &model, LinkMode mode);

/// Canonical snapshot of the state's model under the given link mode.
std::string export_snapshot(const EngineState &state, LinkMode mode = LinkMode::Naming);

// ---------------------------------------------------------------------------
// apply

enum class Rule { R1, R2, R3, R4, R5, R6, R7, R8 };
const char *to_string(Rule rule);

struct Action {
    enum class Kind {
        CreateCollection,
        RemoveCollection,
        AddModelType,
        RemoveModelType,
        IncrementCounter,
        DecrementCounter,
        SetSignature,
        RemoveSignature,
    };

    Kind kind;
    Rule rule;
    std::string collection;
    FlatEntry entry;
    /// Counter value after the action (counter actions only).
    std::uint64_t count = 0;
    std::optional<DocumentId> id;
    Signature signature;

    bool operator==(const Action &) const = default;
};

const char *to_string(Action::Kind kind);

/// Everything one apply did. Replaying the actions on the prior state
/// reproduces the posterior state.
struct ApplyReport {
    QueryKind kind = QueryKind::Insert;
    std::string collection;
    std::optional<DocumentId> id;
    std::vector<Action> actions;
    std::vector<std::string> warnings;

    std::string to_json() const;
};

class DuplicateDocumentId : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Applies one query. On exception the state is left untouched.
ApplyReport apply(EngineState &state, const MutationQuery &query);
ApplyReport apply_insert(EngineState &state, const InsertQuery &query);
ApplyReport apply_delete(EngineState &state, const DeleteQuery &query);
ApplyReport apply_update(EngineState &state, const UpdateQuery &query);

void replay_report(EngineState &state, const ApplyReport &report);

/// Identifier given to an insert without `_id`.
DocumentId generated_id(std::uint64_t applied_count);

} // namespace q2m
