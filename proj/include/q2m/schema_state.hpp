#pragma once

#include "q2m/types.hpp"
#include "q2m/value.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace q2m {

inline constexpr std::string_view kModelId = "q2m-model";
inline constexpr std::string_view kMetadataId = "q2m-metadata";
inline constexpr int kStateFormatVersion = 1;

using TypeSet = std::set<TypeDescriptor>;

struct CollectionSchema {
    std::map<AttrPath, TypeSet> attributes;
    bool operator==(const CollectionSchema &) const = default;
};

/// The extracted physical model: per collection, attribute paths with their type unions.
struct SchemaModel {
    std::string id{kModelId};
    std::map<std::string, CollectionSchema> collections;

    bool empty() const { return collections.empty(); }
    const TypeSet *find(const std::string &collection, const AttrPath &path) const;
    bool operator==(const SchemaModel &) const = default;
};

using CounterMap = std::map<FlatEntry, std::uint64_t>;

/// Occurrence counters keyed by (path, type); stored counts are always >= 1.
struct OccurrenceMetadata {
    std::string id{kMetadataId};
    std::map<std::string, CounterMap> collections;

    std::uint64_t count(const std::string &collection, const FlatEntry &entry) const;
    bool operator==(const OccurrenceMetadata &) const = default;
};

/// Sorted, duplicate-free (path, type) pairs currently held by one document.
using Signature = std::vector<FlatEntry>;
using SignatureMap = std::unordered_map<DocumentId, Signature, DocumentIdHash>;

struct DocumentSignatureStore {
    std::map<std::string, SignatureMap> collections;

    const Signature *find(const std::string &collection, const DocumentId &id) const;
    std::size_t document_count() const;
    bool operator==(const DocumentSignatureStore &) const = default;
};

struct EngineState {
    SchemaModel model;
    OccurrenceMetadata metadata;
    DocumentSignatureStore signatures;
    std::uint64_t applied_count = 0;

    bool operator==(const EngineState &) const = default;
};

EngineState empty_state();

/// Canonical snapshot text: collections by name, attributes by printed path,
/// types by printed name, two-space indentation, trailing newline.
std::string export_model(const SchemaModel &model);

class SnapshotError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reads a snapshot produced by export_model. Throws SnapshotError.
SchemaModel parse_model_snapshot(std::string_view text);

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CorruptStateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Writes the state file atomically (temporary file, then rename).
void save_state(const EngineState &state, const std::filesystem::path &file);
EngineState load_state(const std::filesystem::path &file);

/// Serialized state document, exposed for tests and tooling.
std::string serialize_state(const EngineState &state);
EngineState deserialize_state(std::string_view text);

struct AttributeChange {
    std::string collection;
    AttrPath path;
    std::vector<TypeDescriptor> types;
    bool operator==(const AttributeChange &) const = default;
};

struct TypeDelta {
    std::string collection;
    AttrPath path;
    std::vector<TypeDescriptor> added;
    std::vector<TypeDescriptor> removed;
    bool operator==(const TypeDelta &) const = default;
};

/// Entries of added or removed collections are listed as added or removed attributes.
struct ModelDiff {
    std::vector<std::string> added_collections;
    std::vector<std::string> removed_collections;
    std::vector<AttributeChange> added_attributes;
    std::vector<AttributeChange> removed_attributes;
    std::vector<TypeDelta> changed_attributes;

    bool empty() const {
        return added_collections.empty() && removed_collections.empty() && added_attributes.empty() &&
               removed_attributes.empty() && changed_attributes.empty();
    }
};

ModelDiff diff_models(const SchemaModel &a, const SchemaModel &b);
SchemaModel apply_diff(SchemaModel model, const ModelDiff &diff);
std::string diff_to_text(const ModelDiff &diff);
std::string diff_to_json(const ModelDiff &diff);

/// Checks model/metadata bi-consistency, the structural-parent rule and the
/// master counting invariant (every counter equals a recount over signatures).
/// Returns one message per violation.
std::vector<std::string> verify_state(const EngineState &state);

} // namespace q2m
