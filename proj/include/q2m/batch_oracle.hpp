#pragma once

#include "q2m/engine.hpp"
#include "q2m/query.hpp"
#include "q2m/schema_state.hpp"

#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace q2m {

// Independent ground truth for the incremental engine: keep whole documents,
// then extract the schema by a union over all of them. Shares only the value
// model, flattening and link detection with the engine.

struct StoredDocument {
    Fields fields;
    /// flatten_fields(fields), filled on demand and dropped on every mutation.
    mutable std::optional<std::vector<FlatEntry>> flat;

    const std::vector<FlatEntry> &flattened() const;
};

struct MaterializedStore {
    std::map<std::string, std::map<DocumentId, StoredDocument>> collections;
    std::uint64_t applied_count = 0;

    const Fields *find(const std::string &collection, const DocumentId &id) const;
    std::size_t document_count() const;
};

struct ReplayOutcome {
    /// Set when the query was rejected (duplicate id); the store is unchanged.
    std::optional<std::string> error;
    std::vector<std::string> warnings;
};

/// Applies one query with document-store semantics.
ReplayOutcome replay_query(MaterializedStore &store, const MutationQuery &query);
MaterializedStore replay_documents(const std::vector<MutationQuery> &queries);

/// Union of per-document (path, type) pairs, followed by the link post-pass.
SchemaModel extract_schema_batch(const MaterializedStore &store, LinkMode links = LinkMode::Naming);

struct VerifyOptions {
    /// Compare after every `stride`-th applied query and after the last one.
    std::size_t stride = 1;
    LinkMode links = LinkMode::Naming;
    /// Also run verify_state at each checkpoint.
    bool check_invariants = true;
    /// Test seam: called on the engine state after each successful apply.
    std::function<void(EngineState &, std::size_t line)> after_apply;
};

struct VerifyResult {
    bool equivalent = true;
    std::size_t queries = 0;
    std::size_t checkpoints = 0;
    std::size_t parse_errors = 0;
    std::size_t rejected = 0;
    std::optional<std::size_t> divergence_line;
    std::string detail;
};

/// Replays a log through the engine and the batch oracle side by side.
VerifyResult verify_log(std::istream &log, LogFormat format, const VerifyOptions &options = {});

} // namespace q2m
