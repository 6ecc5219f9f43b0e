#pragma once

#include "q2m/types.hpp"
#include "q2m/value.hpp"

#include <cstddef>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace q2m {

struct SetField {
    AttrPath path;
    Value value;
    bool operator==(const SetField &) const = default;
};

struct UnsetField {
    AttrPath path;
    bool operator==(const UnsetField &) const = default;
};

/// Renames the last segment of `path`; the field stays at the same nesting level.
struct RenameField {
    AttrPath path;
    std::string new_name;
    bool operator==(const RenameField &) const = default;

    AttrPath destination() const;
};

using UpdateOp = std::variant<SetField, UnsetField, RenameField>;

const AttrPath &op_path(const UpdateOp &op);

struct InsertQuery {
    std::string collection;
    std::optional<DocumentId> id;
    Fields fields;
    bool operator==(const InsertQuery &) const = default;
};

struct DeleteQuery {
    std::string collection;
    DocumentId id;
    bool operator==(const DeleteQuery &) const = default;
};

struct UpdateQuery {
    std::string collection;
    DocumentId id;
    std::vector<UpdateOp> ops;
    bool operator==(const UpdateQuery &) const = default;
};

using MutationQuery = std::variant<InsertQuery, DeleteQuery, UpdateQuery>;

enum class QueryKind { Insert, Delete, Update };

QueryKind kind_of(const MutationQuery &q);
const std::string &collection_of(const MutationQuery &q);
const char *to_string(QueryKind kind);

bool valid_collection_name(std::string_view name);

class ParseError : public std::runtime_error {
public:
    enum class Kind { Syntax, Unsupported, DuplicatePath };
    static constexpr std::size_t kNoOffset = static_cast<std::size_t>(-1);

    ParseError(Kind kind, const std::string &message, std::size_t offset = kNoOffset);

    Kind kind() const { return kind_; }
    /// Byte offset into the statement text, or kNoOffset.
    std::size_t offset() const { return offset_; }

private:
    Kind kind_;
    std::size_t offset_;
};

class SyntaxError : public ParseError {
public:
    SyntaxError(const std::string &message, std::size_t offset) : ParseError(Kind::Syntax, message, offset) {}
};

class UnsupportedStatement : public ParseError {
public:
    UnsupportedStatement(const std::string &message, std::size_t offset = kNoOffset)
        : ParseError(Kind::Unsupported, message, offset) {}
};

class DuplicatePathError : public ParseError {
public:
    DuplicatePathError(const std::string &message, std::size_t offset = kNoOffset)
        : ParseError(Kind::DuplicatePath, message, offset) {}
};

enum class LogFormat { Shell, JsonLines };

/// Parses one shell statement such as `db.Patients.insertOne({...})`.
MutationQuery parse_statement(std::string_view text);
/// Parses one JSON-lines record.
MutationQuery parse_jsonl_record(std::string_view text);
MutationQuery parse_query(std::string_view text, LogFormat format);

std::string print_statement(const MutationQuery &q);
std::string print_jsonl(const MutationQuery &q);
std::string print_query(const MutationQuery &q, LogFormat format);

/// Throws DuplicatePathError when two ops of one update touch the same path
/// or one targets a descendant of another (rename destinations included).
void check_update_paths(const std::vector<UpdateOp> &ops);

struct LogItem {
    std::size_t line = 0;
    /// std::monostate marks a blank or comment line.
    std::variant<std::monostate, MutationQuery, ParseError> content;

    bool is_query() const { return std::holds_alternative<MutationQuery>(content); }
    bool is_error() const { return std::holds_alternative<ParseError>(content); }
    const MutationQuery &query() const { return std::get<MutationQuery>(content); }
    const ParseError &error() const { return std::get<ParseError>(content); }
};

/// Streaming log reader: one item per input line, never aborts on a bad line.
class LogReader {
public:
    LogReader(std::istream &in, LogFormat format) : in_(in), format_(format) {}

    std::optional<LogItem> next();

private:
    std::istream &in_;
    LogFormat format_;
    std::size_t line_ = 0;
    std::string buffer_;
};

std::vector<LogItem> parse_log(std::istream &in, LogFormat format);

} // namespace q2m
