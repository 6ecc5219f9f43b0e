#include "literal.hpp"
#include "q2m/query.hpp"

#include <algorithm>
#include <cctype>

namespace q2m {

using detail::Dialect;
using detail::LiteralParser;

ParseError::ParseError(Kind kind, const std::string &message, std::size_t offset)
    : std::runtime_error(message), kind_(kind), offset_(offset) {}

AttrPath RenameField::destination() const {
    return path.has_parent() ? path.parent().child(new_name) : AttrPath::field(new_name);
}

const AttrPath &op_path(const UpdateOp &op) {
    return std::visit([](const auto &o) -> const AttrPath & { return o.path; }, op);
}

QueryKind kind_of(const MutationQuery &q) { return static_cast<QueryKind>(q.index()); }

const std::string &collection_of(const MutationQuery &q) {
    return std::visit([](const auto &v) -> const std::string & { return v.collection; }, q);
}

const char *to_string(QueryKind kind) {
    switch (kind) {
    case QueryKind::Insert:
        return "insert";
    case QueryKind::Delete:
        return "delete";
    case QueryKind::Update:
        return "update";
    }
    return "?";
}

bool valid_collection_name(std::string_view name) {
    if (name.empty()) {
        return false;
    }
    return std::none_of(name.begin(), name.end(), [](char c) {
        return c == '.' || c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
    });
}

namespace {

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

void check_paths_at(const std::vector<UpdateOp> &ops, const std::vector<std::size_t> &offsets) {
    struct Target {
        AttrPath path;
        std::size_t offset;
    };
    std::vector<Target> targets;
    for (std::size_t i = 0; i < ops.size(); ++i) {
        const std::size_t offset = i < offsets.size() ? offsets[i] : ParseError::kNoOffset;
        std::vector<AttrPath> touched{op_path(ops[i])};
        if (const auto *rename = std::get_if<RenameField>(&ops[i])) {
            auto dest = rename->destination();
            if (dest == rename->path) {
                throw DuplicatePathError("rename of '" + rename->path.str() + "' onto itself", offset);
            }
            touched.push_back(std::move(dest));
        }
        for (const auto &path : touched) {
            for (const auto &prior : targets) {
                if (path.is_self_or_descendant_of(prior.path) || prior.path.is_descendant_of(path)) {
                    throw DuplicatePathError("update paths '" + prior.path.str() + "' and '" + path.str() +
                                                 "' conflict",
                                             offset);
                }
            }
        }
        for (auto &path : touched) {
            targets.push_back({std::move(path), offset});
        }
    }
}

AttrPath update_path(const std::string &text, std::size_t offset) {
    AttrPath path;
    try {
        path = AttrPath::parse(text);
    } catch (const PathError &) {
        throw SyntaxError("invalid field path '" + text + "' at offset " + std::to_string(offset), offset);
    }
    if (path.crosses_array()) {
        throw UnsupportedStatement("array element path '" + text + "' is not supported", offset);
    }
    auto segments = path.segments();
    if (segments.front() == "_id") {
        throw UnsupportedStatement("_id cannot be modified", offset);
    }
    for (const auto &segment : segments) {
        if (all_digits(segment)) {
            throw UnsupportedStatement("positional array update '" + text + "' is not supported", offset);
        }
    }
    return path;
}

RenameField rename_op(const AttrPath &path, const Value &target, LiteralParser &p, std::size_t value_offset) {
    if (target.kind() != Value::Kind::Text) {
        p.fail_at(value_offset, "rename target must be a string");
    }
    const auto &name = target.as_text();
    if (!AttrPath::valid_field_name(name)) {
        p.fail_at(value_offset, "invalid rename target '" + name + "'");
    }
    RenameField op{path, name};
    if (op.destination().str() == "_id") {
        throw UnsupportedStatement("cannot rename onto _id", value_offset);
    }
    return op;
}

DocumentId filter_id(LiteralParser &p) {
    if (!p.peek('{')) {
        p.fail("filter document");
    }
    const auto offset = p.pos();
    Value filter = p.value(false);
    const auto &fields = filter.as_document();
    DocumentId id;
    if (fields.size() != 1 || fields[0].name != "_id" || !DocumentId::from_value(fields[0].value, id)) {
        throw UnsupportedStatement("only {_id: <id>} filters are supported", offset);
    }
    return id;
}

void reject_options(LiteralParser &p, const std::string &method) {
    if (p.peek(',')) {
        throw UnsupportedStatement(method + " options are not supported", p.pos());
    }
}

std::vector<UpdateOp> shell_update_document(LiteralParser &p) {
    if (!p.peek('{')) {
        p.fail("update document");
    }
    const auto doc_offset = p.pos();
    std::vector<UpdateOp> ops;
    std::vector<std::size_t> offsets;
    p.object([&](const std::string &op_key, std::size_t op_offset) {
        if (op_key == "$set") {
            p.object([&](const std::string &key, std::size_t offset) {
                auto path = update_path(key, offset);
                ops.push_back(SetField{std::move(path), p.value(true)});
                offsets.push_back(offset);
            });
        } else if (op_key == "$unset") {
            p.object([&](const std::string &key, std::size_t offset) {
                auto path = update_path(key, offset);
                p.value(false);
                ops.push_back(UnsetField{std::move(path)});
                offsets.push_back(offset);
            });
        } else if (op_key == "$rename") {
            p.object([&](const std::string &key, std::size_t offset) {
                auto path = update_path(key, offset);
                p.skip_ws();
                const auto value_offset = p.pos();
                ops.push_back(rename_op(path, p.value(false), p, value_offset));
                offsets.push_back(offset);
            });
        } else if (!op_key.empty() && op_key.front() == '$') {
            throw UnsupportedStatement("update operator '" + op_key + "' is not supported", op_offset);
        } else {
            throw UnsupportedStatement("replacement-style updates are not supported", op_offset);
        }
    });
    if (ops.empty()) {
        throw SyntaxError("update must contain at least one operation at offset " + std::to_string(doc_offset),
                          doc_offset);
    }
    check_paths_at(ops, offsets);
    return ops;
}

} // namespace

void check_update_paths(const std::vector<UpdateOp> &ops) { check_paths_at(ops, {}); }

MutationQuery parse_statement(std::string_view text) {
    LiteralParser p(text, Dialect::Shell);
    p.skip_ws();
    if (p.identifier() != "db") {
        p.fail("'db'");
    }
    p.expect('.', "'.'");
    const auto coll_offset = p.pos();
    std::string collection =
        p.take_while([](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; });
    if (collection.empty()) {
        p.fail("collection name");
    }
    if (!valid_collection_name(collection)) {
        p.fail_at(coll_offset, "invalid collection name");
    }
    p.expect('.', "'.'");
    const auto method_offset = p.pos();
    const std::string method = p.identifier();
    if (method.empty()) {
        p.fail("method name");
    }
    if (method != "insertOne" && method != "deleteOne" && method != "updateOne") {
        throw UnsupportedStatement("unsupported command '" + method + "'", method_offset);
    }
    p.expect('(', "'('");

    MutationQuery result;
    if (method == "insertOne") {
        if (!p.peek('{')) {
            p.fail("document");
        }
        Value doc = p.value(true);
        reject_options(p, method);
        InsertQuery q{collection, std::nullopt, std::move(doc.as_document())};
        auto it = std::find_if(q.fields.begin(), q.fields.end(), [](const Field &f) { return f.name == "_id"; });
        if (it != q.fields.end()) {
            DocumentId id;
            if (!DocumentId::from_value(it->value, id)) {
                throw UnsupportedStatement("_id must be a string, integer or ObjectId");
            }
            q.id = std::move(id);
            q.fields.erase(it);
        }
        result = std::move(q);
    } else if (method == "deleteOne") {
        DeleteQuery q{collection, filter_id(p)};
        reject_options(p, method);
        result = std::move(q);
    } else {
        UpdateQuery q{collection, filter_id(p), {}};
        p.expect(',', "','");
        q.ops = shell_update_document(p);
        reject_options(p, method);
        result = std::move(q);
    }
    p.expect(')', "')'");
    p.consume(';');
    if (!p.at_end()) {
        p.fail("end of statement");
    }
    return result;
}

MutationQuery parse_jsonl_record(std::string_view text) {
    LiteralParser p(text, Dialect::Json);
    std::optional<std::string> op;
    std::optional<std::string> coll;
    std::optional<DocumentId> id;
    std::optional<Fields> fields;
    std::optional<std::vector<UpdateOp>> ops;
    std::vector<std::size_t> op_offsets;
    std::size_t op_member_offset = 0;
    std::size_t coll_offset = 0;

    if (!p.peek('{')) {
        p.fail("'{'");
    }
    p.object([&](const std::string &key, std::size_t key_offset) {
        if (key == "op") {
            op_member_offset = key_offset;
            op = p.string_literal();
        } else if (key == "coll") {
            coll_offset = key_offset;
            coll = p.string_literal();
        } else if (key == "id") {
            p.skip_ws();
            const auto offset = p.pos();
            Value v = p.value(false);
            DocumentId parsed;
            if (!DocumentId::from_value(v, parsed)) {
                p.fail_at(offset, "id must be a string, integer or {\"$oid\": ...}");
            }
            id = std::move(parsed);
        } else if (key == "fields") {
            if (!p.peek('{')) {
                p.fail("fields object");
            }
            Value v = p.value(true);
            if (find_field(v.as_document(), "_id") != nullptr) {
                p.fail_at(key_offset, "_id belongs in the id member");
            }
            fields = std::move(v.as_document());
        } else if (key == "ops") {
            ops.emplace();
            p.expect('[', "'['");
            if (p.consume(']')) {
                return;
            }
            do {
                p.skip_ws();
                const auto entry_offset = p.pos();
                std::size_t members = 0;
                p.object([&](const std::string &kind, std::size_t kind_offset) {
                    if (++members > 1) {
                        p.fail_at(kind_offset, "each op must have exactly one member");
                    }
                    std::optional<AttrPath> path;
                    std::optional<Value> value;
                    std::optional<Value> new_name;
                    std::size_t new_offset = 0;
                    if (kind != "set" && kind != "unset" && kind != "rename") {
                        throw UnsupportedStatement("update op '" + kind + "' is not supported", kind_offset);
                    }
                    p.object([&](const std::string &arg, std::size_t arg_offset) {
                        if (arg == "path") {
                            p.skip_ws();
                            const auto offset = p.pos();
                            path = update_path(p.string_literal(), offset);
                        } else if (arg == "value" && kind == "set") {
                            value = p.value(true);
                        } else if (arg == "new" && kind == "rename") {
                            p.skip_ws();
                            new_offset = p.pos();
                            new_name = p.value(false);
                        } else {
                            p.fail_at(arg_offset, "unexpected member '" + arg + "' in " + kind + " op");
                        }
                    });
                    if (!path) {
                        p.fail_at(kind_offset, kind + " op requires a path");
                    }
                    if (kind == "set") {
                        if (!value) {
                            p.fail_at(kind_offset, "set op requires a value");
                        }
                        ops->push_back(SetField{*path, std::move(*value)});
                    } else if (kind == "unset") {
                        ops->push_back(UnsetField{*path});
                    } else {
                        if (!new_name) {
                            p.fail_at(kind_offset, "rename op requires a new name");
                        }
                        ops->push_back(rename_op(*path, *new_name, p, new_offset));
                    }
                });
                if (members == 0) {
                    p.fail_at(entry_offset, "empty op object");
                }
                op_offsets.push_back(entry_offset);
            } while (p.consume(','));
            p.expect(']', "',' or ']'");
        } else {
            p.fail_at(key_offset, "unknown member '" + key + "'");
        }
    });
    if (!p.at_end()) {
        p.fail("end of record");
    }
    if (!op) {
        throw SyntaxError("record has no op member", 0);
    }
    if (*op != "insert" && *op != "delete" && *op != "update") {
        throw UnsupportedStatement("unsupported op '" + *op + "'", op_member_offset);
    }
    if (!coll || !valid_collection_name(*coll)) {
        throw SyntaxError("record needs a valid coll member", coll_offset);
    }
    if (*op == "insert") {
        if (ops) {
            throw SyntaxError("insert record cannot carry ops", 0);
        }
        return InsertQuery{*coll, id, fields ? std::move(*fields) : Fields{}};
    }
    if (!id) {
        throw SyntaxError(*op + " record requires an id", 0);
    }
    if (*op == "delete") {
        if (ops || fields) {
            throw SyntaxError("delete record carries only op, coll and id", 0);
        }
        return DeleteQuery{*coll, *id};
    }
    if (fields) {
        throw SyntaxError("update record cannot carry fields", 0);
    }
    if (!ops || ops->empty()) {
        throw SyntaxError("update record requires a non-empty ops array", 0);
    }
    check_paths_at(*ops, op_offsets);
    return UpdateQuery{*coll, *id, std::move(*ops)};
}

MutationQuery parse_query(std::string_view text, LogFormat format) {
    return format == LogFormat::Shell ? parse_statement(text) : parse_jsonl_record(text);
}

std::optional<LogItem> LogReader::next() {
    if (!std::getline(in_, buffer_)) {
        return std::nullopt;
    }
    ++line_;
    if (!buffer_.empty() && buffer_.back() == '\r') {
        buffer_.pop_back();
    }
    LogItem item;
    item.line = line_;
    auto first = buffer_.find_first_not_of(" \t");
    if (first == std::string::npos) {
        return item;
    }
    if (format_ == LogFormat::Shell &&
        (buffer_.compare(first, 2, "//") == 0 || buffer_.compare(first, 1, "#") == 0)) {
        return item;
    }
    try {
        item.content = parse_query(buffer_, format_);
    } catch (const ParseError &e) {
        item.content = e;
    }
    return item;
}

std::vector<LogItem> parse_log(std::istream &in, LogFormat format) {
    LogReader reader(in, format);
    std::vector<LogItem> items;
    while (auto item = reader.next()) {
        items.push_back(std::move(*item));
    }
    return items;
}

} // namespace q2m
