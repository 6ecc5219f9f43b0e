#pragma once

// Internal: literal grammar shared by the shell and JSON-lines front ends.

#include "q2m/query.hpp"
#include "q2m/value.hpp"

#include <functional>
#include <string>
#include <string_view>

namespace q2m::detail {

enum class Dialect {
    /// Unquoted keys, single-quoted strings, ObjectId("...").
    Shell,
    /// Strict JSON; {"$oid": "..."} denotes an ObjectId.
    Json,
};

class LiteralParser {
public:
    LiteralParser(std::string_view text, Dialect dialect) : text_(text), dialect_(dialect) {}

    std::size_t pos() const { return pos_; }
    void skip_ws();
    bool at_end();
    bool peek(char c);
    bool consume(char c);
    void expect(char c, std::string_view what);
    [[noreturn]] void fail(const std::string &expected) const;
    [[noreturn]] void fail_at(std::size_t offset, const std::string &message) const;

    /// Shell identifier: [A-Za-z_$][A-Za-z0-9_$]*; empty when none is present.
    std::string identifier();
    /// Object key: quoted string or (shell dialect) identifier.
    std::string key();
    std::string string_literal();
    /// Raw run of characters satisfying `pred`; may be empty.
    std::string take_while(const std::function<bool(char)> &pred);

    /// Value with field names checked when `strict_names` (data documents);
    /// filter and operator documents are parsed with `strict_names` off.
    Value value(bool strict_names);

    /// Iterates `{ key: <member>, ... }`; the callback parses the member value.
    /// Duplicate keys are rejected.
    void object(const std::function<void(const std::string &key, std::size_t key_offset)> &member);

private:
    Value number();
    Value object_value(bool strict_names);
    Value array_value(bool strict_names);
    bool keyword(std::string_view word);

    std::string_view text_;
    Dialect dialect_;
    std::size_t pos_ = 0;
};

bool is_object_id_hex(std::string_view hex);

/// JSON string escaping with surrounding quotes.
void append_quoted(std::string &out, std::string_view s);

} // namespace q2m::detail
