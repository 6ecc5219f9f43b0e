#include "literal.hpp"

#include "q2m/types.hpp"

#include <charconv>
#include <unordered_set>

namespace q2m::detail {

namespace {

bool is_ident_start(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || c == '$'; }
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

int hex_value(char c) {
    if (c >= '0' && c <= '9') {
        return c - '0';
    }
    if (c >= 'a' && c <= 'f') {
        return c - 'a' + 10;
    }
    if (c >= 'A' && c <= 'F') {
        return c - 'A' + 10;
    }
    return -1;
}

void append_utf8(std::string &out, std::uint32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

} // namespace

bool is_object_id_hex(std::string_view hex) {
    if (hex.size() != 24) {
        return false;
    }
    for (char c : hex) {
        if (hex_value(c) < 0) {
            return false;
        }
    }
    return true;
}

void append_quoted(std::string &out, std::string_view s) {
    static constexpr char kHex[] = "0123456789abcdef";
    out += '"';
    for (char c : s) {
        switch (c) {
        case '"':
            out += "\\\"";
            break;
        case '\\':
            out += "\\\\";
            break;
        case '\n':
            out += "\\n";
            break;
        case '\r':
            out += "\\r";
            break;
        case '\t':
            out += "\\t";
            break;
        case '\b':
            out += "\\b";
            break;
        case '\f':
            out += "\\f";
            break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                out += "\\u00";
                out += kHex[(c >> 4) & 0xF];
                out += kHex[c & 0xF];
            } else {
                out += c;
            }
        }
    }
    out += '"';
}

void LiteralParser::skip_ws() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' || text_[pos_] == '\r')) {
        ++pos_;
    }
}

bool LiteralParser::at_end() {
    skip_ws();
    return pos_ >= text_.size();
}

bool LiteralParser::peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
}

bool LiteralParser::consume(char c) {
    if (peek(c)) {
        ++pos_;
        return true;
    }
    return false;
}

void LiteralParser::expect(char c, std::string_view what) {
    if (!consume(c)) {
        fail(std::string(what));
    }
}

void LiteralParser::fail(const std::string &expected) const {
    std::string found = pos_ < text_.size() ? "'" + std::string(1, text_[pos_]) + "'" : "end of input";
    throw SyntaxError("expected " + expected + " at offset " + std::to_string(pos_) + ", found " + found, pos_);
}

void LiteralParser::fail_at(std::size_t offset, const std::string &message) const {
    throw SyntaxError(message + " at offset " + std::to_string(offset), offset);
}

std::string LiteralParser::identifier() {
    skip_ws();
    if (pos_ >= text_.size() || !is_ident_start(text_[pos_])) {
        return {};
    }
    auto start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) {
        ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
}

std::string LiteralParser::take_while(const std::function<bool(char)> &pred) {
    auto start = pos_;
    while (pos_ < text_.size() && pred(text_[pos_])) {
        ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
}

std::string LiteralParser::key() {
    skip_ws();
    if (pos_ < text_.size() && (text_[pos_] == '"' || (dialect_ == Dialect::Shell && text_[pos_] == '\''))) {
        return string_literal();
    }
    if (dialect_ == Dialect::Shell) {
        auto id = identifier();
        if (!id.empty()) {
            return id;
        }
    }
    fail("object key");
}

std::string LiteralParser::string_literal() {
    skip_ws();
    if (pos_ >= text_.size()) {
        fail("string");
    }
    const char quote = text_[pos_];
    if (quote != '"' && !(quote == '\'' && dialect_ == Dialect::Shell)) {
        fail("string");
    }
    ++pos_;
    std::string out;
    while (true) {
        if (pos_ >= text_.size()) {
            fail("closing quote");
        }
        char c = text_[pos_++];
        if (c == quote) {
            return out;
        }
        if (static_cast<unsigned char>(c) < 0x20) {
            fail_at(pos_ - 1, "unescaped control character in string");
        }
        if (c != '\\') {
            out += c;
            continue;
        }
        if (pos_ >= text_.size()) {
            fail("escape sequence");
        }
        char e = text_[pos_++];
        switch (e) {
        case '"':
        case '\\':
        case '/':
        case '\'':
            out += e;
            break;
        case 'b':
            out += '\b';
            break;
        case 'f':
            out += '\f';
            break;
        case 'n':
            out += '\n';
            break;
        case 'r':
            out += '\r';
            break;
        case 't':
            out += '\t';
            break;
        case 'u': {
            auto read_unit = [this]() -> std::uint32_t {
                if (pos_ + 4 > text_.size()) {
                    fail("4 hex digits");
                }
                std::uint32_t unit = 0;
                for (int i = 0; i < 4; ++i) {
                    int h = hex_value(text_[pos_]);
                    if (h < 0) {
                        fail("hex digit");
                    }
                    unit = unit * 16 + static_cast<std::uint32_t>(h);
                    ++pos_;
                }
                return unit;
            };
            std::uint32_t cp = read_unit();
            if (cp >= 0xD800 && cp <= 0xDBFF) {
                if (text_.substr(pos_, 2) != "\\u") {
                    fail("low surrogate");
                }
                pos_ += 2;
                std::uint32_t low = read_unit();
                if (low < 0xDC00 || low > 0xDFFF) {
                    fail_at(pos_ - 4, "invalid low surrogate");
                }
                cp = 0x10000 + ((cp - 0xD800) << 10) + (low - 0xDC00);
            } else if (cp >= 0xDC00 && cp <= 0xDFFF) {
                fail_at(pos_ - 4, "unpaired low surrogate");
            }
            append_utf8(out, cp);
            break;
        }
        default:
            fail_at(pos_ - 1, "invalid escape sequence");
        }
    }
}

bool LiteralParser::keyword(std::string_view word) {
    skip_ws();
    if (text_.substr(pos_, word.size()) != word) {
        return false;
    }
    auto after = pos_ + word.size();
    if (after < text_.size() && is_ident_char(text_[after])) {
        return false;
    }
    pos_ = after;
    return true;
}

Value LiteralParser::number() {
    const auto start = pos_;
    bool is_double = false;
    if (pos_ < text_.size() && text_[pos_] == '-') {
        ++pos_;
    }
    if (pos_ < text_.size() && text_[pos_] == '0') {
        ++pos_;
    } else if (pos_ < text_.size() && is_digit(text_[pos_])) {
        while (pos_ < text_.size() && is_digit(text_[pos_])) {
            ++pos_;
        }
    } else {
        fail("digit");
    }
    if (pos_ < text_.size() && text_[pos_] == '.') {
        is_double = true;
        ++pos_;
        if (pos_ >= text_.size() || !is_digit(text_[pos_])) {
            fail("digit after decimal point");
        }
        while (pos_ < text_.size() && is_digit(text_[pos_])) {
            ++pos_;
        }
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
        is_double = true;
        ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
            ++pos_;
        }
        if (pos_ >= text_.size() || !is_digit(text_[pos_])) {
            fail("exponent digit");
        }
        while (pos_ < text_.size() && is_digit(text_[pos_])) {
            ++pos_;
        }
    }
    const char *first = text_.data() + start;
    const char *last = text_.data() + pos_;
    if (is_double) {
        double d = 0;
        auto [ptr, ec] = std::from_chars(first, last, d);
        if (ec != std::errc() || ptr != last) {
            fail_at(start, "double literal out of range");
        }
        return Value(d);
    }
    std::int64_t n = 0;
    auto [ptr, ec] = std::from_chars(first, last, n);
    if (ec != std::errc() || ptr != last) {
        fail_at(start, "integer literal out of range");
    }
    return Value(n);
}

void LiteralParser::object(const std::function<void(const std::string &, std::size_t)> &member) {
    expect('{', "'{'");
    if (consume('}')) {
        return;
    }
    std::unordered_set<std::string> seen;
    while (true) {
        skip_ws();
        const auto key_offset = pos_;
        std::string k = key();
        if (!seen.insert(k).second) {
            fail_at(key_offset, "duplicate key '" + k + "'");
        }
        expect(':', "':'");
        member(k, key_offset);
        if (consume(',')) {
            continue;
        }
        expect('}', "',' or '}'");
        return;
    }
}

Value LiteralParser::object_value(bool strict_names) {
    Fields fields;
    bool is_oid = false;
    std::string oid_hex;
    object([&](const std::string &k, std::size_t key_offset) {
        if (dialect_ == Dialect::Json && k == "$oid" && fields.empty() && !is_oid) {
            skip_ws();
            const auto value_offset = pos_;
            oid_hex = string_literal();
            if (!is_object_id_hex(oid_hex)) {
                fail_at(value_offset, "ObjectId must be 24 hex digits");
            }
            is_oid = true;
            return;
        }
        if (is_oid) {
            fail_at(key_offset, "$oid must be the only member of its object");
        }
        if (strict_names && !AttrPath::valid_field_name(k)) {
            fail_at(key_offset, "invalid field name '" + k + "'");
        }
        fields.push_back({k, value(strict_names)});
    });
    if (is_oid) {
        return Value(ObjectId{oid_hex});
    }
    return Value(std::move(fields));
}

Value LiteralParser::array_value(bool strict_names) {
    expect('[', "'['");
    Value::Array items;
    if (consume(']')) {
        return Value(std::move(items));
    }
    while (true) {
        items.push_back(value(strict_names));
        if (consume(',')) {
            continue;
        }
        expect(']', "',' or ']'");
        return Value(std::move(items));
    }
}

Value LiteralParser::value(bool strict_names) {
    skip_ws();
    if (pos_ >= text_.size()) {
        fail("value");
    }
    const char c = text_[pos_];
    if (c == '{') {
        return object_value(strict_names);
    }
    if (c == '[') {
        return array_value(strict_names);
    }
    if (c == '"' || (c == '\'' && dialect_ == Dialect::Shell)) {
        return Value(string_literal());
    }
    if (c == '-' || is_digit(c)) {
        return number();
    }
    if (keyword("true")) {
        return Value(true);
    }
    if (keyword("false")) {
        return Value(false);
    }
    if (keyword("null")) {
        return Value(NullValue{});
    }
    if (dialect_ == Dialect::Shell && keyword("ObjectId")) {
        expect('(', "'('");
        skip_ws();
        const auto value_offset = pos_;
        std::string hex = string_literal();
        if (!is_object_id_hex(hex)) {
            fail_at(value_offset, "ObjectId must be 24 hex digits");
        }
        expect(')', "')'");
        return Value(ObjectId{hex});
    }
    fail("value");
}

} // namespace q2m::detail
