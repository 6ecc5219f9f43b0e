#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace q2m {

struct NullValue {
    bool operator==(const NullValue &) const = default;
};

struct ObjectId {
    std::string hex;
    bool operator==(const ObjectId &) const = default;
};

struct Field;

/// A document-store value as it appears in a mutation statement.
class Value {
public:
    using Array = std::vector<Value>;
    using Document = std::vector<Field>;
    using Storage = std::variant<NullValue, bool, std::int64_t, double, std::string, ObjectId, Array, Document>;

    enum class Kind { Null, Boolean, Integer, Double, Text, ObjectId, Array, Document };

    Value() = default;
    Value(NullValue v) : storage_(v) {}
    Value(bool v) : storage_(v) {}
    Value(std::int64_t v) : storage_(v) {}
    Value(int v) : storage_(static_cast<std::int64_t>(v)) {}
    Value(double v) : storage_(v) {}
    Value(std::string v) : storage_(std::move(v)) {}
    Value(const char *v) : storage_(std::string(v)) {}
    Value(ObjectId v) : storage_(std::move(v)) {}
    Value(Array v) : storage_(std::move(v)) {}
    Value(Document v) : storage_(std::move(v)) {}

    Kind kind() const { return static_cast<Kind>(storage_.index()); }

    bool is_null() const { return kind() == Kind::Null; }
    bool is_document() const { return kind() == Kind::Document; }
    bool is_array() const { return kind() == Kind::Array; }

    bool as_bool() const { return std::get<bool>(storage_); }
    std::int64_t as_integer() const { return std::get<std::int64_t>(storage_); }
    double as_double() const { return std::get<double>(storage_); }
    const std::string &as_text() const { return std::get<std::string>(storage_); }
    const ObjectId &as_object_id() const { return std::get<ObjectId>(storage_); }
    const Array &as_array() const { return std::get<Array>(storage_); }
    Array &as_array() { return std::get<Array>(storage_); }
    const Document &as_document() const { return std::get<Document>(storage_); }
    Document &as_document() { return std::get<Document>(storage_); }

    const Storage &storage() const { return storage_; }

    bool operator==(const Value &other) const;

private:
    Storage storage_;
};

struct Field {
    std::string name;
    Value value;
    bool operator==(const Field &) const = default;
};

using Fields = Value::Document;

inline bool Value::operator==(const Value &other) const { return storage_ == other.storage_; }

/// Looks up a field by name; nullptr when absent.
const Value *find_field(const Fields &fields, std::string_view name);
Value *find_field(Fields &fields, std::string_view name);

/// Shortest round-trip text for a double that always reads back as a double literal.
std::string format_double(double v);

/// Identifier literal accepted in `_id` position: string, integer or ObjectId.
struct DocumentId {
    enum class Kind { Text, Integer, ObjectId };
    Kind kind = Kind::Text;
    std::string text;

    static DocumentId of_text(std::string s) { return {Kind::Text, std::move(s)}; }
    static DocumentId of_integer(std::int64_t n) { return {Kind::Integer, std::to_string(n)}; }
    static DocumentId of_object_id(std::string hex) { return {Kind::ObjectId, std::move(hex)}; }

    /// Converts an `_id` value; returns false for values that cannot be identifiers.
    static bool from_value(const Value &v, DocumentId &out);
    Value to_value() const;

    bool operator==(const DocumentId &) const = default;
    auto operator<=>(const DocumentId &) const = default;
};

struct DocumentIdHash {
    std::size_t operator()(const DocumentId &id) const noexcept {
        return std::hash<std::string>{}(id.text) ^ (static_cast<std::size_t>(id.kind) * 0x9e3779b97f4a7c15ULL);
    }
};

} // namespace q2m
