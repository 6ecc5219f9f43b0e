#pragma once

#include "q2m/value.hpp"

#include <compare>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace q2m {

/// Inferred type of a value. Ordering and equality follow the printed name,
/// which is also the canonical vocabulary of every export format.
class TypeDescriptor {
public:
    enum class Kind { Null, Boolean, Integer, Double, String, ObjectId, Array, Document, Reference };

    TypeDescriptor() : TypeDescriptor(Kind::Null) {}

    static TypeDescriptor null() { return TypeDescriptor(Kind::Null); }
    static TypeDescriptor boolean() { return TypeDescriptor(Kind::Boolean); }
    static TypeDescriptor integer() { return TypeDescriptor(Kind::Integer); }
    static TypeDescriptor dbl() { return TypeDescriptor(Kind::Double); }
    static TypeDescriptor string() { return TypeDescriptor(Kind::String); }
    static TypeDescriptor object_id() { return TypeDescriptor(Kind::ObjectId); }
    static TypeDescriptor document() { return TypeDescriptor(Kind::Document); }
    /// Element types are sorted and deduplicated; an empty set prints as Array(Unknown).
    static TypeDescriptor array(std::vector<TypeDescriptor> elements);
    static TypeDescriptor reference(std::string target, bool multivalued);

    /// Inverse of name(). Throws std::invalid_argument on malformed input.
    static TypeDescriptor parse(std::string_view text);

    Kind kind() const { return kind_; }
    const std::vector<TypeDescriptor> &elements() const { return elements_; }
    const std::string &target() const { return target_; }
    bool multivalued() const { return multivalued_; }
    bool is_container() const { return kind_ == Kind::Document || kind_ == Kind::Array; }

    const std::string &name() const { return name_; }

    bool operator==(const TypeDescriptor &other) const { return name_ == other.name_; }
    std::strong_ordering operator<=>(const TypeDescriptor &other) const { return name_ <=> other.name_; }

private:
    explicit TypeDescriptor(Kind kind);

    Kind kind_;
    std::vector<TypeDescriptor> elements_;
    std::string target_;
    bool multivalued_ = false;
    std::string name_;
};

class PathError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Attribute path: field-name segments and the array-element marker `[]`,
/// printed as `address.city` or `antecedents[].code`. Ordered by printed form.
class AttrPath {
public:
    static constexpr std::string_view kElementMarker = "[]";

    AttrPath() = default;

    static AttrPath field(std::string_view name);
    /// Parses a printed path; throws PathError.
    static AttrPath parse(std::string_view text);
    static AttrPath from_segments(const std::vector<std::string> &segments);
    /// True if `name` can be a single field segment.
    static bool valid_field_name(std::string_view name);

    AttrPath child(std::string_view name) const;
    AttrPath element() const;

    bool empty() const { return text_.empty(); }
    bool has_parent() const;
    AttrPath parent() const;
    std::string last_segment() const;
    std::vector<std::string> segments() const;
    /// True when this path runs through an array element marker.
    bool crosses_array() const { return text_.find(kElementMarker) != std::string::npos; }

    bool is_descendant_of(const AttrPath &ancestor) const;
    bool is_self_or_descendant_of(const AttrPath &ancestor) const { return *this == ancestor || is_descendant_of(ancestor); }
    /// Replaces the `from` prefix of a self-or-descendant path with `to`.
    AttrPath rebase(const AttrPath &from, const AttrPath &to) const;

    const std::string &str() const { return text_; }

    bool operator==(const AttrPath &) const = default;
    auto operator<=>(const AttrPath &) const = default;

private:
    explicit AttrPath(std::string text) : text_(std::move(text)) {}
    std::string text_;
};

/// One (path, type) pair: a flattened attribute occurrence.
struct FlatEntry {
    AttrPath path;
    TypeDescriptor type;

    bool operator==(const FlatEntry &) const = default;
    auto operator<=>(const FlatEntry &) const = default;
};

TypeDescriptor infer_type(const Value &v);

/// Appends the entries contributed by a value stored at `path`: the path itself,
/// then nested document fields and fields of documents held in arrays.
void flatten_value(const AttrPath &path, const Value &v, std::vector<FlatEntry> &out);

/// Sorted, duplicate-free flattening of a document's fields.
std::vector<FlatEntry> flatten_fields(const Fields &fields);

/// Sorts and deduplicates in place.
void normalize_entries(std::vector<FlatEntry> &entries);

} // namespace q2m
