#include "q2m/types.hpp"

#include <algorithm>
#include <charconv>

namespace q2m {

namespace {

const char *scalar_name(TypeDescriptor::Kind kind) {
    switch (kind) {
    case TypeDescriptor::Kind::Null:
        return "Null";
    case TypeDescriptor::Kind::Boolean:
        return "Boolean";
    case TypeDescriptor::Kind::Integer:
        return "Integer";
    case TypeDescriptor::Kind::Double:
        return "Double";
    case TypeDescriptor::Kind::String:
        return "String";
    case TypeDescriptor::Kind::ObjectId:
        return "ObjectId";
    case TypeDescriptor::Kind::Document:
        return "Document";
    default:
        return "";
    }
}

class TypeNameParser {
public:
    explicit TypeNameParser(std::string_view text) : text_(text) {}

    TypeDescriptor parse_all() {
        auto t = parse_one();
        if (pos_ != text_.size()) {
            fail("trailing characters");
        }
        return t;
    }

private:
    TypeDescriptor parse_one() {
        if (consume("Array(")) {
            std::vector<TypeDescriptor> elements;
            if (!consume("Unknown)")) {
                elements.push_back(parse_one());
                while (consume("|")) {
                    elements.push_back(parse_one());
                }
                expect(")");
            }
            return TypeDescriptor::array(std::move(elements));
        }
        if (consume("Ref[](")) {
            return TypeDescriptor::reference(read_target(), true);
        }
        if (consume("Ref(")) {
            return TypeDescriptor::reference(read_target(), false);
        }
        static constexpr TypeDescriptor::Kind scalars[] = {
            TypeDescriptor::Kind::Null,   TypeDescriptor::Kind::Boolean,  TypeDescriptor::Kind::Integer,
            TypeDescriptor::Kind::Double, TypeDescriptor::Kind::String,   TypeDescriptor::Kind::ObjectId,
            TypeDescriptor::Kind::Document};
        for (auto kind : scalars) {
            std::string_view name = scalar_name(kind);
            if (text_.substr(pos_, name.size()) == name) {
                pos_ += name.size();
                switch (kind) {
                case TypeDescriptor::Kind::Null:
                    return TypeDescriptor::null();
                case TypeDescriptor::Kind::Boolean:
                    return TypeDescriptor::boolean();
                case TypeDescriptor::Kind::Integer:
                    return TypeDescriptor::integer();
                case TypeDescriptor::Kind::Double:
                    return TypeDescriptor::dbl();
                case TypeDescriptor::Kind::String:
                    return TypeDescriptor::string();
                case TypeDescriptor::Kind::ObjectId:
                    return TypeDescriptor::object_id();
                default:
                    return TypeDescriptor::document();
                }
            }
        }
        fail("unknown type name");
    }

    std::string read_target() {
        auto end = text_.find(')', pos_);
        if (end == std::string_view::npos || end == pos_) {
            fail("bad reference target");
        }
        std::string target(text_.substr(pos_, end - pos_));
        pos_ = end + 1;
        return target;
    }

    bool consume(std::string_view token) {
        if (text_.substr(pos_, token.size()) == token) {
            pos_ += token.size();
            return true;
        }
        return false;
    }

    void expect(std::string_view token) {
        if (!consume(token)) {
            fail("expected '" + std::string(token) + "'");
        }
    }

    [[noreturn]] void fail(const std::string &what) const {
        throw std::invalid_argument("invalid type name '" + std::string(text_) + "': " + what + " at offset " +
                                    std::to_string(pos_));
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace

TypeDescriptor::TypeDescriptor(Kind kind) : kind_(kind), name_(scalar_name(kind)) {}

TypeDescriptor TypeDescriptor::array(std::vector<TypeDescriptor> elements) {
    std::sort(elements.begin(), elements.end());
    elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
    TypeDescriptor t(Kind::Array);
    t.name_ = "Array(";
    if (elements.empty()) {
        t.name_ += "Unknown";
    }
    for (std::size_t i = 0; i < elements.size(); ++i) {
        if (i > 0) {
            t.name_ += '|';
        }
        t.name_ += elements[i].name();
    }
    t.name_ += ')';
    t.elements_ = std::move(elements);
    return t;
}

TypeDescriptor TypeDescriptor::reference(std::string target, bool multivalued) {
    TypeDescriptor t(Kind::Reference);
    t.name_ = (multivalued ? "Ref[](" : "Ref(") + target + ")";
    t.target_ = std::move(target);
    t.multivalued_ = multivalued;
    return t;
}

TypeDescriptor TypeDescriptor::parse(std::string_view text) { return TypeNameParser(text).parse_all(); }

// ---------------------------------------------------------------------------
// AttrPath

bool AttrPath::valid_field_name(std::string_view name) {
    return !name.empty() && name.find('.') == std::string_view::npos &&
           name.find(kElementMarker) == std::string_view::npos && name.front() != '$';
}

AttrPath AttrPath::field(std::string_view name) {
    if (!valid_field_name(name)) {
        throw PathError("invalid field name '" + std::string(name) + "'");
    }
    return AttrPath(std::string(name));
}

AttrPath AttrPath::parse(std::string_view text) {
    if (text.empty()) {
        throw PathError("empty attribute path");
    }
    std::size_t start = 0;
    while (true) {
        auto dot = text.find('.', start);
        auto piece = text.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
        while (piece.size() >= 2 && piece.substr(piece.size() - 2) == kElementMarker) {
            piece.remove_suffix(2);
        }
        if (!valid_field_name(piece)) {
            throw PathError("invalid attribute path '" + std::string(text) + "'");
        }
        if (dot == std::string_view::npos) {
            break;
        }
        start = dot + 1;
    }
    return AttrPath(std::string(text));
}

AttrPath AttrPath::from_segments(const std::vector<std::string> &segments) {
    AttrPath path;
    for (const auto &segment : segments) {
        if (segment == kElementMarker) {
            if (path.empty()) {
                throw PathError("path cannot start with an array marker");
            }
            path = path.element();
        } else {
            path = path.empty() ? field(segment) : path.child(segment);
        }
    }
    if (path.empty()) {
        throw PathError("empty attribute path");
    }
    return path;
}

AttrPath AttrPath::child(std::string_view name) const {
    if (!valid_field_name(name)) {
        throw PathError("invalid field name '" + std::string(name) + "'");
    }
    std::string text;
    text.reserve(text_.size() + 1 + name.size());
    text += text_;
    text += '.';
    text += name;
    return AttrPath(std::move(text));
}

AttrPath AttrPath::element() const { return AttrPath(text_ + std::string(kElementMarker)); }

bool AttrPath::has_parent() const {
    return text_.size() >= 2 && (text_.ends_with(kElementMarker) || text_.find('.') != std::string::npos);
}

AttrPath AttrPath::parent() const {
    if (text_.ends_with(kElementMarker)) {
        return AttrPath(text_.substr(0, text_.size() - 2));
    }
    auto dot = text_.rfind('.');
    if (dot == std::string::npos) {
        return AttrPath();
    }
    return AttrPath(text_.substr(0, dot));
}

std::string AttrPath::last_segment() const {
    if (text_.ends_with(kElementMarker)) {
        return std::string(kElementMarker);
    }
    auto dot = text_.rfind('.');
    return dot == std::string::npos ? text_ : text_.substr(dot + 1);
}

std::vector<std::string> AttrPath::segments() const {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text_.size()) {
        auto dot = text_.find('.', start);
        std::string_view piece(text_.data() + start, (dot == std::string::npos ? text_.size() : dot) - start);
        std::size_t markers = 0;
        while (piece.size() >= 2 && piece.substr(piece.size() - 2) == kElementMarker) {
            piece.remove_suffix(2);
            ++markers;
        }
        out.emplace_back(piece);
        out.insert(out.end(), markers, std::string(kElementMarker));
        if (dot == std::string::npos) {
            break;
        }
        start = dot + 1;
    }
    return out;
}

bool AttrPath::is_descendant_of(const AttrPath &ancestor) const {
    const auto n = ancestor.text_.size();
    if (n == 0 || text_.size() <= n || text_.compare(0, n, ancestor.text_) != 0) {
        return false;
    }
    return text_[n] == '.' || text_.compare(n, 2, kElementMarker) == 0;
}

AttrPath AttrPath::rebase(const AttrPath &from, const AttrPath &to) const {
    return AttrPath(to.text_ + text_.substr(from.text_.size()));
}

// ---------------------------------------------------------------------------
// inference and flattening

TypeDescriptor infer_type(const Value &v) {
    switch (v.kind()) {
    case Value::Kind::Null:
        return TypeDescriptor::null();
    case Value::Kind::Boolean:
        return TypeDescriptor::boolean();
    case Value::Kind::Integer:
        return TypeDescriptor::integer();
    case Value::Kind::Double:
        return TypeDescriptor::dbl();
    case Value::Kind::Text:
        return TypeDescriptor::string();
    case Value::Kind::ObjectId:
        return TypeDescriptor::object_id();
    case Value::Kind::Document:
        return TypeDescriptor::document();
    case Value::Kind::Array: {
        std::vector<TypeDescriptor> elements;
        elements.reserve(v.as_array().size());
        for (const auto &element : v.as_array()) {
            elements.push_back(infer_type(element));
        }
        return TypeDescriptor::array(std::move(elements));
    }
    }
    return TypeDescriptor::null();
}

void flatten_value(const AttrPath &path, const Value &v, std::vector<FlatEntry> &out) {
    out.push_back({path, infer_type(v)});
    if (v.is_document()) {
        for (const auto &field : v.as_document()) {
            flatten_value(path.child(field.name), field.value, out);
        }
    } else if (v.is_array()) {
        for (const auto &element : v.as_array()) {
            if (!element.is_document()) {
                continue;
            }
            const AttrPath element_path = path.element();
            for (const auto &field : element.as_document()) {
                flatten_value(element_path.child(field.name), field.value, out);
            }
        }
    }
}

void normalize_entries(std::vector<FlatEntry> &entries) {
    std::sort(entries.begin(), entries.end());
    entries.erase(std::unique(entries.begin(), entries.end()), entries.end());
}

std::vector<FlatEntry> flatten_fields(const Fields &fields) {
    std::vector<FlatEntry> out;
    for (const auto &field : fields) {
        flatten_value(AttrPath::field(field.name), field.value, out);
    }
    normalize_entries(out);
    return out;
}

} // namespace q2m
