#include "q2m/value.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace q2m {

const Value *find_field(const Fields &fields, std::string_view name) {
    for (const auto &field : fields) {
        if (field.name == name) {
            return &field.value;
        }
    }
    return nullptr;
}

Value *find_field(Fields &fields, std::string_view name) {
    for (auto &field : fields) {
        if (field.name == name) {
            return &field.value;
        }
    }
    return nullptr;
}

std::string format_double(double v) {
    if (!std::isfinite(v)) {
        throw std::domain_error("non-finite double has no literal form");
    }
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    std::string text(buf.data(), end);
    if (text.find_first_of(".eE") == std::string::npos) {
        text += ".0";
    }
    return text;
}

bool DocumentId::from_value(const Value &v, DocumentId &out) {
    switch (v.kind()) {
    case Value::Kind::Text:
        out = of_text(v.as_text());
        return true;
    case Value::Kind::Integer:
        out = of_integer(v.as_integer());
        return true;
    case Value::Kind::ObjectId:
        out = of_object_id(v.as_object_id().hex);
        return true;
    default:
        return false;
    }
}

Value DocumentId::to_value() const {
    switch (kind) {
    case Kind::Integer:
        return Value(static_cast<std::int64_t>(std::stoll(text)));
    case Kind::ObjectId:
        return Value(ObjectId{text});
    case Kind::Text:
        break;
    }
    return Value(text);
}

} // namespace q2m
