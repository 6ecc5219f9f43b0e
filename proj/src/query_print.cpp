#include "literal.hpp"
#include "q2m/query.hpp"

namespace q2m {

using detail::append_quoted;

namespace {

bool is_shell_identifier(std::string_view s) {
    if (s.empty()) {
        return false;
    }
    auto start = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || c == '$'; };
    if (!start(s.front())) {
        return false;
    }
    for (char c : s) {
        if (!start(c) && !(c >= '0' && c <= '9')) {
            return false;
        }
    }
    return true;
}

class Printer {
public:
    explicit Printer(detail::Dialect dialect) : dialect_(dialect) {}

    std::string out;

    void key(std::string_view k) {
        if (dialect_ == detail::Dialect::Shell && is_shell_identifier(k)) {
            out += k;
        } else {
            append_quoted(out, k);
        }
        out += shell() ? ": " : ":";
    }

    void separator() { out += shell() ? ", " : ","; }

    void value(const Value &v) {
        switch (v.kind()) {
        case Value::Kind::Null:
            out += "null";
            break;
        case Value::Kind::Boolean:
            out += v.as_bool() ? "true" : "false";
            break;
        case Value::Kind::Integer:
            out += std::to_string(v.as_integer());
            break;
        case Value::Kind::Double:
            out += format_double(v.as_double());
            break;
        case Value::Kind::Text:
            append_quoted(out, v.as_text());
            break;
        case Value::Kind::ObjectId:
            if (shell()) {
                out += "ObjectId(";
                append_quoted(out, v.as_object_id().hex);
                out += ')';
            } else {
                out += "{\"$oid\":";
                append_quoted(out, v.as_object_id().hex);
                out += '}';
            }
            break;
        case Value::Kind::Array: {
            out += '[';
            bool first = true;
            for (const auto &element : v.as_array()) {
                if (!first) {
                    separator();
                }
                first = false;
                value(element);
            }
            out += ']';
            break;
        }
        case Value::Kind::Document:
            document(v.as_document(), nullptr);
            break;
        }
    }

    void document(const Fields &fields, const DocumentId *id) {
        out += '{';
        bool first = true;
        if (id != nullptr) {
            key("_id");
            value(id->to_value());
            first = false;
        }
        for (const auto &field : fields) {
            if (!first) {
                separator();
            }
            first = false;
            key(field.name);
            value(field.value);
        }
        out += '}';
    }

private:
    bool shell() const { return dialect_ == detail::Dialect::Shell; }
    detail::Dialect dialect_;
};

// Ops are grouped per operator in order of first appearance.
void shell_update(Printer &p, const std::vector<UpdateOp> &ops) {
    std::vector<std::size_t> order;
    for (const auto &op : ops) {
        if (std::find(order.begin(), order.end(), op.index()) == order.end()) {
            order.push_back(op.index());
        }
    }
    p.out += '{';
    bool first_group = true;
    for (auto index : order) {
        if (!first_group) {
            p.separator();
        }
        first_group = false;
        static constexpr const char *kOperator[] = {"$set", "$unset", "$rename"};
        p.key(kOperator[index]);
        p.out += '{';
        bool first = true;
        for (const auto &op : ops) {
            if (op.index() != index) {
                continue;
            }
            if (!first) {
                p.separator();
            }
            first = false;
            p.key(op_path(op).str());
            if (const auto *set = std::get_if<SetField>(&op)) {
                p.value(set->value);
            } else if (const auto *rename = std::get_if<RenameField>(&op)) {
                append_quoted(p.out, rename->new_name);
            } else {
                p.out += "\"\"";
            }
        }
        p.out += '}';
    }
    p.out += '}';
}

} // namespace

std::string print_statement(const MutationQuery &q) {
    Printer p(detail::Dialect::Shell);
    p.out = "db.";
    p.out += collection_of(q);
    if (const auto *insert = std::get_if<InsertQuery>(&q)) {
        p.out += ".insertOne(";
        p.document(insert->fields, insert->id ? &*insert->id : nullptr);
    } else if (const auto *del = std::get_if<DeleteQuery>(&q)) {
        p.out += ".deleteOne(";
        p.document({}, &del->id);
    } else {
        const auto &update = std::get<UpdateQuery>(q);
        p.out += ".updateOne(";
        p.document({}, &update.id);
        p.separator();
        shell_update(p, update.ops);
    }
    p.out += ')';
    return std::move(p.out);
}

std::string print_jsonl(const MutationQuery &q) {
    Printer p(detail::Dialect::Json);
    p.out = "{\"op\":\"";
    p.out += to_string(kind_of(q));
    p.out += "\",\"coll\":";
    append_quoted(p.out, collection_of(q));
    auto emit_id = [&p](const DocumentId &id) {
        p.out += ",\"id\":";
        p.value(id.to_value());
    };
    if (const auto *insert = std::get_if<InsertQuery>(&q)) {
        if (insert->id) {
            emit_id(*insert->id);
        }
        p.out += ",\"fields\":";
        p.document(insert->fields, nullptr);
    } else if (const auto *del = std::get_if<DeleteQuery>(&q)) {
        emit_id(del->id);
    } else {
        const auto &update = std::get<UpdateQuery>(q);
        emit_id(update.id);
        p.out += ",\"ops\":[";
        bool first = true;
        for (const auto &op : update.ops) {
            if (!first) {
                p.out += ',';
            }
            first = false;
            if (const auto *set = std::get_if<SetField>(&op)) {
                p.out += "{\"set\":{\"path\":";
                append_quoted(p.out, set->path.str());
                p.out += ",\"value\":";
                p.value(set->value);
                p.out += "}}";
            } else if (const auto *unset = std::get_if<UnsetField>(&op)) {
                p.out += "{\"unset\":{\"path\":";
                append_quoted(p.out, unset->path.str());
                p.out += "}}";
            } else {
                const auto &rename = std::get<RenameField>(op);
                p.out += "{\"rename\":{\"path\":";
                append_quoted(p.out, rename.path.str());
                p.out += ",\"new\":";
                append_quoted(p.out, rename.new_name);
                p.out += "}}";
            }
        }
        p.out += ']';
    }
    p.out += '}';
    return std::move(p.out);
}

std::string print_query(const MutationQuery &q, LogFormat format) {
    return format == LogFormat::Shell ? print_statement(q) : print_jsonl(q);
}

} // namespace q2m
