#pragma once

#include "q2m/batch_oracle.hpp"
#include "q2m/engine.hpp"
#include "q2m/query.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace q2m::test {

inline std::filesystem::path fixture(const std::string &name) { return std::filesystem::path(Q2M_FIXTURES_DIR) / name; }

inline std::string read_text(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline std::vector<MutationQuery> shell(std::initializer_list<std::string_view> lines) {
    std::vector<MutationQuery> out;
    for (auto line : lines) {
        out.push_back(parse_statement(line));
    }
    return out;
}

inline std::vector<MutationQuery> read_log(const std::filesystem::path &path, LogFormat format) {
    std::ifstream in(path);
    std::vector<MutationQuery> out;
    for (auto &item : parse_log(in, format)) {
        if (item.is_query()) {
            out.push_back(item.query());
        }
    }
    return out;
}

inline EngineState ingest(const std::vector<MutationQuery> &queries, EngineState state = empty_state()) {
    for (const auto &q : queries) {
        try {
            q2m::apply(state, q);
        } catch (const DuplicateDocumentId &) {
        }
    }
    return state;
}

/// Recount of every (collection, path, type) from the signatures alone.
inline std::map<std::string, std::map<FlatEntry, std::uint64_t>> recount(const EngineState &state) {
    std::map<std::string, std::map<FlatEntry, std::uint64_t>> counts;
    for (const auto &[coll, docs] : state.signatures.collections) {
        for (const auto &[id, signature] : docs) {
            for (const auto &entry : signature) {
                ++counts[coll][entry];
            }
        }
    }
    return counts;
}

/// Empty string when counters match the recount and every model pair is
/// backed by a counter and vice versa; otherwise the first mismatch.
inline std::string counting_mismatch(const EngineState &state) {
    const auto counts = recount(state);
    std::map<std::string, std::map<FlatEntry, std::uint64_t>> stored;
    for (const auto &[coll, counters] : state.metadata.collections) {
        for (const auto &[entry, n] : counters) {
            stored[coll][entry] = n;
        }
    }
    if (counts != stored) {
        return "counters differ from recount";
    }
    std::map<std::string, std::set<FlatEntry>> from_model, from_counters;
    for (const auto &[coll, schema] : state.model.collections) {
        for (const auto &[path, types] : schema.attributes) {
            for (const auto &t : types) {
                from_model[coll].insert({path, t});
            }
        }
    }
    for (const auto &[coll, counters] : counts) {
        for (const auto &[entry, n] : counters) {
            from_counters[coll].insert(entry);
        }
    }
    if (from_model != from_counters) {
        return "model pairs differ from counter keys";
    }
    return {};
}

/// Random document trees over a small field vocabulary, so that paths and
/// types collide across documents.
class RandomDocs {
public:
    explicit RandomDocs(std::uint64_t seed) : rng_(seed) {}

    std::uint64_t below(std::uint64_t n) { return rng_() % n; }

    std::string name() {
        static const char *kNames[] = {"a", "b", "c", "age", "address", "tags", "doctor_id"};
        return kNames[below(std::size(kNames))];
    }

    Value scalar() {
        switch (below(7)) {
        case 0:
            return Value(NullValue{});
        case 1:
            return Value(below(2) == 1);
        case 2:
            return Value(static_cast<std::int64_t>(below(1000)) - 500);
        case 3:
            return Value(static_cast<double>(below(1000)) / 8.0);
        case 4:
            return Value(ObjectId{std::string(24, "0123456789abcdef"[below(16)])});
        default:
            return Value("s" + std::to_string(below(50)));
        }
    }

    Value value(int depth) {
        const auto roll = below(10);
        if (depth > 0 && roll == 0) {
            Value::Array items;
            for (auto n = below(4); n > 0; --n) {
                items.push_back(value(depth - 1));
            }
            return Value(std::move(items));
        }
        if (depth > 0 && roll <= 2) {
            return Value(fields(depth - 1));
        }
        return scalar();
    }

    Fields fields(int depth) {
        Fields out;
        for (auto n = below(5); n > 0; --n) {
            auto key = name();
            if (find_field(out, key) == nullptr) {
                out.push_back({key, value(depth)});
            }
        }
        return out;
    }

    std::string path() {
        std::string p = name();
        for (auto n = below(3); n > 0; --n) {
            p += "." + name();
        }
        return p;
    }

    /// Insert, delete or update over a small id space in collections A and B.
    MutationQuery query() {
        const std::string coll = below(3) == 0 ? "B" : "A";
        auto id = DocumentId::of_text("d" + std::to_string(below(12)));
        const auto roll = below(10);
        if (roll < 4) {
            return InsertQuery{coll, id, fields(2)};
        }
        if (roll < 6) {
            return DeleteQuery{coll, id};
        }
        std::vector<UpdateOp> ops;
        for (auto n = 1 + below(3); n > 0; --n) {
            UpdateOp op;
            const auto p = AttrPath::parse(path());
            switch (below(4)) {
            case 0:
                op = UnsetField{p};
                break;
            case 1: {
                auto next = name();
                op = RenameField{p, next};
                break;
            }
            default:
                op = SetField{p, value(2)};
            }
            ops.push_back(std::move(op));
            try {
                check_update_paths(ops);
            } catch (const ParseError &) {
                ops.pop_back();
            }
        }
        if (ops.empty()) {
            ops.push_back(SetField{AttrPath::field("a"), Value(1)});
        }
        return UpdateQuery{coll, id, std::move(ops)};
    }

private:
    std::mt19937_64 rng_;
};

} // namespace q2m::test
