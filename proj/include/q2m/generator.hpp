#pragma once

#include "q2m/query.hpp"

#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <vector>

namespace q2m {

struct GenOptions {
    std::size_t count = 1000;
    std::uint64_t seed = 1;
    /// Relative weights of insert, update and delete statements.
    unsigned insert_weight = 60;
    unsigned update_weight = 25;
    unsigned delete_weight = 15;
    /// Chance that a generated value takes an unusual type for its field.
    double conflict_rate = 0.05;
    /// Fraction of all statements that are renames.
    double rename_rate = 0.03;
};

/// Parses "60/25/15" into the three weights. Throws std::invalid_argument.
void parse_ratios(std::string_view text, GenOptions &options);

/// Deterministic synthetic workload over a small medical database
/// (Patients, Doctors, Antecedents, Consultations). Updates and deletes
/// mostly target live documents.
class LogGenerator {
public:
    explicit LogGenerator(const GenOptions &options);

    MutationQuery next();
    std::vector<MutationQuery> generate();

private:
    struct Pool {
        std::string prefix;
        std::uint64_t next_id = 1;
        std::vector<std::string> live;
    };

    std::uint64_t uniform(std::uint64_t n);
    bool chance(double p);
    template <class T> const T &pick(const std::vector<T> &items) { return items[uniform(items.size())]; }

    Pool &pool(const std::string &collection);
    std::string live_or_unknown(const std::string &collection);
    std::string referenced_id(const std::string &collection);

    MutationQuery make_insert();
    MutationQuery make_update();
    MutationQuery make_delete();
    std::string weighted_collection(const std::vector<std::pair<std::string, unsigned>> &weights, bool need_live);

    Fields patient();
    Fields doctor();
    Fields antecedent();
    Fields consultation();
    std::vector<UpdateOp> field_updates(const std::string &collection);
    RenameField rename_op(const std::string &collection);
    Value integer_or_conflict(std::int64_t value);
    Value text_or_conflict(std::string value);
    ObjectId object_id();

    GenOptions options_;
    std::mt19937_64 rng_;
    std::vector<std::pair<std::string, Pool>> pools_;
    std::uint64_t emitted_ = 0;
};

/// Writes `options.count` statements as JSON lines.
void write_generated_log(const GenOptions &options, std::ostream &out, LogFormat format = LogFormat::JsonLines);

} // namespace q2m
