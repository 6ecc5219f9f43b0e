#include "q2m/generator.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace q2m {

void parse_ratios(std::string_view text, GenOptions &options) {
    unsigned parts[3];
    const char *p = text.data();
    const char *end = text.data() + text.size();
    for (int i = 0; i < 3; ++i) {
        auto [next, ec] = std::from_chars(p, end, parts[i]);
        if (ec != std::errc{} || (i < 2 && (next == end || *next != '/'))) {
            throw std::invalid_argument("ratios must look like 60/25/15");
        }
        p = i < 2 ? next + 1 : next;
    }
    if (p != end || parts[0] + parts[1] + parts[2] == 0) {
        throw std::invalid_argument("ratios must look like 60/25/15");
    }
    options.insert_weight = parts[0];
    options.update_weight = parts[1];
    options.delete_weight = parts[2];
}

namespace {

const std::vector<std::string> kFirstNames{"Alice", "Bruno", "Chloe", "David", "Emma", "Farid", "Gina", "Hugo",
                                           "Ines", "Jules", "Karim", "Lea", "Marc", "Nora", "Omar", "Paula"};
const std::vector<std::string> kLastNames{"Martin", "Bernard", "Dubois", "Thomas", "Robert", "Richard", "Petit",
                                          "Durand", "Leroy", "Moreau", "Simon", "Laurent"};
const std::vector<std::string> kCities{"Lyon", "Paris", "Lille", "Nantes", "Rennes", "Nice", "Dijon", "Tours"};
const std::vector<std::string> kStreets{"rue Victor Hugo", "avenue Foch", "rue de la Paix", "boulevard Carnot",
                                        "place Bellecour", "rue Nationale"};
const std::vector<std::string> kSpecialties{"cardiology", "neurology", "oncology", "pediatrics", "dermatology",
                                            "general practice"};
const std::vector<std::string> kConditions{"asthma", "diabetes", "hypertension", "migraine", "allergy",
                                           "arthritis", "anemia", "eczema"};
const std::vector<std::string> kDiagnoses{"flu", "bronchitis", "sprain", "otitis", "gastritis", "checkup",
                                          "tendinitis", "insomnia"};

const std::vector<std::pair<std::string, unsigned>> kInsertWeights{
    {"Patients", 30}, {"Doctors", 15}, {"Antecedents", 20}, {"Consultations", 35}};
const std::vector<std::pair<std::string, unsigned>> kDeleteWeights{
    {"Patients", 30}, {"Doctors", 20}, {"Antecedents", 15}, {"Consultations", 35}};

struct RenamePair {
    const char *from;
    const char *to;
};

const std::vector<std::pair<std::string, std::vector<RenamePair>>> kRenames{
    {"Patients", {{"age", "years"}, {"years", "age"}, {"weight", "weight_kg"}, {"address.city", "address.town"},
                  {"contact", "contacts"}}},
    {"Doctors", {{"phone", "phone_number"}, {"phone_number", "phone"}, {"office", "cabinet"}}},
    {"Antecedents", {{"label", "description"}, {"description", "label"}, {"severity", "grade"}}},
    {"Consultations", {{"diagnosis", "finding"}, {"finding", "diagnosis"}, {"vitals.pulse", "vitals.heart_rate"}}},
};

bool overlaps(const AttrPath &a, const AttrPath &b) {
    return a.is_self_or_descendant_of(b) || b.is_self_or_descendant_of(a);
}

} // namespace

LogGenerator::LogGenerator(const GenOptions &options) : options_(options), rng_(options.seed) {
    for (const auto &[name, prefix] : std::vector<std::pair<std::string, std::string>>{
             {"Patients", "p"}, {"Doctors", "d"}, {"Antecedents", "a"}, {"Consultations", "c"}}) {
        pools_.push_back({name, Pool{prefix, 1, {}}});
    }
}

std::uint64_t LogGenerator::uniform(std::uint64_t n) { return n == 0 ? 0 : rng_() % n; }

bool LogGenerator::chance(double p) { return static_cast<double>(rng_() >> 11) * 0x1.0p-53 < p; }

LogGenerator::Pool &LogGenerator::pool(const std::string &collection) {
    for (auto &[name, p] : pools_) {
        if (name == collection) {
            return p;
        }
    }
    throw std::logic_error("no pool for " + collection);
}

std::string LogGenerator::live_or_unknown(const std::string &collection) {
    auto &p = pool(collection);
    if (p.live.empty() || chance(0.02)) {
        return p.prefix + "x" + std::to_string(uniform(1000));
    }
    return pick(p.live);
}

std::string LogGenerator::referenced_id(const std::string &collection) {
    auto &p = pool(collection);
    if (p.live.empty()) {
        return p.prefix + std::to_string(1 + uniform(p.next_id));
    }
    return pick(p.live);
}

std::string LogGenerator::weighted_collection(const std::vector<std::pair<std::string, unsigned>> &weights,
                                              bool need_live) {
    unsigned total = 0;
    for (const auto &[name, w] : weights) {
        if (!need_live || !pool(name).live.empty()) {
            total += w;
        }
    }
    if (total == 0) {
        return {};
    }
    auto roll = uniform(total);
    for (const auto &[name, w] : weights) {
        if (need_live && pool(name).live.empty()) {
            continue;
        }
        if (roll < w) {
            return name;
        }
        roll -= w;
    }
    return {};
}

Value LogGenerator::integer_or_conflict(std::int64_t value) {
    if (chance(options_.conflict_rate)) {
        return chance(0.5) ? Value(std::to_string(value)) : Value(static_cast<double>(value) + 0.5);
    }
    return Value(value);
}

Value LogGenerator::text_or_conflict(std::string value) {
    if (chance(options_.conflict_rate)) {
        return chance(0.7) ? Value(static_cast<std::int64_t>(uniform(100000))) : Value(NullValue{});
    }
    return Value(std::move(value));
}

ObjectId LogGenerator::object_id() {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string hex(24, '0');
    for (auto &c : hex) {
        c = kHex[uniform(16)];
    }
    return ObjectId{hex};
}

Fields LogGenerator::patient() {
    Fields f;
    f.push_back({"name", text_or_conflict(pick(kFirstNames) + " " + pick(kLastNames))});
    f.push_back({"age", integer_or_conflict(static_cast<std::int64_t>(1 + uniform(95)))});
    Fields address{{"street", Value(std::to_string(1 + uniform(120)) + " " + pick(kStreets))},
                   {"city", text_or_conflict(pick(kCities))},
                   {"zip", integer_or_conflict(static_cast<std::int64_t>(10000 + uniform(85000)))}};
    f.push_back({"address", Value(std::move(address))});
    Value::Array antecedents;
    for (auto n = uniform(4); n > 0; --n) {
        antecedents.emplace_back(referenced_id("Antecedents"));
    }
    f.push_back({"antecedent_ids", Value(std::move(antecedents))});
    if (chance(0.6)) {
        f.push_back({"weight", Value(45.0 + static_cast<double>(uniform(700)) / 10.0)});
    }
    if (chance(0.3)) {
        Value::Array history;
        for (auto n = 1 + uniform(3); n > 0; --n) {
            char date[16];
            std::snprintf(date, sizeof date, "20%02u-%02u-%02u", static_cast<unsigned>(10 + uniform(15)),
                          static_cast<unsigned>(1 + uniform(12)), static_cast<unsigned>(1 + uniform(28)));
            history.emplace_back(Fields{{"date", Value(date)}, {"note", Value(pick(kDiagnoses))}});
        }
        f.push_back({"history", Value(std::move(history))});
    }
    if (chance(0.2)) {
        f.push_back({"contact",
                     Value(Fields{{"phone", Value("06" + std::to_string(10000000 + uniform(89999999)))},
                                  {"email", Value(pick(kFirstNames) + "@example.org")}})});
    }
    return f;
}

Fields LogGenerator::doctor() {
    Fields f;
    f.push_back({"name", Value("Dr " + pick(kLastNames))});
    f.push_back({"specialty", text_or_conflict(pick(kSpecialties))});
    f.push_back({"phone", text_or_conflict("04" + std::to_string(10000000 + uniform(89999999)))});
    if (chance(0.5)) {
        f.push_back({"office", Value(Fields{{"building", Value(std::string(1, static_cast<char>('A' + uniform(6))))},
                                            {"floor", integer_or_conflict(static_cast<std::int64_t>(uniform(8)))}})});
    }
    return f;
}

Fields LogGenerator::antecedent() {
    const auto &condition = pick(kConditions);
    Fields f;
    f.push_back({"code", Value(condition.substr(0, 3) + std::to_string(uniform(100)))});
    f.push_back({"label", text_or_conflict(condition)});
    f.push_back({"chronic", Value(chance(0.4))});
    f.push_back({"severity", integer_or_conflict(static_cast<std::int64_t>(1 + uniform(5)))});
    return f;
}

Fields LogGenerator::consultation() {
    char date[16];
    std::snprintf(date, sizeof date, "2024-%02u-%02u", static_cast<unsigned>(1 + uniform(12)),
                  static_cast<unsigned>(1 + uniform(28)));
    Fields f;
    f.push_back({"doctor_id", Value(referenced_id("Doctors"))});
    f.push_back({"patient_id", Value(referenced_id("Patients"))});
    f.push_back({"date", Value(date)});
    f.push_back({"diagnosis", text_or_conflict(pick(kDiagnoses))});
    f.push_back({"vitals", Value(Fields{{"temperature", Value(36.0 + static_cast<double>(uniform(50)) / 10.0)},
                                        {"pulse", integer_or_conflict(static_cast<std::int64_t>(50 + uniform(70)))}})});
    if (chance(0.2)) {
        f.push_back({"scan", Value(object_id())});
    }
    return f;
}

std::vector<UpdateOp> LogGenerator::field_updates(const std::string &collection) {
    std::vector<UpdateOp> candidates;
    auto set = [&](const char *path, Value v) { candidates.push_back(SetField{AttrPath::parse(path), std::move(v)}); };
    auto unset = [&](const char *path) { candidates.push_back(UnsetField{AttrPath::parse(path)}); };
    if (collection == "Patients") {
        set("age", integer_or_conflict(static_cast<std::int64_t>(1 + uniform(95))));
        set("weight", Value(45.0 + static_cast<double>(uniform(700)) / 10.0));
        unset("weight");
        set("address.city", text_or_conflict(pick(kCities)));
        set("address", Value(Fields{{"street", Value(pick(kStreets))},
                                    {"city", Value(pick(kCities))},
                                    {"zip", integer_or_conflict(static_cast<std::int64_t>(10000 + uniform(85000)))}}));
        set("address.country", Value("FR"));
        set("contact.email", Value(pick(kFirstNames) + "@example.org"));
        unset("contact");
        set("notes", text_or_conflict(pick(kDiagnoses)));
        set("antecedent_ids", Value(Value::Array{Value(referenced_id("Antecedents"))}));
        unset("history");
    } else if (collection == "Doctors") {
        set("phone", text_or_conflict("04" + std::to_string(10000000 + uniform(89999999))));
        set("specialty", Value(pick(kSpecialties)));
        set("office.floor", integer_or_conflict(static_cast<std::int64_t>(uniform(8))));
        unset("office");
        set("active", Value(chance(0.8)));
    } else if (collection == "Antecedents") {
        set("chronic", Value(chance(0.5)));
        set("severity", integer_or_conflict(static_cast<std::int64_t>(1 + uniform(5))));
        set("label", text_or_conflict(pick(kConditions)));
        unset("label");
    } else {
        set("diagnosis", text_or_conflict(pick(kDiagnoses)));
        set("vitals.temperature", Value(36.0 + static_cast<double>(uniform(50)) / 10.0));
        set("vitals.pulse", integer_or_conflict(static_cast<std::int64_t>(50 + uniform(70))));
        unset("scan");
        set("scan", Value(object_id()));
        set("followup", Value(chance(0.3)));
    }

    std::vector<UpdateOp> ops;
    const auto wanted = 1 + (chance(0.3) ? 1 + uniform(2) : 0);
    for (std::size_t attempt = 0; attempt < 6 && ops.size() < wanted; ++attempt) {
        const auto &op = pick(candidates);
        const bool clash = std::any_of(ops.begin(), ops.end(),
                                       [&op](const UpdateOp &o) { return overlaps(op_path(o), op_path(op)); });
        if (!clash) {
            ops.push_back(op);
        }
    }
    return ops;
}

RenameField LogGenerator::rename_op(const std::string &collection) {
    for (const auto &[name, pairs] : kRenames) {
        if (name == collection) {
            const auto &pair = pick(pairs);
            const auto to = AttrPath::parse(pair.to);
            return RenameField{AttrPath::parse(pair.from), to.last_segment()};
        }
    }
    throw std::logic_error("no renames for " + collection);
}

MutationQuery LogGenerator::make_insert() {
    const auto collection = weighted_collection(kInsertWeights, false);
    Fields fields = collection == "Patients"      ? patient()
                    : collection == "Doctors"     ? doctor()
                    : collection == "Antecedents" ? antecedent()
                                                  : consultation();
    if (chance(0.01)) {
        return InsertQuery{collection, std::nullopt, std::move(fields)};
    }
    auto &p = pool(collection);
    std::string id = p.prefix + std::to_string(p.next_id++);
    p.live.push_back(id);
    return InsertQuery{collection, DocumentId::of_text(std::move(id)), std::move(fields)};
}

MutationQuery LogGenerator::make_update() {
    const auto collection = weighted_collection(kInsertWeights, true);
    if (collection.empty()) {
        return make_insert();
    }
    const double update_share = static_cast<double>(options_.update_weight) /
                                (options_.insert_weight + options_.update_weight + options_.delete_weight);
    const bool rename = update_share > 0 && chance(options_.rename_rate / update_share);
    auto id = DocumentId::of_text(live_or_unknown(collection));
    std::vector<UpdateOp> ops;
    if (rename) {
        ops.push_back(rename_op(collection));
    } else {
        ops = field_updates(collection);
    }
    return UpdateQuery{collection, std::move(id), std::move(ops)};
}

MutationQuery LogGenerator::make_delete() {
    const auto collection = weighted_collection(kDeleteWeights, true);
    if (collection.empty()) {
        return make_insert();
    }
    auto &p = pool(collection);
    if (chance(0.02)) {
        return DeleteQuery{collection, DocumentId::of_text(p.prefix + "x" + std::to_string(uniform(1000)))};
    }
    const auto index = uniform(p.live.size());
    std::string id = std::move(p.live[index]);
    p.live[index] = std::move(p.live.back());
    p.live.pop_back();
    return DeleteQuery{collection, DocumentId::of_text(std::move(id))};
}

MutationQuery LogGenerator::next() {
    ++emitted_;
    const auto total = options_.insert_weight + options_.update_weight + options_.delete_weight;
    const auto roll = uniform(total);
    if (roll < options_.insert_weight) {
        return make_insert();
    }
    if (roll < options_.insert_weight + options_.update_weight) {
        return make_update();
    }
    return make_delete();
}

std::vector<MutationQuery> LogGenerator::generate() {
    std::vector<MutationQuery> out;
    out.reserve(options_.count);
    for (std::size_t i = 0; i < options_.count; ++i) {
        out.push_back(next());
    }
    return out;
}

void write_generated_log(const GenOptions &options, std::ostream &out, LogFormat format) {
    LogGenerator gen(options);
    for (std::size_t i = 0; i < options.count; ++i) {
        out << print_query(gen.next(), format) << '\n';
    }
}

} // namespace q2m
