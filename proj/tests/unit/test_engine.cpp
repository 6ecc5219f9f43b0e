#include "doctest.h"
#include "../golden_cases.hpp"
#include "support.hpp"

using namespace q2m;

namespace {

std::uint64_t counter(const EngineState &s, const std::string &coll, const char *path, TypeDescriptor type) {
    return s.metadata.count(coll, {AttrPath::parse(path), std::move(type)});
}

bool has_action(const ApplyReport &r, Action::Kind kind, Rule rule, const char *path) {
    return std::any_of(r.actions.begin(), r.actions.end(), [&](const Action &a) {
        return a.kind == kind && a.rule == rule && a.entry.path.str() == path;
    });
}

} // namespace

TEST_CASE("rule-level golden fixtures") {
    for (const char *name : test::kGoldenCases) {
        CAPTURE(name);
        const auto outcome = test::run_golden(Q2M_FIXTURES_DIR, name);
        CHECK(outcome.model == outcome.expected_model);
        CHECK(outcome.counters == outcome.expected_counters);
    }
}

TEST_CASE("insert into an empty state creates the collection") {
    EngineState s = empty_state();
    auto report = q2m::apply(s, parse_statement(R"(db.Patients.insertOne({_id: "p1", name: "DUPONT David", age: 42}))"));
    CHECK(has_action(report, Action::Kind::CreateCollection, Rule::R1, ""));
    CHECK(has_action(report, Action::Kind::AddModelType, Rule::R1, "age"));
    CHECK(has_action(report, Action::Kind::IncrementCounter, Rule::R2, "name"));
    CHECK(counter(s, "Patients", "age", TypeDescriptor::integer()) == 1);
    CHECK(s.applied_count == 1);
    CHECK(s.signatures.document_count() == 1);
}

TEST_CASE("deleting the sole document removes the collection") {
    EngineState s = test::ingest(test::shell({R"(db.Patients.insertOne({_id: "p1", name: "x"}))",
                                              R"(db.Patients.deleteOne({_id: "p1"}))"}));
    CHECK(s.model.collections.empty());
    CHECK(s.metadata.collections.empty());
    CHECK(s.signatures.collections.empty());
    CHECK(export_snapshot(s) == "{\"id\":\"q2m-model\",\"collections\":[]}\n");
}

TEST_CASE("unknown ids and absent fields are warnings") {
    EngineState s = test::ingest(test::shell({R"(db.Patients.insertOne({_id: "p1", age: 42}))"}));
    const std::string before = export_snapshot(s);
    const auto counters_before = s.metadata;

    auto r1 = q2m::apply(s, parse_statement(R"(db.Patients.deleteOne({_id: "p9"}))"));
    auto r2 = q2m::apply(s, parse_statement(R"(db.Patients.updateOne({_id: "p9"}, {$set: {age: 1}}))"));
    auto r3 = q2m::apply(s, parse_statement(R"(db.Patients.updateOne({_id: "p1"}, {$unset: {weight: ""}}))"));
    auto r4 = q2m::apply(s, parse_statement(R"(db.Patients.updateOne({_id: "p1"}, {$rename: {weight: "w"}}))"));
    auto r5 = q2m::apply(s, parse_statement(R"(db.Patients.updateOne({_id: "p1"}, {$set: {"age.years": 3}}))"));
    for (const auto *r : {&r1, &r2, &r3, &r4, &r5}) {
        CHECK(r->warnings.size() == 1);
        CHECK(r->actions.empty());
    }
    CHECK(export_snapshot(s) == before);
    CHECK(s.metadata == counters_before);
    CHECK(s.applied_count == 6);
}

TEST_CASE("rename with one holder moves the pair") {
    EngineState s = test::ingest(test::shell({R"(db.Patients.insertOne({_id: "p1", age: 42}))"}));
    auto report = q2m::apply(s, parse_statement(R"(db.Patients.updateOne({_id: "p1"}, {$rename: {age: "birthYear"}}))"));
    CHECK(has_action(report, Action::Kind::RemoveModelType, Rule::R7, "age"));
    CHECK(has_action(report, Action::Kind::AddModelType, Rule::R7, "birthYear"));
    CHECK(s.model.collections.at("Patients").attributes.count(AttrPath::field("age")) == 0);
    CHECK(counter(s, "Patients", "birthYear", TypeDescriptor::integer()) == 1);
}

TEST_CASE("rename with two holders keeps the old pair and decrements it") {
    EngineState s = test::ingest(test::shell({R"(db.Patients.insertOne({_id: "p1", age: 42}))",
                                              R"(db.Patients.insertOne({_id: "p2", age: 30}))"}));
    auto report = q2m::apply(s, parse_statement(R"(db.Patients.updateOne({_id: "p1"}, {$rename: {age: "birthYear"}}))"));
    CHECK(has_action(report, Action::Kind::DecrementCounter, Rule::R7, "age"));
    CHECK(counter(s, "Patients", "age", TypeDescriptor::integer()) == 1);
    CHECK(counter(s, "Patients", "birthYear", TypeDescriptor::integer()) == 1);
    // The decrement matters: deleting the remaining holder must retire the pair.
    q2m::apply(s, parse_statement(R"(db.Patients.deleteOne({_id: "p2"}))"));
    CHECK(s.model.collections.at("Patients").attributes.count(AttrPath::field("age")) == 0);
    CHECK(test::counting_mismatch(s).empty());
}

TEST_CASE("type change with two holders adds a second type") {
    EngineState s = test::ingest(test::shell({R"(db.Patients.insertOne({_id: "p1", age: 42}))",
                                              R"(db.Patients.insertOne({_id: "p2", age: 30}))"}));
    auto report = q2m::apply(s, parse_statement(R"(db.Patients.updateOne({_id: "p1"}, {$set: {age: "forty"}}))"));
    CHECK(has_action(report, Action::Kind::DecrementCounter, Rule::R8, "age"));
    CHECK(has_action(report, Action::Kind::AddModelType, Rule::R8, "age"));
    CHECK(counter(s, "Patients", "age", TypeDescriptor::integer()) == 1);
    CHECK(counter(s, "Patients", "age", TypeDescriptor::string()) == 1);
}

TEST_CASE("setting the same type leaves counters alone") {
    EngineState s = test::ingest(test::shell({R"(db.Patients.insertOne({_id: "p1", age: 42}))"}));
    const auto metadata = s.metadata;
    auto report = q2m::apply(s, parse_statement(R"(db.Patients.updateOne({_id: "p1"}, {$set: {age: 43}}))"));
    CHECK(std::all_of(report.actions.begin(), report.actions.end(),
                      [](const Action &a) { return a.kind == Action::Kind::SetSignature; }));
    CHECK(s.metadata == metadata);
}

TEST_CASE("nested set creates intermediate documents") {
    EngineState s = test::ingest(test::shell({R"(db.Patients.insertOne({_id: "p1", name: "x"}))"}));
    auto report = q2m::apply(s, parse_statement(R"(db.Patients.updateOne({_id: "p1"}, {$set: {"address.geo.lat": 45.7}}))"));
    CHECK(has_action(report, Action::Kind::AddModelType, Rule::R5, "address"));
    CHECK(has_action(report, Action::Kind::AddModelType, Rule::R5, "address.geo"));
    CHECK(counter(s, "Patients", "address.geo.lat", TypeDescriptor::dbl()) == 1);
    CHECK(verify_state(s).empty());
}

TEST_CASE("rename carries the nested subtree and overwrites the destination") {
    EngineState s = test::ingest(test::shell({
        R"(db.Patients.insertOne({_id: "p1", address: {city: "Lyon", geo: {lat: 45.7}}, home: {zip: 69002}}))",
        R"(db.Patients.updateOne({_id: "p1"}, {$rename: {address: "home"}}))",
    }));
    const auto &attributes = s.model.collections.at("Patients").attributes;
    std::vector<std::string> paths;
    for (const auto &[path, types] : attributes) {
        paths.push_back(path.str());
    }
    CHECK(paths == std::vector<std::string>{"home", "home.city", "home.geo", "home.geo.lat"});
    CHECK(test::counting_mismatch(s).empty());
}

TEST_CASE("unset of a document retires all descendants") {
    EngineState s = test::ingest(test::shell({
        R"(db.Patients.insertOne({_id: "p1", history: [{date: "2020-01-01", note: "flu"}], name: "x"}))",
        R"(db.Patients.updateOne({_id: "p1"}, {$unset: {history: ""}}))",
    }));
    CHECK(s.model.collections.at("Patients").attributes.size() == 1);
    CHECK(test::counting_mismatch(s).empty());
}

TEST_CASE("duplicate insert is rejected without changing the state") {
    EngineState s = test::ingest(test::shell({R"(db.Patients.insertOne({_id: "p1", age: 42}))"}));
    const EngineState before = s;
    CHECK_THROWS_AS(q2m::apply(s, parse_statement(R"(db.Patients.insertOne({_id: "p1", name: "x"}))")), DuplicateDocumentId);
    CHECK(s == before);
}

TEST_CASE("insert without id gets a generated one") {
    EngineState s = empty_state();
    q2m::apply(s, parse_statement(R"(db.Patients.insertOne({_id: "p1"}))"));
    auto report = q2m::apply(s, parse_statement(R"(db.Patients.insertOne({age: 1}))"));
    REQUIRE(report.id);
    CHECK(*report.id == generated_id(1));
    CHECK(report.warnings.size() == 1);
    CHECK(s.signatures.find("Patients", generated_id(1)) != nullptr);
}

TEST_CASE("per-path totals are conserved by scalar type changes") {
    test::RandomDocs gen(3);
    EngineState s = test::ingest(test::shell({R"(db.A.insertOne({_id: "d1", a: 1}))", R"(db.A.insertOne({_id: "d2", a: "x"}))"}));
    for (int i = 0; i < 200; ++i) {
        const auto id = DocumentId::of_text(i % 2 ? "d1" : "d2");
        std::uint64_t before = 0, after = 0;
        for (const auto &[entry, n] : s.metadata.collections.at("A")) {
            before += entry.path.str() == "a" ? n : 0;
        }
        q2m::apply(s, UpdateQuery{"A", id, {SetField{AttrPath::field("a"), gen.scalar()}}});
        for (const auto &[entry, n] : s.metadata.collections.at("A")) {
            after += entry.path.str() == "a" ? n : 0;
        }
        CHECK(before == after);
    }
}

TEST_CASE("counting invariants hold after every query of random logs") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        test::RandomDocs gen(seed);
        EngineState s = empty_state();
        for (int i = 0; i < 300; ++i) {
            const auto q = gen.query();
            try {
                q2m::apply(s, q);
            } catch (const DuplicateDocumentId &) {
            }
            const auto mismatch = test::counting_mismatch(s);
            if (!mismatch.empty()) {
                FAIL("seed " << seed << " query " << i << ": " << mismatch);
            }
            REQUIRE(verify_state(s).empty());
        }
    }
}

TEST_CASE("replaying an apply report reproduces the posterior state") {
    test::RandomDocs gen(17);
    EngineState s = empty_state();
    for (int i = 0; i < 1000; ++i) {
        EngineState replayed = s;
        try {
            const auto report = q2m::apply(s, gen.query());
            replay_report(replayed, report);
            REQUIRE(replayed == s);
        } catch (const DuplicateDocumentId &) {
            CHECK(replayed == s);
        }
    }
}

TEST_CASE("insert then delete is the identity") {
    test::RandomDocs gen(23);
    for (int round = 0; round < 50; ++round) {
        EngineState s = empty_state();
        for (int i = 0; i < 40; ++i) {
            try {
                q2m::apply(s, gen.query());
            } catch (const DuplicateDocumentId &) {
            }
        }
        const EngineState before = s;
        const std::string coll = round % 2 ? "A" : "Fresh";
        q2m::apply(s, InsertQuery{coll, DocumentId::of_text("new"), gen.fields(3)});
        q2m::apply(s, DeleteQuery{coll, DocumentId::of_text("new")});
        CHECK(s.model == before.model);
        CHECK(s.metadata == before.metadata);
        CHECK(s.signatures == before.signatures);
    }
}

TEST_CASE("insert order does not change the snapshot") {
    test::RandomDocs gen(31);
    std::vector<MutationQuery> inserts;
    for (int i = 0; i < 60; ++i) {
        inserts.push_back(InsertQuery{i % 3 ? "A" : "B", DocumentId::of_integer(i), gen.fields(3)});
    }
    const std::string expected = export_snapshot(test::ingest(inserts));
    std::mt19937_64 rng(7);
    for (int round = 0; round < 20; ++round) {
        std::shuffle(inserts.begin(), inserts.end(), rng);
        CHECK(export_snapshot(test::ingest(inserts)) == expected);
    }
}

TEST_CASE("apply report json") {
    EngineState s = empty_state();
    auto report = q2m::apply(s, parse_statement(R"(db.Patients.insertOne({_id: "p1", age: 42}))"));
    const std::string json = report.to_json();
    CHECK(json.find("\"kind\":\"insert\"") != std::string::npos);
    CHECK(json.find("\"R1\"") != std::string::npos);
    CHECK(json.find('\n') == std::string::npos);
}
