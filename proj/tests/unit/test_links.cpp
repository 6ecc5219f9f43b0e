#include "doctest.h"
#include "support.hpp"

using namespace q2m;

namespace {

std::optional<std::string> linked(const char *path, const TypeDescriptor &type, LinkMode mode = LinkMode::Naming) {
    static const std::set<std::string> kCollections{"Doctors", "Antecedents", "Patients", "Pharmacy", "Categories"};
    auto ref = detect_reference(AttrPath::parse(path), type, kCollections, mode);
    return ref ? std::optional(ref->name()) : std::nullopt;
}

const auto kText = TypeDescriptor::string();
const auto kOid = TypeDescriptor::object_id();

} // namespace

TEST_CASE("naming mode") {
    CHECK(linked("doctor_id", kText) == "Ref(Doctors)");
    CHECK(linked("doctorId", TypeDescriptor::integer()) == "Ref(Doctors)");
    CHECK(linked("visit.DOCTOR_ID", kText) == "Ref(Doctors)");
    CHECK(linked("antecedent_ids", TypeDescriptor::array({kText})) == "Ref[](Antecedents)");
    CHECK(linked("antecedent_ids", TypeDescriptor::array({})) == "Ref[](Antecedents)");
    CHECK(linked("pharmacies_id", kText) == "Ref(Pharmacy)");
    CHECK(linked("doc_id", kText) == std::nullopt);
    CHECK(linked("category_id", kText) == "Ref(Categories)");
    CHECK(linked("patients_id", kOid) == "Ref(Patients)");
    CHECK(linked("nurse_id", kText) == std::nullopt);
    CHECK(linked("doctor_id", TypeDescriptor::dbl()) == std::nullopt);
    CHECK(linked("doctor_id", TypeDescriptor::document()) == std::nullopt);
    CHECK(linked("doctor", kOid) == std::nullopt);
    CHECK(linked("_id", kText) == std::nullopt);
}

TEST_CASE("object id mode") {
    CHECK(linked("doctor", kOid, LinkMode::ObjectId) == "Ref(Doctors)");
    CHECK(linked("doctors._id", kOid, LinkMode::ObjectId) == "Ref(Doctors)");
    CHECK(linked("doctors[]._id", kOid, LinkMode::ObjectId) == "Ref[](Doctors)");
    CHECK(linked("doctor", kText, LinkMode::ObjectId) == std::nullopt);
    CHECK(linked("doctor_id", kText, LinkMode::ObjectId) == "Ref(Doctors)");
}

TEST_CASE("off mode leaves types alone") {
    CHECK(linked("doctor_id", kText, LinkMode::Off) == std::nullopt);
    EngineState s = test::ingest(test::read_log(test::fixture("medical.shell"), LogFormat::Shell));
    CHECK(export_snapshot(s, LinkMode::Off) == export_model(s.model));
    CHECK(export_snapshot(s, LinkMode::Off).find("Ref") == std::string::npos);
}

TEST_CASE("link mode names") {
    CHECK(parse_link_mode("oid") == LinkMode::ObjectId);
    CHECK(std::string(to_string(LinkMode::Naming)) == "naming");
    CHECK_THROWS_AS(parse_link_mode("fuzzy"), std::invalid_argument);
}

TEST_CASE("links only point at collections present in the model") {
    EngineState s = test::ingest(test::shell({R"(db.Consultations.insertOne({_id: "c1", doctor_id: "d1"}))"}));
    CHECK(export_snapshot(s).find("\"String\"") != std::string::npos);
    q2m::apply(s, parse_statement(R"(db.Doctors.insertOne({_id: "d1", name: "Dr Laurent"}))"));
    CHECK(export_snapshot(s).find("{\"ref\":\"Doctors\",\"multi\":false}") != std::string::npos);
    CHECK(s.metadata.count("Consultations", {AttrPath::field("doctor_id"), kText}) == 1);
}

TEST_CASE("medical fixture snapshot") {
    EngineState s = test::ingest(test::read_log(test::fixture("medical.shell"), LogFormat::Shell));
    CHECK(export_snapshot(s) == test::read_text(test::fixture("medical.json")));
}
