#include "doctest.h"
#include "support.hpp"

#include "q2m/generator.hpp"

using namespace q2m;

namespace {

std::string generate(const GenOptions &options) {
    std::ostringstream out;
    write_generated_log(options, out);
    return out.str();
}

} // namespace

TEST_CASE("same seed gives the same log") {
    GenOptions options;
    options.seed = 42;
    CHECK(generate(options) == generate(options));
    GenOptions other = options;
    other.seed = 43;
    CHECK(generate(options) != generate(other));
}

TEST_CASE("generated logs parse cleanly") {
    GenOptions options;
    options.count = 5000;
    options.seed = 8;
    std::istringstream in(generate(options));
    const auto items = parse_log(in, LogFormat::JsonLines);
    CHECK(items.size() == 5000);
    CHECK(std::none_of(items.begin(), items.end(), [](const LogItem &i) { return i.is_error(); }));
}

TEST_CASE("statement mix follows the ratios") {
    GenOptions options;
    options.count = 20000;
    options.seed = 5;
    std::map<QueryKind, std::size_t> kinds;
    std::size_t renames = 0;
    for (const auto &q : LogGenerator(options).generate()) {
        ++kinds[kind_of(q)];
        if (const auto *u = std::get_if<UpdateQuery>(&q)) {
            renames += std::holds_alternative<RenameField>(u->ops.front());
        }
    }
    // Updates and deletes fall back to inserts until some documents exist.
    CHECK(kinds[QueryKind::Insert] == doctest::Approx(12000).epsilon(0.05));
    CHECK(kinds[QueryKind::Update] == doctest::Approx(5000).epsilon(0.05));
    CHECK(kinds[QueryKind::Delete] == doctest::Approx(3000).epsilon(0.05));
    CHECK(renames == doctest::Approx(600).epsilon(0.15));
}

TEST_CASE("ratios parse") {
    GenOptions options;
    parse_ratios("70/20/10", options);
    CHECK(options.insert_weight == 70);
    CHECK(options.delete_weight == 10);
    CHECK_THROWS_AS(parse_ratios("70/20", options), std::invalid_argument);
    CHECK_THROWS_AS(parse_ratios("0/0/0", options), std::invalid_argument);
    CHECK_THROWS_AS(parse_ratios("a/b/c", options), std::invalid_argument);
}

TEST_CASE("generated model shows links, nesting and conflicts") {
    GenOptions options;
    options.count = 2000;
    options.seed = 12;
    const std::string snapshot = export_snapshot(test::ingest(LogGenerator(options).generate()));
    CHECK(snapshot.find("{\"path\":\"doctor_id\",\"types\":[{\"ref\":\"Doctors\",\"multi\":false}]}") != std::string::npos);
    CHECK(snapshot.find("{\"path\":\"antecedent_ids\",\"types\":[{\"ref\":\"Antecedents\",\"multi\":true}]}") !=
          std::string::npos);
    CHECK(snapshot.find("{\"path\":\"address.city\"") != std::string::npos);
    CHECK(snapshot.find("{\"path\":\"history[].date\"") != std::string::npos);
    CHECK(snapshot.find("\"Integer\",\"String\"") != std::string::npos);
}

TEST_CASE("no conflicts when the rate is zero") {
    GenOptions options;
    options.count = 3000;
    options.conflict_rate = 0;
    options.rename_rate = 0;
    const auto state = test::ingest(LogGenerator(options).generate());
    for (const auto &[coll, schema] : link_model(state.model, LinkMode::Naming).collections) {
        for (const auto &[path, types] : schema.attributes) {
            CAPTURE(path.str());
            CHECK(types.size() == 1);
        }
    }
}
