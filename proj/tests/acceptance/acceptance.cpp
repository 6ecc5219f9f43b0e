// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "../golden_cases.hpp"
#include "../unit/support.hpp"

#include "q2m/cli.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sys/resource.h>
#include <unistd.h>

using namespace q2m;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
    bool pass;
    std::string detail;
};

GenOptions standard_log(std::uint64_t seed, std::size_t count) {
    GenOptions options;
    options.seed = seed;
    options.count = count;
    options.insert_weight = 60;
    options.update_weight = 25;
    options.delete_weight = 15;
    options.conflict_rate = 0.05;
    options.rename_rate = 0.03;
    return options;
}

std::string generated(const GenOptions &options) {
    std::ostringstream out;
    write_generated_log(options, out);
    return out.str();
}

class Scratch {
public:
    Scratch() : root_(fs::temp_directory_path() / ("q2m-acceptance-" + std::to_string(::getpid()))) {
        fs::remove_all(root_);
        fs::create_directories(root_);
    }
    ~Scratch() { fs::remove_all(root_); }

    fs::path path(const std::string &name) const { return root_ / name; }

    fs::path write(const std::string &name, const std::string &content) const {
        std::ofstream(path(name), std::ios::binary) << content;
        return path(name);
    }

private:
    fs::path root_;
};

Outcome oracle_equivalence(const Scratch &scratch) {
    const auto start = Clock::now();
    std::size_t checkpoints = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const auto log = scratch.write("verify.jsonl", generated(standard_log(seed, 1000)));
        std::ostringstream out, err;
        CliOptions options;
        VerifyOptions verify;
        verify.stride = 1;
        const int code = cmd_verify(options, log.string(), verify, out, err);
        if (code != kExitOk) {
            return {false, "seed " + std::to_string(seed) + ": exit " + std::to_string(code) + ": " + out.str()};
        }
        checkpoints += 1000;
    }
    const double elapsed = seconds_since(start);
    char detail[128];
    std::snprintf(detail, sizeof detail, "50 logs x 1000 queries, %zu prefix comparisons, %.1fs (limit 30s)",
                  checkpoints, elapsed);
    return {elapsed < 30.0, detail};
}

Outcome counting_invariant() {
    std::size_t steps = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        EngineState state = empty_state();
        for (const auto &query : LogGenerator(standard_log(seed, 1000)).generate()) {
            try {
                q2m::apply(state, query);
            } catch (const DuplicateDocumentId &) {
            }
            ++steps;
            if (auto mismatch = test::counting_mismatch(state); !mismatch.empty()) {
                return {false, "seed " + std::to_string(seed) + " step " + std::to_string(steps) + ": " + mismatch};
            }
        }
    }
    return {true, std::to_string(steps) + " states recounted from signatures"};
}

Outcome rule_goldens() {
    std::string failed;
    for (const char *name : test::kGoldenCases) {
        if (!test::run_golden(Q2M_FIXTURES_DIR, name).ok()) {
            failed += std::string(failed.empty() ? "" : ", ") + name;
        }
    }
    if (!failed.empty()) {
        return {false, "mismatch: " + failed};
    }
    return {true, std::to_string(test::kGoldenCases.size()) + " fixtures byte-exact"};
}

Outcome medical_capabilities() {
    const auto state = test::ingest(test::read_log(test::fixture("medical.shell"), LogFormat::Shell));
    const std::string snapshot = export_snapshot(state);
    const std::vector<std::pair<const char *, std::string>> expectations{
        {"Patients atomic age", "  {\"name\":\"Patients\",\"attributes\":["},
        {"Patients atomic age", "    {\"path\":\"age\",\"types\":[\"Integer\"]}"},
        {"Consultations -> Doctors", "    {\"path\":\"doctor_id\",\"types\":[{\"ref\":\"Doctors\",\"multi\":false}]}"},
        {"Patients ->> Antecedents",
         "    {\"path\":\"antecedent_ids\",\"types\":[{\"ref\":\"Antecedents\",\"multi\":true}]}"},
        {"nested address", "    {\"path\":\"address\",\"types\":[\"Document\"]}"},
        {"nested address", "    {\"path\":\"address.city\",\"types\":[\"String\"]}"},
        {"nested address", "    {\"path\":\"address.zip\",\"types\":[\"Integer\"]}"},
    };
    for (const auto &[what, line] : expectations) {
        if (snapshot.find(line) == std::string::npos) {
            return {false, std::string("missing ") + what};
        }
    }
    // The age entry must sit inside the Patients block.
    const auto patients = snapshot.find("\"name\":\"Patients\"");
    const auto age = snapshot.find("{\"path\":\"age\"");
    if (age < patients) {
        return {false, "age is not a Patients attribute"};
    }
    return {true, "atomic age, monovalued and multivalued references, nested address"};
}

long peak_rss_kib() {
    rusage usage{};
    getrusage(RUSAGE_SELF, &usage);
    return usage.ru_maxrss;
}

Outcome large_ingest(const Scratch &scratch) {
    const auto options = standard_log(2024, 100000);
    const auto log = scratch.write("large.jsonl", generated(options));
    const long rss_before = peak_rss_kib();

    CliOptions cli;
    cli.state_dir = scratch.path("large-state");
    std::ostringstream out, err;
    const auto start = Clock::now();
    const int code = cmd_ingest(cli, log.string(), out, err);
    const double elapsed = seconds_since(start);
    if (code != kExitOk) {
        return {false, "ingest exit " + std::to_string(code) + ": " + err.str()};
    }

    const long rss_after = peak_rss_kib();
    const auto state = load_or_empty(cli.state_dir);
    const std::size_t live = replay_documents(LogGenerator(options).generate()).document_count();
    std::size_t counters = 0;
    std::size_t signature_entries = 0;
    for (const auto &[coll, map] : state.metadata.collections) {
        counters += map.size();
    }
    for (const auto &[coll, docs] : state.signatures.collections) {
        for (const auto &[id, sig] : docs) {
            signature_entries += sig.size();
        }
    }
    const bool sized = state.signatures.document_count() == live && counters < 500;
    char detail[256];
    std::snprintf(detail, sizeof detail,
                  "100000 queries in %.1fs (limit 60s); %zu live documents, %zu signature entries, %zu counters; "
                  "peak RSS %ld MiB after ingest (%ld MiB before)",
                  elapsed, live, signature_entries, counters, rss_after / 1024, rss_before / 1024);
    return {elapsed < 60.0 && sized, detail};
}

Outcome determinism(const Scratch &scratch) {
    const auto options = standard_log(77, 3000);
    auto pipeline = [&](const std::string &tag) {
        const auto log = scratch.write("det-" + tag + ".jsonl", generated(options));
        CliOptions cli;
        cli.state_dir = scratch.path("det-state-" + tag);
        std::ostringstream out, err, snapshot;
        cmd_ingest(cli, log.string(), out, err);
        cmd_show_model(cli, snapshot, err);
        return snapshot.str();
    };
    const std::string first = pipeline("a");
    if (first != pipeline("b")) {
        return {false, "gen | ingest | show-model differs between runs"};
    }

    const std::string log = generated(options);
    std::size_t cut = 0;
    for (std::size_t lines = 0; lines < 1234; ++lines) {
        cut = log.find('\n', cut) + 1;
    }
    const auto head = scratch.write("split-1.jsonl", log.substr(0, cut));
    const auto tail = scratch.write("split-2.jsonl", log.substr(cut));
    CliOptions cli;
    cli.state_dir = scratch.path("split-state");
    std::ostringstream out, err, snapshot;
    cmd_ingest(cli, head.string(), out, err);
    cmd_ingest(cli, tail.string(), out, err);
    cmd_show_model(cli, snapshot, err);
    if (snapshot.str() != first) {
        return {false, "split ingestion differs from one-shot ingestion"};
    }
    const auto one_shot = serialize_state(load_or_empty(scratch.path("det-state-a")));
    if (serialize_state(load_or_empty(cli.state_dir)) != one_shot) {
        return {false, "split ingestion leaves a different state file"};
    }
    return {true, "repeat runs and a 1234 + 1766 split give identical snapshots and state"};
}

Outcome identity_and_permutation() {
    std::size_t identities = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto queries = LogGenerator(standard_log(seed, 500)).generate();
        EngineState state = empty_state();
        test::RandomDocs docs(seed);
        for (std::size_t i = 0; i < queries.size(); ++i) {
            try {
                q2m::apply(state, queries[i]);
            } catch (const DuplicateDocumentId &) {
            }
            if (i % 25 != 0) {
                continue;
            }
            const EngineState before = state;
            const std::string coll = i % 50 == 0 ? "Patients" : "Fresh";
            EngineState probe = state;
            q2m::apply(probe, InsertQuery{coll, DocumentId::of_text("probe"), docs.fields(3)});
            q2m::apply(probe, DeleteQuery{coll, DocumentId::of_text("probe")});
            if (probe.model != before.model || probe.metadata != before.metadata ||
                probe.signatures != before.signatures) {
                return {false, "insert then delete changed the state (seed " + std::to_string(seed) + ")"};
            }
            ++identities;
        }
    }

    std::size_t permutations = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        GenOptions options = standard_log(seed, 400);
        options.update_weight = 0;
        options.delete_weight = 0;
        auto inserts = LogGenerator(options).generate();
        const std::string expected = export_snapshot(test::ingest(inserts));
        std::mt19937_64 rng(seed);
        for (int round = 0; round < 10; ++round) {
            std::shuffle(inserts.begin(), inserts.end(), rng);
            if (export_snapshot(test::ingest(inserts)) != expected) {
                return {false, "insert permutation changed the snapshot (seed " + std::to_string(seed) + ")"};
            }
            ++permutations;
        }
    }
    return {true, std::to_string(identities) + " insert/delete identities, " + std::to_string(permutations) +
                      " insert-only permutations"};
}

} // namespace

int main() {
    Scratch scratch;
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"oracle equivalence on generated logs", [&] { return oracle_equivalence(scratch); }},
        {"counting invariant and bi-consistency", counting_invariant},
        {"rule-level golden snapshots", rule_goldens},
        {"medical fixture capabilities", medical_capabilities},
        {"large log ingestion", [&] { return large_ingest(scratch); }},
        {"determinism and split restartability", [&] { return determinism(scratch); }},
        {"insert/delete identity and insert permutation", identity_and_permutation},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome outcome;
        try {
            outcome = criteria[i].second();
        } catch (const std::exception &e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        failures += outcome.pass ? 0 : 1;
        std::cout << (outcome.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": "
                  << outcome.detail << std::endl;
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
