#include "q2m/cli.hpp"

#include "json.hpp"

#include <cerrno>
#include <cstring>
#include <fcntl.h>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unistd.h>

namespace q2m {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path state_file(const fs::path &dir) { return dir / "state.json"; }

StateLock::StateLock(const fs::path &dir) : path_(dir / ".lock") {
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
        if (errno == EEXIST) {
            throw IoError(dir.string() + " is locked by another ingestion (remove " + path_.string() +
                          " if it is stale)");
        }
        throw IoError("cannot create " + path_.string() + ": " + std::strerror(errno));
    }
    const auto pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] auto written = ::write(fd, pid.data(), pid.size());
    ::close(fd);
}

StateLock::~StateLock() {
    std::error_code ec;
    fs::remove(path_, ec);
}

EngineState load_or_empty(const fs::path &dir) {
    const auto file = state_file(dir);
    if (!fs::exists(file)) {
        return empty_state();
    }
    return load_state(file);
}

namespace {

class LogInput {
public:
    explicit LogInput(const std::string &path) {
        if (path != "-") {
            file_.open(path);
            if (!file_) {
                throw IoError("cannot open " + path);
            }
        }
    }

    std::istream &stream() { return file_.is_open() ? static_cast<std::istream &>(file_) : std::cin; }

private:
    std::ifstream file_;
};

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

template <class F> int guarded(std::ostream &err, F &&body) {
    try {
        return body();
    } catch (const IoError &e) {
        err << "q2m: " << e.what() << '\n';
    } catch (const CorruptStateError &e) {
        err << "q2m: corrupt state: " << e.what() << '\n';
    } catch (const SnapshotError &e) {
        err << "q2m: bad snapshot: " << e.what() << '\n';
    } catch (const fs::filesystem_error &e) {
        err << "q2m: " << e.what() << '\n';
    }
    return kExitIo;
}

} // namespace

int cmd_ingest(const CliOptions &options, const std::string &log_path, std::ostream &out, std::ostream &err) {
    return guarded(err, [&] {
        fs::create_directories(options.state_dir);
        StateLock lock(options.state_dir);
        EngineState state = load_or_empty(options.state_dir);
        LogInput input(log_path);
        LogReader reader(input.stream(), options.format);

        std::size_t applied = 0;
        std::size_t parse_errors = 0;
        std::size_t rejected = 0;
        std::size_t warnings = 0;
        while (auto item = reader.next()) {
            if (item->is_error()) {
                ++parse_errors;
                err << log_path << ':' << item->line << ": " << item->error().what() << '\n';
                continue;
            }
            if (!item->is_query()) {
                continue;
            }
            try {
                const auto report = apply(state, item->query());
                ++applied;
                warnings += report.warnings.size();
                if (options.verbose) {
                    out << report.to_json() << '\n';
                    for (const auto &w : report.warnings) {
                        err << log_path << ':' << item->line << ": warning: " << w << '\n';
                    }
                }
            } catch (const DuplicateDocumentId &e) {
                ++rejected;
                err << log_path << ':' << item->line << ": rejected: " << e.what() << '\n';
            }
        }
        save_state(state, state_file(options.state_dir));

        if (options.json) {
            out << json{{"applied", applied},
                        {"rejected", rejected},
                        {"parse_errors", parse_errors},
                        {"warnings", warnings},
                        {"total_applied", state.applied_count}}
                       .dump()
                << '\n';
        } else {
            out << "applied " << applied << " queries (" << rejected << " rejected, " << parse_errors
                << " parse errors, " << warnings << " warnings); state now holds " << state.applied_count
                << " applied queries\n";
        }
        return parse_errors + rejected > 0 ? kExitParse : kExitOk;
    });
}

int cmd_show_model(const CliOptions &options, std::ostream &out, std::ostream &err) {
    return guarded(err, [&] {
        out << export_snapshot(load_or_empty(options.state_dir), options.links);
        return kExitOk;
    });
}

int cmd_verify(const CliOptions &options, const std::string &log_path, const VerifyOptions &verify,
               std::ostream &out, std::ostream &err) {
    return guarded(err, [&] {
        LogInput input(log_path);
        VerifyOptions opts = verify;
        opts.links = options.links;
        const auto result = verify_log(input.stream(), options.format, opts);
        if (options.json) {
            json j{{"equivalent", result.equivalent},
                   {"queries", result.queries},
                   {"checkpoints", result.checkpoints},
                   {"parse_errors", result.parse_errors},
                   {"rejected", result.rejected}};
            if (result.divergence_line) {
                j["divergence_line"] = *result.divergence_line;
                j["detail"] = result.detail;
            }
            out << j.dump() << '\n';
        } else if (result.equivalent) {
            out << "equivalent: " << result.queries << " queries, " << result.checkpoints << " checkpoints\n";
        } else {
            out << "divergence at line " << *result.divergence_line << '\n' << result.detail;
            if (!result.detail.empty() && result.detail.back() != '\n') {
                out << '\n';
            }
        }
        if (result.parse_errors > 0) {
            err << log_path << ": " << result.parse_errors << " unparseable lines skipped\n";
        }
        if (!result.equivalent) {
            return kExitDiverged;
        }
        return result.parse_errors > 0 ? kExitParse : kExitOk;
    });
}

int cmd_diff(const CliOptions &options, const std::string &left, const std::string &right, std::ostream &out,
             std::ostream &err) {
    return guarded(err, [&] {
        const auto a = parse_model_snapshot(read_file(left));
        const auto b = parse_model_snapshot(read_file(right));
        const auto diff = diff_models(a, b);
        if (options.json) {
            out << diff_to_json(diff) << '\n';
        } else {
            out << diff_to_text(diff);
        }
        return diff.empty() ? kExitOk : kExitDiverged;
    });
}

int cmd_gen(const CliOptions &options, const GenOptions &gen, std::ostream &out, std::ostream &err) {
    return guarded(err, [&] {
        write_generated_log(gen, out, options.format);
        out.flush();
        if (!out) {
            throw IoError("write failed");
        }
        return kExitOk;
    });
}

int cmd_stats(const CliOptions &options, std::ostream &out, std::ostream &err) {
    return guarded(err, [&] {
        const EngineState state = load_or_empty(options.state_dir);
        json collections = json::array();
        std::size_t counters = 0;
        for (const auto &[name, schema] : state.model.collections) {
            const auto sigs = state.signatures.collections.find(name);
            const auto meta = state.metadata.collections.find(name);
            const std::size_t docs = sigs == state.signatures.collections.end() ? 0 : sigs->second.size();
            const std::size_t n = meta == state.metadata.collections.end() ? 0 : meta->second.size();
            counters += n;
            collections.push_back(
                {{"name", name}, {"documents", docs}, {"attributes", schema.attributes.size()}, {"counters", n}});
        }
        if (options.json) {
            out << json{{"applied", state.applied_count},
                        {"documents", state.signatures.document_count()},
                        {"counters", counters},
                        {"collections", collections}}
                       .dump()
                << '\n';
            return kExitOk;
        }
        out << "applied queries: " << state.applied_count << '\n'
            << "live documents: " << state.signatures.document_count() << '\n'
            << "counters: " << counters << '\n';
        for (const auto &c : collections) {
            out << "  " << c["name"].get<std::string>() << ": " << c["documents"] << " documents, "
                << c["attributes"] << " attributes, " << c["counters"] << " counters\n";
        }
        return kExitOk;
    });
}

} // namespace q2m
