#pragma once

#include "q2m/batch_oracle.hpp"
#include "q2m/engine.hpp"
#include "q2m/generator.hpp"

#include <filesystem>
#include <ostream>
#include <string>

namespace q2m {

enum ExitCode : int {
    kExitOk = 0,
    kExitIo = 1,
    kExitParse = 2,
    kExitDiverged = 3,
};

struct CliOptions {
    std::filesystem::path state_dir = ".q2m";
    LogFormat format = LogFormat::JsonLines;
    LinkMode links = LinkMode::Naming;
    bool json = false;
    bool verbose = false;
};

std::filesystem::path state_file(const std::filesystem::path &dir);

/// Exclusive claim on a state directory, held through a `.lock` file.
class StateLock {
public:
    explicit StateLock(const std::filesystem::path &dir);
    ~StateLock();
    StateLock(const StateLock &) = delete;
    StateLock &operator=(const StateLock &) = delete;

private:
    std::filesystem::path path_;
};

/// Loads DIR/state.json, or an empty state when the file does not exist.
EngineState load_or_empty(const std::filesystem::path &dir);

// Each command writes results to `out`, diagnostics to `err`, and returns an
// exit code. A log path of "-" reads standard input.
int cmd_ingest(const CliOptions &options, const std::string &log_path, std::ostream &out, std::ostream &err);
int cmd_show_model(const CliOptions &options, std::ostream &out, std::ostream &err);
int cmd_verify(const CliOptions &options, const std::string &log_path, const VerifyOptions &verify, std::ostream &out,
               std::ostream &err);
int cmd_diff(const CliOptions &options, const std::string &left, const std::string &right, std::ostream &out,
             std::ostream &err);
int cmd_gen(const CliOptions &options, const GenOptions &gen, std::ostream &out, std::ostream &err);
int cmd_stats(const CliOptions &options, std::ostream &out, std::ostream &err);

} // namespace q2m
