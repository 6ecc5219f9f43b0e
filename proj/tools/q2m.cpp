#include "q2m/cli.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

int main(int argc, char **argv) {
    using namespace q2m;

    CLI::App app{"Incremental schema extraction from document-database update logs"};
    app.require_subcommand(1);
    app.fallthrough();

    CliOptions options;
    std::string state_dir = options.state_dir.string();
    std::string format = "jsonl";
    std::string links = "naming";
    app.add_option("--state", state_dir, "State directory")->capture_default_str();
    app.add_option("--format", format, "Log format")->check(CLI::IsMember({"shell", "jsonl"}))->capture_default_str();
    app.add_option("--links", links, "Reference detection")
        ->check(CLI::IsMember({"naming", "oid", "off"}))
        ->capture_default_str();
    app.add_flag("--json", options.json, "Machine-readable output");
    app.add_flag("--verbose", options.verbose, "Per-query apply reports");

    std::string log_path;
    auto *ingest = app.add_subcommand("ingest", "Apply a log to the persisted state");
    ingest->add_option("log", log_path, "Log file, or - for stdin")->required();

    app.add_subcommand("show-model", "Print the canonical schema snapshot");
    app.add_subcommand("stats", "Summarize the persisted state");

    VerifyOptions verify;
    auto *verify_cmd = app.add_subcommand("verify", "Check the engine against batch extraction");
    verify_cmd->add_option("log", log_path, "Log file, or - for stdin")->required();
    verify_cmd->add_option("--stride", verify.stride, "Compare every K queries")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    std::string left, right;
    auto *diff = app.add_subcommand("diff", "Compare two snapshots");
    diff->add_option("left", left)->required();
    diff->add_option("right", right)->required();

    GenOptions gen;
    std::string ratios = "60/25/15";
    std::string output;
    auto *gen_cmd = app.add_subcommand("gen", "Generate a synthetic log");
    gen_cmd->add_option("--count,-n", gen.count, "Number of statements")->capture_default_str();
    gen_cmd->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
    gen_cmd->add_option("--ratios", ratios, "insert/update/delete weights")->capture_default_str();
    gen_cmd->add_option("--conflict-rate", gen.conflict_rate, "Type conflict probability")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    gen_cmd->add_option("--rename-rate", gen.rename_rate, "Fraction of renames")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    gen_cmd->add_option("--output,-o", output, "Write to a file instead of stdout");

    try {
        app.parse(argc, argv);
        parse_ratios(ratios, gen);
    } catch (const CLI::ParseError &e) {
        return app.exit(e) == 0 ? 0 : kExitParse;
    } catch (const std::invalid_argument &e) {
        std::cerr << "q2m: " << e.what() << '\n';
        return kExitParse;
    }

    options.state_dir = state_dir;
    options.format = format == "shell" ? LogFormat::Shell : LogFormat::JsonLines;
    options.links = parse_link_mode(links);

    if (*ingest) {
        return cmd_ingest(options, log_path, std::cout, std::cerr);
    }
    if (app.got_subcommand("show-model")) {
        return cmd_show_model(options, std::cout, std::cerr);
    }
    if (app.got_subcommand("stats")) {
        return cmd_stats(options, std::cout, std::cerr);
    }
    if (*verify_cmd) {
        return cmd_verify(options, log_path, verify, std::cout, std::cerr);
    }
    if (*diff) {
        return cmd_diff(options, left, right, std::cout, std::cerr);
    }
    if (!output.empty()) {
        std::ofstream file(output);
        if (!file) {
            std::cerr << "q2m: cannot write " << output << '\n';
            return kExitIo;
        }
        return cmd_gen(options, gen, file, std::cerr);
    }
    return cmd_gen(options, gen, std::cout, std::cerr);
}
