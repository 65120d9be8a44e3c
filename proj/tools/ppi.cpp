#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "ppi/cli.hpp"

int main(int argc, char** argv) {
    using namespace ppi::cli;

    CLI::App app{"Canonical decompositions of power partial isometries and star-commuting families"};
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig cfg;
    std::uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "override the seed of a plant spec");
    app.add_option("--tol", cfg.tol.abs_tol, "absolute tolerance")->check(CLI::PositiveNumber);
    app.add_option("--rank-tol", cfg.tol.rank_rel_tol, "rank threshold relative to the largest singular value")
        ->check(CLI::PositiveNumber);
    app.add_option("--format", cfg.format, "json or text")->check(CLI::IsMember({"json", "text"}));
    app.add_option("--batch", cfg.batch, "process every *.json file in a directory");
    app.add_option("-o,--output", cfg.output, "write the report to a file instead of stdout");
    app.add_flag("--cross-check", cfg.cross_check, "orbit-classify: compare against the matrix backend");

    const char* help[] = {"power partial isometry and star-commutation checks",
                          "decompose a single operator",
                          "simultaneous decomposition of a star-commuting family",
                          "classify the orbits of a partial injection",
                          "synthesize an operator or family from a plant spec",
                          "check a decomposition against its operator(s)"};
    for (std::size_t k = 0; k < commands().size(); ++k) {
        auto* sub = app.add_subcommand(commands()[k], help[k]);
        sub->add_option("input", cfg.input, "JSON file or inline JSON");
        if (commands()[k] == "verify") sub->add_option("decomposition", cfg.second, "decomposition JSON file or inline JSON");
        sub->callback([&cfg, name = commands()[k]] { cfg.command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kInputError;
    }
    if (*seed_opt) cfg.seed = seed;
    if (cfg.input.empty() && cfg.batch.empty()) {
        std::cerr << "missing input\n";
        return kInputError;
    }

    CommandResult res = run(cfg);
    std::string body = cfg.format == "text" ? res.text + "\n" : res.report.dump(2) + "\n";
    if (!cfg.output.empty()) {
        std::ofstream out(cfg.output);
        if (!out) {
            std::cerr << "cannot write '" << cfg.output << "'\n";
            return kInputError;
        }
        out << body;
    } else {
        std::cout << body;
    }
    if (!res.diagnostics.empty()) std::cerr << res.diagnostics << "\n";
    return res.exit_code;
}
