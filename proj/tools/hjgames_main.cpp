// Scenario runner for the differential-game library: every module is
// exposed as a subcommand driven by a JSON scenario file.

#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "hjgames/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Zero-sum differential games with unbounded controls: "
                 "saddle points, Hamiltonians, trajectories, Riccati analysis, "
                 "HJ grid solves, and min-max dynamic programming"};
    app.require_subcommand(1);

    struct Options {
        std::string scenario;
        std::string out_dir = ".";
        bool summary = false;
        std::optional<std::uint64_t> seed;
    };

    const std::vector<std::string> kinds = {"saddle",   "hamiltonian", "trajectory", "riccati",
                                            "hj-solve", "dp-value",    "check-hypotheses"};
    std::map<std::string, Options> opts;
    for (const auto& kind : kinds) {
        auto* sub = app.add_subcommand(kind, "Run a '" + kind + "' scenario");
        auto& o = opts[kind];
        sub->add_option("--scenario", o.scenario, "Scenario file (JSON)")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out-dir", o.out_dir, "Directory for artifacts");
        sub->add_flag("--summary", o.summary, "Print a one-line JSON verdict to stdout");
        sub->add_option("--seed", [&o](const std::vector<std::string>& vals) {
            o.seed = std::stoull(vals.front());
            return true;
        }, "Override the scenario seed");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string kind = app.get_subcommands().front()->get_name();
    const Options& o = opts[kind];

    try {
        const auto outcome = hjgames::scenario::run_scenario(o.scenario, o.out_dir, o.seed, kind);
        if (o.summary) std::cout << outcome.summary.dump() << '\n';
        return outcome.exit_code;
    } catch (const hjgames::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const hjgames::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
