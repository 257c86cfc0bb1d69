// Scenario runner: `run <file-or-builtin>`, `list`, `selftest`.

#include <CLI11.hpp>

#include "normsym/errors.hpp"
#include "normsym/scenario.hpp"

#include <cstdio>

using namespace normsym;

namespace {

int report(const ScenarioOutcome& out) {
    for (const auto& c : out.checks)
        std::printf("[%s] %-34s %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                    c.detail.c_str());
    for (const auto& a : out.artifacts) std::printf("wrote %s\n", a.c_str());
    return out.pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"normal-symbol calculus scenario runner"};
    app.require_subcommand(1);

    std::string target, out_dir = "out";
    uint64_t seed = 20240801;

    auto* run = app.add_subcommand("run", "run a scenario file or builtin scenario");
    run->add_option("scenario", target, "scenario file path or builtin name")->required();
    run->add_option("--seed", seed, "random seed recorded in the summary");
    run->add_option("--out", out_dir, "output directory for CSV/JSON artifacts");

    auto* list = app.add_subcommand("list", "list builtin scenarios");
    auto* selftest = app.add_subcommand("selftest", "run the geometry self-tests");
    selftest->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            for (const auto& b : list_builtin_scenarios())
                std::printf("%-28s %s\n", b.name.c_str(), b.description.c_str());
            return 0;
        }
        if (selftest->parsed()) {
            int rc = 0;
            for (const char* name : {"geometry-selftest-sphere", "geometry-selftest-torus"})
                rc |= report(run_builtin_scenario(name, seed, out_dir));
            return rc;
        }
        if (is_builtin_scenario(target)) return report(run_builtin_scenario(target, seed, out_dir));
        Scenario sc = Scenario::load(target);
        sc.seed = seed;
        return report(run_scenario(sc, out_dir));
    } catch (const normsym::ParseError& e) {
        std::fprintf(stderr, "parse error: %s\n", e.what());
        return 2;
    } catch (const normsym::ScenarioInvalid& e) {
        std::fprintf(stderr, "invalid scenario: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
