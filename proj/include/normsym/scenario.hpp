#pragma once

#include "normsym/checks.hpp"
#include "normsym/util.hpp"

#include <map>
#include <string>
#include <vector>

namespace normsym {

enum class TaskKind {
    Quantize,
    ExtractSymbol,
    SharpCompare,
    AdjointCompare,
    Parametrix,
    EllipticityTest,
    GeometrySelfTest,
};

// Flat key/value scenario with one [task] section. Values are bare words,
// quoted strings or numbers; '#' starts a comment.
struct Scenario {
    std::string name;
    std::map<std::string, std::string> globals; // manifold, seed, out_prefix, ...
    TaskKind task = TaskKind::GeometrySelfTest;
    std::map<std::string, std::string> task_params;

    uint64_t seed = 20240801;

    static Scenario parse(const std::string& text); // throws ParseError
    static Scenario load(const std::string& path);  // throws ParseError

    std::string get(const std::string& key, const std::string& fallback = "") const;
    double get_num(const std::string& key, double fallback) const;
};

struct ScenarioOutcome {
    bool pass = true;
    std::vector<CheckResult> checks;
    std::string summary_json;
    std::vector<std::string> artifacts; // written file paths
};

// validates and runs; throws ScenarioInvalid on missing/bad fields
ScenarioOutcome run_scenario(const Scenario& sc, const std::string& out_dir);

// builtin catalog
struct BuiltinScenario {
    std::string name;
    std::string description;
};
std::vector<BuiltinScenario> list_builtin_scenarios();
bool is_builtin_scenario(const std::string& name);
ScenarioOutcome run_builtin_scenario(const std::string& name, uint64_t seed,
                                     const std::string& out_dir);

} // namespace normsym
