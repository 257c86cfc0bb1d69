#pragma once

#include "normsym/util.hpp"

#include <map>
#include <string>
#include <vector>

namespace normsym {

// One acceptance-style check: a measured value against a pinned threshold.
struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
    std::map<std::string, double> metrics;
    // plot-ready rows (column names in csv_header)
    std::string csv_header;
    std::vector<std::vector<double>> csv_rows;
};

// acceptance criteria, spec meshes and tolerances pinned in code
CheckResult check_gauss_lemma_sphere();                    // 1a
CheckResult check_gauss_lemma_chart();                     // 1b (ODE path, timed)
CheckResult check_rho_expansion();                         // 2
CheckResult check_phase_identity();                        // 3
std::vector<CheckResult> check_circle_eigenvalues();       // 4
std::vector<CheckResult> check_inverse_pair();             // 5
CheckResult check_flat_sharp_classical(uint64_t seed);     // 6
std::vector<CheckResult> check_sphere_sharp_curvature();   // 7
std::vector<CheckResult> check_adjoint_pairing();          // 8
std::vector<CheckResult> check_parametrix();               // 9
std::vector<CheckResult> check_ellipticity_suite();        // 10

// the whole acceptance battery in order
std::vector<CheckResult> run_all_acceptance(uint64_t seed = 20240801);

} // namespace normsym
