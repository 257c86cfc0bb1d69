#pragma once

#include "normsym/calculus.hpp"
#include "normsym/symbol.hpp"

#include <optional>
#include <string>

namespace normsym {

enum class EllipticVerdict { EllipticOfOrder, EllipticGeneral, NotElliptic, Inconclusive };

// Desk-scale ellipticity certificate: sampled bounds, not proofs.
struct EllipticityReport {
    EllipticVerdict verdict = EllipticVerdict::Inconclusive;
    double order = 0.0;          // m for EllipticOfOrder
    double c_bound = 0.0;        // best C_K on the sampled shell
    double measured_epsilon = 0; // order margin of a#b0 - 1 for the general route
    std::optional<Vec> failure_ray;
    std::vector<std::pair<double, double>> samples; // (|zeta|, min ratio over directions)
    std::vector<double> residual_orders;            // general/DN routes
    std::string note;

    std::string to_json() const;
};

// Prop-6.4 scalar bound |a(xi)| >= |xi|^m / C_K on the sampled shell.
EllipticityReport ellipticity_test_scalar(const Symbol& a, double m, const SampleSet& K,
                                          double shell_lo = 10.0, double shell_hi = 1e3,
                                          int n_radii = 12, int n_dirs = 8);

// general route: verify a candidate two-sided witness b0 at some negative order
EllipticityReport ellipticity_test_witness(const Symbol& a, const Symbol& b0,
                                           const ExpansionConfig& cfg, const SampleSet& K,
                                           double shell_lo = 10.0, double shell_hi = 1e3);

struct ParametrixResult {
    Symbol b;
    int terms_used = 0;
    bool converged = false;
    bool residual_zero = false;           // flat exact case
    double residual_order_right = 1e300;  // measured order of a#b - 1
    double residual_order_left = 1e300;   // measured order of b#a - 1
    std::vector<double> history;          // right residual order per Neumann step
};

// b = b0 # (1 + r + r#r + ...) with r = 1 - a#b0, truncated # throughout.
// Throws NotEllipticError when the precondition order test on r fails; a
// result with converged = false reports max_terms exhaustion.
ParametrixResult neumann_parametrix(const Symbol& a, const Symbol& b0, const ExpansionConfig& cfg,
                                    int max_terms = 8, double tol_order = -6.0,
                                    double shell_lo = 8.0, double shell_hi = 128.0);

// Douglis-Nirenberg block test: residuals of sum_l p_kl b_lk' - delta at
// order -1 on samples; assembles the block symbol on success.
struct DnResult {
    EllipticityReport report;
    Symbol block_symbol_p;
};
DnResult dn_system_test(const std::vector<std::vector<Symbol>>& p,
                        const std::vector<std::vector<double>>& orders,
                        const std::vector<std::vector<Symbol>>& b, const SampleSet& K,
                        double shell_lo = 10.0, double shell_hi = 1e3);

} // namespace normsym
