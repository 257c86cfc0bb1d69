#pragma once

#include "normsym/phase.hpp"
#include "normsym/symbol.hpp"

namespace normsym {

enum class ExpansionMode { CurvatureExact, FiniteDifference };

// Truncation control for the product/adjoint expansions: keep summands s with
// ord(s) = |alpha| + |beta| - k <= max_order_drop.
struct ExpansionConfig {
    int max_order_drop = 2;
    ExpansionMode mode = ExpansionMode::CurvatureExact;

    ExpansionConfig() = default;
    ExpansionConfig(int n, ExpansionMode m = ExpansionMode::CurvatureExact)
        : max_order_drop(n), mode(m) {
        int cap = (m == ExpansionMode::CurvatureExact) ? 2 : 4;
        if (n < 0 || n > cap) throw Error("ExpansionConfig: order drop outside mode range");
    }
    int jet_depth() const { return max_order_drop + 2; }
};

// One summand of the product expansion (Theorem-level bookkeeping).
struct SharpSummand {
    MultiIndex alpha;                // total vertical multi-index on the left factor
    MultiIndex alpha_tilde;          // horizontal multi-index on the right factor
    std::vector<MultiIndex> alphas;  // per-phase-factor horizontal indices
    std::vector<MultiIndex> betas;   // per-phase-factor vertical indices (|beta_j| >= 2)
    double coef = 1.0;               // rational coefficient (exact, converted)
    int ipower = 0;                  // power of i
    int ord = 0;                     // |alpha| + |beta| - k
};

const std::vector<SharpSummand>& sharp_summands(int dim, int max_order_drop);

// truncated # product; throws ShapeMismatch / ClassMismatch
Symbol sharp_product(const Symbol& a, const Symbol& b, const ExpansionConfig& cfg);

// truncated adjoint expansion; result shape is the conjugate-transpose block
Symbol adjoint_symbol(const Symbol& a, const ExpansionConfig& cfg);

// Prop-5.1 style application of a symbol to a smooth function through jets:
// sum_{|alpha|<=N} 1/(i^{|alpha|} alpha!) D^alpha_zeta a . D^alpha_z f
CMat apply_to_function_expansion(const Symbol& a, const Expr& f, const Covector& xi, int N);

// normal-coordinate jets of a scalar field given by an expression over the
// manifold's point coordinates
std::map<MultiIndex, double> field_jets(const std::shared_ptr<const Manifold>& m, const Expr& f,
                                        const Vec& x, int depth);

// diagnostic breakdown of the expansion at one covector
struct LedgerEntry {
    SharpSummand summand;
    cplx phase_factor_product;
    CMat value;
    double predicted_order; // mu_a + mu_b - (rho-delta) ord
};
struct ProductTermLedger {
    Covector base;
    std::vector<LedgerEntry> entries;
    CMat total;
};
ProductTermLedger term_ledger(const Symbol& a, const Symbol& b, const Covector& xi,
                              const ExpansionConfig& cfg);

// d^beta rho^{-1}(., x) at coincidence, plain partials in normal coordinates
std::map<MultiIndex, double> rho_inv_jets(const std::shared_ptr<const Manifold>& m, const Vec& x,
                                          int depth);

} // namespace normsym
