#pragma once

#include "normsym/expr.hpp"
#include "normsym/geometry.hpp"
#include "normsym/taylor.hpp"
#include "normsym/util.hpp"

#include <map>
#include <memory>
#include <optional>

namespace normsym {

// ---------------------------------------------------------------- SymbolClass

// Order/type tag (mu, rho, delta) with the standing assumptions
// 0 <= delta < rho <= 1 and rho + delta >= 1.
struct SymbolClass {
    double order = 0.0;
    double rho = 1.0;
    double delta = 0.0;

    SymbolClass() = default;
    SymbolClass(double mu, double r = 1.0, double d = 0.0) : order(mu), rho(r), delta(d) {
        if (!(0.0 <= delta && delta < rho && rho <= 1.0 && rho + delta >= 1.0))
            throw Error("SymbolClass: need 0 <= delta < rho <= 1 and rho+delta >= 1");
    }
    bool same_type(const SymbolClass& o) const { return rho == o.rho && delta == o.delta; }
};

// ------------------------------------------------------------------- covector

struct Covector {
    Vec x;    // point (chart coords, or unit 3-vector on the sphere)
    Vec zeta; // components in the canonical frame at x
};

// ------------------------------------------------------------------- JetTable

// Mixed derivative table D^{|alpha|+|beta|} / dz^alpha dzeta^beta of a symbol
// at a covector, in normal bundle coordinates at the base point. Entries are
// plain partial derivatives, not Taylor coefficients.
struct JetTable {
    Covector base;
    int dim = 0;
    int max_h = 0, max_v = 0;
    std::map<std::pair<MultiIndex, MultiIndex>, CMat> entries;

    const CMat& at(const MultiIndex& alpha, const MultiIndex& beta) const {
        auto it = entries.find({alpha, beta});
        if (it == entries.end()) throw JetDepthExceeded("jet entry outside computed depth");
        return it->second;
    }
    cplx scalar(const MultiIndex& alpha, const MultiIndex& beta) const {
        return at(alpha, beta)(0, 0);
    }
};

// Which trivialization the z-offsets of a jet refer to. Pullback follows the
// dz_x-coframe of one fixed center (the adjoint-expansion convention);
// Recentered differentiates through moving centers along radial geodesics
// (the product-expansion convention). They agree on flat manifolds and
// whenever max_h <= 1 or max_v == 0.
enum class JetFlavor { Pullback, Recentered };

// ------------------------------------------------------------------- Symbol

enum class SymbolMeta { ClosedForm, Polynomial, Tabulated, Composite };

class SymbolImpl {
  public:
    SymbolImpl(std::shared_ptr<const Manifold> m, SymbolClass cls, int rows, int cols,
               SymbolMeta meta)
        : manifold_(std::move(m)), cls_(cls), rows_(rows), cols_(cols), meta_(meta) {}
    virtual ~SymbolImpl() = default;

    virtual CMat eval(const Vec& x, const Vec& zeta) const = 0;

    // exact Taylor evaluation entry-wise, given per-coordinate series for the
    // position and the canonical fiber components
    virtual bool has_taylor() const { return false; }
    virtual std::vector<CTaylor> eval_taylor(const std::vector<Taylor>& xs,
                                             const std::vector<Taylor>& zetas) const;

    // radial symbols: scalar, position-independent, value = P(|zeta|^2)
    virtual bool is_radial() const { return false; }
    // derivatives d^k P / du^k at u0, k = 0..depth
    virtual std::vector<cplx> profile_jet(double u0, int depth) const;

    // composite symbols may provide their own (exact) jets
    virtual bool has_custom_jet() const { return false; }
    virtual JetTable custom_jet(const Covector& xi, int h, int v, JetFlavor flavor) const;

    const std::shared_ptr<const Manifold>& manifold() const { return manifold_; }
    const SymbolClass& sclass() const { return cls_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    SymbolMeta meta() const { return meta_; }

  protected:
    std::shared_ptr<const Manifold> manifold_;
    SymbolClass cls_;
    int rows_, cols_;
    SymbolMeta meta_;
};

class Symbol {
  public:
    Symbol() = default;
    explicit Symbol(std::shared_ptr<const SymbolImpl> impl) : impl_(std::move(impl)) {}

    bool valid() const { return impl_ != nullptr; }
    const SymbolImpl& impl() const { return *impl_; }
    const std::shared_ptr<const SymbolImpl>& ptr() const { return impl_; }

    const SymbolClass& sclass() const { return impl_->sclass(); }
    int rows() const { return impl_->rows(); }
    int cols() const { return impl_->cols(); }
    SymbolMeta meta() const { return impl_->meta(); }
    const std::shared_ptr<const Manifold>& manifold() const { return impl_->manifold(); }

    CMat eval(const Vec& x, const Vec& zeta) const { return impl_->eval(x, zeta); }
    CMat eval(const Covector& xi) const { return impl_->eval(xi.x, xi.zeta); }
    cplx eval_scalar(const Covector& xi) const { return impl_->eval(xi.x, xi.zeta)(0, 0); }

  private:
    std::shared_ptr<const SymbolImpl> impl_;
};

// ----------------------------------------------------------------- factories

// scalar closed-form symbol from an expression over x1..x{pd}, zeta1..zeta{d}
Symbol symbol_from_expression(std::shared_ptr<const Manifold> m, const std::string& text,
                              SymbolClass cls);
Symbol symbol_from_expr(std::shared_ptr<const Manifold> m, const Expr& e, SymbolClass cls);
// matrix-valued closed-form symbol
Symbol symbol_from_expr_matrix(std::shared_ptr<const Manifold> m,
                               const std::vector<std::vector<Expr>>& entries, SymbolClass cls);

// polynomial symbol sum_alpha c_alpha(x) zeta^alpha, class (deg, 1, 0)
struct PolynomialData {
    std::map<MultiIndex, Expr> coeffs;
};
Symbol polynomial_symbol(std::shared_ptr<const Manifold> m,
                         const std::map<MultiIndex, Expr>& coeffs);
const PolynomialData* polynomial_data(const Symbol& s);
std::string polynomial_to_json(const Symbol& s);
Symbol polynomial_from_json(std::shared_ptr<const Manifold> m, const std::string& json_text);

// radial symbol P(|zeta|^2) from a profile expression in the variable u
// (spelled zeta1 in the profile text)
Symbol radial_symbol(std::shared_ptr<const Manifold> m, const std::string& profile_in_u,
                     SymbolClass cls);
Symbol radial_symbol_expr(std::shared_ptr<const Manifold> m, const Expr& profile, SymbolClass cls);

Symbol constant_symbol(std::shared_ptr<const Manifold> m, cplx value);
Symbol identity_symbol(std::shared_ptr<const Manifold> m, int n);

// |zeta|^2 as a radial symbol of order 2
Symbol norm_sq_symbol(std::shared_ptr<const Manifold> m);

// block matrix of scalar symbols
Symbol block_symbol(const std::vector<std::vector<Symbol>>& blocks);

// --------------------------------------------------------------------- jets

// Finite-difference step policy (central differences, one Richardson level).
struct JetSteps {
    double vertical_rel = 1e-3;   // h_v = vertical_rel * (1 + |zeta|)
    double horizontal_rel = 1e-3; // h_x = horizontal_rel * injectivity radius
    // internal: composite symbols chain exact jets beyond the public cap
    bool unrestricted_depth = false;
};

inline constexpr int kMaxJetDepth = 6;

// D^{alpha,beta} a at xi; throws JetDepthExceeded if |alpha|+|beta| limits are
// exceeded, StepUnderflow (with residual) if the finite-difference path fails
// to converge.
JetTable jet(const Symbol& a, const Covector& xi, int depth_h, int depth_v,
             JetFlavor flavor = JetFlavor::Pullback, const JetSteps& steps = {});

// ------------------------------------------------------------------ sampling

struct SampleSet {
    std::vector<Vec> points;
};

SampleSet default_samples(const Manifold& m, int count, uint64_t seed);

std::vector<Vec> fiber_directions(int dim, int count);

// ----------------------------------------------------------------- seminorms

// sup over K x shell of |D^{alpha,beta} a| / (1+|xi|)^(mu + delta|alpha| - rho|beta|)
double seminorm(const Symbol& a, const SampleSet& K, const MultiIndex& alpha,
                const MultiIndex& beta, double shell_lo, double shell_hi, int n_radii = 16,
                int n_dirs = 8);

// measured order of a symbol: log-log fit of sup_{x,dir} |a| against radius
struct OrderFit {
    double slope = 0.0;
    double sup_normalized = 0.0; // sup |a| / (1+r)^assumed_order
    std::vector<double> radii;
    std::vector<double> sups;
    bool identically_zero = false;
};
OrderFit measured_order(const Symbol& a, const SampleSet& K, double shell_lo, double shell_hi,
                        int n_radii, int n_dirs, double assumed_order);

// ------------------------------------------------------------ asymptotic sum

// s(xi) = sum_j chi(|xi|/lambda_j) a_j(xi) with excision weights chosen so the
// partial-sum remainders pass order-mu_k seminorm checks on the test shell.
struct AsymptoticSeries {
    std::vector<double> orders;
    std::vector<Symbol> terms;
    std::vector<double> lambdas;
    Symbol sum;
};

AsymptoticSeries asymptotic_sum(const std::vector<std::pair<double, Symbol>>& terms,
                                double shell_hi = 1e3);

// pointwise combinations (used by parametrix accumulation and tests)
Symbol symbol_scale(const Symbol& a, cplx c);
Symbol symbol_add(const Symbol& a, const Symbol& b);
Symbol symbol_add_const(const Symbol& a, cplx c);
Symbol symbol_mul_pointwise(const Symbol& a, const Symbol& b);

// excised pointwise reciprocal chi(|xi|/lambda) / a(xi) for scalar a
Symbol excised_reciprocal(const Symbol& a, double lambda);

// helper used in several modules: cutoff step as exact Taylor data
Taylor smooth_step_down_taylor(const Taylor& t);
double smooth_step_down_value(double t);

// complex compose helper: f with complex derivative vector over a real series
CTaylor compose_univariate_c(const Taylor& u, const std::vector<cplx>& fd);

} // namespace normsym
