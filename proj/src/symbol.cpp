#include "normsym/symbol.hpp"

#include "sphere_series.hpp"

#include <json.hpp>

#include <cmath>
#include <map>

namespace normsym {

// ------------------------------------------------------- default virtuals

std::vector<CTaylor> SymbolImpl::eval_taylor(const std::vector<Taylor>&,
                                             const std::vector<Taylor>&) const {
    throw Error("symbol: exact Taylor evaluation not available");
}

std::vector<cplx> SymbolImpl::profile_jet(double, int) const {
    throw Error("symbol: not radial");
}

JetTable SymbolImpl::custom_jet(const Covector&, int, int, JetFlavor) const {
    throw Error("symbol: no custom jet");
}

// ---------------------------------------------------------------- helpers

double smooth_step_down_value(double t) {
    if (t <= 0.0) return 1.0;
    if (t >= 1.0) return 0.0;
    double f0 = std::exp(-1.0 / t), f1 = std::exp(-1.0 / (1.0 - t));
    return f1 / (f0 + f1);
}

Taylor smooth_step_down_taylor(const Taylor& t) {
    double t0 = t.value();
    if (t0 <= 0.0) return Taylor::constant(t.shape(), 1.0);
    if (t0 >= 1.0) return Taylor::constant(t.shape(), 0.0);
    Taylor f0 = (t.inv() * (-1.0)).exp_();
    Taylor f1 = (((t * (-1.0)) + 1.0).inv() * (-1.0)).exp_();
    return f1 * (f0 + f1).inv();
}

CTaylor compose_univariate_c(const Taylor& u, const std::vector<cplx>& fd) {
    std::vector<double> fr(fd.size()), fi(fd.size());
    for (size_t i = 0; i < fd.size(); ++i) {
        fr[i] = fd[i].real();
        fi[i] = fd[i].imag();
    }
    return CTaylor(u.compose_univariate(fr), u.compose_univariate(fi));
}

namespace {

CMat scalar_mat(cplx v) {
    CMat m(1, 1);
    m(0, 0) = v;
    return m;
}

} // namespace

// ------------------------------------------------------------- ExprSymbol

class ExprSymbolImpl final : public SymbolImpl {
  public:
    ExprSymbolImpl(std::shared_ptr<const Manifold> m, std::vector<std::vector<Expr>> e,
                   SymbolClass cls, SymbolMeta meta = SymbolMeta::ClosedForm)
        : SymbolImpl(std::move(m), cls, (int)e.size(), (int)e[0].size(), meta),
          entries_(std::move(e)) {}

    CMat eval(const Vec& x, const Vec& zeta) const override {
        CMat v(rows_, cols_);
        for (int r = 0; r < rows_; ++r)
            for (int c = 0; c < cols_; ++c) v(r, c) = entries_[r][c].eval_real(x, zeta);
        return v;
    }

    bool has_taylor() const override { return true; }
    std::vector<CTaylor> eval_taylor(const std::vector<Taylor>& xs,
                                     const std::vector<Taylor>& zetas) const override {
        std::vector<CTaylor> out;
        out.reserve(rows_ * cols_);
        for (int r = 0; r < rows_; ++r)
            for (int c = 0; c < cols_; ++c)
                out.emplace_back(entries_[r][c].eval_taylor(xs, zetas));
        return out;
    }

    const std::vector<std::vector<Expr>>& entries() const { return entries_; }

  private:
    std::vector<std::vector<Expr>> entries_;
};

// ------------------------------------------------------- PolynomialSymbol

class PolynomialSymbolImpl final : public SymbolImpl {
  public:
    PolynomialSymbolImpl(std::shared_ptr<const Manifold> m, PolynomialData data, SymbolClass cls)
        : SymbolImpl(std::move(m), cls, 1, 1, SymbolMeta::Polynomial), data_(std::move(data)) {}

    CMat eval(const Vec& x, const Vec& zeta) const override {
        cplx acc = 0.0;
        for (const auto& [alpha, c] : data_.coeffs) {
            double mono = 1.0;
            for (size_t i = 0; i < alpha.size(); ++i)
                for (int j = 0; j < alpha[i]; ++j) mono *= zeta[i];
            acc += c.eval_real(x, Vec()) * mono;
        }
        return scalar_mat(acc);
    }

    bool has_taylor() const override { return true; }
    std::vector<CTaylor> eval_taylor(const std::vector<Taylor>& xs,
                                     const std::vector<Taylor>& zetas) const override {
        Taylor acc(xs.empty() ? zetas[0].shape() : xs[0].shape());
        for (const auto& [alpha, c] : data_.coeffs) {
            Taylor mono = c.eval_taylor(xs, {});
            for (size_t i = 0; i < alpha.size(); ++i)
                for (int j = 0; j < alpha[i]; ++j) mono = mono * zetas[i];
            acc += mono;
        }
        return {CTaylor(acc)};
    }

    const PolynomialData& data() const { return data_; }

  private:
    PolynomialData data_;
};

// ----------------------------------------------------------- RadialSymbol

// value = P(|zeta|^2) with P given as a 1-variable expression (variable u)
class RadialSymbolImpl final : public SymbolImpl {
  public:
    RadialSymbolImpl(std::shared_ptr<const Manifold> m, Expr profile, SymbolClass cls)
        : SymbolImpl(std::move(m), cls, 1, 1, SymbolMeta::ClosedForm), profile_(std::move(profile)) {}

    CMat eval(const Vec&, const Vec& zeta) const override {
        Vec u(1);
        u[0] = zeta.squaredNorm();
        return scalar_mat(profile_.eval_real(Vec(), u));
    }

    bool is_radial() const override { return true; }
    std::vector<cplx> profile_jet(double u0, int depth) const override {
        Taylor us = Taylor::variable(TruncShape::single(1, depth), 0, u0);
        Taylor p = profile_.eval_taylor({}, {us});
        std::vector<cplx> out(depth + 1);
        for (int k = 0; k <= depth; ++k) out[k] = p.partial(MultiIndex{k});
        return out;
    }

    bool has_taylor() const override { return true; }
    std::vector<CTaylor> eval_taylor(const std::vector<Taylor>&,
                                     const std::vector<Taylor>& zetas) const override {
        Taylor u(zetas[0].shape());
        for (const auto& z : zetas) u += z * z;
        return {CTaylor(profile_.eval_taylor({}, {u}))};
    }

  private:
    Expr profile_;
};

// ------------------------------------------------------------ ConstSymbol

class ConstSymbolImpl final : public SymbolImpl {
  public:
    ConstSymbolImpl(std::shared_ptr<const Manifold> m, CMat v)
        : SymbolImpl(std::move(m), SymbolClass(0.0), (int)v.rows(), (int)v.cols(),
                     SymbolMeta::ClosedForm),
          v_(std::move(v)) {}

    CMat eval(const Vec&, const Vec&) const override { return v_; }
    bool is_radial() const override { return rows_ == 1 && cols_ == 1; }
    std::vector<cplx> profile_jet(double, int depth) const override {
        std::vector<cplx> out(depth + 1, 0.0);
        out[0] = v_(0, 0);
        return out;
    }
    bool has_taylor() const override { return true; }
    std::vector<CTaylor> eval_taylor(const std::vector<Taylor>& xs,
                                     const std::vector<Taylor>& zetas) const override {
        const TruncShape& sh = xs.empty() ? zetas[0].shape() : xs[0].shape();
        std::vector<CTaylor> out;
        for (int r = 0; r < rows_; ++r)
            for (int c = 0; c < cols_; ++c)
                out.emplace_back(Taylor::constant(sh, v_(r, c).real()),
                                 Taylor::constant(sh, v_(r, c).imag()));
        return out;
    }

  private:
    CMat v_;
};

// ------------------------------------------------------------ BlockSymbol

class BlockSymbolImpl final : public SymbolImpl {
  public:
    explicit BlockSymbolImpl(std::vector<std::vector<Symbol>> blocks)
        : SymbolImpl(blocks[0][0].manifold(), max_class(blocks), (int)blocks.size(),
                     (int)blocks[0].size(), SymbolMeta::Composite),
          blocks_(std::move(blocks)) {}

    CMat eval(const Vec& x, const Vec& zeta) const override {
        CMat v(rows_, cols_);
        for (int r = 0; r < rows_; ++r)
            for (int c = 0; c < cols_; ++c) v(r, c) = blocks_[r][c].eval(x, zeta)(0, 0);
        return v;
    }

  private:
    std::vector<std::vector<Symbol>> blocks_;
    static SymbolClass max_class(const std::vector<std::vector<Symbol>>& b) {
        double mu = -1e300;
        for (const auto& row : b)
            for (const auto& s : row) mu = std::max(mu, s.sclass().order);
        return SymbolClass(mu, b[0][0].sclass().rho, b[0][0].sclass().delta);
    }
};

// ------------------------------------------- pointwise combination symbols

class CombSymbolImpl final : public SymbolImpl {
  public:
    enum class Kind { Scale, Add, AddConst, Mul };

    CombSymbolImpl(Kind k, Symbol a, Symbol b, cplx c, SymbolClass cls, int rows, int cols)
        : SymbolImpl(a.manifold(), cls, rows, cols, SymbolMeta::Composite), kind_(k),
          a_(std::move(a)), b_(std::move(b)), c_(c) {}

    CMat eval(const Vec& x, const Vec& zeta) const override {
        switch (kind_) {
            case Kind::Scale: return c_ * a_.eval(x, zeta);
            case Kind::Add: return a_.eval(x, zeta) + b_.eval(x, zeta);
            case Kind::AddConst: {
                CMat v = a_.eval(x, zeta);
                for (int i = 0; i < std::min(v.rows(), v.cols()); ++i) v(i, i) += c_;
                return v;
            }
            case Kind::Mul: return a_.eval(x, zeta) * b_.eval(x, zeta);
        }
        throw Error("unreachable");
    }

    bool is_radial() const override {
        bool ra = a_.impl().is_radial();
        bool rb = !b_.valid() || b_.impl().is_radial();
        return ra && rb;
    }

    std::vector<cplx> profile_jet(double u0, int depth) const override {
        auto ja = a_.impl().profile_jet(u0, depth);
        switch (kind_) {
            case Kind::Scale: {
                for (auto& v : ja) v *= c_;
                return ja;
            }
            case Kind::AddConst: {
                ja[0] += c_;
                return ja;
            }
            case Kind::Add: {
                auto jb = b_.impl().profile_jet(u0, depth);
                for (int i = 0; i <= depth; ++i) ja[i] += jb[i];
                return ja;
            }
            case Kind::Mul: {
                auto jb = b_.impl().profile_jet(u0, depth);
                // Leibniz on derivative vectors
                std::vector<cplx> out(depth + 1, 0.0);
                for (int k = 0; k <= depth; ++k)
                    for (int j = 0; j <= k; ++j)
                        out[k] += ja[j] * jb[k - j] * (factorial(k) / (factorial(j) * factorial(k - j)));
                return out;
            }
        }
        throw Error("unreachable");
    }

    bool has_taylor() const override {
        return a_.impl().has_taylor() && (!b_.valid() || b_.impl().has_taylor());
    }
    std::vector<CTaylor> eval_taylor(const std::vector<Taylor>& xs,
                                     const std::vector<Taylor>& zetas) const override {
        auto ta = a_.impl().eval_taylor(xs, zetas);
        switch (kind_) {
            case Kind::Scale: {
                for (auto& t : ta) t = t * c_;
                return ta;
            }
            case Kind::AddConst: {
                for (int i = 0; i < std::min(rows_, cols_); ++i) {
                    auto& t = ta[i * cols_ + i];
                    t.re = t.re + c_.real();
                    t.im = t.im + c_.imag();
                }
                return ta;
            }
            case Kind::Add: {
                auto tb = b_.impl().eval_taylor(xs, zetas);
                for (size_t i = 0; i < ta.size(); ++i) ta[i] = ta[i] + tb[i];
                return ta;
            }
            case Kind::Mul: {
                auto tb = b_.impl().eval_taylor(xs, zetas);
                std::vector<CTaylor> out;
                int n = a_.cols();
                for (int r = 0; r < rows_; ++r)
                    for (int c = 0; c < cols_; ++c) {
                        CTaylor acc = ta[r * n] * tb[c]; // k = 0
                        for (int k = 1; k < n; ++k)
                            acc = acc + ta[r * n + k] * tb[k * cols_ + c];
                        out.push_back(acc);
                    }
                return out;
            }
        }
        throw Error("unreachable");
    }

  private:
    Kind kind_;
    Symbol a_, b_;
    cplx c_;
};

// ------------------------------------------------------ excised reciprocal

class ExcisedReciprocalImpl final : public SymbolImpl {
  public:
    ExcisedReciprocalImpl(Symbol a, double lambda)
        : SymbolImpl(a.manifold(), SymbolClass(-a.sclass().order, a.sclass().rho, a.sclass().delta),
                     1, 1, SymbolMeta::Composite),
          a_(std::move(a)), lambda_(lambda) {}

    CMat eval(const Vec& x, const Vec& zeta) const override {
        double chi = Cutoff::excision(zeta.norm() / lambda_);
        if (chi == 0.0) return scalar_mat(0.0);
        return scalar_mat(chi / a_.eval(x, zeta)(0, 0));
    }

    bool is_radial() const override { return a_.impl().is_radial(); }
    std::vector<cplx> profile_jet(double u0, int depth) const override {
        auto ja = a_.impl().profile_jet(u0, depth);
        Taylor us = Taylor::variable(TruncShape::single(1, depth), 0, u0);
        CTaylor av = compose_univariate_c(us, ja);
        // chi(sqrt(u)/lambda); excision(t) = 1 - step((t-1/2)/(1/2))
        double t0 = std::sqrt(u0) / lambda_;
        Taylor chi(us.shape());
        if (t0 >= 1.0)
            chi = Taylor::constant(us.shape(), 1.0);
        else if (t0 <= 0.5)
            return std::vector<cplx>(depth + 1, 0.0);
        else {
            Taylor t = us.sqrt_() * (1.0 / lambda_);
            chi = (smooth_step_down_taylor((t - 0.5) * 2.0)) * (-1.0) + 1.0;
        }
        // chi / a
        Taylor den = (av.re * av.re + av.im * av.im).inv();
        CTaylor res(chi * av.re * den, chi * (av.im * den) * (-1.0));
        std::vector<cplx> out(depth + 1);
        for (int k = 0; k <= depth; ++k) out[k] = res.partial(MultiIndex{k});
        return out;
    }

  private:
    Symbol a_;
    double lambda_;
};

// ------------------------------------------------------- asymptotic series

class SumSymbolImpl final : public SymbolImpl {
  public:
    SumSymbolImpl(std::shared_ptr<const Manifold> m, std::vector<Symbol> terms,
                  std::vector<double> lambdas, SymbolClass cls)
        : SymbolImpl(std::move(m), cls, terms[0].rows(), terms[0].cols(), SymbolMeta::Composite),
          terms_(std::move(terms)), lambdas_(std::move(lambdas)) {}

    CMat eval(const Vec& x, const Vec& zeta) const override {
        CMat acc = CMat::Zero(rows_, cols_);
        double r = zeta.norm();
        for (size_t j = 0; j < terms_.size(); ++j) {
            double chi = Cutoff::excision(r / lambdas_[j]);
            if (chi != 0.0) acc += chi * terms_[j].eval(x, zeta);
        }
        return acc;
    }

  private:
    std::vector<Symbol> terms_;
    std::vector<double> lambdas_;
};

// ----------------------------------------------------------------- factories

Symbol symbol_from_expression(std::shared_ptr<const Manifold> m, const std::string& text,
                              SymbolClass cls) {
    Expr e = parse_expression(text, m->point_dim(), m->dim());
    return symbol_from_expr(std::move(m), e, cls);
}

Symbol symbol_from_expr(std::shared_ptr<const Manifold> m, const Expr& e, SymbolClass cls) {
    std::vector<std::vector<Expr>> entries{{e}};
    return Symbol(std::make_shared<ExprSymbolImpl>(std::move(m), entries, cls));
}

Symbol symbol_from_expr_matrix(std::shared_ptr<const Manifold> m,
                               const std::vector<std::vector<Expr>>& entries, SymbolClass cls) {
    return Symbol(std::make_shared<ExprSymbolImpl>(std::move(m), entries, cls));
}

Symbol polynomial_symbol(std::shared_ptr<const Manifold> m,
                         const std::map<MultiIndex, Expr>& coeffs) {
    int deg = 0;
    for (const auto& [a, c] : coeffs) deg = std::max(deg, mi_abs(a));
    PolynomialData data{coeffs};
    return Symbol(
        std::make_shared<PolynomialSymbolImpl>(std::move(m), std::move(data), SymbolClass(deg)));
}

const PolynomialData* polynomial_data(const Symbol& s) {
    auto* p = dynamic_cast<const PolynomialSymbolImpl*>(&s.impl());
    return p ? &p->data() : nullptr;
}

std::string polynomial_to_json(const Symbol& s) {
    auto* p = polynomial_data(s);
    if (!p) throw Error("polynomial_to_json: not a polynomial symbol");
    nlohmann::json j;
    j["dim"] = s.manifold()->dim();
    j["coeffs"] = nlohmann::json::array();
    for (const auto& [alpha, c] : p->coeffs) {
        nlohmann::json e;
        e["alpha"] = alpha;
        e["expr"] = c.to_string();
        j["coeffs"].push_back(e);
    }
    return j.dump();
}

Symbol polynomial_from_json(std::shared_ptr<const Manifold> m, const std::string& json_text) {
    auto j = nlohmann::json::parse(json_text);
    std::map<MultiIndex, Expr> coeffs;
    for (const auto& e : j.at("coeffs")) {
        MultiIndex alpha = e.at("alpha").get<std::vector<int>>();
        coeffs[alpha] = parse_expression(e.at("expr").get<std::string>(), m->point_dim(), 0);
    }
    return polynomial_symbol(std::move(m), coeffs);
}

Symbol radial_symbol(std::shared_ptr<const Manifold> m, const std::string& profile_in_u,
                     SymbolClass cls) {
    Expr e = parse_expression(profile_in_u, 0, 1);
    return radial_symbol_expr(std::move(m), e, cls);
}

Symbol radial_symbol_expr(std::shared_ptr<const Manifold> m, const Expr& profile,
                          SymbolClass cls) {
    return Symbol(std::make_shared<RadialSymbolImpl>(std::move(m), profile, cls));
}

Symbol constant_symbol(std::shared_ptr<const Manifold> m, cplx value) {
    return Symbol(std::make_shared<ConstSymbolImpl>(std::move(m), scalar_mat(value)));
}

Symbol identity_symbol(std::shared_ptr<const Manifold> m, int n) {
    return Symbol(std::make_shared<ConstSymbolImpl>(std::move(m), CMat::Identity(n, n)));
}

Symbol norm_sq_symbol(std::shared_ptr<const Manifold> m) {
    return radial_symbol(std::move(m), "zeta1", SymbolClass(2.0));
}

Symbol block_symbol(const std::vector<std::vector<Symbol>>& blocks) {
    return Symbol(std::make_shared<BlockSymbolImpl>(blocks));
}

Symbol symbol_scale(const Symbol& a, cplx c) {
    return Symbol(std::make_shared<CombSymbolImpl>(CombSymbolImpl::Kind::Scale, a, Symbol(), c,
                                                   a.sclass(), a.rows(), a.cols()));
}

Symbol symbol_add(const Symbol& a, const Symbol& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ShapeMismatch("symbol_add: shape mismatch");
    SymbolClass cls(std::max(a.sclass().order, b.sclass().order), a.sclass().rho,
                    a.sclass().delta);
    return Symbol(std::make_shared<CombSymbolImpl>(CombSymbolImpl::Kind::Add, a, b, 0.0, cls,
                                                   a.rows(), a.cols()));
}

Symbol symbol_add_const(const Symbol& a, cplx c) {
    SymbolClass cls(std::max(a.sclass().order, 0.0), a.sclass().rho, a.sclass().delta);
    return Symbol(std::make_shared<CombSymbolImpl>(CombSymbolImpl::Kind::AddConst, a, Symbol(), c,
                                                   cls, a.rows(), a.cols()));
}

Symbol symbol_mul_pointwise(const Symbol& a, const Symbol& b) {
    if (a.cols() != b.rows()) throw ShapeMismatch("symbol_mul_pointwise: inner dimensions");
    SymbolClass cls(a.sclass().order + b.sclass().order, a.sclass().rho, a.sclass().delta);
    return Symbol(std::make_shared<CombSymbolImpl>(CombSymbolImpl::Kind::Mul, a, b, 0.0, cls,
                                                   a.rows(), b.cols()));
}

Symbol excised_reciprocal(const Symbol& a, double lambda) {
    if (a.rows() != 1 || a.cols() != 1) throw ShapeMismatch("excised_reciprocal: scalar only");
    return Symbol(std::make_shared<ExcisedReciprocalImpl>(a, lambda));
}

// ----------------------------------------------------------------- jets

namespace {

// per-axis central difference stencils of order-2 accuracy
const std::map<int, std::vector<std::pair<int, double>>>& stencil_table() {
    static const std::map<int, std::vector<std::pair<int, double>>> table = {
        {0, {{0, 1.0}}},
        {1, {{-1, -0.5}, {1, 0.5}}},
        {2, {{-1, 1.0}, {0, -2.0}, {1, 1.0}}},
        {3, {{-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}}},
        {4, {{-2, 1.0}, {-1, -4.0}, {0, 6.0}, {1, -4.0}, {2, 1.0}}},
        {5, {{-3, -0.5}, {-2, 2.0}, {-1, -2.5}, {1, 2.5}, {2, -2.0}, {3, 0.5}}},
        {6, {{-3, 1.0}, {-2, -6.0}, {-1, 15.0}, {0, -20.0}, {1, 15.0}, {2, -6.0}, {3, 1.0}}},
    };
    return table;
}

// evaluate a mixed central difference D^{orders} with axis steps h[i], using
// a memoized evaluator over integer offsets (in half-step units)
CMat mixed_fd(const std::function<CMat(const std::vector<int>&)>& eval_halfsteps,
              const std::vector<int>& orders, const std::vector<double>& h, int halfscale) {
    int n = (int)orders.size();
    std::vector<std::vector<std::pair<int, double>>> st(n);
    double scale = 1.0;
    for (int i = 0; i < n; ++i) {
        st[i] = stencil_table().at(orders[i]);
        for (int j = 0; j < orders[i]; ++j) scale /= (h[i] * halfscale / 2.0);
    }
    CMat acc;
    bool first = true;
    std::vector<int> off(n, 0);
    std::function<void(int, double)> rec = [&](int axis, double w) {
        if (axis == n) {
            CMat v = eval_halfsteps(off);
            if (first) {
                acc = w * v;
                first = false;
            } else
                acc += w * v;
            return;
        }
        for (const auto& [o, ww] : st[axis]) {
            off[axis] = o * halfscale;
            rec(axis + 1, w * ww);
        }
    };
    rec(0, 1.0);
    return acc * scale;
}

} // namespace

JetTable jet(const Symbol& a, const Covector& xi, int depth_h, int depth_v, JetFlavor flavor,
             const JetSteps& steps) {
    if (!steps.unrestricted_depth && (depth_h > kMaxJetDepth || depth_v > kMaxJetDepth))
        throw JetDepthExceeded("jet: requested depth exceeds limit");
    const Manifold& M = *a.manifold();
    int d = M.dim();
    JetTable table;
    table.base = xi;
    table.dim = d;
    table.max_h = depth_h;
    table.max_v = depth_v;

    auto alphas = enumerate_upto(d, depth_h);
    auto betas = enumerate_upto(d, depth_v);

    const bool flat = M.is_flat();
    const bool sphere = M.kind() == ManifoldKind::Sphere2;

    auto var_or_const = [](const TruncShape& sh, int k, double base) {
        // a zero cap truncates the group entirely; the variable degenerates
        int g = 0, acc = 0;
        for (size_t gi = 0; gi < sh.group_sizes.size(); ++gi) {
            if (k < acc + sh.group_sizes[gi]) {
                g = (int)gi;
                break;
            }
            acc += sh.group_sizes[gi];
        }
        if (sh.caps[g] == 0) return Taylor::constant(sh, base);
        return Taylor::variable(sh, k, base);
    };

    // ---- exact Taylor paths
    if (a.impl().is_radial() && (flat || sphere)) {
        TruncShape sh({2, 2, 1}, {depth_h, depth_v, 0});
        if (d == 1) sh = TruncShape({1, 1, 1}, {depth_h, depth_v, 0});
        std::vector<Taylor> zs, ds;
        for (int i = 0; i < d; ++i) zs.push_back(var_or_const(sh, i, 0.0));
        for (int i = 0; i < d; ++i) ds.push_back(var_or_const(sh, d + i, 0.0));
        Taylor usq(sh);
        if (flat) {
            for (int i = 0; i < d; ++i) {
                Taylor c = ds[i] + xi.zeta[i];
                usq += c * c;
            }
        } else {
            auto cen = sphere_series::center_at(M, xi.x);
            auto TI = sphere_series::theta_inv_series(cen.R, zs[0], zs[1]);
            for (int k = 0; k < 2; ++k) {
                Taylor comp(sh);
                if (flavor == JetFlavor::Pullback) {
                    for (int l = 0; l < 2; ++l) comp += TI[k][l] * (ds[l] + xi.zeta[l]);
                } else {
                    for (int l = 0; l < 2; ++l) comp += TI[k][l] * xi.zeta[l];
                    comp += ds[k];
                }
                usq += comp * comp;
            }
        }
        auto pj = a.impl().profile_jet(usq.value(), depth_h + depth_v);
        CTaylor val = compose_univariate_c(usq, pj);
        for (const auto& al : alphas)
            for (const auto& be : betas) {
                MultiIndex full(al);
                full.insert(full.end(), be.begin(), be.end());
                full.push_back(0);
                table.entries[{al, be}] = scalar_mat(val.partial(full));
            }
        return table;
    }

    if (a.impl().has_taylor() && (flat || sphere)) {
        TruncShape sh({d, d}, {depth_h, depth_v});
        std::vector<Taylor> zs, ds;
        for (int i = 0; i < d; ++i) zs.push_back(var_or_const(sh, i, 0.0));
        for (int i = 0; i < d; ++i) ds.push_back(var_or_const(sh, d + i, 0.0));
        std::vector<Taylor> xs, zetas;
        if (flat) {
            for (int i = 0; i < d; ++i) xs.push_back(zs[i] + xi.x[i]);
            for (int i = 0; i < d; ++i) zetas.push_back(ds[i] + xi.zeta[i]);
        } else {
            auto cen = sphere_series::center_at(M, xi.x);
            auto y = sphere_series::point_series(cen, zs[0], zs[1]);
            xs = {y[0], y[1], y[2]};
            sphere_series::TVec3 f1, f2;
            sphere_series::transported_frame_series(cen, y, f1, f2);
            auto O = sphere_series::rot_series(cen, y, f1, f2);
            auto TI = sphere_series::theta_inv_series(cen.R, zs[0], zs[1]);
            for (int k = 0; k < 2; ++k) {
                Taylor comp(sh);
                for (int l = 0; l < 2; ++l) {
                    if (flavor == JetFlavor::Pullback) {
                        Taylor inner(sh);
                        for (int m = 0; m < 2; ++m) inner += TI[l][m] * (ds[m] + xi.zeta[m]);
                        comp += O[k][l] * inner;
                    } else {
                        Taylor inner = ds[l];
                        for (int m = 0; m < 2; ++m) inner += TI[l][m] * xi.zeta[m];
                        comp += O[k][l] * inner;
                    }
                }
                zetas.push_back(comp);
            }
        }
        auto vals = a.impl().eval_taylor(xs, zetas);
        for (const auto& al : alphas)
            for (const auto& be : betas) {
                MultiIndex full(al);
                full.insert(full.end(), be.begin(), be.end());
                CMat m(a.rows(), a.cols());
                for (int r = 0; r < a.rows(); ++r)
                    for (int c = 0; c < a.cols(); ++c)
                        m(r, c) = vals[r * a.cols() + c].partial(full);
                table.entries[{al, be}] = m;
            }
        return table;
    }

    if (a.impl().has_custom_jet()) return a.impl().custom_jet(xi, depth_h, depth_v, flavor);

    // ---- finite-difference fallback (any manifold, any symbol)
    if (depth_h > kMaxJetDepth || depth_v > kMaxJetDepth)
        throw JetDepthExceeded("jet: finite-difference path limited to depth 6");
    double hv = steps.vertical_rel * (1.0 + xi.zeta.norm());
    double hx = steps.horizontal_rel * M.injectivity_radius();
    std::vector<double> h(2 * d);
    for (int i = 0; i < d; ++i) h[i] = hx;
    for (int i = 0; i < d; ++i) h[d + i] = hv;

    std::map<std::vector<int>, CMat> memo;
    auto eval_off = [&](const std::vector<int>& off_half) -> CMat {
        auto it = memo.find(off_half);
        if (it != memo.end()) return it->second;
        Vec z(d), dz(d);
        for (int i = 0; i < d; ++i) z[i] = off_half[i] * h[i] / 2.0;
        for (int i = 0; i < d; ++i) dz[i] = off_half[d + i] * h[d + i] / 2.0;
        CMat v;
        if (z.norm() < 1e-300) {
            v = a.eval(xi.x, xi.zeta + dz);
        } else {
            Vec y = M.exp(xi.x, z);
            Mat O = M.transport_frame(xi.x, z);
            Mat TH = M.theta(xi.x, y);
            Vec comps;
            if (flavor == JetFlavor::Pullback)
                comps = O * TH.transpose().colPivHouseholderQr().solve(xi.zeta + dz);
            else
                comps = O * (TH.transpose().colPivHouseholderQr().solve(xi.zeta) + dz);
            v = a.eval(y, comps);
        }
        memo[off_half] = v;
        return v;
    };

    for (const auto& al : alphas)
        for (const auto& be : betas) {
            std::vector<int> orders(2 * d, 0);
            for (int i = 0; i < d; ++i) orders[i] = al[i];
            for (int i = 0; i < d; ++i) orders[d + i] = be[i];
            CMat coarse = mixed_fd(eval_off, orders, h, 2);
            CMat fine = mixed_fd(eval_off, orders, h, 1);
            CMat rich = (4.0 * fine - coarse) / 3.0;
            int tot = mi_abs(al) + mi_abs(be);
            if (tot >= 1 && tot <= 2) {
                double scale = std::max(1.0, rich.norm());
                double resid = (fine - coarse).norm() / scale;
                if (resid > 0.5 && rich.norm() > 1e-4)
                    throw StepUnderflow("jet: finite differences failed to converge", resid);
            }
            table.entries[{al, be}] = rich;
        }
    return table;
}

// ----------------------------------------------------------------- sampling

SampleSet default_samples(const Manifold& m, int count, uint64_t seed) {
    Rng rng(seed);
    SampleSet s;
    for (int i = 0; i < count; ++i) s.points.push_back(m.random_point(rng));
    return s;
}

std::vector<Vec> fiber_directions(int dim, int count) {
    std::vector<Vec> dirs;
    if (dim == 1) {
        Vec p(1), m(1);
        p << 1.0;
        m << -1.0;
        dirs = {p, m};
        return dirs;
    }
    for (int i = 0; i < count; ++i) {
        double th = 2 * pi * i / count + 0.3; // avoid axis alignment
        Vec v(dim);
        v.setZero();
        v[0] = std::cos(th);
        v[1] = std::sin(th);
        dirs.push_back(v);
    }
    return dirs;
}

// ----------------------------------------------------------------- seminorm

double seminorm(const Symbol& a, const SampleSet& K, const MultiIndex& alpha,
                const MultiIndex& beta, double shell_lo, double shell_hi, int n_radii,
                int n_dirs) {
    if (mi_abs(alpha) + mi_abs(beta) > kMaxJetDepth)
        throw JetDepthExceeded("seminorm: |alpha|+|beta| exceeds max jet depth");
    const auto& cls = a.sclass();
    double expo = cls.order + cls.delta * mi_abs(alpha) - cls.rho * mi_abs(beta);
    auto dirs = fiber_directions(a.manifold()->dim(), n_dirs);
    double sup = 0.0;
    int dh = mi_abs(alpha), dv = mi_abs(beta);
    for (const auto& x : K.points) {
        for (int ir = 0; ir < n_radii; ++ir) {
            double t = n_radii == 1 ? 0.0 : (double)ir / (n_radii - 1);
            double r = shell_lo * std::pow(shell_hi / shell_lo, t);
            for (const auto& dir : dirs) {
                Covector xi{x, r * dir};
                double val;
                if (dh == 0 && dv == 0) {
                    val = a.eval(xi).norm();
                } else {
                    JetTable t2 = jet(a, xi, dh, dv);
                    val = t2.at(alpha, beta).norm();
                }
                double norm = val / std::pow(1.0 + r, expo);
                sup = std::max(sup, norm);
            }
        }
    }
    return sup;
}

OrderFit measured_order(const Symbol& a, const SampleSet& K, double shell_lo, double shell_hi,
                        int n_radii, int n_dirs, double assumed_order) {
    OrderFit fit;
    auto dirs = fiber_directions(a.manifold()->dim(), n_dirs);
    for (int ir = 0; ir < n_radii; ++ir) {
        double t = n_radii == 1 ? 0.0 : (double)ir / (n_radii - 1);
        double r = shell_lo * std::pow(shell_hi / shell_lo, t);
        double sup = 0.0;
        for (const auto& x : K.points)
            for (const auto& dir : dirs) sup = std::max(sup, a.eval(x, r * dir).norm());
        fit.radii.push_back(r);
        fit.sups.push_back(sup);
        fit.sup_normalized = std::max(fit.sup_normalized, sup / std::pow(1.0 + r, assumed_order));
    }
    double peak = 0.0;
    for (double s : fit.sups) peak = std::max(peak, s);
    if (peak < 1e-250) {
        fit.identically_zero = true;
        fit.slope = -1e9;
        return fit;
    }
    std::vector<double> lr;
    for (double r : fit.radii) lr.push_back(1.0 + r);
    fit.slope = fit_loglog_slope(lr, fit.sups);
    return fit;
}

// ------------------------------------------------------------- asymptotic

AsymptoticSeries asymptotic_sum(const std::vector<std::pair<double, Symbol>>& terms,
                                double shell_hi) {
    if (terms.empty()) throw Error("asymptotic_sum: no terms");
    for (size_t j = 1; j < terms.size(); ++j)
        if (!(terms[j].first < terms[j - 1].first))
            throw NonDecreasingOrders("asymptotic_sum: orders must strictly decrease");

    AsymptoticSeries out;
    auto m = terms[0].second.manifold();
    SampleSet K = default_samples(*m, 3, 12345);
    auto dirs = fiber_directions(m->dim(), 6);

    for (size_t j = 0; j < terms.size(); ++j) {
        out.orders.push_back(terms[j].first);
        out.terms.push_back(terms[j].second);
        double lambda = 1.0;
        if (j == 0) {
            out.lambdas.push_back(lambda);
            continue;
        }
        double target = std::pow(0.5, (double)j);
        double mu_prev = terms[j - 1].first;
        bool ok = false;
        for (int tries = 0; tries <= 20; ++tries) {
            // sup over the excised region of |a_j| (1+r)^{-mu_{j-1}}
            double sup = 0.0;
            for (int ir = 0; ir < 12; ++ir) {
                double r = (lambda / 2) * std::pow((shell_hi * 2) / (lambda / 2), ir / 11.0);
                double chi = Cutoff::excision(r / lambda);
                if (chi == 0.0) continue;
                for (const auto& x : K.points)
                    for (const auto& dir : dirs) {
                        double v = chi * terms[j].second.eval(x, r * dir).norm();
                        sup = std::max(sup, v / std::pow(1.0 + r, mu_prev));
                    }
            }
            if (sup <= target) {
                ok = true;
                break;
            }
            lambda *= 2.0;
            if (lambda > double(1 << 20)) break;
        }
        if (!ok) throw Error("asymptotic_sum: excision scale exceeded 2^20 without passing");
        lambda = std::max(lambda, out.lambdas.back());
        out.lambdas.push_back(lambda);
    }

    SymbolClass cls(terms[0].first, terms[0].second.sclass().rho, terms[0].second.sclass().delta);
    std::vector<Symbol> syms;
    for (const auto& [mu, s] : terms) syms.push_back(s);
    out.sum = Symbol(std::make_shared<SumSymbolImpl>(m, syms, out.lambdas, cls));
    return out;
}

} // namespace normsym
