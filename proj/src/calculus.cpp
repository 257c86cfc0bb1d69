#include "normsym/calculus.hpp"

#include "sphere_series.hpp"

#include <map>
#include <mutex>

namespace normsym {

// ------------------------------------------------------ summand enumeration

namespace {

void enumerate_for_k(int d, int N, int k, std::vector<SharpSummand>& out) {
    // tuples (alpha_tilde, alpha_1..alpha_k, beta_1..beta_k), |beta_j| >= 2,
    // ord = |alpha_tilde| + sum|alpha_j| + |beta| - k <= N
    std::vector<MultiIndex> small = enumerate_upto(d, N + k);
    std::vector<MultiIndex> betaset;
    for (const auto& b : small)
        if (mi_abs(b) >= 2) betaset.push_back(b);

    std::vector<MultiIndex> bchoice(k), achoice(k);
    std::function<void(int, int)> rec_beta = [&](int j, int btot) {
        if (j == k) {
            // now alphas
            std::function<void(int, int)> rec_alpha = [&](int i, int atot) {
                if (i == k) {
                    for (const auto& at : small) {
                        int ord = mi_abs(at) + atot + btot - k;
                        if (ord > N || ord < 0) continue;
                        SharpSummand s;
                        s.alpha_tilde = at;
                        s.alphas = achoice;
                        s.betas = bchoice;
                        s.alpha = at;
                        for (const auto& a : achoice) s.alpha = mi_add(s.alpha, a);
                        s.ord = ord;
                        // i^{k - |alpha| - |beta|} / (k! at! prod a_j! prod b_j!)
                        s.ipower = k - mi_abs(s.alpha) - btot;
                        double den = factorial(k) * mi_factorial(at);
                        for (const auto& a : achoice) den *= mi_factorial(a);
                        for (const auto& b : bchoice) den *= mi_factorial(b);
                        s.coef = 1.0 / den;
                        out.push_back(s);
                    }
                    return;
                }
                for (const auto& a : small) {
                    if (atot + mi_abs(a) > N + k) continue;
                    achoice[i] = a;
                    rec_alpha(i + 1, atot + mi_abs(a));
                }
            };
            rec_alpha(0, 0);
            return;
        }
        for (const auto& b : betaset) {
            if (btot + mi_abs(b) > N + k) continue;
            bchoice[j] = b;
            rec_beta(j + 1, btot + mi_abs(b));
        }
    };
    rec_beta(0, 0);
}

} // namespace

const std::vector<SharpSummand>& sharp_summands(int dim, int N) {
    static std::map<std::pair<int, int>, std::vector<SharpSummand>> cache;
    static std::mutex mx;
    std::lock_guard<std::mutex> lk(mx);
    auto key = std::make_pair(dim, N);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<SharpSummand> out;
    for (int k = 0; k <= N; ++k) enumerate_for_k(dim, N, k, out);
    return cache.emplace(key, std::move(out)).first->second;
}

// ------------------------------------------------------------ rho^{-1} jets

std::map<MultiIndex, double> rho_inv_jets(const std::shared_ptr<const Manifold>& m, const Vec& x,
                                          int depth) {
    int d = m->dim();
    std::map<MultiIndex, double> out;
    auto idxs = enumerate_upto(d, depth);
    if (m->is_flat()) {
        for (const auto& a : idxs) out[a] = (mi_abs(a) == 0) ? 1.0 : 0.0;
        return out;
    }
    if (m->kind() == ManifoldKind::Sphere2) {
        double R = SphereAccess::radius(*m);
        TruncShape sh({d}, {depth});
        Taylor u(sh);
        for (int i = 0; i < d; ++i) {
            Taylor zi = Taylor::variable(sh, i);
            u += zi * zi;
        }
        Taylor rinv = (u * (1.0 / (R * R))).invsinc_of_sq(); // (r/R)/sin(r/R)
        for (const auto& a : idxs) out[a] = rinv.partial(a);
        return out;
    }
    // generic chart: finite differences of rho^{-1}(exp_x z, x)
    double h = 1e-3 * m->injectivity_radius();
    auto eval = [&](const Vec& z) {
        if (z.norm() < 1e-300) return 1.0;
        Vec y = m->exp(x, z);
        return 1.0 / m->density_rho(y, x);
    };
    for (const auto& a : idxs) {
        if (mi_abs(a) == 0) {
            out[a] = 1.0;
            continue;
        }
        // tensor central stencil, one Richardson level
        static const std::map<int, std::vector<std::pair<int, double>>> st = {
            {0, {{0, 1.0}}},
            {1, {{-1, -0.5}, {1, 0.5}}},
            {2, {{-1, 1.0}, {0, -2.0}, {1, 1.0}}},
            {3, {{-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}}},
            {4, {{-2, 1.0}, {-1, -4.0}, {0, 6.0}, {1, -4.0}, {2, 1.0}}},
        };
        auto mixed = [&](double step) {
            double scale = 1.0;
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < a[i]; ++j) scale /= step;
            double acc = 0;
            std::vector<int> off(d, 0);
            std::function<void(int, double)> rec = [&](int axis, double w) {
                if (axis == d) {
                    Vec z(d);
                    for (int i = 0; i < d; ++i) z[i] = off[i] * step;
                    acc += w * eval(z);
                    return;
                }
                for (const auto& [o, ww] : st.at(a[axis])) {
                    off[axis] = o;
                    rec(axis + 1, w * ww);
                }
            };
            rec(0, 1.0);
            return acc * scale;
        };
        double c = mixed(h), f = mixed(h / 2);
        out[a] = (4 * f - c) / 3.0;
    }
    return out;
}

// -------------------------------------------------------------- SharpSymbol

namespace {

struct PhaseCache {
    mutable std::mutex mx;
    mutable std::map<std::vector<double>, PhaseTensors> tensors;

    const PhaseTensors& get(const std::shared_ptr<const Manifold>& m, const Vec& x, int ma,
                            int mb) const {
        std::vector<double> key(x.data(), x.data() + x.size());
        key.push_back(ma);
        key.push_back(mb);
        std::lock_guard<std::mutex> lk(mx);
        auto it = tensors.find(key);
        if (it != tensors.end()) return it->second;
        return tensors.emplace(key, phase_tensors(m, x, ma, mb)).first->second;
    }
};

bool all_alphas_nonzero(const SharpSummand& s) {
    for (const auto& a : s.alphas)
        if (mi_abs(a) == 0) return false;
    return true;
}

Vec sphere_ref_point() {
    Vec p(3);
    p << 1.0, 0.0, 0.0;
    return p;
}

} // namespace

class SharpSymbolImpl final : public SymbolImpl {
  public:
    SharpSymbolImpl(Symbol a, Symbol b, ExpansionConfig cfg)
        : SymbolImpl(a.manifold(),
                     SymbolClass(a.sclass().order + b.sclass().order, a.sclass().rho,
                                 a.sclass().delta),
                     a.rows(), b.cols(), SymbolMeta::Composite),
          a_(std::move(a)), b_(std::move(b)), cfg_(cfg) {
        if (a_.cols() != b_.rows()) throw ShapeMismatch("sharp_product: inner dimensions differ");
        if (!a_.sclass().same_type(b_.sclass()))
            throw ClassMismatch("sharp_product: factors must share (rho, delta)");
    }

    CMat eval(const Vec& x, const Vec& zeta) const override {
        Covector xi{x, zeta};
        int N = cfg_.max_order_drop;
        const bool flat = manifold_->is_flat();
        JetSteps deep;
        deep.unrestricted_depth = true;
        JetTable A = jet(a_, xi, 0, N, JetFlavor::Recentered, deep);
        JetTable B = jet(b_, xi, N, N, JetFlavor::Recentered, deep);
        const PhaseTensors* T = nullptr;
        if (!flat) T = &phase_cache_.get(manifold_, x, N, N);

        CMat acc = CMat::Zero(rows_, cols_);
        for (const auto& s : sharp_summands(manifold_->dim(), N)) {
            if (!s.betas.empty() && flat) continue;
            if (!all_alphas_nonzero(s)) continue; // phi_{0 beta} = 0
            cplx factor = ipow(s.ipower) * s.coef;
            for (size_t j = 0; j < s.betas.size(); ++j)
                factor *= zeta.dot(T->at(s.alphas[j], s.betas[j]));
            if (std::abs(factor) < 1e-300) continue;
            acc += factor * (A.at(mi_zero(manifold_->dim()), s.alpha) *
                             B.at(s.alpha_tilde, s.betas.empty() ? mi_zero(manifold_->dim())
                                                                 : total_beta(s)));
        }
        return acc;
    }

    bool is_radial() const override {
        return rows_ == 1 && cols_ == 1 && a_.impl().is_radial() && b_.impl().is_radial() &&
               (manifold_->is_flat() || manifold_->kind() == ManifoldKind::Sphere2);
    }

    std::vector<cplx> profile_jet(double u0, int depth) const override;

    bool has_custom_jet() const override { return manifold_->is_flat(); }
    JetTable custom_jet(const Covector& xi, int h, int v, JetFlavor) const override;

    const Symbol& left() const { return a_; }
    const Symbol& right() const { return b_; }
    const ExpansionConfig& config() const { return cfg_; }

  private:
    Symbol a_, b_;
    ExpansionConfig cfg_;
    PhaseCache phase_cache_;
    mutable std::mutex pj_mx_;
    mutable std::map<std::pair<double, int>, std::vector<cplx>> pj_cache_;

    static MultiIndex total_beta(const SharpSummand& s) {
        MultiIndex b = s.betas[0];
        for (size_t j = 1; j < s.betas.size(); ++j) b = mi_add(b, s.betas[j]);
        return b;
    }

    friend ProductTermLedger term_ledger(const Symbol&, const Symbol&, const Covector&,
                                         const ExpansionConfig&);
};

// flat manifolds: the expansion reduces to the classical composition sum and
// its jets close under Leibniz
JetTable SharpSymbolImpl::custom_jet(const Covector& xi, int h, int v, JetFlavor) const {
    int d = manifold_->dim();
    int N = cfg_.max_order_drop;
    JetSteps deep;
    deep.unrestricted_depth = true;
    JetTable A = jet(a_, xi, h, v + N, JetFlavor::Recentered, deep);
    JetTable B = jet(b_, xi, h + N, v, JetFlavor::Recentered, deep);

    JetTable out;
    out.base = xi;
    out.dim = d;
    out.max_h = h;
    out.max_v = v;
    auto gammas = enumerate_upto(d, h);
    auto deltas = enumerate_upto(d, v);
    auto alphas = enumerate_upto(d, N);
    for (const auto& g : gammas)
        for (const auto& dl : deltas) {
            CMat acc = CMat::Zero(rows_, cols_);
            for (const auto& al : alphas) {
                cplx base = ipow(-mi_abs(al)) / mi_factorial(al);
                // Leibniz split of gamma and delta over the two factors
                for (const auto& g1 : enumerate_upto(d, mi_abs(g)))
                    for (const auto& d1 : enumerate_upto(d, mi_abs(dl))) {
                        if (!mi_leq(g1, g) || !mi_leq(d1, dl)) continue;
                        MultiIndex g2 = mi_sub(g, g1), d2 = mi_sub(dl, d1);
                        double binom = mi_binom(g, g1) * mi_binom(dl, d1);
                        acc += base * binom *
                               (A.at(g1, mi_add(al, d1)) * B.at(mi_add(al, g2), d2));
                    }
            }
            out.entries[{g, dl}] = acc;
        }
    return out;
}

// radial profile jets via the shifted-shell Taylor family zeta0(s) = (sqrt(u0+s), 0)
std::vector<cplx> SharpSymbolImpl::profile_jet(double u0, int depth) const {
    {
        std::lock_guard<std::mutex> lk(pj_mx_);
        auto it = pj_cache_.find({u0, depth});
        if (it != pj_cache_.end()) return it->second;
    }
    int N = cfg_.max_order_drop;
    if (manifold_->is_flat()) {
        // radial symbols are position independent; only the alpha = 0 summand
        // survives, so the profile is the pointwise product
        auto ja = a_.impl().profile_jet(u0, depth);
        auto jb = b_.impl().profile_jet(u0, depth);
        std::vector<cplx> out(depth + 1, 0.0);
        for (int k = 0; k <= depth; ++k)
            for (int j = 0; j <= k; ++j)
                out[k] += ja[j] * jb[k - j] * (factorial(k) / (factorial(j) * factorial(k - j)));
        return out;
    }

    double R = SphereAccess::radius(*manifold_);
    int K = depth;
    TruncShape sh({2, 2, 1}, {N, N + 2, K});
    Taylor z1 = Taylor::variable(sh, 0), z2 = Taylor::variable(sh, 1);
    Taylor k1 = Taylor::variable(sh, 2), k2 = Taylor::variable(sh, 3);
    Taylor us = Taylor::variable(sh, 4, u0);
    Taylor sig = us.sqrt_(); // |zeta0|(s)

    auto TI = sphere_series::theta_inv_series(R, z1, z2);
    // recentered B argument: Theta^{-T} zeta0 + kappa
    Taylor cB1 = TI[0][0] * sig + k1;
    Taylor cB2 = TI[1][0] * sig + k2;
    Taylor usqB = cB1 * cB1 + cB2 * cB2;
    // A argument: zeta0 + kappa (vertical jets only)
    Taylor cA1 = sig + k1, cA2 = k2;
    Taylor usqA = cA1 * cA1 + cA2 * cA2;

    int deep = N + (N + 2) + K + 1;
    CTaylor valB = compose_univariate_c(usqB, b_.impl().profile_jet(u0, deep));
    CTaylor valA = compose_univariate_c(usqA, a_.impl().profile_jet(u0, deep));

    // phase tensors are universal constants on the round sphere
    const PhaseTensors& T = phase_cache_.get(manifold_, sphere_ref_point(), N, N);

    auto series_of = [&](const CTaylor& val, const MultiIndex& zz, const MultiIndex& kk) {
        std::vector<cplx> c(K + 1, 0.0);
        double fct = mi_factorial(zz) * mi_factorial(kk);
        for (int j = 0; j <= K; ++j) {
            MultiIndex full(zz);
            full.insert(full.end(), kk.begin(), kk.end());
            full.push_back(j);
            c[j] = cplx(val.re.at(full), val.im.at(full)) * fct;
        }
        return c;
    };
    auto ser_mulc = [&](const std::vector<cplx>& a, const std::vector<cplx>& b) {
        std::vector<cplx> r(K + 1, 0.0);
        for (int i = 0; i <= K; ++i)
            for (int j = 0; i + j <= K; ++j) r[i + j] += a[i] * b[j];
        return r;
    };
    // sigma(s) as a plain series for the phase factors
    std::vector<cplx> sig_series(K + 1, 0.0);
    for (int j = 0; j <= K; ++j) {
        MultiIndex full(4, 0);
        full.push_back(j);
        sig_series[j] = sig.at(full);
    }

    std::vector<cplx> V(K + 1, 0.0);
    MultiIndex zero = mi_zero(2);
    for (const auto& s : sharp_summands(2, N)) {
        if (!all_alphas_nonzero(s)) continue;
        std::vector<cplx> term = series_of(valA, zero, s.alpha);
        MultiIndex tb = zero;
        for (const auto& b : s.betas) tb = mi_add(tb, b);
        term = ser_mulc(term, series_of(valB, s.alpha_tilde, tb));
        for (size_t j = 0; j < s.betas.size(); ++j) {
            const Vec& tv = T.at(s.alphas[j], s.betas[j]);
            std::vector<cplx> ph(K + 1, 0.0);
            for (int q = 0; q <= K; ++q) ph[q] = sig_series[q] * tv[0];
            term = ser_mulc(term, ph);
        }
        cplx factor = ipow(s.ipower) * s.coef;
        for (int q = 0; q <= K; ++q) V[q] += factor * term[q];
    }
    std::vector<cplx> out(K + 1);
    for (int q = 0; q <= K; ++q) out[q] = V[q] * factorial(q);
    return out;
}

// --------------------------------------------------------------- adjoint

class AdjointSymbolImpl final : public SymbolImpl {
  public:
    AdjointSymbolImpl(Symbol a, ExpansionConfig cfg)
        : SymbolImpl(a.manifold(), a.sclass(), a.cols(), a.rows(), SymbolMeta::Composite),
          a_(std::move(a)), cfg_(cfg) {}

    CMat eval(const Vec& x, const Vec& zeta) const override {
        Covector xi{x, zeta};
        int N = cfg_.max_order_drop;
        JetSteps deep;
        deep.unrestricted_depth = true;
        JetTable A = jet(a_, xi, N, N, JetFlavor::Pullback, deep);
        auto rj = rho_inv_jets(manifold_, x, N);
        int d = manifold_->dim();
        CMat acc = CMat::Zero(rows_, cols_);
        for (const auto& gamma : enumerate_upto(d, N))
            for (const auto& beta : enumerate_upto(d, N)) {
                int tot = mi_abs(gamma) + mi_abs(beta);
                if (tot > N) continue;
                double rho = rj.at(beta);
                if (rho == 0.0) continue;
                cplx coef = ipow(-tot) / (mi_factorial(beta) * mi_factorial(gamma)) * rho;
                acc += coef * A.at(gamma, mi_add(beta, gamma)).adjoint();
            }
        return acc;
    }

    bool is_radial() const override {
        return a_.impl().is_radial() && (manifold_->is_flat() ||
                                         manifold_->kind() == ManifoldKind::Sphere2);
    }

    std::vector<cplx> profile_jet(double u0, int depth) const override {
        int N = cfg_.max_order_drop;
        if (manifold_->is_flat()) {
            // position-independent symbol: adjoint is the conjugate profile
            auto j = a_.impl().profile_jet(u0, depth);
            for (auto& v : j) v = std::conj(v);
            return j;
        }
        double R = SphereAccess::radius(*manifold_);
        int K = depth;
        TruncShape sh({2, 2, 1}, {N, N, K});
        Taylor z1 = Taylor::variable(sh, 0), z2 = Taylor::variable(sh, 1);
        Taylor k1 = Taylor::variable(sh, 2), k2 = Taylor::variable(sh, 3);
        Taylor us = Taylor::variable(sh, 4, u0);
        Taylor sig = us.sqrt_();
        auto TI = sphere_series::theta_inv_series(R, z1, z2);
        // pullback argument: Theta^{-T} (zeta0 + kappa)
        Taylor c1 = TI[0][0] * (sig + k1) + TI[0][1] * k2;
        Taylor c2 = TI[1][0] * (sig + k1) + TI[1][1] * k2;
        Taylor usq = c1 * c1 + c2 * c2;
        int deep = 2 * N + K + 1;
        auto pj = a_.impl().profile_jet(u0, deep);
        for (auto& v : pj) v = std::conj(v);
        CTaylor val = compose_univariate_c(usq, pj);
        // rho^{-1} jets on the sphere: invsinc(u/R^2) partials (constants)
        auto rj = rho_inv_jets(manifold_, sphere_ref_point(), N);

        std::vector<cplx> V(K + 1, 0.0);
        int d = 2;
        for (const auto& gamma : enumerate_upto(d, N))
            for (const auto& beta : enumerate_upto(d, N)) {
                int tot = mi_abs(gamma) + mi_abs(beta);
                if (tot > N) continue;
                double rho = rj.at(beta);
                if (rho == 0.0) continue;
                cplx coef = ipow(-tot) / (mi_factorial(beta) * mi_factorial(gamma)) * rho;
                MultiIndex bg = mi_add(beta, gamma);
                double fct = mi_factorial(gamma) * mi_factorial(bg);
                for (int q = 0; q <= K; ++q) {
                    MultiIndex full(gamma);
                    full.insert(full.end(), bg.begin(), bg.end());
                    full.push_back(q);
                    V[q] += coef * cplx(val.re.at(full), val.im.at(full)) * fct;
                }
            }
        std::vector<cplx> out(K + 1);
        for (int q = 0; q <= K; ++q) out[q] = V[q] * factorial(q);
        return out;
    }

    bool has_custom_jet() const override { return manifold_->is_flat(); }
    JetTable custom_jet(const Covector& xi, int h, int v, JetFlavor) const override {
        int d = manifold_->dim();
        int N = cfg_.max_order_drop;
        JetSteps deep;
        deep.unrestricted_depth = true;
        JetTable A = jet(a_, xi, h + N, v + N, JetFlavor::Pullback, deep);
        JetTable out;
        out.base = xi;
        out.dim = d;
        out.max_h = h;
        out.max_v = v;
        for (const auto& g : enumerate_upto(d, h))
            for (const auto& dl : enumerate_upto(d, v)) {
                CMat acc = CMat::Zero(rows_, cols_);
                for (const auto& gamma : enumerate_upto(d, N)) {
                    // flat: rho == 1, only beta = 0 terms
                    cplx coef = ipow(-mi_abs(gamma)) / mi_factorial(gamma);
                    acc += coef * A.at(mi_add(gamma, g), mi_add(gamma, dl)).adjoint();
                }
                out.entries[{g, dl}] = acc;
            }
        return out;
    }

  private:
    Symbol a_;
    ExpansionConfig cfg_;
};

// ------------------------------------------------------------- public ops

Symbol sharp_product(const Symbol& a, const Symbol& b, const ExpansionConfig& cfg) {
    return Symbol(std::make_shared<SharpSymbolImpl>(a, b, cfg));
}

Symbol adjoint_symbol(const Symbol& a, const ExpansionConfig& cfg) {
    return Symbol(std::make_shared<AdjointSymbolImpl>(a, cfg));
}

std::map<MultiIndex, double> field_jets(const std::shared_ptr<const Manifold>& m, const Expr& f,
                                        const Vec& x, int depth) {
    int d = m->dim();
    std::map<MultiIndex, double> out;
    auto idxs = enumerate_upto(d, depth);
    int dep = std::max(depth, 1);
    if (m->is_flat()) {
        TruncShape sh({d}, {dep});
        std::vector<Taylor> xs;
        for (int i = 0; i < d; ++i) xs.push_back(Taylor::variable(sh, i, x[i]));
        Taylor v = f.eval_taylor(xs, {});
        for (const auto& a : idxs) out[a] = v.partial(a);
        return out;
    }
    if (m->kind() == ManifoldKind::Sphere2) {
        namespace ss = sphere_series;
        auto cen = ss::center_at(*m, x);
        TruncShape sh({2}, {dep});
        Taylor z1 = Taylor::variable(sh, 0), z2 = Taylor::variable(sh, 1);
        auto y = ss::point_series(cen, z1, z2);
        Taylor v = f.eval_taylor({y[0], y[1], y[2]}, {});
        for (const auto& a : idxs) out[a] = v.partial(a);
        return out;
    }
    throw Error("field_jets: unsupported manifold kind");
}

CMat apply_to_function_expansion(const Symbol& a, const Expr& f, const Covector& xi, int N) {
    if (N > kMaxJetDepth) throw JetDepthExceeded("apply_to_function_expansion: N too large");
    JetTable A = jet(a, xi, 0, N, JetFlavor::Recentered);
    auto fj = field_jets(a.manifold(), f, xi.x, N);
    CMat acc = CMat::Zero(a.rows(), a.cols());
    int d = a.manifold()->dim();
    for (const auto& al : enumerate_upto(d, N)) {
        cplx coef = ipow(-mi_abs(al)) / mi_factorial(al);
        acc += coef * fj.at(al) * A.at(mi_zero(d), al);
    }
    return acc;
}

ProductTermLedger term_ledger(const Symbol& a, const Symbol& b, const Covector& xi,
                              const ExpansionConfig& cfg) {
    SharpSymbolImpl sharp(a, b, cfg);
    int N = cfg.max_order_drop;
    int d = a.manifold()->dim();
    JetSteps deep;
    deep.unrestricted_depth = true;
    JetTable A = jet(a, xi, 0, N, JetFlavor::Recentered, deep);
    JetTable B = jet(b, xi, N, 2 * N, JetFlavor::Recentered, deep);
    const bool flat = a.manifold()->is_flat();
    PhaseTensors T;
    if (!flat) T = phase_tensors(a.manifold(), xi.x, N, 2 * N);

    ProductTermLedger ledger;
    ledger.base = xi;
    ledger.total = CMat::Zero(a.rows(), b.cols());
    double rho_delta = a.sclass().rho - a.sclass().delta;
    for (const auto& s : sharp_summands(d, N)) {
        LedgerEntry e;
        e.summand = s;
        cplx phase = 1.0;
        for (size_t j = 0; j < s.betas.size(); ++j) {
            double t = flat ? 0.0 : xi.zeta.dot(T.at(s.alphas[j], s.betas[j]));
            phase *= t;
        }
        e.phase_factor_product = phase;
        MultiIndex tb = mi_zero(d);
        for (const auto& bb : s.betas) tb = mi_add(tb, bb);
        cplx factor = ipow(s.ipower) * s.coef * phase;
        e.value = factor * (A.at(mi_zero(d), s.alpha) * B.at(s.alpha_tilde, tb));
        e.predicted_order = a.sclass().order + b.sclass().order - rho_delta * s.ord;
        ledger.total += e.value;
        ledger.entries.push_back(std::move(e));
    }
    return ledger;
}

} // namespace normsym
