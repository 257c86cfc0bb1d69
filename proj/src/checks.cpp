#include "normsym/checks.hpp"

#include "normsym/calculus.hpp"
#include "normsym/elliptic.hpp"
#include "normsym/phase.hpp"
#include "normsym/quantize.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace normsym {

namespace {

double now_seconds() {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
}

MetricFn stereographic_sphere_metric() {
    return [](const Vec& x) {
        double c = 4.0 / std::pow(1.0 + x.squaredNorm(), 2);
        return Mat::Identity(2, 2) * c;
    };
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

} // namespace

// --------------------------------------------------------------- criterion 1

CheckResult check_gauss_lemma_sphere() {
    CheckResult r;
    r.name = "gauss-lemma-sphere";
    r.threshold = 1e-8;
    auto m = make_sphere2(1.0);
    Rng rng(101);
    double worst = 0;
    r.csv_header = "pair,dist,err";
    for (int i = 0; i < 100; ++i) {
        Vec x = m->random_point(rng);
        double rr = rng.uniform(0.05, 0.8 * m->injectivity_radius());
        double th = rng.uniform(0.0, 2 * pi);
        Vec v(2);
        v << rr * std::cos(th), rr * std::sin(th);
        Vec y = m->exp(x, v);
        Mat F = m->transport_frame(x, v);
        double err = (v + F.transpose() * m->log(y, x)).norm();
        worst = std::max(worst, err);
        r.csv_rows.push_back({(double)i, rr, err});
    }
    r.value = worst;
    r.pass = worst <= r.threshold;
    r.detail = "componentwise error " + fmt(worst) + " over 100 pairs (closed form)";
    return r;
}

CheckResult check_gauss_lemma_chart() {
    CheckResult r;
    r.name = "gauss-lemma-chart-sphere";
    r.threshold = 1e-6;
    Vec lo(2), hi(2);
    lo << -1.2, -1.2;
    hi << 1.2, 1.2;
    auto chart = make_generic_chart(2, stereographic_sphere_metric(), lo, hi, pi);
    Rng rng(103);
    double t0 = now_seconds();
    double worst = 0;
    r.csv_header = "pair,dist,err";
    for (int i = 0; i < 100; ++i) {
        Vec x = chart->random_point(rng);
        double rr = rng.uniform(0.05, 0.5);
        double th = rng.uniform(0.0, 2 * pi);
        Vec v(2);
        v << rr * std::cos(th), rr * std::sin(th);
        Vec y = chart->exp(x, v);
        Mat F = chart->transport_frame(x, v);
        double err = (v + F.transpose() * chart->log(y, x)).norm();
        worst = std::max(worst, err);
        r.csv_rows.push_back({(double)i, rr, err});
    }
    double dt = now_seconds() - t0;
    r.value = worst;
    r.metrics["runtime_seconds"] = dt;
    r.pass = worst <= r.threshold && dt < 10.0;
    r.detail = "ODE-path error " + fmt(worst) + " over 100 pairs in " + fmt(dt) + " s";
    return r;
}

// --------------------------------------------------------------- criterion 2

CheckResult check_rho_expansion() {
    CheckResult r;
    r.name = "rho-expansion-sphere";
    r.threshold = 2.7; // fitted slope lower bound
    auto m = make_sphere2(1.0);
    Rng rng(107);
    Vec x = m->random_point(rng);
    auto cd = m->curvature(x);
    std::vector<double> rs, errs;
    double oracle_worst = 0;
    r.csv_header = "z,remainder,rho,oracle";
    for (int i = 0; i < 14; ++i) {
        double rr = 1e-3 * std::pow(100.0, i / 13.0);
        Vec v(2);
        v << rr * std::cos(0.9), rr * std::sin(0.9);
        Vec y = m->exp(x, v);
        double rho = m->density_rho(x, y);
        double oracle = std::sin(rr) / rr; // closed-form sphere Jacobian
        oracle_worst = std::max(oracle_worst, std::abs(rho - oracle));
        double quad = 0;
        for (int a2 = 0; a2 < 2; ++a2)
            for (int b2 = 0; b2 < 2; ++b2) quad += cd.ricci(a2, b2) * v[a2] * v[b2];
        double rem = std::abs(rho - 1.0 + quad / 6.0);
        rs.push_back(rr);
        errs.push_back(rem);
        r.csv_rows.push_back({rr, rem, rho, oracle});
    }
    double slope = fit_loglog_slope(rs, errs);
    r.value = slope;
    r.metrics["oracle_max_err"] = oracle_worst;
    r.pass = slope >= 2.7 && oracle_worst <= 1e-10;
    r.detail = "remainder slope " + fmt(slope) + ", sin(r)/r oracle err " + fmt(oracle_worst);
    return r;
}

// --------------------------------------------------------------- criterion 3

CheckResult check_phase_identity() {
    CheckResult r;
    r.name = "phase-identity";
    r.threshold = 1e-6;
    std::vector<std::shared_ptr<const Manifold>> ms = {make_circle(1.0), make_flat_torus_2d(),
                                                       make_sphere2(1.0)};
    double worst = 0;
    r.csv_header = "manifold,zeta_norm,normalized_err";
    int mi = 0;
    for (const auto& m : ms) {
        Rng rng(109 + mi);
        int d = m->dim();
        for (int i = 0; i < 50; ++i) {
            Covector xi{m->random_point(rng), Vec(d)};
            double rr = rng.uniform(0.5, 30.0);
            if (d == 1)
                xi.zeta << (rng.uniform(0.0, 1.0) < 0.5 ? -rr : rr);
            else {
                double th = rng.uniform(0.0, 2 * pi);
                xi.zeta << rr * std::cos(th), rr * std::sin(th);
            }
            PhaseJet pj = phase_jet(m, xi, 3);
            for (const auto& [key, v] : pj.entries) {
                if (mi_abs(key.first) != 0) continue;
                int b = mi_abs(key.second);
                if (b < 2 || b > 3) continue;
                double norm_err = std::abs(v) / (1.0 + xi.zeta.norm());
                worst = std::max(worst, norm_err);
            }
            r.csv_rows.push_back({(double)mi, xi.zeta.norm(), worst});
        }
        ++mi;
    }
    r.value = worst;
    r.pass = worst <= r.threshold;
    r.detail = "max |phi_{0 beta}| / (1+|xi|) = " + fmt(worst) + " over builtins";
    return r;
}

// --------------------------------------------------------------- criterion 4

std::vector<CheckResult> check_circle_eigenvalues() {
    auto m = make_circle(1.0);
    Mesh mesh = make_mesh(m, 256);
    Cutoff psi;
    std::vector<CheckResult> out;

    auto eigen_check = [&](const Symbol& a, const std::string& name,
                           const std::function<double(int)>& lambda) {
        CheckResult r;
        r.name = name;
        r.threshold = 1e-8;
        OpPtr A = quantize(a, mesh, psi);
        double worst = 0;
        r.csv_header = "k,rel_err";
        for (int k = -32; k <= 32; ++k) {
            int q = -1;
            for (int i = 0; i < mesh.n_modes; ++i)
                if (std::lround(mesh.mode_covectors[i][0]) == k) q = i;
            CVec ek(mesh.nodes.size());
            for (int j = 0; j < (int)mesh.nodes.size(); ++j)
                ek[j] = mesh.basis_at(q, mesh.nodes[j]);
            FieldSpec fs;
            fs.node_values = ek;
            CVec outv = A->apply(fs);
            double lam = lambda(k);
            double scale = std::max(1.0, std::abs(lam));
            double rel = (outv - cplx(lam, 0) * ek).norm() / (scale * ek.norm());
            worst = std::max(worst, rel);
            r.csv_rows.push_back({(double)k, rel});
        }
        r.value = worst;
        r.pass = worst <= r.threshold;
        r.detail = "max relative eigenvalue error " + fmt(worst) + " for |k| <= 32";
        return r;
    };

    std::map<MultiIndex, Expr> cl, cz;
    cl[MultiIndex{2}] = Expr::constant(1.0);
    cz[MultiIndex{1}] = Expr::constant(1.0);
    out.push_back(eigen_check(polynomial_symbol(m, cl), "circle-laplacian-eigenvalues",
                              [](int k) { return double(k) * k; }));
    out.push_back(eigen_check(polynomial_symbol(m, cz), "circle-derivative-eigenvalues",
                              [](int k) { return double(k); }));
    return out;
}

// --------------------------------------------------------------- criterion 5

std::vector<CheckResult> check_inverse_pair() {
    std::vector<CheckResult> out;
    Cutoff psi;

    struct Case {
        std::string mname;
        std::shared_ptr<const Manifold> m;
        Mesh mesh;
    };
    std::vector<Case> cases;
    {
        auto c = make_circle(1.0);
        cases.push_back({"circle", c, make_mesh(c, 256)});
        auto t = make_flat_torus_2d();
        cases.push_back({"torus", t, make_mesh(t, 64, 64)});
    }

    for (auto& cs : cases) {
        int d = cs.m->dim();
        struct Sym {
            std::string name;
            Symbol s;
            double mu;
        };
        std::vector<Sym> syms;
        {
            std::map<MultiIndex, Expr> cz;
            cz[mi_unit(d, 0)] = Expr::constant(1.0);
            syms.push_back({"zeta1", polynomial_symbol(cs.m, cz), 1.0});
            std::map<MultiIndex, Expr> cl;
            for (int i = 0; i < d; ++i) {
                MultiIndex a = mi_zero(d);
                a[i] = 2;
                cl[a] = Expr::constant(1.0);
            }
            syms.push_back({"norm-sq", polynomial_symbol(cs.m, cl), 2.0});
            syms.push_back(
                {"inv-1plus-norm-sq", radial_symbol(cs.m, "1/(1+zeta1)", SymbolClass(-2.0)), -2.0});
        }
        double nyq = cs.mesh.nyquist;
        for (auto& sy : syms) {
            CheckResult r;
            r.name = "inverse-pair-" + cs.mname + "-" + sy.name;
            r.threshold = 1e-4;
            OpPtr A = quantize(sy.s, cs.mesh, psi);
            double worst = 0;
            r.csv_header = "radius,normalized_err";
            Rng rng(113);
            auto dirs = fiber_directions(d, 3);
            for (int ir = 0; ir < 8; ++ir) {
                double rr = 2.0 * std::pow(nyq / 4.0 / 2.0, ir / 7.0);
                double sup = 0;
                for (const auto& dir : dirs) {
                    Covector xi{cs.m->random_point(rng), rr * dir};
                    cplx got = extract_symbol(*A, xi, psi)(0, 0);
                    cplx want = sy.s.eval(xi)(0, 0);
                    sup = std::max(sup,
                                   std::abs(got - want) / std::pow(1.0 + rr, sy.mu));
                }
                worst = std::max(worst, sup);
                r.csv_rows.push_back({rr, sup});
            }
            r.value = worst;
            r.pass = worst <= r.threshold;
            r.detail = "sup |extract - a| / (1+|xi|)^mu = " + fmt(worst) + " on [2, " +
                       fmt(nyq / 4) + "]";
            out.push_back(r);
        }
    }
    return out;
}

// --------------------------------------------------------------- criterion 6

namespace {

using PolyTable = std::map<MultiIndex, Expr>;

Expr diff_expr(const Expr& e, const MultiIndex& gamma) {
    Expr out = e;
    for (size_t i = 0; i < gamma.size(); ++i)
        for (int j = 0; j < gamma[i]; ++j) out = out.diff_x((int)i);
    return out;
}

// test oracle: the classical composition expansion truncated at |gamma| <= N,
// differentiated symbolically
cplx eval_classical_truncated(const PolyTable& a, const PolyTable& b, int d, int N, const Vec& x,
                              const Vec& zeta) {
    cplx total = 0.0;
    for (const auto& gamma : enumerate_upto(d, N)) {
        cplx da = 0.0;
        for (const auto& [alpha, ca] : a) {
            if (!mi_leq(gamma, alpha)) continue;
            MultiIndex rest = mi_sub(alpha, gamma);
            double fall = 1.0;
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < gamma[i]; ++j) fall *= (alpha[i] - j);
            double mono = 1.0;
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < rest[i]; ++j) mono *= zeta[i];
            da += fall * mono * ca.eval_real(x, Vec());
        }
        cplx db = 0.0;
        for (const auto& [beta, cb] : b) {
            double mono = 1.0;
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < beta[i]; ++j) mono *= zeta[i];
            db += mono * diff_expr(cb, gamma).eval_real(x, Vec());
        }
        total += ipow(-mi_abs(gamma)) / mi_factorial(gamma) * da * db;
    }
    return total;
}

} // namespace

CheckResult check_flat_sharp_classical(uint64_t seed) {
    CheckResult r;
    r.name = "flat-sharp-vs-classical";
    r.threshold = 1e-10;
    auto m = make_flat_torus_2d();
    Rng rng(seed);
    auto random_table = [&](int maxdeg) {
        PolyTable t;
        for (const auto& al : enumerate_upto(2, maxdeg)) {
            if (rng.uniform(0.0, 1.0) < 0.35) continue;
            Expr e = Expr::add(
                Expr::constant(rng.uniform(-2.0, 2.0)),
                Expr::mul(Expr::constant(rng.uniform(-1.0, 1.0)),
                          Expr::fun(rng.uniform(0.0, 1.0) < 0.5 ? "sin" : "cos",
                                    Expr::var_x(rng.uniform_int(0, 1)))));
            t[al] = e;
        }
        if (t.empty()) t[mi_zero(2)] = Expr::constant(1.0);
        return t;
    };
    double worst = 0;
    r.csv_header = "pair,err";
    for (int trial = 0; trial < 20; ++trial) {
        PolyTable ta = random_table(3), tb = random_table(3);
        Symbol a = polynomial_symbol(m, ta), b = polynomial_symbol(m, tb);
        Symbol ab = sharp_product(a, b, ExpansionConfig(2));
        double pair_worst = 0;
        for (int i = 0; i < 4; ++i) {
            Vec x = m->random_point(rng);
            Vec zeta(2);
            zeta << rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0);
            cplx got = ab.eval(x, zeta)(0, 0);
            cplx want = eval_classical_truncated(ta, tb, 2, 2, x, zeta);
            pair_worst =
                std::max(pair_worst, std::abs(got - want) / (1.0 + std::abs(want)));
        }
        worst = std::max(worst, pair_worst);
        r.csv_rows.push_back({(double)trial, pair_worst});
    }
    r.value = worst;
    r.pass = worst <= r.threshold;
    r.detail = "max relative deviation " + fmt(worst) + " over 20 random degree-3 pairs";
    return r;
}

// --------------------------------------------------------------- criterion 7

std::vector<CheckResult> check_sphere_sharp_curvature() {
    std::vector<CheckResult> out;
    auto m = make_sphere2(1.0);
    Mesh mesh = default_mesh(m);
    Cutoff psi;
    Symbol a = symbol_from_expression(m, "zeta1", SymbolClass(1.0));
    Symbol b = symbol_from_expression(m, "zeta2^2", SymbolClass(2.0));
    OpPtr A = quantize(a, mesh, psi);
    OpPtr B = quantize(b, mesh, psi);
    Symbol ab = sharp_product(a, b, ExpansionConfig(2));

    Vec x(3);
    x << std::cos(0.3), 0.0, std::sin(0.3); // near the equator
    Vec dir(2);
    dir << std::cos(0.6), std::sin(0.6);

    std::vector<double> radii = {4.0, 5.66, 8.0, 11.3, 16.0};
    std::vector<double> rs, dfull, dnoR;
    CheckResult r;
    r.name = "sphere-sharp-slope";
    r.csv_header = "radius,err_with_R,err_without_R";
    for (double rr : radii) {
        Covector xi{x, rr * dir};
        FieldSpec w = plane_wave_field(mesh, xi, psi);
        FieldSpec mid;
        mid.node_values = B->apply(w);
        cplx got = A->apply_at(mid, x);
        cplx with_r = ab.eval(xi)(0, 0);
        // drop the phase-factor (curvature) summands
        auto ledger = term_ledger(a, b, xi, ExpansionConfig(2));
        cplx without_r = with_r;
        for (const auto& e : ledger.entries)
            if (!e.summand.betas.empty()) without_r -= e.value(0, 0);
        rs.push_back(1 + rr);
        dfull.push_back(std::abs(got - with_r));
        dnoR.push_back(std::abs(got - without_r));
        r.csv_rows.push_back({rr, dfull.back(), dnoR.back()});
    }
    double slope = fit_loglog_slope(rs, dfull);
    r.value = slope;
    r.threshold = 1.0 + 2.0 - 3.0 + 0.5; // mu + mu~ - 3 + 0.5
    r.pass = slope <= r.threshold;
    r.detail = "fitted slope " + fmt(slope) + " of |sharp - extracted composition|";
    out.push_back(r);

    CheckResult r2;
    r2.name = "sphere-sharp-curvature-term";
    r2.threshold = 2.0;
    r2.value = dnoR.back() / dfull.back();
    r2.pass = r2.value >= 2.0;
    r2.detail = "omitting the curvature term worsens the defect by x" + fmt(r2.value) +
                " at |xi| = 16";
    out.push_back(r2);
    return out;
}

// --------------------------------------------------------------- criterion 8

std::vector<CheckResult> check_adjoint_pairing() {
    std::vector<CheckResult> out;
    Cutoff psi;

    // pairing on circle and torus with polynomial symbols
    struct Case {
        std::string name;
        std::shared_ptr<const Manifold> m;
        Mesh mesh;
    };
    std::vector<Case> cases;
    {
        auto c = make_circle(1.0);
        cases.push_back({"circle", c, make_mesh(c, 256)});
        auto t = make_flat_torus_2d();
        cases.push_back({"torus", t, make_mesh(t, 64, 64)});
    }
    for (auto& cs : cases) {
        CheckResult r;
        r.name = "adjoint-pairing-" + cs.name;
        r.threshold = 1e-8;
        int d = cs.m->dim();
        std::map<MultiIndex, Expr> ca;
        ca[mi_unit(d, 0)] = Expr::fun("sin", Expr::var_x(0));
        if (d == 2) ca[mi_unit(d, 1)] = Expr::constant(1.0);
        Symbol a = polynomial_symbol(cs.m, ca);
        OpPtr A = quantize(a, cs.mesh, psi);
        OpPtr Astar = adjoint_quantize(a, cs.mesh, psi);
        Rng rng(127);
        int n = (int)cs.mesh.nodes.size();
        CVec f = CVec::Zero(n), g = CVec::Zero(n);
        for (int t2 = 0; t2 < 8; ++t2) {
            int q = rng.uniform_int(0, cs.mesh.n_modes - 1);
            if (cs.mesh.mode_covectors[q].norm() > cs.mesh.nyquist / 3) continue;
            CVec e(n);
            for (int j = 0; j < n; ++j) e[j] = cs.mesh.basis_at(q, cs.mesh.nodes[j]);
            f += cplx(rng.uniform(-1, 1), rng.uniform(-1, 1)) * e;
            g += cplx(rng.uniform(-1, 1), rng.uniform(-1, 1)) * e;
        }
        FieldSpec ff, gg;
        ff.node_values = f;
        gg.node_values = g;
        cplx lhs = cs.mesh.dot(A->apply(ff), g);
        cplx rhs = cs.mesh.dot(f, Astar->apply(gg));
        r.value = std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
        r.pass = r.value <= r.threshold;
        r.detail = "pairing defect " + fmt(r.value) + " on band-limited fields";
        out.push_back(r);
    }

    // adjoint_symbol(x1 zeta1) = x1 zeta1 - i exactly at N = 2
    {
        CheckResult r;
        r.name = "adjoint-symbol-exact";
        r.threshold = 1e-12;
        auto t = make_flat_torus_2d();
        Symbol a = symbol_from_expression(t, "x1*zeta1", SymbolClass(1.0));
        Symbol adj = adjoint_symbol(a, ExpansionConfig(2));
        Rng rng(131);
        double worst = 0;
        for (int i = 0; i < 10; ++i) {
            Vec x = t->random_point(rng);
            Vec zeta(2);
            zeta << rng.uniform(-6.0, 6.0), rng.uniform(-6.0, 6.0);
            cplx want = x[0] * zeta[0] - cplx(0, 1);
            worst = std::max(worst, std::abs(adj.eval(x, zeta)(0, 0) - want));
        }
        r.value = worst;
        r.pass = worst <= r.threshold;
        r.detail = "max |adjoint_symbol(x1 zeta1) - (x1 zeta1 - i)| = " + fmt(worst);
        out.push_back(r);
    }
    return out;
}

// --------------------------------------------------------------- criterion 9

std::vector<CheckResult> check_parametrix() {
    std::vector<CheckResult> out;

    {
        CheckResult r;
        r.name = "parametrix-flat-exact";
        r.threshold = 0.0;
        auto t = make_flat_torus_2d();
        Symbol a = radial_symbol(t, "1+zeta1", SymbolClass(2.0));
        Symbol b0 = radial_symbol(t, "1/(1+zeta1)", SymbolClass(-2.0));
        auto res = neumann_parametrix(a, b0, ExpansionConfig(2));
        r.value = res.residual_zero ? 0.0 : 1.0;
        r.metrics["terms_used"] = res.terms_used;
        r.pass = res.converged && res.residual_zero && res.terms_used == 1;
        r.detail = "terms_used = " + std::to_string(res.terms_used) +
                   (res.residual_zero ? ", residual exactly 0" : ", residual nonzero");
        out.push_back(r);
    }

    {
        CheckResult r;
        r.name = "parametrix-sphere-order";
        r.threshold = -4.0;
        auto s = make_sphere2(1.0);
        Symbol a = radial_symbol(s, "1+zeta1", SymbolClass(2.0));
        Symbol b0 = radial_symbol(s, "1/(1+zeta1)", SymbolClass(-2.0));
        ExpansionConfig cfg(3, ExpansionMode::FiniteDifference);
        auto res = neumann_parametrix(a, b0, cfg, 4, -4.0, 8.0, 96.0);
        r.value = res.residual_order_right;
        r.metrics["terms_used"] = res.terms_used;
        r.metrics["left_order"] = res.residual_order_left;
        r.pass = res.converged && res.terms_used <= 4 && res.residual_order_right <= -4.0;
        r.detail = "residual order " + fmt(res.residual_order_right) + " after " +
                   std::to_string(res.terms_used) + " terms (left " +
                   fmt(res.residual_order_left) + ")";
        out.push_back(r);
    }

    {
        CheckResult r;
        r.name = "parametrix-circle-operator";
        r.threshold = -4.0;
        auto c = make_circle(1.0);
        Mesh mesh = make_mesh(c, 256);
        Cutoff psi;
        std::map<MultiIndex, Expr> cl;
        cl[MultiIndex{2}] = Expr::constant(1.0);
        Symbol l = polynomial_symbol(c, cl);
        Symbol a = symbol_add_const(l, 1.0); // 1 + |xi|^2, Op = 1 - Laplacian
        Symbol b = radial_symbol(c, "1/(1+zeta1)", SymbolClass(-2.0));
        OpPtr A = quantize(a, mesh, psi);
        OpPtr Bq = quantize(b, mesh, psi);
        OpPtr AB = compose(A, Bq);
        std::vector<double> ks, defects;
        r.csv_header = "k,defect";
        for (int k : {8, 16, 32, 64}) {
            int q = -1;
            for (int i = 0; i < mesh.n_modes; ++i)
                if (std::lround(mesh.mode_covectors[i][0]) == k) q = i;
            CVec ek(mesh.nodes.size());
            for (int j = 0; j < (int)mesh.nodes.size(); ++j)
                ek[j] = mesh.basis_at(q, mesh.nodes[j]);
            FieldSpec fs;
            fs.node_values = ek;
            CVec outv = AB->apply(fs);
            double defect = (outv - ek).norm() / ek.norm();
            ks.push_back(k);
            defects.push_back(defect);
            r.csv_rows.push_back({(double)k, defect});
        }
        double slope = fit_loglog_slope(ks, defects);
        r.value = slope;
        r.pass = slope <= -4.0;
        r.detail = "(1-Lap)Op(b) - I defect slope " + fmt(slope) + " over k in [8, 64]";
        out.push_back(r);
    }
    return out;
}

// -------------------------------------------------------------- criterion 10

std::vector<CheckResult> check_ellipticity_suite() {
    std::vector<CheckResult> out;
    auto m = make_flat_torus_2d();
    SampleSet K = default_samples(*m, 3, 137);

    {
        CheckResult r;
        r.name = "elliptic-l-order-2";
        Symbol l = norm_sq_symbol(m);
        auto rep = ellipticity_test_scalar(l, 2.0, K);
        r.pass = rep.verdict == EllipticVerdict::EllipticOfOrder;
        r.value = rep.c_bound;
        r.threshold = 2.0;
        r.detail = "verdict " + std::string(r.pass ? "elliptic" : "other") +
                   ", C_K = " + fmt(rep.c_bound);
        out.push_back(r);
    }
    {
        CheckResult r;
        r.name = "elliptic-inverse-order-minus-2";
        Symbol li = radial_symbol(m, "1/(1+zeta1)", SymbolClass(-2.0));
        auto rep = ellipticity_test_scalar(li, -2.0, K);
        r.pass = rep.verdict == EllipticVerdict::EllipticOfOrder;
        r.value = rep.c_bound;
        r.threshold = 3.0;
        r.detail = "verdict " + std::string(r.pass ? "elliptic of order -2" : "other");
        out.push_back(r);
    }
    {
        CheckResult r;
        r.name = "elliptic-zeta1-rejected";
        Symbol z1 = symbol_from_expression(m, "zeta1", SymbolClass(1.0));
        auto rep = ellipticity_test_scalar(z1, 1.0, K, 10.0, 1e3, 10, 16);
        r.pass = rep.verdict == EllipticVerdict::NotElliptic && rep.failure_ray.has_value();
        r.value = rep.failure_ray ? std::abs((*rep.failure_ray)[0]) : 1.0;
        r.threshold = 0.2;
        r.detail = r.pass ? "rejected with recorded vanishing ray" : "not rejected";
        out.push_back(r);
    }
    {
        CheckResult r;
        r.name = "elliptic-variable-order-witness";
        SymbolClass cls(0.75, 1.0, 0.25);
        Symbol aphi = symbol_from_expression(m, "(1+zeta1^2+zeta2^2)^(0.5+0.25*sin(x1))", cls);
        Symbol bphi = symbol_from_expression(m, "(1+zeta1^2+zeta2^2)^(-0.5-0.25*sin(x1))", cls);
        auto rep = ellipticity_test_witness(aphi, bphi, ExpansionConfig(2), K, 10.0, 300.0);
        r.pass = rep.verdict == EllipticVerdict::EllipticGeneral;
        r.value = rep.measured_epsilon;
        r.threshold = 0.05;
        r.detail = "witness accepted with measured epsilon " + fmt(rep.measured_epsilon);
        out.push_back(r);
    }
    {
        CheckResult r;
        r.name = "elliptic-dn-triangular";
        Symbol l = norm_sq_symbol(m);
        Symbol linv = excised_reciprocal(l, 2.0);
        Symbol z1 = symbol_from_expression(m, "zeta1", SymbolClass(1.0));
        Symbol zero = constant_symbol(m, 0.0);
        Symbol cross =
            symbol_scale(symbol_mul_pointwise(z1, symbol_mul_pointwise(linv, linv)), -1.0);
        auto res = dn_system_test({{l, z1}, {zero, l}}, {{2.0, 1.0}, {3.0, 2.0}},
                                  {{linv, cross}, {zero, linv}}, K);
        r.pass = res.report.verdict == EllipticVerdict::EllipticGeneral;
        r.value = res.report.residual_orders.empty() ? 0.0 : res.report.residual_orders[0];
        r.threshold = -1.0;
        r.detail = r.pass ? "triangular system accepted" : "triangular system rejected";
        out.push_back(r);
    }
    return out;
}

std::vector<CheckResult> run_all_acceptance(uint64_t seed) {
    std::vector<CheckResult> all;
    all.push_back(check_gauss_lemma_sphere());
    all.push_back(check_gauss_lemma_chart());
    all.push_back(check_rho_expansion());
    all.push_back(check_phase_identity());
    for (auto& r : check_circle_eigenvalues()) all.push_back(std::move(r));
    for (auto& r : check_inverse_pair()) all.push_back(std::move(r));
    all.push_back(check_flat_sharp_classical(seed));
    for (auto& r : check_sphere_sharp_curvature()) all.push_back(std::move(r));
    for (auto& r : check_adjoint_pairing()) all.push_back(std::move(r));
    for (auto& r : check_parametrix()) all.push_back(std::move(r));
    for (auto& r : check_ellipticity_suite()) all.push_back(std::move(r));
    return all;
}

} // namespace normsym
