#include "normsym/phase.hpp"

#include "sphere_series.hpp"

#include <cmath>

namespace normsym {

namespace {

// pointwise evaluation of the nested phase <zeta, z_x(exp_{y(t)}(w))> where
// y(t) = exp_x(t) and w is given in the x-transported frame at y(t)
double nested_phase_pointwise(const Manifold& M, const Vec& x, const Vec& zeta, const Vec& t,
                              const Vec& w) {
    if (t.norm() < 1e-300 && w.norm() < 1e-300) return 0.0;
    Vec y = t.norm() < 1e-300 ? x : M.exp(x, t);
    Mat F = t.norm() < 1e-300 ? Mat::Identity(M.dim(), M.dim()) : M.transport_frame(x, t);
    Vec p = w.norm() < 1e-300 ? y : M.exp(y, F * w);
    return zeta.dot(M.log(x, p));
}

// finite-difference phase tensors for manifolds without closed-form series
PhaseTensors phase_tensors_fd(const std::shared_ptr<const Manifold>& m, const Vec& x,
                              int max_alpha, int max_beta) {
    const Manifold& M = *m;
    int d = M.dim();
    PhaseTensors out;
    out.dim = d;
    out.max_alpha = max_alpha;
    out.max_beta = max_beta;

    double h = 5e-3 * M.injectivity_radius();
    auto alphas = enumerate_upto(d, max_alpha);
    auto betas = enumerate_upto(d, max_beta);

    for (int k = 0; k < d; ++k) {
        Vec ek = Vec::Zero(d);
        ek[k] = 1.0;
        std::map<std::vector<int>, double> memo;
        auto eval_off = [&](const std::vector<int>& off, double step) {
            std::vector<int> key(off);
            key.push_back((int)std::lround(step * 1e9));
            auto it = memo.find(key);
            if (it != memo.end()) return it->second;
            Vec t(d), w(d);
            for (int i = 0; i < d; ++i) t[i] = off[i] * step / 2.0;
            for (int i = 0; i < d; ++i) w[i] = off[d + i] * step / 2.0;
            double v = nested_phase_pointwise(M, x, ek, t, w);
            memo[key] = v;
            return v;
        };

        const auto& st = [] {
            static const std::map<int, std::vector<std::pair<int, double>>> table = {
                {0, {{0, 1.0}}},
                {1, {{-1, -0.5}, {1, 0.5}}},
                {2, {{-1, 1.0}, {0, -2.0}, {1, 1.0}}},
                {3, {{-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}}},
                {4, {{-2, 1.0}, {-1, -4.0}, {0, 6.0}, {1, -4.0}, {2, 1.0}}},
                {5, {{-3, -0.5}, {-2, 2.0}, {-1, -2.5}, {1, 2.5}, {2, -2.0}, {3, 0.5}}},
            };
            return &table;
        }();

        auto mixed = [&](const std::vector<int>& orders, double step) {
            double scale = 1.0;
            for (int i = 0; i < 2 * d; ++i)
                for (int j = 0; j < orders[i]; ++j) scale /= (step / 2.0);
            double acc = 0.0;
            std::vector<int> off(2 * d, 0);
            std::function<void(int, double)> rec = [&](int axis, double wgt) {
                if (axis == 2 * d) {
                    acc += wgt * eval_off(off, step);
                    return;
                }
                for (const auto& [o, ww] : st->at(orders[axis])) {
                    off[axis] = o;
                    rec(axis + 1, wgt * ww);
                }
            };
            rec(0, 1.0);
            return acc * scale;
        };

        for (const auto& al : alphas)
            for (const auto& be : betas) {
                std::vector<int> orders(2 * d);
                for (int i = 0; i < d; ++i) orders[i] = al[i];
                for (int i = 0; i < d; ++i) orders[d + i] = be[i];
                double coarse = mixed(orders, 2 * h);
                double fine = mixed(orders, h);
                double rich = (4 * fine - coarse) / 3.0;
                auto key = std::make_pair(al, be);
                auto it = out.tensors.find(key);
                if (it == out.tensors.end()) {
                    Vec v = Vec::Zero(d);
                    v[k] = rich;
                    out.tensors[key] = v;
                } else {
                    it->second[k] = rich;
                }
            }
    }
    return out;
}

} // namespace

PhaseTensors phase_tensors(const std::shared_ptr<const Manifold>& m, const Vec& x, int max_alpha,
                           int max_beta) {
    const Manifold& M = *m;
    int d = M.dim();
    PhaseTensors out;
    out.dim = d;
    out.max_alpha = max_alpha;
    out.max_beta = max_beta;
    auto alphas = enumerate_upto(d, max_alpha);
    auto betas = enumerate_upto(d, max_beta);

    if (M.is_flat()) {
        // phi(y) = <zeta, y - x>: only |alpha|+|beta| == 1 entries survive
        for (const auto& al : alphas)
            for (const auto& be : betas) {
                Vec v = Vec::Zero(d);
                if (mi_abs(al) + mi_abs(be) == 1) {
                    for (int k = 0; k < d; ++k)
                        if (al[k] + be[k] == 1) v[k] = 1.0;
                }
                out.tensors[{al, be}] = v;
            }
        return out;
    }

    if (M.kind() == ManifoldKind::Sphere2) {
        namespace ss = sphere_series;
        auto cen = ss::center_at(M, x);
        TruncShape sh({2, 2}, {max_alpha, max_beta});
        for (int k = 0; k < d; ++k) {
            Vec ek = Vec::Zero(d);
            ek[k] = 1.0;
            Taylor phi = ss::phase_series(cen, sh, 0, 2, ek);
            for (const auto& al : alphas)
                for (const auto& be : betas) {
                    MultiIndex full(al);
                    full.insert(full.end(), be.begin(), be.end());
                    double v = phi.partial(full);
                    auto key = std::make_pair(al, be);
                    auto it = out.tensors.find(key);
                    if (it == out.tensors.end()) {
                        Vec vv = Vec::Zero(d);
                        vv[k] = v;
                        out.tensors[key] = vv;
                    } else {
                        it->second[k] = v;
                    }
                }
        }
        return out;
    }

    return phase_tensors_fd(m, x, max_alpha, max_beta);
}

PhaseJet phase_jet(std::shared_ptr<const Manifold> m, const Covector& xi, int depth) {
    if (depth > kMaxPhaseDepth) throw DepthExceeded("phase_jet: depth exceeds limit");
    PhaseTensors T = phase_tensors(m, xi.x, depth, depth);
    PhaseJet out;
    out.base = xi;
    out.dim = m->dim();
    out.max_order = depth;
    for (const auto& [key, v] : T.tensors) {
        if (mi_abs(key.first) + mi_abs(key.second) > depth + 2) continue;
        out.entries[key] = xi.zeta.dot(v);
    }
    return out;
}

ChartChangeJet chart_change_jet(const std::shared_ptr<const Manifold>& m, const Vec& x) {
    const Manifold& M = *m;
    int d = M.dim();
    ChartChangeJet out;
    out.base = x;
    out.d = d;
    out.first = Mat::Identity(d, d);
    out.second.assign((size_t)d * d * d, 0.0);
    out.third.assign((size_t)d * d * d * d, 0.0);

    // curvature route: the tensor is the first Christoffel derivative in
    // normal coordinates, d/dz^n Gamma^k_{lm}(0) = -(1/3)(R^k_{lnm}+R^k_{mnl}),
    // so the coincidence value is (1/3)(R^k_{mln} + R^k_{lmn})
    auto cd = M.curvature(x);
    std::vector<double> third_curv((size_t)d * d * d * d, 0.0);
    for (int k = 0; k < d; ++k)
        for (int n = 0; n < d; ++n)
            for (int l = 0; l < d; ++l)
                for (int mm = 0; mm < d; ++mm)
                    third_curv[((k * d + n) * d + l) * d + mm] =
                        (cd.r(k, mm, l, n) + cd.r(k, l, mm, n)) / 3.0;

    // nested-log finite-difference route via the phase tensors of each e_k:
    // T^k_{e_n, e_l + e_m} equals d/dz_x^n [d^2 z_x^k/dz_y^l dz_y^m]
    PhaseTensors T = M.is_flat()
                         ? phase_tensors(m, x, 1, 2)
                         : phase_tensors_fd(m, x, 1, 2);
    std::vector<double> third_fd((size_t)d * d * d * d, 0.0);
    for (int n = 0; n < d; ++n)
        for (int l = 0; l < d; ++l)
            for (int mm = 0; mm < d; ++mm) {
                MultiIndex alpha = mi_unit(d, n);
                MultiIndex beta = mi_add(mi_unit(d, l), mi_unit(d, mm));
                const Vec& v = T.at(alpha, beta);
                for (int k = 0; k < d; ++k)
                    third_fd[((k * d + n) * d + l) * d + mm] = v[k];
            }

    double worst = 0.0;
    for (size_t i = 0; i < third_fd.size(); ++i)
        worst = std::max(worst, std::abs(third_fd[i] - third_curv[i]));
    if (worst > 1e-5)
        throw OracleMismatch("chart_change_jet: curvature formula and nested-log finite "
                             "differences disagree by " +
                             std::to_string(worst));
    out.third = third_curv;
    return out;
}

} // namespace normsym
