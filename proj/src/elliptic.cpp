#include "normsym/elliptic.hpp"

#include <json.hpp>

#include <cmath>

namespace normsym {

namespace {

const char* verdict_name(EllipticVerdict v) {
    switch (v) {
        case EllipticVerdict::EllipticOfOrder: return "elliptic_of_order";
        case EllipticVerdict::EllipticGeneral: return "elliptic_general";
        case EllipticVerdict::NotElliptic: return "not_elliptic";
        default: return "inconclusive";
    }
}

// measured order of a scalar symbol difference with a zero floor
struct ResidualOrder {
    double slope = 1e300;
    bool zero = false;
    double sup_abs = 0.0;
};

ResidualOrder residual_order(const Symbol& s, const SampleSet& K, double lo, double hi,
                             int n_radii, int n_dirs) {
    ResidualOrder out;
    OrderFit fit = measured_order(s, K, lo, hi, n_radii, n_dirs, 0.0);
    for (double v : fit.sups) out.sup_abs = std::max(out.sup_abs, v);
    if (fit.identically_zero || out.sup_abs < 1e-12) {
        out.zero = true;
        out.slope = -1e300;
        return out;
    }
    out.slope = fit.slope;
    return out;
}

} // namespace

std::string EllipticityReport::to_json() const {
    nlohmann::json j;
    j["verdict"] = verdict_name(verdict);
    j["order"] = order;
    j["constants"] = {{"C_K", c_bound}, {"epsilon", measured_epsilon}};
    j["residual_orders"] = residual_orders;
    if (failure_ray) {
        std::vector<double> ray(failure_ray->data(), failure_ray->data() + failure_ray->size());
        j["failure_ray"] = ray;
    }
    nlohmann::json samp = nlohmann::json::array();
    for (const auto& [r, v] : samples) samp.push_back({{"radius", r}, {"min_ratio", v}});
    j["samples"] = samp;
    if (!note.empty()) j["note"] = note;
    return j.dump(2);
}

EllipticityReport ellipticity_test_scalar(const Symbol& a, double m, const SampleSet& K,
                                          double shell_lo, double shell_hi, int n_radii,
                                          int n_dirs) {
    EllipticityReport rep;
    rep.order = m;
    auto dirs = fiber_directions(a.manifold()->dim(), n_dirs);
    double min_ratio_global = 1e300;
    Vec worst_dir;
    double worst_r = 0;

    for (int ir = 0; ir < n_radii; ++ir) {
        double r = shell_lo * std::pow(shell_hi / shell_lo, n_radii == 1 ? 0.0 : (double)ir / (n_radii - 1));
        double min_ratio = 1e300;
        for (const auto& x : K.points)
            for (const auto& dir : dirs) {
                double va = std::abs(a.eval(x, r * dir)(0, 0));
                double ratio = va / std::pow(r, m);
                if (ratio < min_ratio) {
                    min_ratio = ratio;
                    if (ratio < min_ratio_global) {
                        min_ratio_global = ratio;
                        worst_dir = dir;
                        worst_r = r;
                    }
                }
            }
        rep.samples.push_back({r, min_ratio});
    }

    // refine the worst direction: a vanishing ray sits between sampled angles
    if (a.manifold()->dim() == 2 && !K.points.empty()) {
        double th0 = std::atan2(worst_dir[1], worst_dir[0]);
        double lo = th0 - pi / n_dirs, hi = th0 + pi / n_dirs;
        const Vec& x = K.points[0];
        auto ratio_at = [&](double th) {
            Vec dir(2);
            dir << std::cos(th), std::sin(th);
            return std::abs(a.eval(x, worst_r * dir)(0, 0)) / std::pow(worst_r, m);
        };
        for (int it = 0; it < 80; ++it) {
            double t1 = lo + (hi - lo) / 3, t2 = hi - (hi - lo) / 3;
            if (ratio_at(t1) < ratio_at(t2))
                hi = t2;
            else
                lo = t1;
        }
        double refined = ratio_at(0.5 * (lo + hi));
        if (refined < min_ratio_global) {
            min_ratio_global = refined;
            worst_dir << std::cos(0.5 * (lo + hi)), std::sin(0.5 * (lo + hi));
        }
    }

    if (min_ratio_global < 1e-12) {
        rep.verdict = EllipticVerdict::NotElliptic;
        rep.failure_ray = worst_dir;
        rep.note = "bound violated along the recorded ray at |zeta| = " + std::to_string(worst_r);
        return rep;
    }

    // drift of the per-radius minimum: a genuine order-m elliptic symbol keeps
    // it bounded away from zero along the shell
    std::vector<double> rs, vals;
    for (auto& [r, v] : rep.samples) {
        rs.push_back(r);
        vals.push_back(v);
    }
    double drift = fit_loglog_slope(rs, vals);
    rep.c_bound = 1.0 / min_ratio_global;
    if (drift < -0.1) {
        rep.verdict = EllipticVerdict::Inconclusive;
        rep.note = "sampled lower bound decays along the shell (slope " + std::to_string(drift) +
                   "); no order-" + std::to_string(m) + " certificate";
        return rep;
    }
    rep.verdict = EllipticVerdict::EllipticOfOrder;
    return rep;
}

EllipticityReport ellipticity_test_witness(const Symbol& a, const Symbol& b0,
                                           const ExpansionConfig& cfg, const SampleSet& K,
                                           double shell_lo, double shell_hi) {
    EllipticityReport rep;
    Symbol right = symbol_add_const(symbol_scale(sharp_product(a, b0, cfg), -1.0), 1.0);
    Symbol left = symbol_add_const(symbol_scale(sharp_product(b0, a, cfg), -1.0), 1.0);
    auto ro = residual_order(right, K, shell_lo, shell_hi, 10, 4);
    auto lo = residual_order(left, K, shell_lo, shell_hi, 10, 4);
    rep.residual_orders = {ro.zero ? -999.0 : ro.slope, lo.zero ? -999.0 : lo.slope};
    double eps = -std::max(ro.zero ? -999.0 : ro.slope, lo.zero ? -999.0 : lo.slope);
    rep.measured_epsilon = eps;
    if (eps > 0.05) {
        rep.verdict = EllipticVerdict::EllipticGeneral;
    } else {
        rep.verdict = EllipticVerdict::Inconclusive;
        rep.note = "witness residuals do not decay on the sampled shell";
    }
    return rep;
}

ParametrixResult neumann_parametrix(const Symbol& a, const Symbol& b0, const ExpansionConfig& cfg,
                                    int max_terms, double tol_order, double shell_lo,
                                    double shell_hi) {
    ParametrixResult out;
    auto m = a.manifold();
    SampleSet K = default_samples(*m, 2, 314159);
    int n_dirs = (a.impl().is_radial() && b0.impl().is_radial()) ? 1 : 4;

    Symbol r = symbol_add_const(symbol_scale(sharp_product(a, b0, cfg), -1.0), 1.0);
    auto pre = residual_order(r, K, shell_lo, shell_hi, 10, n_dirs);
    if (!pre.zero && pre.slope > -0.05)
        throw NotEllipticError("neumann_parametrix: a # b0 - 1 does not decay on the shell "
                               "(measured order " +
                               std::to_string(pre.slope) + ")");

    Symbol s = constant_symbol(m, 1.0);
    Symbol power = r; // r^{#j}
    Symbol b = b0;
    out.terms_used = 1;

    for (int term = 1; term <= max_terms; ++term) {
        b = sharp_product(b0, s, cfg);
        Symbol resid = symbol_add_const(symbol_scale(sharp_product(a, b, cfg), -1.0), 1.0);
        auto ro = residual_order(resid, K, shell_lo, shell_hi, 10, n_dirs);
        out.terms_used = term;
        out.history.push_back(ro.zero ? -999.0 : ro.slope);
        if (ro.zero || ro.slope <= tol_order) {
            out.converged = true;
            out.residual_zero = ro.zero;
            out.residual_order_right = ro.zero ? -999.0 : ro.slope;
            break;
        }
        if (term == max_terms) {
            out.converged = false;
            out.residual_order_right = ro.slope;
        }
        s = symbol_add(s, power);
        power = sharp_product(r, power, cfg);
    }
    out.b = b;

    // two-sided check: b # a - 1 passes the same order test
    Symbol residl = symbol_add_const(symbol_scale(sharp_product(b, a, cfg), -1.0), 1.0);
    auto lo = residual_order(residl, K, shell_lo, shell_hi, 10, n_dirs);
    out.residual_order_left = lo.zero ? -999.0 : lo.slope;
    return out;
}

DnResult dn_system_test(const std::vector<std::vector<Symbol>>& p,
                        const std::vector<std::vector<double>>& orders,
                        const std::vector<std::vector<Symbol>>& b, const SampleSet& K,
                        double shell_lo, double shell_hi) {
    size_t Kn = p.size(), Ln = p[0].size();
    if (b.size() != Ln || b[0].size() != Kn || orders.size() != Kn || orders[0].size() != Ln)
        throw ShapeMismatch("dn_system_test: block shapes inconsistent");
    for (const auto& row : p)
        if (row.size() != Ln) throw ShapeMismatch("dn_system_test: ragged p");

    DnResult out;
    out.report.verdict = EllipticVerdict::EllipticGeneral;
    auto dirs = fiber_directions(p[0][0].manifold()->dim(), 6);

    for (size_t k = 0; k < Kn; ++k)
        for (size_t k2 = 0; k2 < Kn; ++k2) {
            // residual_{k k2}(xi) = sum_l p_kl b_l k2 - delta
            std::vector<double> rs, vals;
            for (int ir = 0; ir < 10; ++ir) {
                double rr = shell_lo * std::pow(shell_hi / shell_lo, ir / 9.0);
                double sup = 0.0;
                for (const auto& x : K.points)
                    for (const auto& dir : dirs) {
                        cplx acc = 0.0;
                        for (size_t l = 0; l < Ln; ++l)
                            acc += p[k][l].eval(x, rr * dir)(0, 0) * b[l][k2].eval(x, rr * dir)(0, 0);
                        if (k == k2) acc -= 1.0;
                        sup = std::max(sup, std::abs(acc));
                    }
                rs.push_back(rr);
                vals.push_back(sup);
            }
            double peak = 0;
            for (double v : vals) peak = std::max(peak, v);
            double slope = peak < 1e-12 ? -999.0 : fit_loglog_slope(rs, vals);
            out.report.residual_orders.push_back(slope);
            if (slope > -1.0 + 0.3) out.report.verdict = EllipticVerdict::Inconclusive;
        }

    if (out.report.verdict == EllipticVerdict::EllipticGeneral) {
        std::vector<std::vector<Symbol>> blocks(Kn, std::vector<Symbol>(Ln));
        for (size_t k = 0; k < Kn; ++k)
            for (size_t l = 0; l < Ln; ++l) blocks[k][l] = p[k][l];
        out.block_symbol_p = block_symbol(blocks);
    } else {
        out.report.note = "a DoNiEl residual fails the order -1 test";
    }
    return out;
}

} // namespace normsym
