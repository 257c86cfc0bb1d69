#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "normsym/phase.hpp"

#include <cmath>

using namespace normsym;

TEST_CASE("flat torus: linear phase has no higher jets") {
    auto m = make_flat_torus_2d();
    Rng rng(1);
    Covector xi{m->random_point(rng), Vec(2)};
    xi.zeta << 2.0, -1.0;
    PhaseJet pj = phase_jet(m, xi, 3);
    for (const auto& [key, v] : pj.entries) {
        int o = mi_abs(key.first) + mi_abs(key.second);
        if (mi_abs(key.second) >= 2) CHECK(std::abs(v) < 1e-14);
        if (o == 1) {
            // gradient entries reproduce zeta
            for (int k = 0; k < 2; ++k)
                if (key.first[k] + key.second[k] == 1) CHECK(v == doctest::Approx(xi.zeta[k]));
        }
    }
}

TEST_CASE("circle: one-dimensional, all higher tensors vanish") {
    auto m = make_circle(1.0);
    Covector xi{Vec(1), Vec(1)};
    xi.x << 0.4;
    xi.zeta << 3.0;
    PhaseJet pj = phase_jet(m, xi, 3);
    for (const auto& [key, v] : pj.entries)
        if (mi_abs(key.first) + mi_abs(key.second) >= 2) CHECK(std::abs(v) < 1e-14);
}

TEST_CASE("phi_{0 beta} vanishes for |beta| in {2,3} on all builtin kinds") {
    std::vector<std::shared_ptr<const Manifold>> ms = {make_flat_torus_2d(), make_sphere2(1.0)};
    for (const auto& m : ms) {
        Rng rng(7);
        for (int i = 0; i < 50; ++i) {
            Covector xi{m->random_point(rng), Vec(2)};
            double r = rng.uniform(0.5, 20.0);
            double th = rng.uniform(0.0, 2 * pi);
            xi.zeta << r * std::cos(th), r * std::sin(th);
            PhaseJet pj = phase_jet(m, xi, 3);
            for (const auto& [key, v] : pj.entries) {
                if (mi_abs(key.first) != 0) continue;
                int b = mi_abs(key.second);
                if (b >= 2 && b <= 3) CHECK(std::abs(v) <= 1e-6 * (1.0 + xi.zeta.norm()));
            }
        }
    }
}

TEST_CASE("homogeneity: phase jet is linear in zeta") {
    auto m = make_sphere2(1.0);
    Rng rng(3);
    Covector xi{m->random_point(rng), Vec(2)};
    xi.zeta << 1.7, 0.6;
    Covector xi2{xi.x, 2.0 * xi.zeta};
    PhaseJet p1 = phase_jet(m, xi, 3);
    PhaseJet p2 = phase_jet(m, xi2, 3);
    for (const auto& [key, v] : p1.entries)
        CHECK(p2.at(key.first, key.second) == doctest::Approx(2.0 * v).epsilon(1e-10));
}

TEST_CASE("sphere |alpha|=1,|beta|=2 entries carry the symmetrized curvature") {
    // the tensor is -d/dz^n Gamma^k_{lm}(0) of normal coordinates,
    // i.e. (1/3)(R^k_{mln} + R^k_{lmn})
    auto m = make_sphere2(1.0);
    Rng rng(11);
    Vec x = m->random_point(rng);
    auto cd = m->curvature(x);
    PhaseTensors T = phase_tensors(m, x, 1, 2);
    int d = 2;
    for (int n = 0; n < d; ++n)
        for (int l = 0; l < d; ++l)
            for (int mm = 0; mm < d; ++mm) {
                MultiIndex alpha = mi_unit(d, n);
                MultiIndex beta = mi_add(mi_unit(d, l), mi_unit(d, mm));
                const Vec& v = T.at(alpha, beta);
                for (int k = 0; k < d; ++k) {
                    double expect = (cd.r(k, mm, l, n) + cd.r(k, l, mm, n)) / 3.0;
                    CHECK(v[k] == doctest::Approx(expect).epsilon(1e-9));
                }
            }
}

TEST_CASE("chart change jet: two routes agree on every builtin") {
    // flat: everything zero
    auto t = make_flat_torus_2d();
    Rng rng(5);
    auto cj = chart_change_jet(t, t->random_point(rng));
    for (double v : cj.second) CHECK(v == 0.0);
    for (double v : cj.third) CHECK(std::abs(v) < 1e-12);
    CHECK((cj.first - Mat::Identity(2, 2)).norm() < 1e-12);

    // sphere: curvature formula confirmed by nested-log finite differences
    auto s = make_sphere2(1.0);
    auto cs = chart_change_jet(s, s->random_point(rng));
    auto cd = s->curvature(cs.base);
    for (int k = 0; k < 2; ++k)
        for (int n = 0; n < 2; ++n)
            for (int l = 0; l < 2; ++l)
                for (int mm = 0; mm < 2; ++mm)
                    CHECK(cs.third_at(k, n, l, mm) ==
                          doctest::Approx((cd.r(k, mm, l, n) + cd.r(k, l, mm, n)) / 3.0)
                              .epsilon(1e-6));

    // circle: one-dimensional and flat
    auto c = make_circle(1.0);
    Vec x1(1);
    x1 << 1.0;
    auto cc = chart_change_jet(c, x1);
    CHECK(std::abs(cc.third[0]) < 1e-12);
}
