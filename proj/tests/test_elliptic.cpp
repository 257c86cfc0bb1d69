#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "normsym/elliptic.hpp"

#include <cmath>

using namespace normsym;

TEST_CASE("scalar ellipticity: |zeta|^2 is elliptic of order 2 with C_K near 1") {
    auto m = make_flat_torus_2d();
    SampleSet K = default_samples(*m, 3, 1);
    Symbol l = norm_sq_symbol(m);
    auto rep = ellipticity_test_scalar(l, 2.0, K);
    CHECK(rep.verdict == EllipticVerdict::EllipticOfOrder);
    CHECK(rep.c_bound == doctest::Approx(1.0).epsilon(1e-6));
    // json serialization carries the verdict
    CHECK(rep.to_json().find("elliptic_of_order") != std::string::npos);
}

TEST_CASE("scalar ellipticity: zeta1 is rejected with a recorded vanishing ray") {
    auto m = make_flat_torus_2d();
    SampleSet K = default_samples(*m, 2, 2);
    Symbol z1 = symbol_from_expression(m, "zeta1", SymbolClass(1.0));
    // include the vanishing direction among the sampled rays
    auto rep = ellipticity_test_scalar(z1, 1.0, K, 10.0, 1e3, 10, 16);
    CHECK(rep.verdict == EllipticVerdict::NotElliptic);
    REQUIRE(rep.failure_ray.has_value());
    CHECK(std::abs((*rep.failure_ray)[0]) < 0.2); // close to the zeta2 axis
}

TEST_CASE("scalar ellipticity: (1+l)^{-1} elliptic of order -2") {
    auto m = make_flat_torus_2d();
    SampleSet K = default_samples(*m, 2, 3);
    Symbol linv = radial_symbol(m, "1/(1+zeta1)", SymbolClass(-2.0));
    auto rep = ellipticity_test_scalar(linv, -2.0, K);
    CHECK(rep.verdict == EllipticVerdict::EllipticOfOrder);
    // and testing it at the wrong order is inconclusive, not elliptic
    auto wrong = ellipticity_test_scalar(linv, -1.0, K);
    CHECK(wrong.verdict == EllipticVerdict::Inconclusive);
}

TEST_CASE("variable-order symbol accepted through the witness route") {
    auto m = make_flat_torus_2d();
    SampleSet K = default_samples(*m, 2, 4);
    SymbolClass cls(0.75, 1.0, 0.25);
    Symbol aphi =
        symbol_from_expression(m, "(1+zeta1^2+zeta2^2)^(0.5+0.25*sin(x1))", cls);
    Symbol bphi =
        symbol_from_expression(m, "(1+zeta1^2+zeta2^2)^(-0.5-0.25*sin(x1))", cls);
    auto rep = ellipticity_test_witness(aphi, bphi, ExpansionConfig(2), K, 10.0, 300.0);
    CHECK(rep.verdict == EllipticVerdict::EllipticGeneral);
    CHECK(rep.measured_epsilon > 0.4);
}

TEST_CASE("flat parametrix: one term, residual exactly zero") {
    auto m = make_flat_torus_2d();
    Symbol a = radial_symbol(m, "1+zeta1", SymbolClass(2.0));
    Symbol b0 = radial_symbol(m, "1/(1+zeta1)", SymbolClass(-2.0));
    auto res = neumann_parametrix(a, b0, ExpansionConfig(2));
    CHECK(res.converged);
    CHECK(res.residual_zero);
    CHECK(res.terms_used == 1);
    CHECK(res.residual_order_left <= -900.0);
    // the parametrix itself evaluates to b0
    Vec x = Vec::Zero(2);
    Vec zeta(2);
    zeta << 5.0, 2.0;
    CHECK(std::abs(res.b.eval(x, zeta)(0, 0) - b0.eval(x, zeta)(0, 0)) < 1e-12);
}

TEST_CASE("trivial parametrix: a = b0 = 1") {
    auto m = make_flat_torus_2d();
    Symbol one = constant_symbol(m, 1.0);
    auto res = neumann_parametrix(one, one, ExpansionConfig(2));
    CHECK(res.converged);
    CHECK(res.residual_zero);
}

TEST_CASE("sphere parametrix: curvature residual passes an order -4 test within 4 terms") {
    auto m = make_sphere2(1.0);
    Symbol a = radial_symbol(m, "1+zeta1", SymbolClass(2.0));
    Symbol b0 = radial_symbol(m, "1/(1+zeta1)", SymbolClass(-2.0));
    ExpansionConfig cfg(3, ExpansionMode::FiniteDifference);
    auto res = neumann_parametrix(a, b0, cfg, 4, -4.0, 8.0, 96.0);
    CHECK(res.converged);
    CHECK(res.terms_used <= 4);
    CHECK(res.residual_order_right <= -4.0);
    // two-sided: left residual passes the same order test
    CHECK(res.residual_order_left <= -4.0 + 0.3);
    // each Neumann term lowered the measured residual order
    for (size_t i = 1; i < res.history.size(); ++i) CHECK(res.history[i] < res.history[i - 1]);
}

TEST_CASE("not-elliptic precondition raises") {
    auto m = make_flat_torus_2d();
    Symbol a = radial_symbol(m, "1+zeta1", SymbolClass(2.0));
    Symbol bad = constant_symbol(m, 1.0); // a # 1 - 1 = a - 1 grows
    CHECK_THROWS_AS((void)neumann_parametrix(a, bad, ExpansionConfig(2)), NotEllipticError);
}

TEST_CASE("DN systems: scalar reduction, diagonal orders, triangular example") {
    auto m = make_flat_torus_2d();
    SampleSet K = default_samples(*m, 2, 5);

    Symbol l = norm_sq_symbol(m);
    Symbol linv = excised_reciprocal(l, 2.0);

    // 1x1 reduction
    auto r1 = dn_system_test({{l}}, {{2.0}}, {{linv}}, K);
    CHECK(r1.report.verdict == EllipticVerdict::EllipticGeneral);

    // diagonal 2x2 with orders (2, 4)
    Symbol l2 = symbol_mul_pointwise(l, l);
    Symbol l2inv = excised_reciprocal(l2, 2.0);
    Symbol zero = constant_symbol(m, 0.0);
    auto r2 = dn_system_test({{l, zero}, {zero, l2}}, {{2.0, 3.0}, {3.0, 4.0}},
                             {{linv, zero}, {zero, l2inv}}, K);
    CHECK(r2.report.verdict == EllipticVerdict::EllipticGeneral);

    // triangular 2x2 with p = [[l, zeta1],[0, l]] and b = p^{-1} pointwise
    Symbol z1 = symbol_from_expression(m, "zeta1", SymbolClass(1.0));
    // b entries: [[1/l, -zeta1/l^2],[0, 1/l]] with excision built in
    Symbol minus_z1_over_l2 =
        symbol_scale(symbol_mul_pointwise(z1, symbol_mul_pointwise(linv, linv)), -1.0);
    auto r3 = dn_system_test({{l, z1}, {zero, l}}, {{2.0, 1.0}, {3.0, 2.0}},
                             {{linv, minus_z1_over_l2}, {zero, linv}}, K);
    CHECK(r3.report.verdict == EllipticVerdict::EllipticGeneral);
    CHECK(r3.block_symbol_p.valid());
    CHECK(r3.block_symbol_p.rows() == 2);

    // shape mismatch guard
    CHECK_THROWS_AS((void)dn_system_test({{l, zero}}, {{2.0, 2.0}}, {{linv}}, K), ShapeMismatch);
}

TEST_CASE("order bookkeeping: the returned parametrix passes the order -m test") {
    auto m = make_flat_torus_2d();
    Symbol a = radial_symbol(m, "1+zeta1", SymbolClass(2.0));
    Symbol b0 = radial_symbol(m, "1/(1+zeta1)", SymbolClass(-2.0));
    auto res = neumann_parametrix(a, b0, ExpansionConfig(2));
    SampleSet K = default_samples(*m, 2, 7);
    auto fit = measured_order(res.b, K, 10.0, 1e3, 10, 4, -2.0);
    CHECK(fit.sup_normalized < 2.0);
    CHECK(fit.slope <= -2.0 + 0.1);
}
