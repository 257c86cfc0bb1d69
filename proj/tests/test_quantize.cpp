#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "normsym/calculus.hpp"
#include "normsym/quantize.hpp"

#include <cmath>

using namespace normsym;

namespace {

// small meshes keep the unit tests quick; acceptance runs the spec sizes
Mesh circle_mesh() { return make_mesh(make_circle(1.0), 128); }
Mesh torus_mesh() { return make_mesh(make_flat_torus_2d(), 32, 32); }
Mesh sphere_mesh() { return make_mesh(make_sphere2(1.0), 24, 48); }

CVec mode_field(const Mesh& mesh, int mode) {
    CVec v((Eigen::Index)mesh.nodes.size());
    for (int j = 0; j < (int)mesh.nodes.size(); ++j) v[j] = mesh.basis_at(mode, mesh.nodes[j]);
    return v;
}

int find_circle_mode(const Mesh& mesh, int k) {
    for (int q = 0; q < mesh.n_modes; ++q)
        if (std::lround(mesh.mode_covectors[q][0]) == k) return q;
    throw std::runtime_error("mode not found");
}

} // namespace

TEST_CASE("mesh quadrature integrates the basis exactly") {
    for (auto mesh : {circle_mesh(), torus_mesh(), sphere_mesh()}) {
        // analysis . synthesis = identity on modes
        CMat G = mesh.analysis * mesh.synthesis;
        CHECK((G - CMat::Identity(mesh.n_modes, mesh.n_modes)).norm() < 1e-10 * mesh.n_modes);
    }
}

TEST_CASE("fiber fourier: gaussian fixed point and round trip") {
    TangentGrid vg = make_tangent_grid(2, 7.0, 48, 96);
    TangentGrid xg = make_tangent_grid(2, 6.0, 40, 96);
    CVec g((Eigen::Index)vg.points.size());
    for (size_t q = 0; q < vg.points.size(); ++q)
        g[(Eigen::Index)q] = std::exp(-0.5 * vg.points[q].squaredNorm());
    CVec ghat = fiber_fourier(vg, g, xg);
    for (size_t p = 0; p < xg.points.size(); ++p) {
        double expect = std::exp(-0.5 * xg.points[p].squaredNorm());
        CHECK(std::abs(ghat[(Eigen::Index)p] - expect) < 1e-7);
    }
    // zero maps to zero
    CVec z = CVec::Zero((Eigen::Index)vg.points.size());
    CVec zhat = fiber_fourier(vg, z, xg);
    CHECK(zhat.norm() == 0.0);
    // round trip on a band-limited bump
    CVec back = fiber_fourier_inverse(xg, ghat, vg);
    for (size_t q = 0; q < vg.points.size(); ++q)
        CHECK(std::abs(back[(Eigen::Index)q] - g[(Eigen::Index)q]) < 1e-7);
}

TEST_CASE("microlocal lift: constants and plane waves on the circle") {
    auto m = make_circle(1.0);
    Mesh mesh = circle_mesh();
    Cutoff psi;
    GridField one{&mesh, CVec::Ones((Eigen::Index)mesh.nodes.size())};
    Vec x0(1);
    x0 << 0.0;
    LiftSamples lift = microlocal_lift(one, x0, psi);
    for (size_t q = 0; q < lift.grid.points.size(); ++q) {
        double s = lift.grid.points[q].norm();
        CHECK(std::abs(lift.values[(Eigen::Index)q] - psi.psi(s, pi)) < 1e-9);
    }

    // f = e^{i k theta} lifts to psi(v) e^{i k v} at the base point 0
    int k = 5;
    CVec f((Eigen::Index)mesh.nodes.size());
    for (int j = 0; j < (int)mesh.nodes.size(); ++j)
        f[j] = std::exp(cplx(0, k * mesh.nodes[j][0]));
    GridField gf{&mesh, f};
    LiftSamples lf = microlocal_lift(gf, x0, psi);
    for (size_t q = 0; q < lf.grid.points.size(); ++q) {
        double v = lf.grid.points[q][0];
        cplx expect = psi.psi(std::abs(v), pi) * std::exp(cplx(0, k * v));
        CHECK(std::abs(lf.values[(Eigen::Index)q] - expect) < 1e-8);
    }
}

TEST_CASE("microlocal lift on the sphere: z^3 restriction at the north pole") {
    auto m = make_sphere2(1.0);
    Mesh mesh = sphere_mesh();
    Cutoff psi;
    CVec f((Eigen::Index)mesh.nodes.size());
    for (int j = 0; j < (int)mesh.nodes.size(); ++j) f[j] = mesh.nodes[j][2];
    GridField gf{&mesh, f};
    Vec np(3);
    np << 0, 0, 1;
    LiftSamples lift = microlocal_lift(gf, np, psi);
    for (size_t q = 0; q < lift.grid.points.size(); ++q) {
        double s = lift.grid.points[q].norm();
        cplx expect = psi.psi(s, pi) * std::cos(s);
        CHECK(std::abs(lift.values[(Eigen::Index)q] - expect) < 1e-7);
    }
}

TEST_CASE("circle quantization: polynomial symbols act as differential operators") {
    auto m = make_circle(1.0);
    Mesh mesh = circle_mesh();
    Cutoff psi;
    std::map<MultiIndex, Expr> cz;
    cz[MultiIndex{1}] = Expr::constant(1.0);
    Symbol zeta = polynomial_symbol(m, cz);
    OpPtr A = quantize(zeta, mesh, psi);
    for (int k : {-7, 1, 13}) {
        int q = find_circle_mode(mesh, k);
        CVec ek = mode_field(mesh, q);
        FieldSpec fs;
        fs.node_values = ek;
        CVec out = A->apply(fs);
        CHECK((out - cplx(k, 0) * ek).norm() < 1e-10 * ek.norm() * std::max(1, std::abs(k)));
    }

    // |xi|^2 quantizes to minus the Laplacian: eigenvalue k^2
    std::map<MultiIndex, Expr> cl;
    cl[MultiIndex{2}] = Expr::constant(1.0);
    Symbol l = polynomial_symbol(m, cl);
    OpPtr L = quantize(l, mesh, psi);
    for (int k : {-12, 3, 25}) {
        int q = find_circle_mode(mesh, k);
        CVec ek = mode_field(mesh, q);
        FieldSpec fs;
        fs.node_values = ek;
        CVec out = L->apply(fs);
        CHECK((out - cplx(k * k, 0) * ek).norm() < 1e-8 * std::max(1.0, double(k * k)));
    }
}

TEST_CASE("quantize(1) is the identity on band-limited fields") {
    auto m = make_circle(1.0);
    Mesh mesh = circle_mesh();
    Cutoff psi;
    Symbol one = constant_symbol(m, 1.0);
    OpPtr A = quantize(one, mesh, psi);
    Rng rng(3);
    CVec f = CVec::Zero((Eigen::Index)mesh.nodes.size());
    for (int t = 0; t < 6; ++t) {
        int q = rng.uniform_int(0, mesh.n_modes - 1);
        if (std::abs(mesh.mode_covectors[q][0]) > 20) continue;
        f += cplx(rng.uniform(-1, 1), rng.uniform(-1, 1)) * mode_field(mesh, q);
    }
    FieldSpec fs;
    fs.node_values = f;
    CVec out = A->apply(fs);
    CHECK((out - f).norm() < 1e-8 * std::max(1.0, f.norm()));
}

TEST_CASE("inverse pair on the circle: extract(quantize(a)) returns a for polynomials") {
    auto m = make_circle(1.0);
    Mesh mesh = make_mesh(m, 256); // the 128 mesh leaves a visible band tail
    Cutoff psi;
    std::map<MultiIndex, Expr> cz;
    cz[MultiIndex{1}] = Expr::constant(1.0);
    Symbol zeta = polynomial_symbol(m, cz);
    OpPtr A = quantize(zeta, mesh, psi);
    for (double z : {2.0, 5.5, 16.0, -9.0}) {
        Covector xi{Vec(1), Vec(1)};
        xi.x << 1.1;
        xi.zeta << z;
        cplx got = extract_symbol(*A, xi, psi)(0, 0);
        CHECK(std::abs(got - z) < 1e-6 * (1 + std::abs(z)));
    }
    // Nyquist guard
    Covector far{Vec(1), Vec(1)};
    far.x << 0.0;
    far.zeta << 1000.0;
    CHECK_THROWS_AS((void)extract_symbol(*A, far, psi), NyquistExceeded);
}

TEST_CASE("torus quantization: polynomial eigenstructure and extraction") {
    auto m = make_flat_torus_2d();
    Mesh mesh = torus_mesh();
    Cutoff psi;
    Symbol a = symbol_from_expression(m, "zeta1^2+zeta2^2", SymbolClass(2.0));
    // expression path is not polynomial metadata; use polynomial table instead
    std::map<MultiIndex, Expr> cl;
    cl[MultiIndex{2, 0}] = Expr::constant(1.0);
    cl[MultiIndex{0, 2}] = Expr::constant(1.0);
    Symbol l = polynomial_symbol(m, cl);
    OpPtr L = quantize(l, mesh, psi);
    for (int q : {5, 100, 300}) {
        CVec ek = mode_field(mesh, q % mesh.n_modes);
        FieldSpec fs;
        fs.node_values = ek;
        CVec out = L->apply(fs);
        double lambda = mesh.mode_covectors[q % mesh.n_modes].squaredNorm();
        CHECK((out - cplx(lambda, 0) * ek).norm() < 1e-8 * std::max(1.0, lambda));
    }

    Covector xi{Vec::Zero(2), Vec(2)};
    xi.x << 1.0, 2.0;
    xi.zeta << 3.0, -2.0;
    cplx got = extract_symbol(*L, xi, psi)(0, 0);
    // a 32x32 mesh leaves a band-edge truncation term of the order-2 symbol;
    // the acceptance suite runs the spec meshes where it is far smaller
    CHECK(std::abs(got - xi.zeta.squaredNorm()) < 3e-2 * (1 + xi.zeta.squaredNorm()));
}

TEST_CASE("non-polynomial quantization round trip at moderate accuracy") {
    auto m = make_circle(1.0);
    Mesh mesh = circle_mesh();
    Cutoff psi;
    Symbol a = radial_symbol(m, "1/(1+zeta1)", SymbolClass(-2.0));
    OpPtr A = quantize(a, mesh, psi);
    // the round trip carries the genuine smoothing tail of the window
    // (decaying faster than any power of |zeta| but sizable at small |zeta|);
    // assert the tail envelope rather than agreement beyond it
    std::vector<double> zs = {6.0, 12.0, 24.0}, defects;
    for (double z : zs) {
        Covector xi{Vec(1), Vec(1)};
        xi.x << 0.7;
        xi.zeta << z;
        cplx got = extract_symbol(*A, xi, psi)(0, 0);
        double expect = 1.0 / (1.0 + z * z);
        defects.push_back(std::abs(got - expect));
    }
    CHECK(defects[0] < 3e-2);
    CHECK(defects[1] < 3e-3);
    CHECK(defects[2] < 2e-4);
    // superpolynomial decay of the defect relative to the symbol scale
    CHECK(defects[2] < defects[0] / 50.0);
}

TEST_CASE("cutoff independence: two windows differ by a rapidly decaying tail") {
    auto m = make_circle(1.0);
    Mesh mesh = circle_mesh();
    Cutoff psi1(0.45, 0.9), psi2(0.3, 0.7);
    Symbol a = radial_symbol(m, "1/(1+zeta1)", SymbolClass(-2.0));
    OpPtr A1 = quantize(a, mesh, psi1);
    OpPtr A2 = quantize(a, mesh, psi2);
    std::vector<double> ks, diffs;
    for (int k : {6, 12, 24, 48}) {
        int q = find_circle_mode(mesh, k);
        CVec ek = mode_field(mesh, q);
        FieldSpec fs;
        fs.node_values = ek;
        CVec d = A1->apply(fs) - A2->apply(fs);
        ks.push_back(k);
        diffs.push_back(d.norm());
    }
    double slope = fit_loglog_slope(ks, diffs);
    CHECK(slope < -3.5); // superpolynomial at desk scale; steepens along the shell
}

TEST_CASE("pseudolocality probe: disjoint windows give negligible coupling") {
    auto m = make_circle(1.0);
    Mesh mesh = circle_mesh();
    Cutoff psi;
    Symbol a = radial_symbol(m, "1/(1+zeta1)", SymbolClass(-2.0));
    OpPtr A = quantize(a, mesh, psi);
    // u supported near 0, v supported near pi (separation > outer radius is
    // impossible on the unit circle, so take the largest available): use
    // smooth bumps and measure v . A(u f)
    int n = (int)mesh.nodes.size();
    auto bump = [&](double c, double w, double s) {
        CVec out(n);
        for (int j = 0; j < n; ++j) {
            double d = std::remainder(mesh.nodes[j][0] - c, 2 * pi);
            out[j] = smooth_step_down_value(std::abs(d) / w) * s;
        }
        return out;
    };
    CVec u = bump(0.0, 0.35, 1.0), v = bump(pi, 0.35, 1.0);
    Rng rng(5);
    CVec f = CVec::Zero(n);
    for (int t = 0; t < 5; ++t) {
        int q = rng.uniform_int(0, mesh.n_modes - 1);
        if (std::abs(mesh.mode_covectors[q][0]) > 15) continue;
        f += cplx(rng.uniform(-1, 1), rng.uniform(-1, 1)) * mode_field(mesh, q);
    }
    FieldSpec fs;
    fs.node_values = u.cwiseProduct(f);
    CVec Af = A->apply(fs);
    double coupled = v.cwiseProduct(Af).norm();
    // the kernel is supported inside the cutoff ball; distance(0, pi) = pi,
    // window reaches 0.9 pi, bump widths push the gap to ~ pi - 2*0.7 > 0 but
    // the smooth tails dominate; require strong suppression
    CHECK(coupled < 1e-6 * std::max(1.0, Af.norm()));
}

TEST_CASE("sphere engine: quantize(l) acts as minus the Laplacian on harmonics") {
    auto m = make_sphere2(1.0);
    Mesh mesh = sphere_mesh();
    Cutoff psi;
    Symbol l = norm_sq_symbol(m);
    OpPtr L = quantize(l, mesh, psi);
    for (auto [deg, ord] : std::vector<std::pair<int, int>>{{2, 1}, {5, -3}, {8, 0}}) {
        int q = -1;
        for (int i = 0; i < mesh.n_modes; ++i)
            if (mesh.sphere_lm[i] == std::make_pair(deg, ord)) q = i;
        REQUIRE(q >= 0);
        CVec ek = mode_field(mesh, q);
        FieldSpec fs;
        fs.node_values = ek;
        fs.band_hint = deg + 2;
        CVec out = L->apply(fs);
        double lambda = double(deg) * (deg + 1);
        double rel = (out - cplx(lambda, 0) * ek).norm() / (lambda * ek.norm());
        CHECK(rel < 1e-4);
    }
}

TEST_CASE("sphere engine: identity symbol reproduces band-limited fields") {
    auto m = make_sphere2(1.0);
    Mesh mesh = sphere_mesh();
    Cutoff psi;
    Symbol one = constant_symbol(m, 1.0);
    OpPtr A = quantize(one, mesh, psi);
    int q = -1;
    for (int i = 0; i < mesh.n_modes; ++i)
        if (mesh.sphere_lm[i] == std::make_pair(6, 2)) q = i;
    CVec ek = mode_field(mesh, q);
    FieldSpec fs;
    fs.node_values = ek;
    fs.band_hint = 8;
    CVec out = A->apply(fs);
    CHECK((out - ek).norm() < 1e-6 * ek.norm());
}

TEST_CASE("adjoint quantize: circle polynomial is self-adjoint, pairing matches") {
    auto m = make_circle(1.0);
    Mesh mesh = circle_mesh();
    Cutoff psi;
    std::map<MultiIndex, Expr> cz;
    cz[MultiIndex{1}] = Expr::constant(1.0);
    Symbol zeta = polynomial_symbol(m, cz);
    OpPtr A = quantize(zeta, mesh, psi);
    OpPtr Astar = adjoint_quantize(zeta, mesh, psi);
    Rng rng(7);
    int n = (int)mesh.nodes.size();
    CVec f = CVec::Zero(n), g = CVec::Zero(n);
    for (int t = 0; t < 6; ++t) {
        int q = rng.uniform_int(0, mesh.n_modes - 1);
        if (std::abs(mesh.mode_covectors[q][0]) > 18) continue;
        f += cplx(rng.uniform(-1, 1), rng.uniform(-1, 1)) * mode_field(mesh, q);
        int q2 = rng.uniform_int(0, mesh.n_modes - 1);
        if (std::abs(mesh.mode_covectors[q2][0]) > 18) continue;
        g += cplx(rng.uniform(-1, 1), rng.uniform(-1, 1)) * mode_field(mesh, q2);
    }
    FieldSpec ff, gg;
    ff.node_values = f;
    gg.node_values = g;
    cplx lhs = mesh.dot(A->apply(ff), g);
    cplx rhs = mesh.dot(f, Astar->apply(gg));
    CHECK(std::abs(lhs - rhs) < 1e-9 * (1 + std::abs(lhs)));
}

TEST_CASE("adjoint quantize: x1 zeta1 on the torus matches Op(x1 zeta1 - i) on local fields") {
    auto m = make_flat_torus_2d();
    Mesh mesh = torus_mesh();
    Cutoff psi;
    std::map<MultiIndex, Expr> ct;
    ct[MultiIndex{1, 0}] = parse_expression("x1", 2, 0);
    Symbol a = polynomial_symbol(m, ct);
    OpPtr A = quantize(a, mesh, psi);
    OpPtr Astar = adjoint_quantize(a, mesh, psi);

    // gaussian-like localized band-limited fields centred mid-chart avoid the
    // coordinate seam of the x1 coefficient
    int n = (int)mesh.nodes.size();
    auto localized = [&](double cx, double cy) {
        CVec out = CVec::Zero(n);
        for (int q = 0; q < mesh.n_modes; ++q) {
            Vec k = mesh.mode_covectors[q];
            double damp = std::exp(-k.squaredNorm() / 8.0);
            if (damp < 1e-14) continue;
            Vec c(2);
            c << cx, cy;
            cplx shift = std::exp(cplx(0, -k.dot(c)));
            out += damp * shift * mode_field(mesh, q);
        }
        return out;
    };
    CVec f = localized(pi, pi * 0.9), g = localized(pi * 1.1, pi);
    FieldSpec ff, gg;
    ff.node_values = f;
    gg.node_values = g;
    cplx lhs = mesh.dot(A->apply(ff), g);
    cplx rhs = mesh.dot(f, Astar->apply(gg));
    CHECK(std::abs(lhs - rhs) < 1e-8 * (1 + std::abs(lhs)));

    // Op*(a) = Op(x1 zeta1) - i on these fields; the sawtooth coefficient
    // x1 leaves a discretization alias floor on a 32^2 mesh
    OpPtr B = quantize(a, mesh, psi);
    CVec expect = B->apply(gg) - cplx(0, 1) * g;
    CVec got = Astar->apply(gg);
    CHECK((got - expect).norm() < 5e-4 * std::max(1.0, expect.norm()));

    // with a smooth periodic coefficient the identity is clean:
    // (sin(x1) zeta1)* = sin(x1) zeta1 - i cos(x1)
    std::map<MultiIndex, Expr> cs;
    cs[MultiIndex{1, 0}] = parse_expression("sin(x1)", 2, 0);
    Symbol as = polynomial_symbol(m, cs);
    OpPtr As = quantize(as, mesh, psi);
    OpPtr Asstar = adjoint_quantize(as, mesh, psi);
    CVec got2 = Asstar->apply(gg);
    CVec expect2 = As->apply(gg);
    for (int j = 0; j < (int)mesh.nodes.size(); ++j)
        expect2[j] -= cplx(0, 1) * std::cos(mesh.nodes[j][0]) * g[j];
    CHECK((got2 - expect2).norm() < 1e-8 * std::max(1.0, expect2.norm()));
}

TEST_CASE("adjoint quantize: general circle symbol via the quadrature path") {
    auto m = make_circle(1.0);
    Mesh mesh = circle_mesh();
    Cutoff psi;
    Symbol a = radial_symbol(m, "1/(1+zeta1)", SymbolClass(-2.0));
    OpPtr A = quantize(a, mesh, psi);
    OpPtr Astar = adjoint_quantize(a, mesh, psi);
    Rng rng(11);
    int n = (int)mesh.nodes.size();
    CVec f = CVec::Zero(n), g = CVec::Zero(n);
    for (int t = 0; t < 4; ++t) {
        int q = rng.uniform_int(0, mesh.n_modes - 1);
        if (std::abs(mesh.mode_covectors[q][0]) > 10) continue;
        f += cplx(rng.uniform(-1, 1), 0) * mode_field(mesh, q);
        g += cplx(0, rng.uniform(-1, 1)) * mode_field(mesh, q);
    }
    FieldSpec ff, gg;
    ff.node_values = f;
    gg.node_values = g;
    cplx lhs = mesh.dot(A->apply(ff), g);
    cplx rhs = mesh.dot(f, Astar->apply(gg));
    CHECK(std::abs(lhs - rhs) < 1e-6 * (1 + std::abs(lhs)));
}

TEST_CASE("composition oracle on the circle: extracted product matches sharp at order") {
    auto m = make_circle(1.0);
    Mesh mesh = make_mesh(m, 256);
    Cutoff psi;
    // a of zeta-degree 3 against an x-dependent b leaves a genuine
    // order mu_a + mu_b - 3 = 1 remainder beyond the N=2 truncation
    std::map<MultiIndex, Expr> ca, cb;
    ca[MultiIndex{3}] = Expr::constant(1.0);
    cb[MultiIndex{1}] = parse_expression("1+0.5*cos(x1)", 1, 0);
    Symbol a = polynomial_symbol(m, ca);
    Symbol b = polynomial_symbol(m, cb);
    OpPtr A = quantize(a, mesh, psi);
    OpPtr B = quantize(b, mesh, psi);
    OpPtr AB = compose(A, B);
    Symbol ab = sharp_product(a, b, ExpansionConfig(2));
    std::vector<double> rs, diffs;
    for (double z : {4.0, 6.0, 9.0, 12.0, 16.0}) {
        Covector xi{Vec(1), Vec(1)};
        xi.x << 2.0;
        xi.zeta << z;
        cplx got = extract_symbol(*AB, xi, psi)(0, 0);
        cplx pred = ab.eval(xi)(0, 0);
        rs.push_back(1 + z);
        diffs.push_back(std::abs(got - pred));
    }
    double slope = fit_loglog_slope(rs, diffs);
    CHECK(slope <= 1.0 + 0.5);
    CHECK(slope >= 0.3); // the remainder is genuinely there
    // and the exact missing term is (-i)^3/6 d^3_zeta a d^3_x b
    for (size_t i = 0; i < rs.size(); ++i) {
        double z = rs[i] - 1;
        double missing = std::abs((1.0 / 6.0) * 6.0 * 0.5 * std::sin(2.0) * z);
        CHECK(diffs[i] == doctest::Approx(missing).epsilon(0.05));
    }
}

TEST_CASE("binary and csv export round trip") {
    CMat m(2, 3);
    m << cplx(1, 2), cplx(3, 4), cplx(5, 6), cplx(7, 8), cplx(9, 10), cplx(11, 12);
    write_matrix_binary("/tmp/normsym_test.nsb", m);
    CMat back = read_matrix_binary("/tmp/normsym_test.nsb");
    CHECK((m - back).norm() == 0.0);
    write_matrix_csv("/tmp/normsym_test.csv", m);
}
