#include "sphere_series.hpp"

#include "normsym/errors.hpp"

namespace normsym::sphere_series {

Center center_at(const Manifold& sphere, const Vec& x) {
    Center c;
    c.R = SphereAccess::radius(sphere);
    c.x = V3(x[0], x[1], x[2]);
    Vec e1, e2;
    SphereAccess::canonical_frame(x, e1, e2);
    c.e1 = V3(e1[0], e1[1], e1[2]);
    c.e2 = V3(e2[0], e2[1], e2[2]);
    return c;
}

namespace {
TVec3 lift(const TruncShape& sh, const V3& v) {
    return {Taylor::constant(sh, v[0]), Taylor::constant(sh, v[1]), Taylor::constant(sh, v[2])};
}
Taylor dot(const TVec3& a, const TVec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
TVec3 combine(const Taylor& c1, const TVec3& a, const Taylor& c2, const TVec3& b) {
    return {c1 * a[0] + c2 * b[0], c1 * a[1] + c2 * b[1], c1 * a[2] + c2 * b[2]};
}
} // namespace

TVec3 point_series(const Center& c, const Taylor& z1, const Taylor& z2) {
    const TruncShape sh = z1.shape();
    double R2 = c.R * c.R;
    Taylor u = z1 * z1 + z2 * z2;
    Taylor w = u * (1.0 / R2);
    // cos(sqrt w) = 1 + w * cosc(w)
    Taylor cosr = w * w.cosc_of_sq() + 1.0;
    Taylor sincr = w.sinc_of_sq() * (1.0 / c.R);
    TVec3 dir = combine(z1, lift(sh, c.e1), z2, lift(sh, c.e2));
    TVec3 xs = lift(sh, c.x);
    return combine(cosr, xs, sincr, dir);
}

void transported_frame_series(const Center& c, const TVec3& y, TVec3& f1, TVec3& f2) {
    const TruncShape sh = y[0].shape();
    TVec3 xs = lift(sh, c.x);
    TVec3 xy = {xs[0] + y[0], xs[1] + y[1], xs[2] + y[2]};
    Taylor denom = (dot(xs, y) + 1.0).inv();
    auto tr = [&](const V3& e) {
        TVec3 es = lift(sh, e);
        Taylor coef = dot(es, y) * denom;
        return combine(Taylor::constant(sh, 1.0), es, coef * (-1.0), xy);
    };
    f1 = tr(c.e1);
    f2 = tr(c.e2);
}

TMat2 rot_series(const Center& c, const TVec3& y, const TVec3& f1, const TVec3& f2) {
    const TruncShape sh = y[0].shape();
    // canonical field at y: transport of the reference frame from the pole
    V3 N(0, 0, 1), E1(1, 0, 0), E2(0, 1, 0);
    TVec3 Ns = lift(sh, N);
    TVec3 Ny = {Ns[0] + y[0], Ns[1] + y[1], Ns[2] + y[2]};
    Taylor denom = (dot(Ns, y) + 1.0).inv();
    auto canon = [&](const V3& E) {
        TVec3 Es = lift(sh, E);
        Taylor coef = dot(Es, y) * denom;
        return combine(Taylor::constant(sh, 1.0), Es, coef * (-1.0), Ny);
    };
    TVec3 c1 = canon(E1), c2 = canon(E2);
    TMat2 O;
    O[0][0] = dot(c1, f1);
    O[0][1] = dot(c1, f2);
    O[1][0] = dot(c2, f1);
    O[1][1] = dot(c2, f2);
    return O;
}

TMat2 theta_inv_series(double R, const Taylor& z1, const Taylor& z2) {
    const TruncShape sh = z1.shape();
    double R2 = R * R;
    Taylor u = z1 * z1 + z2 * z2;
    Taylor w = u * (1.0 / R2);
    // Theta^{-1} = I + G(w) (u I - z z^T)/R^2 with G(w) = (invsinc(w)-1)/w
    // invsinc(w) = 1 + w/6 + 7w^2/360 + ...  =>  G = 1/6 + 7w/360 + ...
    int K = w.max_total_degree() / 2 + 3;
    std::vector<double> inv_of_sinc(K + 1);
    {
        // reciprocal series of sinc coefficients
        std::vector<double> s(K + 1), r(K + 1, 0.0);
        for (int k = 0; k <= K; ++k) s[k] = ((k % 2) ? -1.0 : 1.0) / factorial(2 * k + 1);
        r[0] = 1.0;
        for (int n = 1; n <= K; ++n) {
            double acc = 0;
            for (int j = 0; j < n; ++j) acc += r[j] * s[n - j];
            r[n] = -acc;
        }
        inv_of_sinc = r;
    }
    std::vector<double> G(inv_of_sinc.begin() + 1, inv_of_sinc.end());
    Taylor g = univariate_series_apply(w, G);
    TMat2 M;
    Taylor guR = g * (1.0 / R2);
    M[0][0] = guR * (u - z1 * z1) + 1.0;
    M[0][1] = guR * (z1 * z2) * (-1.0);
    M[1][0] = M[0][1];
    M[1][1] = guR * (u - z2 * z2) + 1.0;
    return M;
}

void log_series(const Center& c, const TVec3& p, Taylor& out1, Taylor& out2) {
    const TruncShape sh = p[0].shape();
    TVec3 xs = lift(sh, c.x);
    Taylor s = (dot(xs, p) * (-1.0) + 1.0) * 2.0; // 2(1 - x.p) = angle^2 - ...
    // angle^2 = u(s): reversion of s(u) = 2 - 2 cos(sqrt u)
    int K = s.max_total_degree() + 2;
    std::vector<double> s_of_u(K + 1, 0.0);
    for (int k = 1; k <= K; ++k) s_of_u[k] = -2.0 * ((k % 2) ? -1.0 : 1.0) / factorial(2 * k);
    std::vector<double> u_of_s = series_reversion(s_of_u, K);
    Taylor ang2 = univariate_series_apply(s, u_of_s);
    // sum_k c_k s^k has c_0 = 0; enforce exactly
    Taylor A = ang2.invsinc_of_sq(); // angle / sin(angle)
    TVec3 e1s = lift(sh, c.e1), e2s = lift(sh, c.e2);
    out1 = A * dot(p, e1s) * c.R;
    out2 = A * dot(p, e2s) * c.R;
}

Taylor phase_series(const Center& c, const TruncShape& shape, int it0, int iw0, const Vec& zeta) {
    Taylor t1 = Taylor::variable(shape, it0);
    Taylor t2 = Taylor::variable(shape, it0 + 1);
    Taylor w1 = Taylor::variable(shape, iw0);
    Taylor w2 = Taylor::variable(shape, iw0 + 1);
    TVec3 y = point_series(c, t1, t2);
    TVec3 f1, f2;
    transported_frame_series(c, y, f1, f2);
    // p = exp_y(w1 f1 + w2 f2)
    double R2 = c.R * c.R;
    Taylor uw = w1 * w1 + w2 * w2;
    Taylor ww = uw * (1.0 / R2);
    Taylor cosr = ww * ww.cosc_of_sq() + 1.0;
    Taylor sincr = ww.sinc_of_sq() * (1.0 / c.R);
    TVec3 dir = combine(w1, f1, w2, f2);
    TVec3 p = combine(cosr, y, sincr, dir);
    Taylor zx1, zx2;
    log_series(c, p, zx1, zx2);
    return zx1 * zeta[0] + zx2 * zeta[1];
}

} // namespace normsym::sphere_series
