#include "normsym/geometry.hpp"

#include <json.hpp>

#include "normsym/expr.hpp"

#include <cmath>

namespace normsym {

// ----------------------------------------------------------------- Cutoff

namespace {
// C^infinity step: 1 for t <= 0, 0 for t >= 1
double smooth_step_down(double t) {
    if (t <= 0.0) return 1.0;
    if (t >= 1.0) return 0.0;
    double f0 = std::exp(-1.0 / t);
    double f1 = std::exp(-1.0 / (1.0 - t));
    return f1 / (f0 + f1);
}
} // namespace

double Cutoff::psi(double s, double inj) const {
    double a = inner_fraction * inj, b = outer_fraction * inj;
    return smooth_step_down((std::abs(s) - a) / (b - a));
}

double Cutoff::excision(double t) {
    // 0 for t <= 1/2, 1 for t >= 1
    return 1.0 - smooth_step_down((t - 0.5) / 0.5);
}

// ----------------------------------------------------------------- Manifold

Vec Manifold::transport(const Vec& x, const Vec& v, const Vec& w) const {
    return transport_frame(x, v) * w;
}

double Manifold::dist(const Vec& x, const Vec& y) const { return log(x, y).norm(); }

// ------------------------------------------------------------------- Circle

class Circle final : public Manifold {
  public:
    explicit Circle(double radius) : R_(radius) {
        if (R_ <= 0) throw Error("Circle: radius must be positive");
    }
    ManifoldKind kind() const override { return ManifoldKind::Circle; }
    int dim() const override { return 1; }
    double injectivity_radius() const override { return pi * R_; }
    bool is_flat() const override { return true; }
    std::string name() const override { return "circle"; }

    double circumference() const { return 2 * pi * R_; }

    Vec exp(const Vec& x, const Vec& v) const override {
        if (v.norm() >= injectivity_radius())
            throw VectorOutsideRadius("circle exp: |v| >= injectivity radius");
        Vec y(1);
        y[0] = wrap(x[0] + v[0]);
        return y;
    }
    Vec log(const Vec& x, const Vec& y) const override {
        double d = y[0] - x[0];
        double C = circumference();
        d = std::remainder(d, C);
        Vec v(1);
        v[0] = d;
        if (std::abs(d) >= injectivity_radius())
            throw PointOutsideRadius("circle log: antipodal point");
        return v;
    }
    Mat transport_frame(const Vec&, const Vec&) const override { return Mat::Identity(1, 1); }
    CurvatureData curvature(const Vec&) const override {
        CurvatureData c;
        c.d = 1;
        c.riemann.assign(1, 0.0);
        c.ricci = Mat::Zero(1, 1);
        return c;
    }
    double density_rho(const Vec&, const Vec&) const override { return 1.0; }
    Mat theta(const Vec&, const Vec&) const override { return Mat::Identity(1, 1); }
    Vec random_point(Rng& rng) const override {
        Vec x(1);
        x[0] = rng.uniform(0.0, circumference());
        return x;
    }

  private:
    double R_;
    double wrap(double s) const {
        double C = circumference();
        s = std::fmod(s, C);
        if (s < 0) s += C;
        return s;
    }
};

// ---------------------------------------------------------------- FlatTorus

class FlatTorus final : public Manifold {
  public:
    explicit FlatTorus(Vec periods) : L_(std::move(periods)) {
        if (L_.size() == 0) throw Error("FlatTorus: empty period list");
        for (int i = 0; i < L_.size(); ++i)
            if (L_[i] <= 0) throw Error("FlatTorus: periods must be positive");
    }
    ManifoldKind kind() const override { return ManifoldKind::FlatTorus; }
    int dim() const override { return (int)L_.size(); }
    double injectivity_radius() const override { return L_.minCoeff() / 2.0; }
    bool is_flat() const override { return true; }
    std::string name() const override { return "flattorus"; }

    Vec exp(const Vec& x, const Vec& v) const override {
        if (v.norm() >= injectivity_radius())
            throw VectorOutsideRadius("torus exp: |v| >= injectivity radius");
        Vec y = x + v;
        for (int i = 0; i < y.size(); ++i) y[i] = wrap(y[i], L_[i]);
        return y;
    }
    Vec log(const Vec& x, const Vec& y) const override {
        Vec v = y - x;
        for (int i = 0; i < v.size(); ++i) v[i] = std::remainder(v[i], L_[i]);
        if (v.norm() >= injectivity_radius())
            throw PointOutsideRadius("torus log: point outside injectivity ball");
        return v;
    }
    Mat transport_frame(const Vec&, const Vec&) const override {
        return Mat::Identity(dim(), dim());
    }
    CurvatureData curvature(const Vec&) const override {
        CurvatureData c;
        int d = dim();
        c.d = d;
        c.riemann.assign((size_t)d * d * d * d, 0.0);
        c.ricci = Mat::Zero(d, d);
        return c;
    }
    double density_rho(const Vec&, const Vec&) const override { return 1.0; }
    Mat theta(const Vec&, const Vec&) const override { return Mat::Identity(dim(), dim()); }
    Vec random_point(Rng& rng) const override {
        Vec x(dim());
        for (int i = 0; i < x.size(); ++i) x[i] = rng.uniform(0.0, L_[i]);
        return x;
    }

    const Vec& periods() const { return L_; }

  private:
    Vec L_;
    static double wrap(double s, double L) {
        s = std::fmod(s, L);
        if (s < 0) s += L;
        return s;
    }
};

// ------------------------------------------------------------------ Sphere2

// Points are unit 3-vectors; the metric is the round metric of radius R.
// Canonical frame = parallel transport of ((1,0,0),(0,1,0)) from the north
// pole along minimal geodesics ("transported polar frame"); singular at the
// south pole, which the sample grids avoid.
class Sphere2 final : public Manifold {
  public:
    explicit Sphere2(double radius) : R_(radius) {
        if (R_ <= 0) throw Error("Sphere2: radius must be positive");
    }
    ManifoldKind kind() const override { return ManifoldKind::Sphere2; }
    int dim() const override { return 2; }
    int point_dim() const override { return 3; }
    double injectivity_radius() const override { return pi * R_; }
    std::string name() const override { return "sphere2"; }
    double radius() const { return R_; }

    // transport of tangent u at unit point a to unit point b (minimal geodesic)
    static Eigen::Vector3d transport_emb(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                                         const Eigen::Vector3d& u) {
        double c = a.dot(b);
        if (c < -1.0 + 1e-14) throw PointOutsideRadius("sphere transport: antipodal points");
        return u - (u.dot(b) / (1.0 + c)) * (a + b);
    }

    void frame_at(const Vec& p, Eigen::Vector3d& e1, Eigen::Vector3d& e2) const {
        Eigen::Vector3d pp(p[0], p[1], p[2]);
        Eigen::Vector3d N(0, 0, 1), E1(1, 0, 0), E2(0, 1, 0);
        e1 = transport_emb(N, pp, E1);
        e2 = transport_emb(N, pp, E2);
    }

    Vec exp(const Vec& x, const Vec& v) const override {
        double nv = v.norm();
        if (nv >= injectivity_radius())
            throw VectorOutsideRadius("sphere exp: |v| >= injectivity radius");
        Eigen::Vector3d p(x[0], x[1], x[2]);
        if (nv < 1e-300) return x;
        Eigen::Vector3d e1, e2;
        frame_at(x, e1, e2);
        Eigen::Vector3d dir = (v[0] * e1 + v[1] * e2) / nv;
        double alpha = nv / R_;
        Eigen::Vector3d y = std::cos(alpha) * p + std::sin(alpha) * dir;
        Vec out(3);
        out << y[0], y[1], y[2];
        return out;
    }

    Vec log(const Vec& x, const Vec& y) const override {
        Eigen::Vector3d p(x[0], x[1], x[2]), q(y[0], y[1], y[2]);
        double c = std::clamp(p.dot(q), -1.0, 1.0);
        // chord form is stable near coincidence where acos loses half the digits
        double alpha = c >= 0.0 ? 2.0 * std::asin(std::min(1.0, (q - p).norm() / 2.0))
                                : pi - 2.0 * std::asin(std::min(1.0, (q + p).norm() / 2.0));
        if (alpha * R_ >= injectivity_radius() - 1e-13)
            throw PointOutsideRadius("sphere log: point at or beyond the cut locus");
        Vec v(2);
        if (alpha < 1e-300) {
            v.setZero();
            return v;
        }
        // v = R * (alpha/sin alpha) * (q - c p) in frame components
        double a_over_s = alpha < 1e-4 ? 1.0 + alpha * alpha / 6.0 + 7.0 * std::pow(alpha, 4) / 360.0
                                       : alpha / std::sin(alpha);
        Eigen::Vector3d dir = (q - c * p) * a_over_s;
        Eigen::Vector3d e1, e2;
        frame_at(x, e1, e2);
        v << R_ * dir.dot(e1), R_ * dir.dot(e2);
        return v;
    }

    Mat transport_frame(const Vec& x, const Vec& v) const override {
        Vec y = exp(x, v);
        Eigen::Vector3d p(x[0], x[1], x[2]), q(y[0], y[1], y[2]);
        Eigen::Vector3d e1x, e2x, e1y, e2y;
        frame_at(x, e1x, e2x);
        frame_at(y, e1y, e2y);
        Mat O(2, 2);
        Eigen::Vector3d t1 = transport_emb(p, q, e1x), t2 = transport_emb(p, q, e2x);
        O << e1y.dot(t1), e1y.dot(t2), e2y.dot(t1), e2y.dot(t2);
        return O;
    }

    CurvatureData curvature(const Vec&) const override {
        CurvatureData c;
        c.d = 2;
        c.riemann.assign(16, 0.0);
        double K = 1.0 / (R_ * R_);
        for (int k = 0; k < 2; ++k)
            for (int m = 0; m < 2; ++m)
                for (int l = 0; l < 2; ++l)
                    for (int n = 0; n < 2; ++n)
                        c.r(k, m, l, n) = K * ((k == l && m == n) - (k == n && m == l));
        c.ricci = K * Mat::Identity(2, 2);
        return c;
    }

    double density_rho(const Vec& x, const Vec& y) const override {
        double r = dist(x, y);
        if (r < 1e-14) return 1.0;
        double a = r / R_;
        return std::sin(a) / a;
    }

    Mat theta(const Vec& x, const Vec& y) const override {
        Vec v = log(x, y);
        double r = v.norm();
        if (r < 1e-14) return Mat::Identity(2, 2);
        double s = std::sin(r / R_) / (r / R_);
        Vec u = v / r;
        return u * u.transpose() + s * (Mat::Identity(2, 2) - u * u.transpose());
    }

    Vec random_point(Rng& rng) const override {
        // uniform, rejecting a small cap around the south pole where the
        // canonical frame is singular
        for (;;) {
            double z = rng.uniform(-1.0, 1.0), phi = rng.uniform(0.0, 2 * pi);
            if (z < -0.95) continue;
            double s = std::sqrt(1 - z * z);
            Vec p(3);
            p << s * std::cos(phi), s * std::sin(phi), z;
            return p;
        }
    }

  private:
    double R_;
};

// ------------------------------------------------------------- GenericChart

class GenericChart final : public Manifold {
  public:
    GenericChart(int dim, MetricFn metric, Vec lo, Vec hi, double inj)
        : d_(dim), g_(std::move(metric)), lo_(std::move(lo)), hi_(std::move(hi)), inj_(inj) {
        if (inj_ <= 0) throw Error("GenericChart: injectivity radius must be positive");
    }
    ManifoldKind kind() const override { return ManifoldKind::GenericChart; }
    int dim() const override { return d_; }
    double injectivity_radius() const override { return inj_; }
    std::string name() const override { return "chart"; }

    Mat metric(const Vec& x) const { return g_(x); }

    // canonical frame: Gram-Schmidt of the coordinate frame under g(x);
    // columns are chart components of the frame vectors
    Mat frame(const Vec& x) const {
        Mat G = g_(x);
        Mat F = Mat::Identity(d_, d_);
        for (int k = 0; k < d_; ++k) {
            Vec v = F.col(k);
            for (int j = 0; j < k; ++j) {
                double c = (F.col(j).transpose() * G * v)(0, 0);
                v -= c * F.col(j);
            }
            double n = std::sqrt((v.transpose() * G * v)(0, 0));
            F.col(k) = v / n;
        }
        return F;
    }

    // Christoffel symbols Gamma^i_{jk} by central differences with one
    // Richardson level on the metric
    std::vector<Mat> christoffel(const Vec& x) const {
        auto dmetric = [&](double h) {
            std::vector<Mat> dg(d_);
            for (int k = 0; k < d_; ++k) {
                Vec xp = x, xm = x;
                xp[k] += h;
                xm[k] -= h;
                dg[k] = (g_(xp) - g_(xm)) / (2 * h);
            }
            return dg;
        };
        double h = 1e-4;
        auto d1 = dmetric(h), d2 = dmetric(h / 2);
        std::vector<Mat> dg(d_);
        for (int k = 0; k < d_; ++k) dg[k] = (4.0 * d2[k] - d1[k]) / 3.0;
        Mat Ginv = g_(x).inverse();
        std::vector<Mat> Gam(d_, Mat::Zero(d_, d_)); // Gam[i](j,k)
        for (int i = 0; i < d_; ++i)
            for (int j = 0; j < d_; ++j)
                for (int k = 0; k < d_; ++k) {
                    double s = 0;
                    for (int l = 0; l < d_; ++l)
                        s += Ginv(i, l) * (dg[j](l, k) + dg[k](l, j) - dg[l](j, k));
                    Gam[i](j, k) = 0.5 * s;
                }
        return Gam;
    }

    // one RK4 step of the geodesic equation, with n transported vectors
    void rk4_step(Vec& x, Vec& xd, Mat& W, double h) const {
        auto f = [&](const Vec& X, const Vec& Xd, const Mat& Wc, Vec& dX, Vec& dXd, Mat& dW) {
            auto Gam = christoffel(X);
            dX = Xd;
            dXd = Vec::Zero(d_);
            dW = Mat::Zero(d_, W.cols());
            for (int i = 0; i < d_; ++i) {
                double a = 0;
                for (int j = 0; j < d_; ++j)
                    for (int k = 0; k < d_; ++k) a += Gam[i](j, k) * Xd[j] * Xd[k];
                dXd[i] = -a;
                for (int c = 0; c < W.cols(); ++c) {
                    double b = 0;
                    for (int j = 0; j < d_; ++j)
                        for (int k = 0; k < d_; ++k) b += Gam[i](j, k) * Xd[j] * Wc(k, c);
                    dW(i, c) = -b;
                }
            }
        };
        Vec k1x, k1v, k2x, k2v, k3x, k3v, k4x, k4v;
        Mat k1w, k2w, k3w, k4w;
        f(x, xd, W, k1x, k1v, k1w);
        f(x + 0.5 * h * k1x, xd + 0.5 * h * k1v, W + 0.5 * h * k1w, k2x, k2v, k2w);
        f(x + 0.5 * h * k2x, xd + 0.5 * h * k2v, W + 0.5 * h * k2w, k3x, k3v, k3w);
        f(x + h * k3x, xd + h * k3v, W + h * k3w, k4x, k4v, k4w);
        x += h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
        xd += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
        W += h / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w);
    }

    // integrate the geodesic with initial frame velocity v over t in [0,1],
    // transporting the columns of W0 (chart components)
    void integrate(const Vec& x0, const Vec& v_frame, Mat W0, Vec& xout, Mat& Wout) const {
        Vec xd = frame(x0) * v_frame; // chart velocity
        Vec x = x0;
        double speed = v_frame.norm();
        double hstep = std::min(1e-2, inj_ / 200.0);
        int n = std::max(8, (int)std::ceil(speed / hstep));
        double h = 1.0 / n;
        for (int i = 0; i < n; ++i) rk4_step(x, xd, W0, h);
        xout = x;
        Wout = W0;
    }

    Vec exp(const Vec& x, const Vec& v) const override {
        if (v.norm() >= inj_) throw VectorOutsideRadius("chart exp: |v| >= injectivity radius");
        Vec y;
        Mat W(d_, 0);
        integrate(x, v, W, y, W);
        return y;
    }

    Vec log(const Vec& x, const Vec& y) const override {
        // Newton shooting on chart coordinates
        Vec v = frame(x).inverse() * (y - x);
        double res = 1e300;
        for (int it = 0; it < 50; ++it) {
            Vec fx = exp_nocheck(x, v);
            Vec r = fx - y;
            res = r.norm();
            if (res < 1e-10) {
                if (v.norm() >= inj_)
                    throw PointOutsideRadius("chart log: point outside injectivity ball");
                return v;
            }
            // finite-difference Jacobian of exp wrt v
            Mat J(d_, d_);
            double h = std::max(1e-6, 1e-8 * v.norm());
            for (int k = 0; k < d_; ++k) {
                Vec vp = v, vm = v;
                vp[k] += h;
                vm[k] -= h;
                J.col(k) = (exp_nocheck(x, vp) - exp_nocheck(x, vm)) / (2 * h);
            }
            v -= J.colPivHouseholderQr().solve(r);
        }
        throw ShootingDiverged("chart log: Newton shooting did not converge", res);
    }

    Vec transport(const Vec& x, const Vec& v, const Vec& w) const override {
        Mat W(d_, 1);
        W.col(0) = frame(x) * w;
        Vec y;
        Mat Wout;
        if (v.norm() >= inj_) throw VectorOutsideRadius("chart transport: |v| >= radius");
        integrate(x, v, W, y, Wout);
        return frame(y).inverse() * Wout.col(0);
    }

    Mat transport_frame(const Vec& x, const Vec& v) const override {
        Mat W = frame(x);
        Vec y;
        Mat Wout;
        if (v.norm() >= inj_) throw VectorOutsideRadius("chart transport: |v| >= radius");
        integrate(x, v, W, y, Wout);
        return frame(y).inverse() * Wout;
    }

    CurvatureData curvature(const Vec& x) const override {
        // R^i_{jkl} = d_k Gam^i_{lj} - d_l Gam^i_{kj} + Gam.Gam - Gam.Gam in
        // chart indices, then converted to the canonical frame
        auto dgamma = [&](double h) {
            std::vector<std::vector<Mat>> dG(d_);
            for (int k = 0; k < d_; ++k) {
                Vec xp = x, xm = x;
                xp[k] += h;
                xm[k] -= h;
                auto gp = christoffel(xp), gm = christoffel(xm);
                dG[k].resize(d_);
                for (int i = 0; i < d_; ++i) dG[k][i] = (gp[i] - gm[i]) / (2 * h);
            }
            return dG;
        };
        double h = 1e-4;
        auto D1 = dgamma(h), D2 = dgamma(h / 2);
        std::vector<std::vector<Mat>> dG(d_);
        for (int k = 0; k < d_; ++k) {
            dG[k].resize(d_);
            for (int i = 0; i < d_; ++i) dG[k][i] = (4.0 * D2[k][i] - D1[k][i]) / 3.0;
        }
        auto Gam = christoffel(x);
        Mat F = frame(x);
        Mat Finv = F.inverse();
        CurvatureData c;
        c.d = d_;
        c.riemann.assign((size_t)d_ * d_ * d_ * d_, 0.0);
        // chart components first
        std::vector<double> Rc((size_t)d_ * d_ * d_ * d_, 0.0);
        auto idx = [&](int i, int j, int k, int l) { return ((i * d_ + j) * d_ + k) * d_ + l; };
        for (int i = 0; i < d_; ++i)
            for (int j = 0; j < d_; ++j)
                for (int k = 0; k < d_; ++k)
                    for (int l = 0; l < d_; ++l) {
                        double s = dG[k][i](l, j) - dG[l][i](k, j);
                        for (int m = 0; m < d_; ++m)
                            s += Gam[i](k, m) * Gam[m](l, j) - Gam[i](l, m) * Gam[m](k, j);
                        Rc[idx(i, j, k, l)] = s;
                    }
        for (int a = 0; a < d_; ++a)
            for (int b = 0; b < d_; ++b)
                for (int cc = 0; cc < d_; ++cc)
                    for (int dd = 0; dd < d_; ++dd) {
                        double s = 0;
                        for (int i = 0; i < d_; ++i)
                            for (int j = 0; j < d_; ++j)
                                for (int k = 0; k < d_; ++k)
                                    for (int l = 0; l < d_; ++l)
                                        s += Finv(a, i) * Rc[idx(i, j, k, l)] * F(j, b) * F(k, cc) *
                                             F(l, dd);
                        c.r(a, b, cc, dd) = s;
                    }
        c.ricci = Mat::Zero(d_, d_);
        for (int m = 0; m < d_; ++m)
            for (int n = 0; n < d_; ++n) {
                double s = 0;
                for (int k = 0; k < d_; ++k) s += c.r(k, m, k, n);
                c.ricci(m, n) = s;
            }
        return c;
    }

    Mat theta(const Vec& x, const Vec& y) const override {
        Vec v = log(x, y);
        // FD Jacobian of exp in v, expressed in the transported frame at y
        double h = 1e-5;
        Mat J(d_, d_);
        for (int k = 0; k < d_; ++k) {
            Vec vp = v, vm = v;
            vp[k] += h;
            vm[k] -= h;
            Mat Jh = Mat::Zero(d_, 1);
            J.col(k) = (exp_nocheck(x, vp) - exp_nocheck(x, vm)) / (2 * h);
        }
        // transported frame at y in chart components
        Mat W = frame(x);
        Vec yy;
        Mat Wout;
        integrate(x, v, W, yy, Wout);
        return Wout.colPivHouseholderQr().solve(J);
    }

    double density_rho(const Vec& x, const Vec& y) const override {
        return std::abs(theta(x, y).determinant());
    }

    Vec random_point(Rng& rng) const override {
        Vec x(d_);
        for (int i = 0; i < d_; ++i) {
            double m = 0.25 * (hi_[i] - lo_[i]);
            x[i] = rng.uniform(lo_[i] + m, hi_[i] - m);
        }
        return x;
    }

  private:
    int d_;
    MetricFn g_;
    Vec lo_, hi_;
    double inj_;

    Vec exp_nocheck(const Vec& x, const Vec& v) const {
        Vec y;
        Mat W(d_, 0);
        integrate(x, v, W, y, W);
        return y;
    }
};

// ----------------------------------------------------------------- factories

std::shared_ptr<const Manifold> make_circle(double radius) {
    return std::make_shared<Circle>(radius);
}
std::shared_ptr<const Manifold> make_flat_torus(const Vec& periods) {
    return std::make_shared<FlatTorus>(periods);
}
std::shared_ptr<const Manifold> make_flat_torus_2d(double p1, double p2) {
    Vec L(2);
    L << p1, p2;
    return std::make_shared<FlatTorus>(L);
}
std::shared_ptr<const Manifold> make_sphere2(double radius) {
    return std::make_shared<Sphere2>(radius);
}
std::shared_ptr<const Manifold> make_generic_chart(int dim, MetricFn metric, Vec lo, Vec hi,
                                                   double inj) {
    return std::make_shared<GenericChart>(dim, std::move(metric), std::move(lo), std::move(hi),
                                          inj);
}

std::shared_ptr<const Manifold> make_generic_chart_from_json(const std::string& json_text) {
    auto j = nlohmann::json::parse(json_text);
    int dim = j.at("dim").get<int>();
    Vec lo(dim), hi(dim);
    auto b = j.at("bounds");
    for (int i = 0; i < dim; ++i) {
        lo[i] = b.at(i).at(0).get<double>();
        hi[i] = b.at(i).at(1).get<double>();
    }
    double inj = j.at("injectivity_radius").get<double>();
    auto mrows = j.at("metric");
    std::vector<std::vector<Expr>> entries(dim, std::vector<Expr>(dim));
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c)
            entries[r][c] = parse_expression(mrows.at(r).at(c).get<std::string>(), dim, 0);
    MetricFn fn = [entries, dim](const Vec& x) {
        Mat g(dim, dim);
        Vec zeta(0);
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < dim; ++c) g(r, c) = entries[r][c].eval_real(x, zeta);
        return g;
    };
    return make_generic_chart(dim, fn, lo, hi, inj);
}

Vec TorusAccess::periods(const Manifold& m) {
    auto* t = dynamic_cast<const FlatTorus*>(&m);
    if (!t) throw Error("TorusAccess: not a FlatTorus");
    return t->periods();
}

double SphereAccess::radius(const Manifold& m) {
    auto* s = dynamic_cast<const Sphere2*>(&m);
    if (!s) throw Error("SphereAccess: not a Sphere2");
    return s->radius();
}

void SphereAccess::canonical_frame(const Vec& p, Vec& e1, Vec& e2) {
    Eigen::Vector3d a, b;
    Sphere2 s(1.0);
    s.frame_at(p, a, b);
    e1 = Vec(3);
    e2 = Vec(3);
    e1 << a[0], a[1], a[2];
    e2 << b[0], b[1], b[2];
}

// ------------------------------------------------------------- chart ops

Vec exp_map(const NormalChart& chart, const Vec& v) {
    if (v.norm() >= chart.radius) throw VectorOutsideRadius("exp_map: |v| >= chart radius");
    return chart.m->exp(chart.base, chart.frame * v);
}

Vec log_map(const NormalChart& chart, const Vec& y) {
    Vec v = chart.m->log(chart.base, y);
    if (v.norm() >= chart.radius) throw PointOutsideRadius("log_map: point outside chart radius");
    return chart.frame.transpose() * v; // frame orthogonal
}

Vec parallel_transport(const NormalChart& chart, const Vec& v, const Vec& w) {
    return chart.m->transport(chart.base, chart.frame * v, chart.frame * w);
}

CurvatureData curvature(const NormalChart& chart) { return chart.m->curvature(chart.base); }

double density_rho(const NormalChart& chart, const Vec& y) {
    if (chart.m->dist(chart.base, y) >= chart.m->injectivity_radius())
        throw PointOutsideRadius("density_rho: point outside injectivity ball");
    return chart.m->density_rho(chart.base, y);
}

Mat theta_matrix(const NormalChart& chart, const Vec& y) {
    if (chart.m->dist(chart.base, y) >= chart.m->injectivity_radius())
        throw PointOutsideRadius("theta_matrix: point outside injectivity ball");
    return chart.m->theta(chart.base, y);
}

} // namespace normsym
