#pragma once

#include "normsym/errors.hpp"
#include "normsym/util.hpp"

#include <functional>
#include <memory>
#include <string>

namespace normsym {

// Curvature components in an orthonormal frame at a point.
// r(k,m,l,n) stores R^k_{mln} defined by R(e_l, e_n) e_m = sum_k R^k_{mln} e_k,
// so the tensor is antisymmetric in (l,n). ric(k,l) = sum_j R^j_{kjl}.
struct CurvatureData {
    int d = 0;
    std::vector<double> riemann; // d^4, layout k*d^3 + m*d^2 + l*d + n
    Mat ricci;

    double r(int k, int m, int l, int n) const { return riemann[((k * d + m) * d + l) * d + n]; }
    double& r(int k, int m, int l, int n) { return riemann[((k * d + m) * d + l) * d + n]; }
};

// Smooth cut-off on TX: psi == 1 for |v| <= inner_fraction * inj,
// psi == 0 for |v| >= outer_fraction * inj, with a C^infinity transition built
// from the standard exp(-1/t) partition.
struct Cutoff {
    double inner_fraction = 0.45;
    double outer_fraction = 0.9;

    Cutoff() = default;
    Cutoff(double in, double out) : inner_fraction(in), outer_fraction(out) {
        if (!(in > 0 && in < out && out <= 1.0)) throw Error("Cutoff: need 0 < inner < outer <= 1");
    }

    // value at g-norm s, for a manifold with the given injectivity radius
    double psi(double s, double inj) const;
    // excision weight: 0 near 0, 1 beyond t >= 1 (used by asymptotic sums)
    static double excision(double t);
};

enum class ManifoldKind { Circle, FlatTorus, Sphere2, GenericChart };

// Riemannian kernel. Points are chart/embedding coordinate vectors (circle:
// arc length, torus: chart coords, sphere: unit 3-vector, generic: chart).
// All tangent/cotangent components refer to the canonical orthonormal frame
// the manifold carries at each point (arc-length, coordinate, transported
// polar, or Gram-Schmidt of the coordinate frame respectively).
class Manifold {
  public:
    virtual ~Manifold() = default;

    virtual ManifoldKind kind() const = 0;
    virtual int dim() const = 0;
    virtual int point_dim() const { return dim(); }
    virtual double injectivity_radius() const = 0;
    virtual bool is_flat() const { return false; }
    virtual std::string name() const = 0;

    // exp_x(sum v^k e_k(x)); throws VectorOutsideRadius for |v| >= injectivity radius
    virtual Vec exp(const Vec& x, const Vec& v) const = 0;
    // frame components of exp_x^{-1}(y); throws PointOutsideRadius
    virtual Vec log(const Vec& x, const Vec& y) const = 0;

    // canonical-frame components at exp_x(v) of the parallel transport of w
    virtual Vec transport(const Vec& x, const Vec& v, const Vec& w) const;

    // columns = canonical-frame components at exp_x(v) of tau(e_k(x));
    // orthogonal matrix, identity on flat kinds
    virtual Mat transport_frame(const Vec& x, const Vec& v) const = 0;

    virtual CurvatureData curvature(const Vec& x) const = 0;

    // Jacobian density of exp_x at v = log_x(y)
    virtual double density_rho(const Vec& x, const Vec& y) const = 0;

    // theta matrix in the x-transported frame at y: column k holds the
    // components of T_v exp_x(e_k); |det theta| = density_rho
    virtual Mat theta(const Vec& x, const Vec& y) const = 0;

    double dist(const Vec& x, const Vec& y) const;
    virtual Vec random_point(Rng& rng) const = 0;
};

std::shared_ptr<const Manifold> make_circle(double radius = 1.0);
std::shared_ptr<const Manifold> make_flat_torus(const Vec& periods);
std::shared_ptr<const Manifold> make_flat_torus_2d(double p1 = 2 * pi, double p2 = 2 * pi);
std::shared_ptr<const Manifold> make_sphere2(double radius = 1.0);

using MetricFn = std::function<Mat(const Vec&)>;
std::shared_ptr<const Manifold> make_generic_chart(int dim, MetricFn metric, Vec lo, Vec hi,
                                                   double injectivity_radius);
// chart description {dim, bounds, metric: matrix of expression strings}
std::shared_ptr<const Manifold> make_generic_chart_from_json(const std::string& json_text);

// FlatTorus extras (safe to call only on FlatTorus)
struct TorusAccess {
    static Vec periods(const Manifold& m);
};

// Sphere2 extras used by the jet machinery (safe to call only on Sphere2)
struct SphereAccess {
    static double radius(const Manifold& m);
    // canonical (transported polar) frame at unit point p: two unit tangents
    static void canonical_frame(const Vec& p, Vec& e1, Vec& e2);
};

// ------------------------------------------------------------- NormalChart

// Chart of normal coordinates at `base` with an orthonormal frame given as a
// matrix whose columns are canonical-frame components of the chart frame
// (identity = canonical frame itself).
struct NormalChart {
    std::shared_ptr<const Manifold> m;
    Vec base;
    Mat frame;
    double radius;

    NormalChart(std::shared_ptr<const Manifold> man, Vec b)
        : m(std::move(man)), base(std::move(b)), frame(Mat::Identity(m->dim(), m->dim())),
          radius(m->injectivity_radius()) {}
    NormalChart(std::shared_ptr<const Manifold> man, Vec b, Mat f, double r)
        : m(std::move(man)), base(std::move(b)), frame(std::move(f)), radius(r) {}
};

// spec operations on charts
Vec exp_map(const NormalChart& chart, const Vec& v);
Vec log_map(const NormalChart& chart, const Vec& y);
Vec parallel_transport(const NormalChart& chart, const Vec& v, const Vec& w);
CurvatureData curvature(const NormalChart& chart);
double density_rho(const NormalChart& chart, const Vec& y);
Mat theta_matrix(const NormalChart& chart, const Vec& y);

} // namespace normsym
