#include "normsym/quantize.hpp"

#include "sphere_engine.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <mutex>

namespace normsym {

// -------------------------------------------------------------------- Mesh

namespace {

void build_flat_modes(Mesh& mesh, const std::vector<int>& sizes,
                      const std::vector<double>& periods) {
    int d = (int)sizes.size();
    // kept modes: |k_i| <= n_i/2 - 1 (the unpaired Nyquist row is dropped)
    std::vector<std::vector<int>> klists(d);
    for (int i = 0; i < d; ++i) {
        int half = sizes[i] / 2 - 1;
        for (int k = -half; k <= half; ++k) klists[i].push_back(k);
    }
    std::vector<int> idx(d, 0);
    double vol = 1.0;
    for (double p : periods) vol *= p;
    std::function<void(int, Vec)> rec = [&](int axis, Vec kv) {
        if (axis == d) {
            mesh.mode_covectors.push_back(kv);
            return;
        }
        for (int k : klists[axis]) {
            Vec next = kv;
            next[axis] = 2 * pi * k / periods[axis];
            rec(axis + 1, next);
        }
    };
    rec(0, Vec::Zero(d));
    mesh.n_modes = (int)mesh.mode_covectors.size();
    double minny = 1e300;
    for (int i = 0; i < d; ++i) minny = std::min(minny, 2 * pi * (sizes[i] / 2 - 1) / periods[i]);
    mesh.nyquist = minny;

    mesh.volume = vol;
    int n_nodes = (int)mesh.nodes.size();
    mesh.synthesis.resize(n_nodes, mesh.n_modes);
    mesh.analysis.resize(mesh.n_modes, n_nodes);
    double norm = 1.0 / std::sqrt(vol);
    for (int j = 0; j < n_nodes; ++j)
        for (int q = 0; q < mesh.n_modes; ++q) {
            double ph = mesh.mode_covectors[q].dot(mesh.nodes[j]);
            cplx b = norm * std::exp(cplx(0, ph));
            mesh.synthesis(j, q) = b;
            mesh.analysis(q, j) = std::conj(b) * mesh.weights[j];
        }
}

} // namespace

// normalized associated Legendre values P-bar_l^m(x) for all l <= L at fixed m
void legendre_normalized(int L, int m, double x, std::vector<double>& out) {
    out.assign(L + 1, 0.0);
    if (m > L) return;
    double somx2 = std::sqrt(std::max(0.0, 1.0 - x * x));
    double pmm = 1.0 / std::sqrt(4.0 * pi);
    for (int k = 1; k <= m; ++k)
        pmm *= -std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * somx2;
    out[m] = pmm;
    if (m == L) return;
    double pmmp1 = std::sqrt(2.0 * m + 3.0) * x * pmm;
    out[m + 1] = pmmp1;
    for (int l = m + 2; l <= L; ++l) {
        double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
        double b = std::sqrt(((l - 1.0) * (l - 1.0) - double(m) * m) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
        out[l] = a * (x * out[l - 1] - b * out[l - 2]);
    }
}

cplx sphere_harmonic(int l, int m, const Vec& p) {
    // p is a unit vector; Y_l^m with Condon-Shortley, orthonormal on S^2(1)
    double ct = std::clamp(p[2], -1.0, 1.0);
    double phi = std::atan2(p[1], p[0]);
    int am = std::abs(m);
    std::vector<double> pl;
    legendre_normalized(l, am, ct, pl);
    cplx v = pl[l] * std::exp(cplx(0, am * phi));
    if (m < 0) v = std::conj(v) * ((am % 2) ? -1.0 : 1.0);
    return v;
}

Mesh make_mesh(std::shared_ptr<const Manifold> m, int n1, int n2) {
    Mesh mesh;
    mesh.m = m;
    switch (m->kind()) {
        case ManifoldKind::Circle: {
            double R = m->injectivity_radius() / pi;
            double C = 2 * pi * R;
            mesh.nodes.resize(n1);
            mesh.weights.resize(n1);
            for (int j = 0; j < n1; ++j) {
                Vec x(1);
                x << C * j / n1;
                mesh.nodes[j] = x;
                mesh.weights[j] = C / n1;
            }
            build_flat_modes(mesh, {n1}, {C});
            break;
        }
        case ManifoldKind::FlatTorus: {
            if (n2 == 0) n2 = n1;
            Vec P = TorusAccess::periods(*m);
            mesh.nodes.reserve((size_t)n1 * n2);
            mesh.weights.resize((Eigen::Index)n1 * n2);
            int idx = 0;
            for (int i = 0; i < n1; ++i)
                for (int j = 0; j < n2; ++j) {
                    Vec x(2);
                    x << P[0] * i / n1, P[1] * j / n2;
                    mesh.nodes.push_back(x);
                    mesh.weights[idx++] = (P[0] / n1) * (P[1] / n2);
                }
            build_flat_modes(mesh, {n1, n2}, {P[0], P[1]});
            break;
        }
        case ManifoldKind::Sphere2: {
            if (n2 == 0) n2 = 2 * n1;
            double R = m->injectivity_radius() / pi;
            std::vector<double> gx, gw;
            gauss_legendre(n1, -1.0, 1.0, gx, gw);
            mesh.nodes.reserve((size_t)n1 * n2);
            mesh.weights.resize((Eigen::Index)n1 * n2);
            int idx = 0;
            for (int i = 0; i < n1; ++i) {
                double ct = gx[i], st = std::sqrt(1 - ct * ct);
                for (int j = 0; j < n2; ++j) {
                    double phi = 2 * pi * j / n2;
                    Vec p(3);
                    p << st * std::cos(phi), st * std::sin(phi), ct;
                    mesh.nodes.push_back(p);
                    mesh.weights[idx++] = gw[i] * (2 * pi / n2) * R * R;
                }
            }
            mesh.volume = mesh.weights.sum();
            int L = n1 - 1;
            mesh.sphere_L = L;
            mesh.nyquist = L / R;
            for (int l = 0; l <= L; ++l)
                for (int mm = -l; mm <= l; ++mm) mesh.sphere_lm.push_back({l, mm});
            mesh.n_modes = (int)mesh.sphere_lm.size();
            int n_nodes = (int)mesh.nodes.size();
            mesh.synthesis.resize(n_nodes, mesh.n_modes);
            mesh.analysis.resize(mesh.n_modes, n_nodes);
            parallel_for(n_nodes, [&](int j) {
                const Vec& p = mesh.nodes[j];
                double ct = std::clamp(p[2], -1.0, 1.0);
                double phi = std::atan2(p[1], p[0]);
                std::vector<std::vector<double>> pl(L + 1);
                for (int mm = 0; mm <= L; ++mm) legendre_normalized(L, mm, ct, pl[mm]);
                for (int q = 0; q < mesh.n_modes; ++q) {
                    auto [l, mm] = mesh.sphere_lm[q];
                    int am = std::abs(mm);
                    cplx v = pl[am][l] * std::exp(cplx(0, am * phi));
                    if (mm < 0) v = std::conj(v) * ((am % 2) ? -1.0 : 1.0);
                    // orthonormal w.r.t. the radius-R surface measure
                    v /= R;
                    mesh.synthesis(j, q) = v;
                    mesh.analysis(q, j) = std::conj(v) * mesh.weights[j];
                }
            });
            break;
        }
        default: throw Error("make_mesh: unsupported manifold kind");
    }
    return mesh;
}

Mesh default_mesh(std::shared_ptr<const Manifold> m) {
    switch (m->kind()) {
        case ManifoldKind::Circle: return make_mesh(m, 256);
        case ManifoldKind::FlatTorus: return make_mesh(m, 64, 64);
        case ManifoldKind::Sphere2: return make_mesh(m, 48, 96);
        default: throw Error("default_mesh: unsupported manifold kind");
    }
}

cplx Mesh::basis_at(int mode, const Vec& x) const {
    if (m->kind() == ManifoldKind::Sphere2) {
        auto [l, mm] = sphere_lm[mode];
        double R = m->injectivity_radius() / pi;
        return sphere_harmonic(l, mm, x) / R;
    }
    return std::exp(cplx(0, mode_covectors[mode].dot(x))) / std::sqrt(volume);
}

CVec Mesh::basis_row(const Vec& x) const {
    CVec out(n_modes);
    if (m->kind() == ManifoldKind::Sphere2) {
        double R = m->injectivity_radius() / pi;
        int L = sphere_L;
        double ct = std::clamp(x[2], -1.0, 1.0);
        double phi = std::atan2(x[1], x[0]);
        std::vector<std::vector<double>> pl(L + 1);
        for (int mm = 0; mm <= L; ++mm) legendre_normalized(L, mm, ct, pl[mm]);
        for (int q = 0; q < n_modes; ++q) {
            auto [l, mm] = sphere_lm[q];
            int am = std::abs(mm);
            cplx v = pl[am][l] * std::exp(cplx(0, am * phi));
            if (mm < 0) v = std::conj(v) * ((am % 2) ? -1.0 : 1.0);
            out[q] = v / R;
        }
        return out;
    }
    double norm = 1.0 / std::sqrt(volume);
    for (int q = 0; q < n_modes; ++q)
        out[q] = norm * std::exp(cplx(0, mode_covectors[q].dot(x)));
    return out;
}

cplx Mesh::synth_at(const CVec& mode_coeffs, const Vec& x) const {
    return basis_row(x).transpose() * mode_coeffs;
}

cplx Mesh::dot(const CVec& f, const CVec& g) const {
    cplx acc = 0.0;
    for (int j = 0; j < weights.size(); ++j) acc += weights[j] * f[j] * std::conj(g[j]);
    return acc;
}

// ------------------------------------------------------------ tangent grids

TangentGrid make_tangent_grid(int d, double radius, int n_radial, int n_angular) {
    TangentGrid g;
    g.d = d;
    if (d == 1) {
        std::vector<double> x, w;
        gauss_legendre(n_radial, -radius, radius, x, w);
        for (int i = 0; i < n_radial; ++i) {
            Vec v(1);
            v << x[i];
            g.points.push_back(v);
            g.weights.push_back(w[i]);
        }
        return g;
    }
    std::vector<double> rx, rw;
    gauss_legendre(n_radial, 0.0, radius, rx, rw);
    for (int i = 0; i < n_radial; ++i)
        for (int j = 0; j < n_angular; ++j) {
            double th = 2 * pi * j / n_angular;
            Vec v(2);
            v << rx[i] * std::cos(th), rx[i] * std::sin(th);
            g.points.push_back(v);
            g.weights.push_back(rw[i] * rx[i] * (2 * pi / n_angular));
        }
    return g;
}

LiftSamples microlocal_lift(const GridField& f, const Vec& x, const Cutoff& psi) {
    const Mesh& mesh = *f.mesh;
    const Manifold& M = *mesh.m;
    double inj = M.injectivity_radius();
    double radius = psi.outer_fraction * inj;
    int d = M.dim();
    LiftSamples out;
    out.grid = make_tangent_grid(d, radius, d == 1 ? 64 : 32, d == 1 ? 1 : 64);
    // synthesize f at exponential points from its band-limited coefficients
    CVec coef = mesh.analysis * f.values;
    out.values.resize((Eigen::Index)out.grid.points.size());
    for (size_t q = 0; q < out.grid.points.size(); ++q) {
        double s = out.grid.points[q].norm();
        double w = psi.psi(s, inj);
        if (w == 0.0) {
            out.values[(Eigen::Index)q] = 0.0;
            continue;
        }
        Vec y = M.exp(x, out.grid.points[q]);
        out.values[(Eigen::Index)q] = w * mesh.synth_at(coef, y);
    }
    return out;
}

CVec fiber_fourier(const TangentGrid& vgrid, const CVec& gvals, const TangentGrid& xigrid) {
    int d = vgrid.d;
    double norm = std::pow(2 * pi, -d / 2.0);
    CVec out((Eigen::Index)xigrid.points.size());
    for (size_t p = 0; p < xigrid.points.size(); ++p) {
        cplx acc = 0.0;
        for (size_t q = 0; q < vgrid.points.size(); ++q) {
            double ph = xigrid.points[p].dot(vgrid.points[q]);
            acc += vgrid.weights[q] * gvals[(Eigen::Index)q] * std::exp(cplx(0, -ph));
        }
        out[(Eigen::Index)p] = norm * acc;
    }
    return out;
}

CVec fiber_fourier_inverse(const TangentGrid& xigrid, const CVec& ghat, const TangentGrid& vgrid) {
    int d = xigrid.d;
    double norm = std::pow(2 * pi, -d / 2.0);
    CVec out((Eigen::Index)vgrid.points.size());
    for (size_t q = 0; q < vgrid.points.size(); ++q) {
        cplx acc = 0.0;
        for (size_t p = 0; p < xigrid.points.size(); ++p) {
            double ph = xigrid.points[p].dot(vgrid.points[q]);
            acc += xigrid.weights[p] * ghat[(Eigen::Index)p] * std::exp(cplx(0, ph));
        }
        out[(Eigen::Index)q] = norm * acc;
    }
    return out;
}

// -------------------------------------------------------------- operators

CMat SpectralOperator::to_matrix() const {
    int n = (int)mesh_->nodes.size();
    CMat out(n, n);
    for (int j = 0; j < n; ++j) {
        CVec e = CVec::Zero(n);
        e[j] = 1.0;
        FieldSpec fs;
        fs.node_values = e;
        out.col(j) = apply(fs);
    }
    return out;
}

namespace {

// ------------------------------------------------------------- FactoredOp

// flat kinds: A f = sum_k c(x, k) fhat_k e_k(x), with c supplied per mode
CVec field_modes(const Mesh& mesh, const FieldSpec& f) {
    if (f.exact_modes.size() > 0) return f.exact_modes;
    return mesh.analysis * f.node_values;
}

class FactoredOp final : public SpectralOperator {
  public:
    FactoredOp(const Mesh* mesh, std::string prov, std::function<cplx(const Vec&, int)> coef,
               Symbol sym = Symbol(), Cutoff psi = Cutoff())
        : SpectralOperator(mesh), prov_(std::move(prov)), coef_(std::move(coef)),
          sym_(std::move(sym)), psi_(psi) {}

    CVec apply(const FieldSpec& f) const override { return grid() * field_modes(*mesh_, f); }

    cplx apply_at(const FieldSpec& f, const Vec& x) const override {
        // exact fields carry content beyond the mesh band: evaluate the fiber
        // integral over the continuous cotangent fiber instead of the basis sum
        if (f.exact && sym_.valid()) return flat_fiber_value(*mesh_, sym_, psi_, f, x);
        CVec md = field_modes(*mesh_, f);
        CVec row = mesh_->basis_row(x);
        cplx acc = 0.0;
        for (int q = 0; q < mesh_->n_modes; ++q) acc += coef_(x, q) * row[q] * md[q];
        return acc;
    }

    std::string provenance() const override { return prov_; }

  private:
    std::string prov_;
    std::function<cplx(const Vec&, int)> coef_;
    Symbol sym_;
    Cutoff psi_;
    mutable std::mutex gmx_;
    mutable CMat G_;

    const CMat& grid() const {
        std::lock_guard<std::mutex> lk(gmx_);
        if (G_.rows() == 0) {
            int n = (int)mesh_->nodes.size();
            G_.resize(n, mesh_->n_modes);
            parallel_for(n, [&](int j) {
                for (int q = 0; q < mesh_->n_modes; ++q)
                    G_(j, q) = coef_(mesh_->nodes[j], q) * mesh_->synthesis(j, q);
            });
        }
        return G_;
    }
};

// generic matrix-free operator defined by per-node application
class NodeOp final : public SpectralOperator {
  public:
    using NodeFn = std::function<cplx(const FieldSpec&, const Vec&)>;
    NodeOp(const Mesh* mesh, std::string prov, NodeFn fn)
        : SpectralOperator(mesh), prov_(std::move(prov)), fn_(std::move(fn)) {}

    CVec apply(const FieldSpec& f) const override {
        int n = (int)mesh_->nodes.size();
        CVec out(n);
        parallel_for(n, [&](int j) { out[j] = fn_(f, mesh_->nodes[j]); });
        return out;
    }
    cplx apply_at(const FieldSpec& f, const Vec& x) const override { return fn_(f, x); }
    std::string provenance() const override { return prov_; }

  private:
    std::string prov_;
    NodeFn fn_;
};

class ComposedOp final : public SpectralOperator {
  public:
    ComposedOp(OpPtr outer, OpPtr inner)
        : SpectralOperator(&inner->mesh()), outer_(std::move(outer)), inner_(std::move(inner)) {}

    CVec apply(const FieldSpec& f) const override {
        FieldSpec mid;
        mid.node_values = inner_->apply(f);
        return outer_->apply(mid);
    }
    cplx apply_at(const FieldSpec& f, const Vec& x) const override {
        FieldSpec mid;
        mid.node_values = inner_->apply(f);
        return outer_->apply_at(mid, x);
    }
    std::string provenance() const override {
        return "composed(" + outer_->provenance() + ", " + inner_->provenance() + ")";
    }

  private:
    OpPtr outer_, inner_;
};

class IdentityOp final : public SpectralOperator {
  public:
    explicit IdentityOp(const Mesh* mesh) : SpectralOperator(mesh) {}
    CVec apply(const FieldSpec& f) const override { return f.node_values; }
    cplx apply_at(const FieldSpec& f, const Vec& x) const override {
        if (f.exact) return f.exact(x);
        return mesh_->synth_at(mesh_->analysis * f.node_values, x);
    }
    std::string provenance() const override { return "identity"; }
};

// true when the symbol is polynomial in zeta (exact differential path)
const PolynomialData* poly_of(const Symbol& a) { return polynomial_data(a); }

// window transform hat psi for flat quantization; cached per (cutoff, inj, d)
struct WindowFT {
    double inj;
    Cutoff psi;
    int d;

    // 1d: int psi(|v|) e^{-i eta v} dv ; 2d radial: 2 pi int psi(r) J0(s r) r dr
    double operator()(double s) const {
        double rout = psi.outer_fraction * inj;
        int n = 400;
        std::vector<double> x, w;
        if (d == 1) {
            gauss_legendre(n, -rout, rout, x, w);
            double acc = 0;
            for (int i = 0; i < n; ++i) acc += w[i] * psi.psi(x[i], inj) * std::cos(s * x[i]);
            return acc;
        }
        gauss_legendre(n, 0.0, rout, x, w);
        double acc = 0;
        for (int i = 0; i < n; ++i)
            acc += w[i] * x[i] * psi.psi(x[i], inj) * std::cyl_bessel_j(0, s * x[i]);
        return 2 * pi * acc;
    }
};

} // namespace

OpPtr quantize(const Symbol& a, const Mesh& mesh, const Cutoff& psi) {
    const Manifold& M = *mesh.m;
    if (a.rows() != 1 || a.cols() != 1)
        throw ResolutionInsufficient("quantize: scalar symbols only");

    if (M.kind() == ManifoldKind::Sphere2)
        return make_sphere_quantize_op(a, mesh, psi);

    // flat kinds
    if (poly_of(a) || a.meta() == SymbolMeta::Polynomial) {
        // exact differential-operator path: c(x, k) = a(x, zeta_k)
        auto coef = [a, &mesh](const Vec& x, int q) {
            return a.eval(x, mesh.mode_covectors[q])(0, 0);
        };
        return std::make_shared<FactoredOp>(
            &mesh, "quantized(poly " + std::to_string(a.sclass().order) + ")", coef, a, psi);
    }

    // constant symbols are degree-zero polynomials: exact path
    {
        Rng rng(17);
        bool constant = true;
        Vec z0(M.dim());
        for (int k = 0; k < M.dim(); ++k) z0[k] = 0.7 + 0.3 * k;
        cplx v0 = a.eval(M.random_point(rng), z0)(0, 0);
        for (int i = 0; i < 6 && constant; ++i) {
            Vec x = M.random_point(rng);
            Vec z(M.dim());
            for (int k = 0; k < M.dim(); ++k) z[k] = rng.uniform(-8.0, 8.0);
            if (std::abs(a.eval(x, z)(0, 0) - v0) > 1e-14 * (1.0 + std::abs(v0)))
                constant = false;
        }
        if (constant) {
            auto cf = [v0](const Vec&, int) { return v0; };
            return std::make_shared<FactoredOp>(&mesh, "quantized(const)", cf, a, psi);
        }
    }

    // windowed quadrature path
    int d = M.dim();
    double inj = M.injectivity_radius();
    WindowFT wft{inj, psi, d};
    double H = 60.0; // hat psi support for the eta integral, superpolynomially small beyond
    if (d == 1) {
        int n = 240;
        auto xw = std::make_shared<std::pair<std::vector<double>, std::vector<double>>>();
        gauss_legendre(n, -H, H, xw->first, xw->second);
        auto ft = std::make_shared<std::vector<double>>(n);
        for (int i = 0; i < n; ++i) (*ft)[i] = wft(xw->first[i]);
        bool posfree = a.impl().is_radial();
        auto coef = [a, xw, ft, n, posfree, &mesh](const Vec& x, int q) {
            const Vec& zk = mesh.mode_covectors[q];
            cplx acc = 0.0;
            Vec zz(1);
            for (int i = 0; i < n; ++i) {
                zz[0] = zk[0] + xw->first[i];
                acc += xw->second[i] * (*ft)[i] * a.eval(x, zz)(0, 0);
            }
            return acc / (2 * pi);
        };
        if (posfree) {
            // cache one row of coefficients
            auto cache = std::make_shared<std::vector<cplx>>(mesh.n_modes);
            Vec x0 = mesh.nodes[0];
            for (int q = 0; q < mesh.n_modes; ++q) (*cache)[q] = coef(x0, q);
            auto cf = [cache](const Vec&, int q) { return (*cache)[q]; };
            return std::make_shared<FactoredOp>(&mesh, "quantized", cf, a, psi);
        }
        return std::make_shared<FactoredOp>(&mesh, "quantized", coef, a, psi);
    }

    // d == 2 torus: polar eta quadrature
    int n_s = 28, n_phi = 24;
    auto sq = std::make_shared<std::pair<std::vector<double>, std::vector<double>>>();
    gauss_legendre(n_s, 0.0, H, sq->first, sq->second);
    auto ftr = std::make_shared<std::vector<double>>(n_s);
    for (int i = 0; i < n_s; ++i) (*ftr)[i] = wft(sq->first[i]);
    bool posfree = a.impl().is_radial();
    auto coef = [a, sq, ftr, n_s, n_phi, &mesh](const Vec& x, int q) {
        const Vec& zk = mesh.mode_covectors[q];
        cplx acc = 0.0;
        Vec zz(2);
        for (int i = 0; i < n_s; ++i) {
            double s = sq->first[i];
            cplx ring = 0.0;
            for (int j = 0; j < n_phi; ++j) {
                double th = 2 * pi * j / n_phi;
                zz[0] = zk[0] + s * std::cos(th);
                zz[1] = zk[1] + s * std::sin(th);
                ring += a.eval(x, zz)(0, 0);
            }
            acc += sq->second[i] * s * (*ftr)[i] * ring * (2 * pi / n_phi);
        }
        return acc / std::pow(2 * pi, 2);
    };
    if (posfree) {
        auto cache = std::make_shared<std::vector<cplx>>(mesh.n_modes);
        Vec x0 = mesh.nodes[0];
        for (int q = 0; q < mesh.n_modes; ++q) (*cache)[q] = coef(x0, q);
        auto cf = [cache](const Vec&, int q) { return (*cache)[q]; };
        return std::make_shared<FactoredOp>(&mesh, "quantized", cf, a, psi);
    }
    return std::make_shared<FactoredOp>(&mesh, "quantized", coef, a, psi);
}

OpPtr adjoint_quantize(const Symbol& a, const Mesh& mesh, const Cutoff& psi) {
    const Manifold& M = *mesh.m;
    if (a.rows() != 1 || a.cols() != 1)
        throw ResolutionInsufficient("adjoint_quantize: scalar symbols only");

    // position-only symbols: multiplication by the conjugate
    bool position_only = true;
    {
        Rng rng(99);
        for (int i = 0; i < 8 && position_only; ++i) {
            Vec x = M.random_point(rng);
            Vec z1(M.dim()), z2(M.dim());
            for (int k = 0; k < M.dim(); ++k) {
                z1[k] = rng.uniform(-3.0, 3.0);
                z2[k] = rng.uniform(-3.0, 3.0);
            }
            if (std::abs(a.eval(x, z1)(0, 0) - a.eval(x, z2)(0, 0)) > 1e-13) position_only = false;
        }
    }
    if (position_only) {
        auto node_fn = [&mesh, a](const FieldSpec& f, const Vec& x) -> cplx {
            // evaluate f at x (band-limited) times conj(a(x))
            cplx fv = f.exact ? f.exact(x) : mesh.synth_at(mesh.analysis * f.node_values, x);
            return std::conj(a.eval(x, Vec::Zero(mesh.m->dim()))(0, 0)) * fv;
        };
        return std::make_shared<NodeOp>(&mesh, "adjoint(position-only)", node_fn);
    }

    if (const PolynomialData* pd = poly_of(a)) {
        // exact formal adjoint of the differential operator:
        // A* g = sum_alpha (-i d)^alpha (conj(c_alpha) g)
        auto coeffs = std::make_shared<PolynomialData>(*pd);
        auto apply_fn = [coeffs, &mesh](const CVec& g) {
            int n = (int)mesh.nodes.size();
            CVec acc = CVec::Zero(n);
            for (const auto& [alpha, c] : coeffs->coeffs) {
                CVec prod(n);
                for (int j = 0; j < n; ++j)
                    prod[j] = std::conj(cplx(c.eval_real(mesh.nodes[j], Vec()), 0.0)) * g[j];
                CVec md = mesh.analysis * prod;
                for (int q = 0; q < mesh.n_modes; ++q) {
                    double mono = 1.0;
                    for (size_t i = 0; i < alpha.size(); ++i)
                        for (int j2 = 0; j2 < alpha[i]; ++j2) mono *= mesh.mode_covectors[q][i];
                    md[q] *= mono;
                }
                acc += mesh.synthesis * md;
            }
            return acc;
        };

        // wrap: full apply via apply_fn directly (cheap), pointwise via synthesis
        class PolyAdjointOp final : public SpectralOperator {
          public:
            PolyAdjointOp(const Mesh* mesh, std::function<CVec(const CVec&)> ap)
                : SpectralOperator(mesh), ap_(std::move(ap)) {}
            CVec apply(const FieldSpec& f) const override { return ap_(f.node_values); }
            cplx apply_at(const FieldSpec& f, const Vec& x) const override {
                return mesh_->synth_at(mesh_->analysis * ap_(f.node_values), x);
            }
            std::string provenance() const override { return "adjoint(poly)"; }

          private:
            std::function<CVec(const CVec&)> ap_;
        };
        return std::make_shared<PolyAdjointOp>(&mesh, apply_fn);
    }

    if (M.kind() == ManifoldKind::Circle) {
        // honest iterated integral: A* g(x) = (2pi)^{-1} int dxi int dv
        //   e^{-i xi v} conj(a(x+v, xi)) psi(v) g(x+v) dv  (flat: rho = 1)
        double inj = M.injectivity_radius();
        double rout = psi.outer_fraction * inj;
        int n_v = 380, n_s = 260;
        auto vg = std::make_shared<std::pair<std::vector<double>, std::vector<double>>>();
        gauss_legendre(n_v, -rout, rout, vg->first, vg->second);
        double S = mesh.nyquist + 45.0;
        auto sg = std::make_shared<std::pair<std::vector<double>, std::vector<double>>>();
        gauss_legendre(n_s, -S, S, sg->first, sg->second);
        Cutoff psc = psi;
        auto node_fn = [a, vg, sg, n_v, n_s, psc, inj, &mesh](const FieldSpec& f,
                                                              const Vec& x) -> cplx {
            // g at x+v by band-limited synthesis (or the exact closure)
            CVec md;
            if (!f.exact) md = mesh.analysis * f.node_values;
            auto geval = [&](double v) -> cplx {
                Vec vv(1);
                vv << v;
                Vec y = mesh.m->exp(x, vv);
                if (f.exact) return f.exact(y);
                return mesh.synth_at(md, y);
            };
            std::vector<cplx> gv(n_v);
            std::vector<double> pv(n_v);
            for (int i = 0; i < n_v; ++i) {
                pv[i] = psc.psi(vg->first[i], inj);
                gv[i] = pv[i] != 0.0 ? geval(vg->first[i]) : 0.0;
            }
            cplx acc = 0.0;
            Vec zz(1);
            for (int p = 0; p < n_s; ++p) {
                double xi = sg->first[p];
                cplx inner = 0.0;
                for (int i = 0; i < n_v; ++i) {
                    if (pv[i] == 0.0) continue;
                    double v = vg->first[i];
                    Vec vv(1);
                    vv << v;
                    Vec y = mesh.m->exp(x, vv);
                    zz[0] = xi;
                    inner += vg->second[i] * pv[i] * std::conj(a.eval(y, zz)(0, 0)) * gv[i] *
                             std::exp(cplx(0, -xi * v));
                }
                acc += sg->second[p] * inner;
            }
            return acc / (2 * pi);
        };
        return std::make_shared<NodeOp>(&mesh, "adjoint(quadrature)", node_fn);
    }

    throw ResolutionInsufficient(
        "adjoint_quantize: general symbols supported on Circle only; use polynomial or "
        "position-only symbols elsewhere");
}

OpPtr compose(OpPtr outer, OpPtr inner) {
    return std::make_shared<ComposedOp>(std::move(outer), std::move(inner));
}

OpPtr identity_op(const Mesh& mesh) { return std::make_shared<IdentityOp>(&mesh); }

FieldSpec plane_wave_field(const Mesh& mesh, const Covector& xi, const Cutoff& psi) {
    const Manifold& M = *mesh.m;
    double inj = M.injectivity_radius();
    auto Mptr = mesh.m;
    Vec x = xi.x;
    Vec zeta = xi.zeta;
    Cutoff ps = psi;
    auto exact = [Mptr, x, zeta, ps, inj](const Vec& y) -> cplx {
        Vec z;
        try {
            z = Mptr->log(x, y);
        } catch (const PointOutsideRadius&) {
            return 0.0;
        }
        double w = ps.psi(z.norm(), inj);
        if (w == 0.0) return 0.0;
        return w * std::exp(cplx(0, zeta.dot(z)));
    };
    FieldSpec fs;
    fs.exact = exact;
    int n = (int)mesh.nodes.size();
    fs.node_values.resize(n);
    for (int j = 0; j < n; ++j) fs.node_values[j] = exact(mesh.nodes[j]);
    // lift angular bandwidth and radial frequency bounds for the sphere engine
    fs.band_hint = (int)std::ceil(zeta.norm() * psi.outer_fraction * inj) + 6;
    fs.freq_hint = (int)std::ceil(zeta.norm()) + 25;

    // alias-free window coefficients on flat kinds:
    //   circle: what(k) = int psi(v) e^{i(zeta-k)v} dv
    //   torus:  what(k) = 2 pi int psi(r) J0(|k - zeta| r) r dr
    if (M.kind() != ManifoldKind::Sphere2) {
        double rout = psi.outer_fraction * inj;
        double vol = mesh.volume;
        fs.exact_modes.resize(mesh.n_modes);
        if (M.dim() == 1) {
            int nq = 520;
            std::vector<double> qx, qw;
            gauss_legendre(nq, -rout, rout, qx, qw);
            std::vector<double> pv(nq);
            for (int i = 0; i < nq; ++i) pv[i] = psi.psi(qx[i], inj);
            for (int q = 0; q < mesh.n_modes; ++q) {
                double dk = zeta[0] - mesh.mode_covectors[q][0];
                cplx acc = 0.0;
                for (int i = 0; i < nq; ++i) acc += qw[i] * pv[i] * std::exp(cplx(0, dk * qx[i]));
                // coefficient against the orthonormal basis e^{ikx}/sqrt(vol),
                // with the plane wave centred at x
                fs.exact_modes[q] = acc / std::sqrt(vol) *
                                    std::exp(cplx(0, -mesh.mode_covectors[q].dot(x)));
            }
        } else {
            int nq = 420;
            std::vector<double> qx, qw;
            gauss_legendre(nq, 0.0, rout, qx, qw);
            std::vector<double> pv(nq);
            for (int i = 0; i < nq; ++i) pv[i] = psi.psi(qx[i], inj);
            std::vector<double> j0;
            for (int q = 0; q < mesh.n_modes; ++q) {
                double s = (zeta - mesh.mode_covectors[q]).norm();
                double acc = 0.0;
                for (int i = 0; i < nq; ++i) {
                    bessel_j_array(0, s * qx[i], j0);
                    acc += qw[i] * qx[i] * pv[i] * j0[0];
                }
                fs.exact_modes[q] = 2 * pi * acc / std::sqrt(vol) *
                                    std::exp(cplx(0, -mesh.mode_covectors[q].dot(x)));
            }
        }
    }
    return fs;
}

CMat extract_symbol(const SpectralOperator& A, const Covector& xi, const Cutoff& psi) {
    const Mesh& mesh = A.mesh();
    if (xi.zeta.norm() > mesh.nyquist)
        throw NyquistExceeded("extract_symbol: |zeta| beyond the mesh band");
    FieldSpec w = plane_wave_field(mesh, xi, psi);
    cplx v = A.apply_at(w, xi.x);
    CMat out(1, 1);
    out(0, 0) = v;
    return out;
}

// ---------------------------------------------------------------------- io

void write_matrix_binary(const std::string& path, const CMat& m) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("write_matrix_binary: cannot open " + path);
    const char magic[4] = {'N', 'S', 'B', '1'};
    uint32_t rows = (uint32_t)m.rows(), cols = (uint32_t)m.cols(), dtype = 1;
    f.write(magic, 4);
    f.write(reinterpret_cast<const char*>(&rows), 4);
    f.write(reinterpret_cast<const char*>(&cols), 4);
    f.write(reinterpret_cast<const char*>(&dtype), 4);
    for (uint32_t r = 0; r < rows; ++r)
        for (uint32_t c = 0; c < cols; ++c) {
            double re = m(r, c).real(), im = m(r, c).imag();
            f.write(reinterpret_cast<const char*>(&re), 8);
            f.write(reinterpret_cast<const char*>(&im), 8);
        }
}

CMat read_matrix_binary(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("read_matrix_binary: cannot open " + path);
    char magic[4];
    uint32_t rows, cols, dtype;
    f.read(magic, 4);
    if (std::memcmp(magic, "NSB1", 4) != 0) throw Error("read_matrix_binary: bad magic");
    f.read(reinterpret_cast<char*>(&rows), 4);
    f.read(reinterpret_cast<char*>(&cols), 4);
    f.read(reinterpret_cast<char*>(&dtype), 4);
    if (dtype != 1) throw Error("read_matrix_binary: unsupported dtype");
    CMat m(rows, cols);
    for (uint32_t r = 0; r < rows; ++r)
        for (uint32_t c = 0; c < cols; ++c) {
            double re, im;
            f.read(reinterpret_cast<char*>(&re), 8);
            f.read(reinterpret_cast<char*>(&im), 8);
            m(r, c) = cplx(re, im);
        }
    return m;
}

void write_matrix_csv(const std::string& path, const CMat& m) {
    std::ofstream f(path);
    if (!f) throw Error("write_matrix_csv: cannot open " + path);
    f << "row,col,re,im\n";
    char buf[128];
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) {
            std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g\n", r, c, m(r, c).real(),
                          m(r, c).imag());
            f << buf;
        }
}

} // namespace normsym
