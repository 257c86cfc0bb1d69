#pragma once

#include "normsym/geometry.hpp"
#include "normsym/symbol.hpp"

#include <functional>
#include <memory>
#include <string>

namespace normsym {

// ------------------------------------------------------------------- meshes

// Quadrature mesh with a band-limited spectral basis: uniform nodes and
// Fourier modes on Circle/FlatTorus, Gauss-Legendre x uniform longitudes with
// spherical harmonics on Sphere2. The quadrature integrates products of basis
// functions exactly within the band.
struct Mesh {
    std::shared_ptr<const Manifold> m;
    std::vector<Vec> nodes;
    Vec weights;

    int n_modes = 0;
    std::vector<Vec> mode_covectors; // flat kinds: canonical-frame covector per mode
    std::vector<std::pair<int, int>> sphere_lm;
    int sphere_L = 0;
    double nyquist = 0.0;

    CMat synthesis; // nodes x modes: basis values
    CMat analysis;  // modes x nodes: weighted conjugate basis

    double volume = 0.0;

    cplx basis_at(int mode, const Vec& x) const;
    // all basis values at a point in one pass (batched Legendre on the sphere)
    CVec basis_row(const Vec& x) const;
    // band-limited evaluation of mode coefficients at an arbitrary point
    cplx synth_at(const CVec& mode_coeffs, const Vec& x) const;

    // inner product of node-value vectors under the quadrature weights
    cplx dot(const CVec& f, const CVec& g) const;
};

Mesh make_mesh(std::shared_ptr<const Manifold> m, int n1, int n2 = 0);
// spec defaults: Circle 256, FlatTorus 64x64, Sphere2 48x96
Mesh default_mesh(std::shared_ptr<const Manifold> m);

struct GridField {
    const Mesh* mesh = nullptr;
    CVec values;
};

// ------------------------------------------------------------ tangent grids

// radial-angular quadrature grid on T_xX (an interval for d = 1)
struct TangentGrid {
    int d = 1;
    std::vector<Vec> points;
    std::vector<double> weights;
};

TangentGrid make_tangent_grid(int d, double radius, int n_radial, int n_angular);

// point samples of the microlocal lift v -> psi(v) tau^{-1} f(exp_x v)
struct LiftSamples {
    TangentGrid grid;
    CVec values;
};

LiftSamples microlocal_lift(const GridField& f, const Vec& x, const Cutoff& psi);

// fiber Fourier transform between tangent and cotangent sample grids,
// normalized with (2 pi)^{-d/2}
CVec fiber_fourier(const TangentGrid& vgrid, const CVec& gvals, const TangentGrid& xigrid);
CVec fiber_fourier_inverse(const TangentGrid& xigrid, const CVec& ghat, const TangentGrid& vgrid);

// ---------------------------------------------------------------- operators

// A field with optional exact off-grid evaluator (plane waves and other
// closed-form fields avoid the band-limit interpolation entirely).
struct FieldSpec {
    CVec node_values;
    std::function<cplx(const Vec&)> exact;
    // alias-free spectral coefficients (windowed plane waves carry genuine
    // content beyond the mesh band; sampling would fold it back in)
    CVec exact_modes;
    int band_hint = -1; // lift angular bandwidth bound, -1 = mesh band
    int freq_hint = -1; // radial frequency bound of the field, -1 = mesh band
};

class SpectralOperator {
  public:
    virtual ~SpectralOperator() = default;

    virtual CVec apply(const FieldSpec& f) const = 0;
    virtual cplx apply_at(const FieldSpec& f, const Vec& x) const = 0;
    virtual std::string provenance() const = 0;
    const Mesh& mesh() const { return *mesh_; }

    CVec apply_values(const CVec& v) const {
        FieldSpec fs;
        fs.node_values = v;
        return apply(fs);
    }
    // dense matrix on node values (column-by-column application)
    CMat to_matrix() const;

  protected:
    explicit SpectralOperator(const Mesh* mesh) : mesh_(mesh) {}
    const Mesh* mesh_;
};

using OpPtr = std::shared_ptr<const SpectralOperator>;

// Op_psi(a) on the mesh; polynomial symbols take the exact differential-
// operator path, others integrate the windowed fiber integral by quadrature.
OpPtr quantize(const Symbol& a, const Mesh& mesh, const Cutoff& psi);

// the adjoint integral (tau^{-1}, psi-tilde, rho^{-1} factors); supported for
// polynomial symbols (all kinds), general symbols on Circle, and position-only
// symbols everywhere; throws ResolutionInsufficient otherwise
OpPtr adjoint_quantize(const Symbol& a, const Mesh& mesh, const Cutoff& psi);

OpPtr compose(OpPtr outer, OpPtr inner);
OpPtr identity_op(const Mesh& mesh);

// sigma_psi(A)(xi) = [A(psi_x e^{i phi(.,xi)})](pi(xi)); throws NyquistExceeded
// when |zeta| is beyond the mesh band
CMat extract_symbol(const SpectralOperator& A, const Covector& xi, const Cutoff& psi);

// windowed plane-wave field used by extract_symbol
FieldSpec plane_wave_field(const Mesh& mesh, const Covector& xi, const Cutoff& psi);

// ---------------------------------------------------------------------- io

// flat binary export: magic "NSB1", uint32 rows, cols, dtype (1 = complex128),
// little-endian row-major data
void write_matrix_binary(const std::string& path, const CMat& m);
CMat read_matrix_binary(const std::string& path);
void write_matrix_csv(const std::string& path, const CMat& m);

} // namespace normsym
