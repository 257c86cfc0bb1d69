#pragma once

// Matrix-free realization of Op_psi on the sphere mesh: per target node the
// windowed fiber integral is evaluated through an angular-mode / Bessel
// factorization of e^{-i<xi,v>}. Internal to the library.

#include "normsym/quantize.hpp"

namespace normsym {

OpPtr make_sphere_quantize_op(const Symbol& a, const Mesh& mesh, const Cutoff& psi);

// Bessel functions J_m(u) for m = 0..M by downward recurrence
void bessel_j_array(int M, double u, std::vector<double>& out);

} // namespace normsym

namespace normsym {

// continuous-fiber Op value on flat manifolds for exact fields
cplx flat_fiber_value(const Mesh& mesh, const Symbol& a, const Cutoff& psi, const FieldSpec& f,
                      const Vec& x);

} // namespace normsym
