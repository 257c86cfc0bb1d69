#pragma once

// Exact Taylor data for the round sphere: chart transition, theta inverse,
// frame rotation, phase function. Internal to the library.

#include "normsym/geometry.hpp"
#include "normsym/taylor.hpp"

#include <Eigen/Dense>
#include <array>

namespace normsym::sphere_series {

using V3 = Eigen::Vector3d;
using TVec3 = std::array<Taylor, 3>;
using TMat2 = std::array<std::array<Taylor, 2>, 2>;

struct Center {
    double R = 1.0;
    V3 x;      // unit point
    V3 e1, e2; // canonical frame (unit embedding tangents)
};

Center center_at(const Manifold& sphere, const Vec& x);

// y(z): unit-point series for frame offsets z (Taylor variables supplied)
TVec3 point_series(const Center& c, const Taylor& z1, const Taylor& z2);

// tau_{x->y(z)}(e_b(x)) for b = 1,2
void transported_frame_series(const Center& c, const TVec3& y, TVec3& f1, TVec3& f2);

// O(z): O_ab = e_a^can(y) . tau(e_b(x)); canonical field = polar transport
// from the north pole
TMat2 rot_series(const Center& c, const TVec3& y, const TVec3& f1, const TVec3& f2);

// Theta^{-1}(z) (symmetric) as series, valid for the radius of the center
TMat2 theta_inv_series(double R, const Taylor& z1, const Taylor& z2);

// z_x-components of log_x(p) for a unit-point series p near x
void log_series(const Center& c, const TVec3& p, Taylor& out1, Taylor& out2);

// phase series Phi(t,w) = <zeta, z_x(exp_{y(t)}(sum w_l tau-frame_l))>
// vars: t = (vars it0, it0+1), w = (vars iw0, iw0+1) of the given shape
Taylor phase_series(const Center& c, const TruncShape& shape, int it0, int iw0, const Vec& zeta);

} // namespace normsym::sphere_series
