#pragma once

#include "ustokes/boundary_field.hpp"
#include "ustokes/types.hpp"

namespace ustokes {

/* Gradient lift for the normal boundary component: phi solves the half-space
   Neumann problem D_n phi|_{x_n=0} = g_n slice by slice, realized spectrally on
   the periodic box with multipliers
     phi:  -exp(-x_n |xi|)/|xi|,   D_j phi: -i xi_j exp(-x_n |xi|)/|xi|,
     D_n phi: exp(-x_n |xi|),
   the zero mode lifted as g-hat(0) x_n, Nyquist rows dropped.  (nabla phi, -phi_t)
   then solves the system with boundary data (R g_n, g_n).  Time dependence is
   interpolated with a centered Lagrange cubic; phi_t differentiates the
   interpolant. */

struct LiftSample {
  double phi = 0.0;
  VecN grad{0.0, 0.0, 0.0};
  double phi_t = 0.0;
};

LiftSample gradient_lift(const BoundaryField& f, const SpaceTimePoint& pt);

/* max_j |D_j phi(x', h, t) - R_j g_n(x', t)|: tangential trace consistency of
   the lift at height h */
double tangential_trace_check(const BoundaryField& f, const Vec2& x_tan, double t,
                              double h = 0.05);

}  // namespace ustokes
