#pragma once

#include "ustokes/solver.hpp"

namespace ustokes {

/* Spectral route for boundary data given on a periodic grid: tangential FFT
   per time slice, closed-form transformed layer kernel per mode,

     K^(xi, x_n, tau) = e^{-tau q^2} [ -2 delta_ij gauss1'(x_n,tau)
                                       + 4 M_ij(xi) L(q, x_n, tau) ],
     M_ij = xi_i xi_j / (2q)  (i < n),   M_nj = i xi_j / 2,   q = |xi|,

   and an adaptive quadrature in sigma = sqrt(t-s) of the mode sums.  Used by
   full_solve for the grid part and as an independent cross-check of the
   direct atom route. */

/* L(q,x_n,tau) = int_0^{x_n} gauss1'(z,tau) e^{-(x_n - z) q} dz, closed form;
   x_n-derivatives follow the recursion L_x = gauss1'(x_n,tau) - q L */
double layer_damp_integral(double q, double x_n, double tau);

/* velocity, pressure and derivatives for tangential grid data (g_n = 0) */
SolutionSample spectral_tangential(const BoundaryField& g2, const SpaceTimePoint& pt,
                                   std::span<const DerivOrder> orders = {},
                                   const QuadratureConfig& qc = {});

/* full problem for general grid data: g = g1 + g2 with g1 = (R g_n, g_n)
   lifted through the harmonic gradient flow and g2 solved tangentially;
   u = grad phi + u[g2], p = -phi_t + p[g2] */
SolutionSample full_solve(const BoundaryField& g, const SpaceTimePoint& pt,
                          std::span<const DerivOrder> orders = {},
                          const QuadratureConfig& qc = {});

}  // namespace ustokes
