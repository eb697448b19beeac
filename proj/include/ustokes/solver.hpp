#pragma once

#include <map>
#include <span>
#include <vector>

#include "ustokes/boundary_field.hpp"
#include "ustokes/types.hpp"

namespace ustokes {

/* Explicit layer-potential evaluation of the half-space Stokes flow driven by
   tangential boundary velocity data:

     u_i(x,t)  = sum_j int_0^t int K_ij(x'-y', x_n, t-s) g_j(y',s) dy' ds
     p(x,t)    = instantaneous part + smooth part (see evaluate_pressure)

   For atom data g_j = c P(y') q(s) the tangential convolution is carried out
   against the heat-smoothed profile SP(.,tau) = Gamma_2(.,tau) * P, which is a
   product of one-dimensional closed forms (Gaussian moments of the polynomial
   bump).  Normal derivatives of the layer integral are stabilised by
   integrating the Gaussian spike in the z-panel against Taylor-subtracted
   Laplace columns, so every derivative up to total weight 3 stays finite as
   t - s -> 0.  Time derivatives are always transferred onto the data.  The
   time integral runs in sigma = sqrt(t-s), clipped to the support of q
   (points with t <= t0 receive an exact zero). */

struct SolutionSample {
  SpaceTimePoint point;
  VecN u{0.0, 0.0, 0.0};
  double press = 0.0;
  std::map<DerivOrder, VecN> derivs; /* D^d u_i for each requested order */
};

struct ResidualReport {
  VecN stokes_residual{0.0, 0.0, 0.0}; /* (u_t - Lap u + grad p) / scale */
  double divergence = 0.0;             /* div u / scale */
};

/* velocity, pressure and requested derivatives at an interior point */
SolutionSample evaluate_tangential(const AtomExpansion& g, const SpaceTimePoint& pt,
                                   std::span<const DerivOrder> orders = {},
                                   const QuadratureConfig& qc = {});
/* grid-data overload (spectral route); requires g_n identically zero */
SolutionSample evaluate_tangential(const BoundaryField& g, const SpaceTimePoint& pt,
                                   std::span<const DerivOrder> orders = {},
                                   const QuadratureConfig& qc = {});

double evaluate_pressure(const AtomExpansion& g, const SpaceTimePoint& pt,
                         const QuadratureConfig& qc = {});

/* finite-difference Stokes residual and divergence, normalised by
   |grad u| + |u| + 1e-30; requires h_fd < x_n/4 and h_fd^2 < t/4 */
ResidualReport residual_check(const AtomExpansion& g, const SpaceTimePoint& pt,
                              double h_fd, const QuadratureConfig& qc = {},
                              int threads = 1);

/* sup-error max_i |u_i(x', h, t) - g_i(x', t)| for each height in order */
std::vector<double> trace_recovery(const AtomExpansion& g, const Vec2& x_tan, double t,
                                   std::span<const double> heights,
                                   const QuadratureConfig& qc = {});

/* shards points across threads; results are bitwise independent of the count */
std::vector<SolutionSample> evaluate_batch(const AtomExpansion& g,
                                           std::span<const SpaceTimePoint> pts,
                                           std::span<const DerivOrder> orders,
                                           const QuadratureConfig& qc = {},
                                           int threads = 1);

/* d^k/dy^k of (gauss1(.,tau) conv B(./rho))(y), the one-dimensional factor of
   the smoothed atom profile; exposed for cross-checks, k <= 8 */
double smoothed_bump_deriv(int profile_id, int k, double y, double rho, double tau);

}  // namespace ustokes
