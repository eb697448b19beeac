#pragma once

#include <span>
#include <vector>

#include "ustokes/types.hpp"

namespace ustokes {

/* layer kernels for the half-space Stokes system, n = 3 backend.

   Gamma(x,t)    heat kernel on R^n
   E(x)          fundamental solution of the Laplacian (see laplace_kernel.hpp)
   A(x,t)        = a(t) * (E(.,x_n) conv Gamma_2(.,t))(x'), a(t) = (4 pi t)^{-1/2}
   G_ij(x,t)     = int_0^{x_n} g'(z,t) C_{e_i+e_j}(x', x_n - z, t) dz
   K_ij(x,t)     = -2 delta_ij D_n Gamma + 4 G_ij        (velocity boundary kernel)
   pi_j(x,t)     = -(2/t) D_j A                           (smooth pressure kernel)
   pi_j^inst(x)  = -2 D_j D_n E                           (instantaneous pressure kernel)

   where C_nu(x',h,t) = (D^nu E(.,h) conv Gamma_2(.,t))(x') and Gamma_2 is the
   tangential heat kernel.  i runs over 1..n, j over 1..n-1 (1-based component
   indices); derivative requests d use 0-based tan_dir. */

double heat_kernel(std::span<const double> x, double t, const DerivOrder& d = {});

double poisson_heat_A(const Vec2& x_tan, double x_n, double t, const DerivOrder& d = {},
                      const QuadratureConfig& qc = {});
double G_kernel(int i, int j, const Vec2& x_tan, double x_n, double t,
                const DerivOrder& d = {}, const QuadratureConfig& qc = {});
double K_kernel(int i, int j, const Vec2& x_tan, double x_n, double t,
                const DerivOrder& d = {}, const QuadratureConfig& qc = {});
double pressure_kernel_smooth(int j, const Vec2& x_tan, double x_n, double t,
                              const DerivOrder& d = {}, const QuadratureConfig& qc = {});
double pressure_instantaneous(int j, const Vec2& x_tan, double x_n,
                              const DerivOrder& d = {});

enum class KernelKind { G, K, A, PiSmooth };

/* batch evaluation of several derivative orders of one kernel at one point; all
   orders share the layer-quadrature pass, so this is much cheaper than a loop */
std::vector<double> kernel_table(KernelKind kind, int i, int j, const Vec2& x_tan,
                                 double x_n, double t, std::span<const DerivOrder> ds,
                                 const QuadratureConfig& qc = {});

/* decay envelope the kernel family is expected to obey up to a constant */
double kernel_envelope(KernelKind kind, const DerivOrder& d, const Vec2& x_tan, double x_n,
                       double t);

/* |D^d F| divided by its envelope; finite sup over dyadic grids is the certified bound */
double kernel_bound_ratio(KernelKind kind, int i, int j, const Vec2& x_tan, double x_n,
                          double t, const DerivOrder& d, const QuadratureConfig& qc = {});

}  // namespace ustokes
