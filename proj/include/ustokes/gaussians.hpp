#pragma once

#include <span>

#include "ustokes/types.hpp"

namespace ustokes {

/* one-dimensional heat kernel g(z,t) = (4 pi t)^{-1/2} exp(-z^2/(4t)) and its
   z-derivatives g^{(k)}(z,t) = (-1)^k (2 sqrt t)^{-k} H_k(z/(2 sqrt t)) g(z,t),
   H_k the physicists' Hermite polynomials; dg/dt = d2g/dz2 */
double gauss1(double z, double t);
double gauss1_deriv(int k, double z, double t);
void gauss1_derivs(int kmax, double z, double t, double* out); /* out[0..kmax] */

/* g^{(k)}(0,t): zero for odd k, a(t) (4t)^{-m} (-1)^m (2m)!/m! for k = 2m */
double gauss1_zero(int k, double t);

/* a(t) = (4 pi t)^{-1/2} and its t-derivatives */
double gauss_amp(double t);
double gauss_amp_deriv(int q, double t);

/* scaled complementary error function e^{u^2} erfc(u), stable for large |u| */
double erfcx(double u);

/* full-space heat kernel on R^dim, product of 1-D kernels; derivative request d acts on
   the tangential axis d.tan_dir, the last coordinate, and time (heat equation expansion) */
double heat_gamma(std::span<const double> x, double t);
double heat_gamma_deriv(std::span<const double> x, double t, const DerivOrder& d);

/* J_q = pi^{-1/2} int_lo^hi s^q e^{-s^2} ds, q = 0..qmax (qmax <= kJMax) */
inline constexpr int kJMax = 20;
void gauss_moments(double lo, double hi, int qmax, double* J);

/* 4-point Gauss-Legendre rule on [-1,1] */
inline constexpr double kGL4Node[4] = {-0.8611363115940526, -0.3399810435848563,
                                       0.3399810435848563, 0.8611363115940526};
inline constexpr double kGL4Weight[4] = {0.3478548451374538, 0.6521451548625461,
                                         0.6521451548625461, 0.3478548451374538};

}  // namespace ustokes
