#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "ustokes/types.hpp"

namespace ustokes {

/* fundamental solution of the Laplacian under Delta E = delta:
   E(x) = -|x|^{2-n} / ((n-2) sigma_{n-1}), sigma_{n-1} = 2 pi^{n/2} / Gamma(n/2) */
double unit_sphere_area(int n);

/* derivatives are linear combinations c * x_a^{ea} * x_b^{eb} * x_n^{en} * |x|^{rp} where
   x_a, x_b are the first two tangential axes and x_n the last coordinate */
struct RadialTerm {
  double c;
  int ea, eb, en, rp;
};
using RadialPoly = std::vector<RadialTerm>;

/* D_a^{ka} D_b^{kb} D_n^{l0} E for dimension n; cached, ka + kb + l0 <= 6 */
RadialPoly laplace_poly(int n, int ka, int kb, int l0);
double radial_eval(const RadialPoly& p, double xa, double xb, double xn, double r2);

/* D^d E(x) with d spatial (m0 must be 0); total order k0 + l0 <= 6 supported */
double laplace_fundamental(std::span<const double> x, const DerivOrder& d);

/* half-space layer moment: int_{rect} D_nE(x'-y', h) dy' over rect
   [ax,bx] x [ay,by], equal to the rectangle solid angle / (4 pi); n = 3, h > 0 */
double dnE_rect_moment(const Vec2& xp, double h, double ax, double bx, double ay, double by);

/* n = 3 fast paths used by the quadrature engines: E = -1/(4 pi r), D_nE = h/(4 pi r^3) */
inline double E3(double rho2, double h) { return -0.25 * M_1_PI / std::sqrt(rho2 + h * h); }
inline double dnE3(double rho2, double h) {
  double r2 = rho2 + h * h;
  return 0.25 * M_1_PI * h / (r2 * std::sqrt(r2));
}
/* tangential Laplacian (D_aa + D_bb) E = (3 h^2 - r^2) / (4 pi r^5) */
inline double lapE3(double rho2, double h) {
  double r2 = rho2 + h * h;
  return 0.25 * M_1_PI * (3.0 * h * h - r2) / (r2 * r2 * std::sqrt(r2));
}

}  // namespace ustokes
