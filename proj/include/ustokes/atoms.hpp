#pragma once

#include <array>
#include <vector>

#include "ustokes/types.hpp"

namespace ustokes {

/* Compactly supported boundary atoms a(x',t) = A * B(u1) B(u2) C(v) with
   u = (x' - y0') * sqrt(2)/r  (square support inscribed in the disc of radius r),
   v = (t - t0) / r^2          (temporal support (t0, t0 + r^2)),
   A = m * r^{alpha - (n+1)/p}.
   The bumps are polynomial: profile 0 uses B(z) = (1-z^2)^3, C(v) = (4v(1-v))^3,
   profile 1 the squared variants. m = 1/max|C'| is the largest amplitude for which
   the three size bounds
     |a| <= r^{alpha-(n+1)/p},  |D_{x'}a| <= r^{...-1},  |D_t a| <= r^{...-2}
   all hold with constant 1 (any sup-1 bump on a unit cell must have slope > 1
   somewhere, so the bounds pin the amplitude strictly below the value budget). */

struct Atom {
  double r = 1.0;
  Vec2 center_tan{0.0, 0.0};
  double t0 = 0.0;
  double alpha = 0.5;
  double p = 2.0;
  int profile_id = 0;
  double scale = 1.0; /* diagnostic multiplier; certification expects 1 */
};

Atom make_atom(double r, const Vec2& center, double t0, double alpha, double p,
               int profile_id = 0);

/* peak value A (with the atom's scale factor applied) */
double atom_amplitude(const Atom& a);

/* k-th derivative of the spatial bump B at z, zero outside [-1,1] */
double bump_profile(int profile_id, int k, double z);
/* m-th derivative of the temporal bump C at v, zero outside [0,1] */
double time_profile(int profile_id, int m, double v);
/* monomial coefficients of B (in z) and C (in v), low degree first */
const std::vector<double>& bump_coeffs(int profile_id);
const std::vector<double>& time_coeffs(int profile_id);

double atom_value(const Atom& a, const Vec2& x_tan, double t);
/* derivative d with d.l0 == 0 (atoms live on the boundary); k0 falls along
   d.tan_dir, m0 in time */
double atom_deriv(const Atom& a, const Vec2& x_tan, double t, const DerivOrder& d);

/* sup-norm ratios (value, tangential gradient, time derivative) against the
   size budgets r^{alpha-(n+1)/p-j}, maximized over a dense sample grid */
struct AtomCertification {
  std::array<double, 3> sup_ratios;
  bool certified() const {
    return sup_ratios[0] <= 1.0 && sup_ratios[1] <= 1.0 && sup_ratios[2] <= 1.0;
  }
};
AtomCertification atom_certify(const Atom& a);

}  // namespace ustokes
