#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "ustokes/atoms.hpp"

using namespace ustokes;

namespace {

/* exact amplitude constants 25*sqrt(5)/192 and 3*sqrt(3)/16 */
const double kM0 = 25.0 * std::sqrt(5.0) / 192.0;
const double kM1 = 3.0 * std::sqrt(3.0) / 16.0;

double fd_deriv(const Atom& a, Vec2 x, double t, const DerivOrder& d, double h) {
  /* central difference in the highest direction of d */
  if (d.m0 > 0) {
    DerivOrder dl = d;
    dl.m0 -= 1;
    return (atom_deriv(a, x, t + h, dl) - atom_deriv(a, x, t - h, dl)) / (2.0 * h);
  }
  DerivOrder dl = d;
  dl.k0 -= 1;
  Vec2 xp = x, xm = x;
  xp[d.tan_dir] += h;
  xm[d.tan_dir] -= h;
  return (atom_deriv(a, xp, t, dl) - atom_deriv(a, xm, t, dl)) / (2.0 * h);
}

}  // namespace

TEST_CASE("make_atom rejects out-of-domain parameters") {
  CHECK_THROWS_AS(make_atom(0.0, {0, 0}, 0, 0.5, 2, 0), DomainError);
  CHECK_THROWS_AS(make_atom(-1.0, {0, 0}, 0, 0.5, 2, 0), DomainError);
  CHECK_THROWS_AS(make_atom(1.0, {0, 0}, 0, 0.0, 2, 0), DomainError);
  CHECK_THROWS_AS(make_atom(1.0, {0, 0}, 0, 1.0, 2, 0), DomainError);
  CHECK_THROWS_AS(make_atom(1.0, {0, 0}, 0, 0.5, 1.0, 0), DomainError);
  CHECK_THROWS_AS(make_atom(1.0, {0, 0}, 0, 0.5, 2, 7), DomainError);
}

TEST_CASE("peak value and amplitude scaling") {
  Atom a = make_atom(1.0, {0.0, 0.0}, 0.0, 0.5, 2.0, 0);
  /* peak sits at the center at mid-time; bump factors are exactly 1 there */
  CHECK(atom_value(a, {0.0, 0.0}, 0.5) == doctest::Approx(kM0).epsilon(1e-14));
  CHECK(atom_amplitude(a) == doctest::Approx(kM0).epsilon(1e-14));

  /* r = 2, alpha = 1/2, p = 2, n = 3: amplitude m * 2^{1/2 - 2} <= 2^{-3/2} */
  Atom a2 = make_atom(2.0, {0.0, 0.0}, 0.0, 0.5, 2.0, 0);
  double budget = std::pow(2.0, -1.5);
  CHECK(atom_amplitude(a2) == doctest::Approx(kM0 * budget).epsilon(1e-14));
  CHECK(atom_amplitude(a2) <= budget);

  Atom b = make_atom(1.0, {0.0, 0.0}, 0.0, 0.5, 2.0, 1);
  CHECK(atom_amplitude(b) == doctest::Approx(kM1).epsilon(1e-14));
}

TEST_CASE("support is the inscribed square times the time window") {
  Atom a = make_atom(0.8, {0.25, -0.5}, 1.0, 0.5, 2.0, 0);
  double rho = 0.8 / std::sqrt(2.0);
  double tmid = 1.0 + 0.32;
  /* just outside the square edge, and outside the time window: exactly zero */
  CHECK(atom_value(a, {0.25 + rho * 1.0001, -0.5}, tmid) == 0.0);
  CHECK(atom_value(a, {0.25, -0.5 - rho * 1.0001}, tmid) == 0.0);
  CHECK(atom_value(a, {0.25, -0.5}, 1.0 - 1e-9) == 0.0);
  CHECK(atom_value(a, {0.25, -0.5}, 1.0 + 0.64 + 1e-9) == 0.0);
  /* just inside: nonzero */
  CHECK(atom_value(a, {0.25 + rho * 0.99, -0.5}, tmid) != 0.0);
  /* corners of the square lie on the disc of radius r */
  CHECK(std::hypot(rho, rho) == doctest::Approx(0.8).epsilon(1e-14));
}

TEST_CASE("analytic derivatives match central differences") {
  for (int pid : {0, 1}) {
    Atom a = make_atom(0.7, {0.1, -0.2}, 0.3, 0.4, 2.5, pid);
    Vec2 x{0.25, -0.35};
    double t = 0.45;
    for (DerivOrder d : {DerivOrder{0, 1, 0, 0}, DerivOrder{0, 2, 1, 0},
                         DerivOrder{0, 3, 0, 0}, DerivOrder{0, 0, 0, 1},
                         DerivOrder{0, 1, 1, 1}}) {
      if (pid == 1 && d.k0 == 3) continue; /* quartic bump's third derivative is rough */
      double h = 1e-4;
      double fd = fd_deriv(a, x, t, d, h);
      double an = atom_deriv(a, x, t, d);
      CHECK(an == doctest::Approx(fd).epsilon(5e-6));
    }
    CHECK_THROWS_AS(atom_deriv(a, x, t, DerivOrder{1, 0, 0, 0}), UnsupportedOrderError);
  }
}

TEST_CASE("certification ratios: frozen values and budget compliance") {
  Atom a0 = make_atom(1.0, {0.0, 0.0}, 0.0, 0.5, 2.0, 0);
  auto c0 = atom_certify(a0);
  /* value m, gradient sqrt(2) * m * max|B'| = sqrt(2)/2 exactly, time 1 */
  CHECK(c0.sup_ratios[0] == doctest::Approx(kM0).epsilon(1e-6));
  CHECK(c0.sup_ratios[1] == doctest::Approx(std::sqrt(0.5)).epsilon(2e-3));
  CHECK(c0.sup_ratios[2] == doctest::Approx(1.0).epsilon(2e-3));
  CHECK(c0.certified());

  Atom a1 = make_atom(1.0, {0.0, 0.0}, 0.0, 0.5, 2.0, 1);
  auto c1 = atom_certify(a1);
  CHECK(c1.sup_ratios[0] == doctest::Approx(kM1).epsilon(1e-6));
  CHECK(c1.sup_ratios[1] == doctest::Approx(std::sqrt(0.5)).epsilon(2e-3));
  CHECK(c1.sup_ratios[2] == doctest::Approx(1.0).epsilon(2e-3));
  CHECK(c1.certified());
}

TEST_CASE("certification sweep over r, alpha, p, profiles") {
  for (int pid : {0, 1})
    for (double r : {0.25, 0.5, 1.0, 2.0})
      for (double al : {0.25, 0.5, 0.75})
        for (double p : {1.5, 2.0, 4.0}) {
          Atom a = make_atom(r, {0.3, -0.1}, 0.2, al, p, pid);
          auto c = atom_certify(a);
          CHECK(c.certified());
          /* the ratios are scale-free: independent of r, alpha, p */
          double m = pid == 0 ? kM0 : kM1;
          CHECK(c.sup_ratios[0] == doctest::Approx(m).epsilon(1e-10));
          CHECK(c.sup_ratios[2] == doctest::Approx(1.0).epsilon(2e-3));
        }
}

TEST_CASE("zero and over-scaled atoms") {
  Atom z = make_atom(1.0, {0.0, 0.0}, 0.0, 0.5, 2.0, 0);
  z.scale = 0.0;
  auto cz = atom_certify(z);
  CHECK(cz.sup_ratios[0] == 0.0);
  CHECK(cz.sup_ratios[1] == 0.0);
  CHECK(cz.sup_ratios[2] == 0.0);

  Atom big = make_atom(1.0, {0.0, 0.0}, 0.0, 0.5, 2.0, 0);
  big.scale = 2.0;
  auto cb = atom_certify(big);
  CHECK_FALSE(cb.certified());
  CHECK(cb.sup_ratios[2] == doctest::Approx(2.0).epsilon(2e-3));
}

TEST_CASE("translation equivariance and profile basics") {
  Atom base = make_atom(0.6, {0.0, 0.0}, 0.0, 0.5, 2.0, 0);
  Atom moved = make_atom(0.6, {0.4, -0.9}, 2.5, 0.5, 2.0, 0);
  for (double u : {-0.5, 0.1, 0.6}) {
    Vec2 x{0.1 + 0.2 * u, -0.15 * u};
    double t = 0.2 + 0.05 * u;
    Vec2 xs{x[0] + 0.4, x[1] - 0.9};
    CHECK(atom_value(base, x, t) ==
          doctest::Approx(atom_value(moved, xs, t + 2.5)).epsilon(1e-12));
  }
  CHECK(bump_profile(0, 0, 0.0) == 1.0);
  CHECK(time_profile(0, 0, 0.5) == 1.0);
  CHECK(bump_profile(1, 0, 0.0) == 1.0);
  CHECK(time_profile(1, 0, 0.5) == 1.0);
  CHECK(bump_coeffs(0).size() == 7);
  CHECK(time_coeffs(1).size() == 5);
}
