#include "ustokes/atoms.hpp"

#include <algorithm>
#include <cmath>

namespace ustokes {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

/* amplitude normalizations m = 1/max|C'|: the temporal bump has the steepest
   budget, so it pins the scale.  Exact suprema of the derivative polynomials:
   profile 0: max|C'| = 192/(25 sqrt 5)  -> m = 25 sqrt(5)/192
   profile 1: max|C'| = 16/(3 sqrt 3)    -> m = 3 sqrt(3)/16 */
constexpr double kAmpNorm[2] = {0.2911546845702852, 0.3247595264191645};

const std::vector<double>& poly_B(int pid) {
  static const std::vector<double> b0 = {1.0, 0.0, -3.0, 0.0, 3.0, 0.0, -1.0};
  static const std::vector<double> b1 = {1.0, 0.0, -2.0, 0.0, 1.0};
  return pid == 0 ? b0 : b1;
}

const std::vector<double>& poly_C(int pid) {
  static const std::vector<double> c0 = {0.0, 0.0, 0.0, 64.0, -192.0, 192.0, -64.0};
  static const std::vector<double> c1 = {0.0, 0.0, 16.0, -32.0, 16.0};
  return pid == 0 ? c0 : c1;
}

/* k-th derivative of a monomial-coefficient polynomial, Horner from the top */
double poly_deriv_eval(const std::vector<double>& c, int k, double z) {
  const int deg = static_cast<int>(c.size()) - 1;
  if (k > deg) return 0.0;
  double s = 0.0;
  for (int j = deg; j >= k; --j) {
    double f = c[j];
    for (int i = 0; i < k; ++i) f *= static_cast<double>(j - i);
    s = s * z + f;
  }
  return s;
}

void check_profile(int pid) {
  if (pid != 0 && pid != 1) throw DomainError("unknown atom profile id");
}

double size_exponent(const Atom& a) {
  return a.alpha - static_cast<double>(kDim + 1) / a.p;
}

}  // namespace

Atom make_atom(double r, const Vec2& center, double t0, double alpha, double p,
               int profile_id) {
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("atom radius must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("atom alpha must lie in (0,1)");
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("atom p must lie in (1,inf)");
  check_profile(profile_id);
  Atom a;
  a.r = r;
  a.center_tan = center;
  a.t0 = t0;
  a.alpha = alpha;
  a.p = p;
  a.profile_id = profile_id;
  return a;
}

double atom_amplitude(const Atom& a) {
  check_profile(a.profile_id);
  return a.scale * kAmpNorm[a.profile_id] * std::pow(a.r, size_exponent(a));
}

double bump_profile(int profile_id, int k, double z) {
  check_profile(profile_id);
  if (std::abs(z) > 1.0) return 0.0;
  return poly_deriv_eval(poly_B(profile_id), k, z);
}

double time_profile(int profile_id, int m, double v) {
  check_profile(profile_id);
  if (v < 0.0 || v > 1.0) return 0.0;
  return poly_deriv_eval(poly_C(profile_id), m, v);
}

const std::vector<double>& bump_coeffs(int profile_id) {
  check_profile(profile_id);
  return poly_B(profile_id);
}

const std::vector<double>& time_coeffs(int profile_id) {
  check_profile(profile_id);
  return poly_C(profile_id);
}

double atom_value(const Atom& a, const Vec2& x_tan, double t) {
  return atom_deriv(a, x_tan, t, d000());
}

double atom_deriv(const Atom& a, const Vec2& x_tan, double t, const DerivOrder& d) {
  require_supported(d, 16); /* polynomial bumps differentiate to any order */
  if (d.l0 != 0)
    throw UnsupportedOrderError("boundary atoms carry no normal derivative");
  const double rho = a.r / kSqrt2;
  const double u0 = (x_tan[0] - a.center_tan[0]) / rho;
  const double u1 = (x_tan[1] - a.center_tan[1]) / rho;
  const double v = (t - a.t0) / (a.r * a.r);
  int kb[2] = {0, 0};
  kb[d.tan_dir] = d.k0;
  double val = atom_amplitude(a) * bump_profile(a.profile_id, kb[0], u0) *
               bump_profile(a.profile_id, kb[1], u1) *
               time_profile(a.profile_id, d.m0, v);
  val *= std::pow(kSqrt2 / a.r, d.k0) * std::pow(a.r, -2.0 * d.m0);
  return val;
}

AtomCertification atom_certify(const Atom& a) {
  check_profile(a.profile_id);
  /* the atom is a tensor product, so the sup over the support cell factors into
     per-axis scans; peaks (u = 0, v = 1/2) land on the grid, derivative peaks
     between nodes */
  const int ng = 400;
  const double rho = a.r / kSqrt2;
  const double s = size_exponent(a);

  auto xat = [&](double u, int axis) { return a.center_tan[axis] + rho * u; };
  auto tat = [&](double v) { return a.t0 + a.r * a.r * v; };

  double vmax = 0.0, tmax = 0.0;
  for (int i = 0; i <= ng; ++i) {
    double v = static_cast<double>(i) / ng;
    DerivOrder dt{0, 0, 0, 1};
    vmax = std::max(vmax, std::abs(atom_value(a, {xat(0.0, 0), a.center_tan[1]}, tat(v))));
    tmax = std::max(tmax, std::abs(atom_deriv(a, {xat(0.0, 0), a.center_tan[1]}, tat(v), dt)));
  }
  double bpeak = 0.0;
  for (int i = -ng; i <= ng; ++i) {
    double u = static_cast<double>(i) / ng;
    bpeak = std::max(bpeak, std::abs(atom_value(a, {xat(u, 0), a.center_tan[1]}, tat(0.5))));
  }
  double gmax = 0.0;
  for (int i = -ng; i <= ng; i += 2)
    for (int j = -ng; j <= ng; j += 2) {
      Vec2 x{xat(static_cast<double>(i) / ng, 0), xat(static_cast<double>(j) / ng, 1)};
      double g0 = atom_deriv(a, x, tat(0.5), DerivOrder{0, 1, 0, 0});
      double g1 = atom_deriv(a, x, tat(0.5), DerivOrder{0, 1, 1, 0});
      gmax = std::max(gmax, std::hypot(g0, g1));
    }

  AtomCertification cert;
  cert.sup_ratios[0] = std::max(vmax, bpeak) / std::pow(a.r, s);
  cert.sup_ratios[1] = gmax / std::pow(a.r, s - 1.0);
  cert.sup_ratios[2] = tmax / std::pow(a.r, s - 2.0);
  return cert;
}

}  // namespace ustokes
