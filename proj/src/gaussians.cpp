#include "ustokes/gaussians.hpp"

#include <cmath>
#include <vector>

namespace ustokes {

namespace {
constexpr double kInvSqrtPi = 0.5641895835477562869480794515607726;
constexpr int kHermiteMax = 16;

/* physicists' Hermite values H_0..H_kmax at s via H_{k+1} = 2 s H_k - 2 k H_{k-1} */
void hermite_all(int kmax, double s, double* H) {
  H[0] = 1.0;
  if (kmax >= 1) H[1] = 2.0 * s;
  for (int k = 1; k < kmax; ++k) H[k + 1] = 2.0 * s * H[k] - 2.0 * k * H[k - 1];
}
}  // namespace

double gauss_amp(double t) {
  if (!(t > 0.0)) throw DomainError("heat kernel requires t > 0");
  return 1.0 / std::sqrt(4.0 * M_PI * t);
}

double erfcx(double u) {
  if (u < 0.0) return 2.0 * std::exp(u * u) - erfcx(-u);
  if (u < 12.0) return std::exp(u * u) * std::erfc(u);
  /* asymptotic tail: erfc digits degrade near the subnormal range */
  double r = 1.0 / (2.0 * u * u), s = 1.0, term = 1.0;
  for (int k = 1; k <= 5; ++k) {
    term *= -(2 * k - 1) * r;
    s += term;
  }
  return kInvSqrtPi / u * s;
}

double gauss_amp_deriv(int q, double t) {
  /* d^q/dt^q t^{-1/2} picks up (-1/2)(-3/2)...(1/2 - q) */
  double c = 1.0;
  for (int i = 0; i < q; ++i) c *= (-0.5 - i);
  return c * gauss_amp(t) * std::pow(t, -static_cast<double>(q));
}

double gauss1(double z, double t) {
  if (!(t > 0.0)) throw DomainError("heat kernel requires t > 0");
  double s = z / (2.0 * std::sqrt(t));
  return gauss_amp(t) * std::exp(-s * s);
}

void gauss1_derivs(int kmax, double z, double t, double* out) {
  if (!(t > 0.0)) throw DomainError("heat kernel requires t > 0");
  if (kmax > kHermiteMax) throw UnsupportedOrderError("gauss1_derivs order too large");
  double rt = 2.0 * std::sqrt(t);
  double s = z / rt;
  double g = gauss_amp(t) * std::exp(-s * s);
  double H[kHermiteMax + 1];
  hermite_all(kmax, s, H);
  double f = 1.0; /* (-1/rt)^k */
  for (int k = 0; k <= kmax; ++k) {
    out[k] = f * H[k] * g;
    f *= -1.0 / rt;
  }
}

double gauss1_deriv(int k, double z, double t) {
  double buf[kHermiteMax + 1];
  gauss1_derivs(k, z, t, buf);
  return buf[k];
}

double gauss1_zero(int k, double t) {
  if (k % 2 == 1) return 0.0;
  int m = k / 2;
  double c = gauss_amp(t);
  /* H_{2m}(0) = (-1)^m (2m)!/m!, with the (2 sqrt t)^{-2m} prefactor */
  double fact = 1.0;
  for (int i = m + 1; i <= 2 * m; ++i) fact *= i; /* (2m)!/m! */
  double sgn = (m % 2 == 0) ? 1.0 : -1.0;
  return c * sgn * fact * std::pow(4.0 * t, -static_cast<double>(m));
}

double heat_gamma(std::span<const double> x, double t) {
  if (!(t > 0.0)) throw DomainError("heat kernel requires t > 0");
  double q = 0.0;
  for (double xi : x) q += xi * xi;
  int n = static_cast<int>(x.size());
  return std::pow(4.0 * M_PI * t, -0.5 * n) * std::exp(-q / (4.0 * t));
}

double heat_gamma_deriv(std::span<const double> x, double t, const DerivOrder& d) {
  if (!(t > 0.0)) throw DomainError("heat kernel requires t > 0");
  int n = static_cast<int>(x.size());
  if (d.tan_dir < 0 || d.tan_dir >= n - 1) throw UnsupportedOrderError("tan_dir out of range");
  /* product of 1-D kernels; D_t = sum_k D_k^2 applied m0 times (m0 <= 2 supported) */
  if (d.m0 > 2) throw UnsupportedOrderError("time order beyond supported table");
  int ka = d.tan_dir, kn = n - 1;
  auto term = [&](int extra_a, int extra_n, int extra_j, int j) {
    /* derivative orders per axis: base (k0 on ka, l0 on kn) plus heat-equation pairs */
    double v = 1.0;
    for (int i = 0; i < n; ++i) {
      int ord = (i == ka ? d.k0 + extra_a : 0) + (i == kn ? d.l0 + extra_n : 0) +
                (i == j ? extra_j : 0);
      v *= gauss1_deriv(ord, x[i], t);
    }
    return v;
  };
  if (d.m0 == 0) return term(0, 0, 0, -1);
  if (d.m0 == 1) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += term(0, 0, 2, j);
    return s;
  }
  double s = 0.0;
  for (int j = 0; j < n; ++j)
    for (int j2 = 0; j2 < n; ++j2) {
      double v = 1.0;
      for (int i = 0; i < n; ++i) {
        int ord = (i == ka ? d.k0 : 0) + (i == kn ? d.l0 : 0) + (i == j ? 2 : 0) +
                  (i == j2 ? 2 : 0);
        v *= gauss1_deriv(ord, x[i], t);
      }
      s += v;
    }
  return s;
}

void gauss_moments(double lo, double hi, int qmax, double* J) {
  if (qmax > kJMax) throw UnsupportedOrderError("gauss_moments order too large");
  double elo = std::exp(-lo * lo), ehi = std::exp(-hi * hi);
  if (lo > 1.0) /* same-sign tail: erf(hi) - erf(lo) loses all digits, erfc keeps them */
    J[0] = 0.5 * (std::erfc(lo) - std::erfc(hi));
  else if (hi < -1.0)
    J[0] = 0.5 * (std::erfc(-hi) - std::erfc(-lo));
  else
    J[0] = 0.5 * (std::erf(hi) - std::erf(lo));
  if (qmax >= 1) J[1] = 0.5 * kInvSqrtPi * (elo - ehi);
  /* J_q = pi^{-1/2} [-s^{q-1} e^{-s^2}/2]_lo^hi + (q-1)/2 J_{q-2} */
  double plo = lo, phi = hi; /* s^{q-1} running powers */
  for (int q = 2; q <= qmax; ++q) {
    J[q] = 0.5 * kInvSqrtPi * (plo * elo - phi * ehi) + 0.5 * (q - 1) * J[q - 2];
    plo *= lo;
    phi *= hi;
  }
}

}  // namespace ustokes
