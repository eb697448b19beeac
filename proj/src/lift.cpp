#include "ustokes/lift.hpp"

#include <cmath>
#include <complex>

#include "ustokes/spectral.hpp"

namespace ustokes {

namespace {

/* 4-point Lagrange stencil around t with value and derivative weights */
struct TimeStencil {
  int k0;
  double wv[4];
  double wd[4];
};

TimeStencil time_stencil(const BoundaryField& f, double t) {
  if (t < 0.0 || t > f.T) throw DomainError("time lies outside the field's grid");
  const double tau = f.spacing_time();
  int k0 = static_cast<int>(std::floor(t / tau)) - 1;
  k0 = std::max(0, std::min(k0, f.n_time - 3));
  TimeStencil st;
  st.k0 = k0;
  double tn[4];
  for (int i = 0; i < 4; ++i) tn[i] = f.node_time(k0 + i);
  for (int i = 0; i < 4; ++i) {
    double v = 1.0, d = 0.0;
    for (int j = 0; j < 4; ++j) {
      if (j == i) continue;
      v *= (t - tn[j]) / (tn[i] - tn[j]);
    }
    for (int m = 0; m < 4; ++m) {
      if (m == i) continue;
      double prod = 1.0 / (tn[i] - tn[m]);
      for (int j = 0; j < 4; ++j) {
        if (j == i || j == m) continue;
        prod *= (t - tn[j]) / (tn[i] - tn[j]);
      }
      d += prod;
    }
    st.wv[i] = v;
    st.wd[i] = d;
  }
  return st;
}

/* phi, D1 phi, D2 phi, D_n phi of the lift of one g_n slice at (x', h), plus
   the boundary Riesz values R_1 g_n, R_2 g_n at x' from the same spectrum */
struct SliceLift {
  double phi, d1, d2, dn, r1, r2;
};

SliceLift lift_slice(const BoundaryField& f, int k, const Vec2& x, double h) {
  const int n = f.n_tan;
  std::vector<double> gn(static_cast<size_t>(n) * n);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix)
      gn[static_cast<size_t>(iy) * n + ix] = f.at(k, iy, ix, 2);
  auto spec = forward_spectrum(gn, n);

  const double inv = 1.0 / (static_cast<double>(n) * n);
  SliceLift s{0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (a == n / 2 || b == n / 2) continue;
      std::complex<double> c = spec[static_cast<size_t>(a) * n + b] * inv;
      /* grid index 0 sits at physical -L: writing modes as exp(i xi . x) needs
         the offset phase exp(i pi (a~+b~)) = (-1)^{a+b} */
      if ((a + b) % 2 != 0) c = -c;
      if (a == 0 && b == 0) {
        s.phi += c.real() * h;
        s.dn += c.real();
        continue;
      }
      double xi_x = spectral_freq(b, n, f.L);
      double xi_y = spectral_freq(a, n, f.L);
      double q = std::hypot(xi_x, xi_y);
      std::complex<double> ph =
          c * std::exp(std::complex<double>(0.0, xi_x * x[0] + xi_y * x[1]));
      double damp = std::exp(-h * q);
      s.phi += (-damp / q) * ph.real();
      /* Re[-i xi_j m ph] = xi_j m Im(ph) for the real multipliers m */
      s.d1 += xi_x * damp / q * ph.imag();
      s.d2 += xi_y * damp / q * ph.imag();
      s.dn += damp * ph.real();
      s.r1 += xi_x / q * ph.imag();
      s.r2 += xi_y / q * ph.imag();
    }
  return s;
}

}  // namespace

LiftSample gradient_lift(const BoundaryField& f, const SpaceTimePoint& pt) {
  validate_grid(f);
  if (!(pt.x_n > 0.0)) throw DomainError("lift evaluation requires x_n > 0");
  TimeStencil st = time_stencil(f, pt.t);
  LiftSample out;
  for (int i = 0; i < 4; ++i) {
    SliceLift s = lift_slice(f, st.k0 + i, pt.x_tan, pt.x_n);
    out.phi += st.wv[i] * s.phi;
    out.grad[0] += st.wv[i] * s.d1;
    out.grad[1] += st.wv[i] * s.d2;
    out.grad[2] += st.wv[i] * s.dn;
    out.phi_t += st.wd[i] * s.phi;
  }
  return out;
}

double tangential_trace_check(const BoundaryField& f, const Vec2& x_tan, double t,
                              double h) {
  validate_grid(f);
  if (!(h > 0.0)) throw DomainError("trace height must be positive");
  TimeStencil st = time_stencil(f, t);
  double d1 = 0.0, d2 = 0.0, r1 = 0.0, r2 = 0.0;
  for (int i = 0; i < 4; ++i) {
    SliceLift s = lift_slice(f, st.k0 + i, x_tan, h);
    d1 += st.wv[i] * s.d1;
    d2 += st.wv[i] * s.d2;
    r1 += st.wv[i] * s.r1;
    r2 += st.wv[i] * s.r2;
  }
  return std::max(std::abs(d1 - r1), std::abs(d2 - r2));
}

}  // namespace ustokes
