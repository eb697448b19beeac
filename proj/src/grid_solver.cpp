#include "ustokes/grid_solver.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "ustokes/gaussians.hpp"
#include "ustokes/quadrature.hpp"
#include "ustokes/spectral.hpp"

namespace ustokes {

namespace {

using cplx = std::complex<double>;
constexpr double kInvSqrtPi2 = 0.56418958354775628694807945156077;

/* 4-point Lagrange stencil around t with value and derivative weights */
struct TimeStencil {
  int k0;
  double wv[4];
  double wd[4];
};

TimeStencil time_stencil(double T, int n_time, double t) {
  if (t < 0.0 || t > T) throw DomainError("time lies outside the field's grid");
  const double tau = T / n_time;
  int k0 = static_cast<int>(std::floor(t / tau)) - 1;
  k0 = std::max(0, std::min(k0, n_time - 3));
  TimeStencil st;
  st.k0 = k0;
  double tn[4];
  for (int i = 0; i < 4; ++i) tn[i] = (k0 + i) * tau;
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

/* per-slice tangential spectra of the requested components */
struct SpecCache {
  int n = 0;
  std::vector<std::vector<cplx>> sp[3]; /* [comp][time slice] */

  SpecCache(const BoundaryField& f, std::initializer_list<int> comps) : n(f.n_tan) {
    std::vector<double> slice(static_cast<size_t>(n) * n);
    for (int c : comps) {
      sp[c].resize(f.n_time + 1);
      for (int k = 0; k <= f.n_time; ++k) {
        for (int iy = 0; iy < n; ++iy)
          for (int ix = 0; ix < n; ++ix)
            slice[static_cast<size_t>(iy) * n + ix] = f.at(k, iy, ix, c);
        sp[c][k] = forward_spectrum(slice, n);
      }
    }
  }
  cplx stencil(int c, const TimeStencil& st, bool dt, int a, int b) const {
    const size_t id = static_cast<size_t>(a) * n + b;
    cplx v{0.0, 0.0};
    for (int i = 0; i < 4; ++i) v += (dt ? st.wd[i] : st.wv[i]) * sp[c][st.k0 + i][id];
    return v;
  }
};

/* retained modes with the evaluation-point phase folded in */
struct Mode {
  int a, b;
  double xx, xy, q;
  cplx phase; /* exp(i xi.x) (-1)^{a+b} / n^2 */
};

std::vector<Mode> mode_list(const BoundaryField& f, const Vec2& x, double x_n) {
  const int n = f.n_tan;
  const double inv = 1.0 / (static_cast<double>(n) * n);
  std::vector<Mode> out;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (a == n / 2 || b == n / 2) continue;
      if (a == 0 && b == 0) continue; /* zero mode handled separately */
      double xx = spectral_freq(b, n, f.L), xy = spectral_freq(a, n, f.L);
      double q = std::hypot(xx, xy);
      if (x_n * q > 60.0) continue; /* below the quadrature noise floor */
      cplx ph = std::exp(cplx(0.0, xx * x[0] + xy * x[1])) * inv;
      if ((a + b) % 2 != 0) ph = -ph;
      out.push_back({a, b, xx, xy, q, ph});
    }
  return out;
}

struct GridReq {
  int comp;
  DerivOrder d;
  int out;
};

}  // namespace

double layer_damp_integral(double q, double x_n, double tau) {
  if (!(q >= 0.0) || !(x_n >= 0.0) || !(tau > 0.0))
    throw DomainError("layer integral needs q, x_n >= 0 and tau > 0");
  if (q == 0.0) return gauss1(x_n, tau) - gauss_amp(tau);
  const double rt = 2.0 * std::sqrt(tau);
  const double A = (x_n - 2.0 * tau * q) / rt, B = q * 0.5 * rt;
  double W;
  if (A >= 0.0) /* exponent tau q^2 - x_n q <= -tau q^2: direct form is safe */
    W = std::exp(tau * q * q - x_n * q) * (std::erf(A) + std::erf(B));
  else
    W = std::exp(-x_n * x_n / (4.0 * tau)) * erfcx(-A) - std::exp(-x_n * q) * erfcx(B);
  return gauss1(x_n, tau) - gauss_amp(tau) * std::exp(-x_n * q) - 0.5 * q * W;
}

SolutionSample spectral_tangential(const BoundaryField& g2, const SpaceTimePoint& pt,
                                   std::span<const DerivOrder> orders,
                                   const QuadratureConfig& qc) {
  validate_grid(g2);
  validate(qc);
  require_interior(pt);
  if (pt.t > g2.T) throw DomainError("time lies outside the field's grid");
  double gmax = 0.0, gnmax = 0.0;
  for (size_t i = 0; i < g2.samples.size(); ++i) {
    double v = std::abs(g2.samples[i]);
    gmax = std::max(gmax, v);
    if (i % kDim == 2) gnmax = std::max(gnmax, v);
  }
  if (gnmax > 1e-14 * std::max(gmax, 1e-300))
    throw ContractError("tangential spectral route requires g_n = 0");

  std::vector<GridReq> reqs;
  int m_out = 0, max_l0 = 0;
  {
    std::vector<DerivOrder> ds{DerivOrder{}};
    for (const auto& d : orders) {
      require_supported(d, 3);
      if (std::find(ds.begin(), ds.end(), d) == ds.end()) ds.push_back(d);
    }
    for (const auto& d : ds)
      for (int comp = 1; comp <= kDim; ++comp) {
        reqs.push_back({comp, d, m_out++});
        max_l0 = std::max(max_l0, d.l0);
      }
  }
  const int pout = m_out++;

  SpecCache cache(g2, {0, 1});
  const auto modes = mode_list(g2, pt.x_tan, pt.x_n);
  const double x_n = pt.x_n, t = pt.t;

  auto fout = [&](double sigma, double* out) {
    std::fill(out, out + m_out, 0.0);
    const double tau = sigma * sigma, s = t - tau;
    const TimeStencil st = time_stencil(g2.T, g2.n_time, std::max(0.0, s));
    double gx[5];
    gauss1_derivs(4, x_n, tau, gx);
    /* zero mode: only the -2 delta_ij heat trace survives */
    for (const auto& rq : reqs) {
      if (rq.comp == kDim || rq.d.k0 > 0) continue;
      cplx gh = cache.stencil(rq.comp - 1, st, rq.d.m0 == 1, 0, 0) /
                (static_cast<double>(g2.n_tan) * g2.n_tan);
      out[rq.out] += 2.0 * sigma * (-2.0) * gx[1 + rq.d.l0] * gh.real();
    }
    for (const auto& md : modes) {
      const double q = md.q;
      const double eq = std::exp(-tau * q * q);
      double L[4];
      L[0] = layer_damp_integral(q, x_n, tau);
      for (int k = 0; k < 3; ++k) L[k + 1] = gx[k + 1] - q * L[k];
      const cplx gv1 = cache.stencil(0, st, false, md.a, md.b);
      const cplx gv2 = cache.stencil(1, st, false, md.a, md.b);
      const cplx gd1 = cache.stencil(0, st, true, md.a, md.b);
      const cplx gd2 = cache.stencil(1, st, true, md.a, md.b);
      for (const auto& rq : reqs) {
        const cplx gj1 = rq.d.m0 == 1 ? gd1 : gv1;
        const cplx gj2 = rq.d.m0 == 1 ? gd2 : gv2;
        const double Ll = L[rq.d.l0];
        cplx acc{0.0, 0.0};
        if (rq.comp < kDim) {
          double xc = rq.comp == 1 ? md.xx : md.xy;
          acc = (xc * md.xx / (2.0 * q)) * gj1 + (xc * md.xy / (2.0 * q)) * gj2;
          acc *= 4.0 * Ll;
          acc += -2.0 * gx[1 + rq.d.l0] * (rq.comp == 1 ? gj1 : gj2);
        } else {
          acc = cplx(0.0, 0.5) * (md.xx * gj1 + md.xy * gj2) * 4.0 * Ll;
        }
        cplx kfac{1.0, 0.0};
        double xd = rq.d.tan_dir == 0 ? md.xx : md.xy;
        for (int e = 0; e < rq.d.k0; ++e) kfac *= cplx(0.0, xd);
        out[rq.out] += 2.0 * sigma * (eq * md.phase * kfac * acc).real();
      }
      /* smooth pressure integrand: h'(sigma^2) of
         h(tau) = -i xi_j e^{-x_n q}/(2q) e^{-tau q^2} g_j(t - tau) */
      const cplx mj = cplx(0.0, -0.5 / q) * std::exp(-x_n * q) *
                      (md.xx * (-q * q * gv1 - gd1) + md.xy * (-q * q * gv2 - gd2));
      out[pout] += -4.0 * kInvSqrtPi2 * (eq * md.phase * mj).real();
    }
  };

  std::vector<double> breaks;
  const double dt = g2.spacing_time(), shi = std::sqrt(t);
  for (int k = 1; k * dt < t; ++k) {
    double s = std::sqrt(t - k * dt);
    if (s > 0.0 && s < shi) breaks.push_back(s);
  }
  std::sort(breaks.begin(), breaks.end());
  QuadOptions opt;
  opt.rel_tol = qc.rel_tol;
  opt.noise_rel = 1e-10;
  opt.max_depth = qc.max_depth;
  /* components that cancel by symmetry are pointwise noise in sigma; a pilot
     scale shared across components keeps them from driving refinement */
  std::vector<double> po(m_out);
  double pilot = 0.0;
  for (double fr : {0.15, 0.35, 0.55, 0.75, 0.95}) {
    fout(fr * shi, po.data());
    for (double vv : po) pilot = std::max(pilot, std::abs(vv));
  }
  opt.abs_noise = {1e-12 * pilot};
  QuadResult qr = integrate_1d(fout, m_out, 0.0, shi, breaks, opt);

  SolutionSample out;
  out.point = pt;
  for (const auto& d : orders) {
    require_supported(d, 3);
    out.derivs[d] = VecN{0.0, 0.0, 0.0};
  }
  for (const auto& rq : reqs) {
    double val = qr.value[rq.out];
    if (rq.d == DerivOrder{}) out.u[rq.comp - 1] += val;
    auto it = out.derivs.find(rq.d);
    if (it != out.derivs.end()) it->second[rq.comp - 1] += val;
  }
  out.press = qr.value[pout];

  /* pressure boundary term of the finite part and the instantaneous part,
     both at the evaluation time */
  const TimeStencil st0 = time_stencil(g2.T, g2.n_time, 0.0);
  const TimeStencil stt = time_stencil(g2.T, g2.n_time, t);
  for (const auto& md : modes) {
    const cplx h0 = cplx(0.0, -0.5 / md.q) * std::exp(-x_n * md.q) *
                    std::exp(-t * md.q * md.q) *
                    (md.xx * cache.stencil(0, st0, false, md.a, md.b) +
                     md.xy * cache.stencil(1, st0, false, md.a, md.b));
    out.press += 2.0 * kInvSqrtPi2 / std::sqrt(t) * (md.phase * h0).real();
    const cplx pi = cplx(0.0, -1.0) * std::exp(-x_n * md.q) *
                    (md.xx * cache.stencil(0, stt, false, md.a, md.b) +
                     md.xy * cache.stencil(1, stt, false, md.a, md.b));
    out.press += (md.phase * pi).real();
  }
  return out;
}

SolutionSample evaluate_tangential(const BoundaryField& g, const SpaceTimePoint& pt,
                                   std::span<const DerivOrder> orders,
                                   const QuadratureConfig& qc) {
  return spectral_tangential(g, pt, orders, qc);
}

SolutionSample full_solve(const BoundaryField& g, const SpaceTimePoint& pt,
                          std::span<const DerivOrder> orders,
                          const QuadratureConfig& qc) {
  validate_field(g);
  require_interior(pt);
  if (pt.t > g.T) throw DomainError("time lies outside the field's grid");
  auto [g1, g2] = split_boundary_data(g);
  SolutionSample out = spectral_tangential(g2, pt, orders, qc);

  /* gradient-flow part: u += grad phi, p += -phi_t with phi the spectral lift
     of g_n; derivatives act as multipliers (i xi_dir)^{k0} (-q)^{l0} with time
     orders taken on the data stencil */
  SpecCache cache(g1, {2});
  const auto modes = mode_list(g1, pt.x_tan, pt.x_n);
  const TimeStencil stt = time_stencil(g1.T, g1.n_time, pt.t);
  const double inv0 = 1.0 / (static_cast<double>(g1.n_tan) * g1.n_tan);

  std::vector<DerivOrder> ds{DerivOrder{}};
  for (const auto& d : orders) {
    require_supported(d, 3);
    if (std::find(ds.begin(), ds.end(), d) == ds.end()) ds.push_back(d);
  }
  for (const auto& d : ds)
    for (int comp = 1; comp <= kDim; ++comp) {
      double add = 0.0;
      /* zero mode: grad phi = (0, 0, g-hat(0)); only pure time orders act */
      if (comp == kDim && d.l0 == 0 && d.k0 == 0)
        add += (cache.stencil(2, stt, d.m0 == 1, 0, 0) * inv0).real();
      for (const auto& md : modes) {
        cplx mult = comp < kDim
                        ? cplx(0.0, comp == 1 ? md.xx : md.xy) * (-1.0 / md.q)
                        : cplx(1.0, 0.0);
        mult *= std::exp(-pt.x_n * md.q);
        double xd = d.tan_dir == 0 ? md.xx : md.xy;
        for (int e = 0; e < d.k0; ++e) mult *= cplx(0.0, xd);
        for (int e = 0; e < d.l0; ++e) mult *= -md.q;
        add += (md.phase * mult * cache.stencil(2, stt, d.m0 == 1, md.a, md.b)).real();
      }
      if (d == DerivOrder{}) out.u[comp - 1] += add;
      auto it = out.derivs.find(d);
      if (it != out.derivs.end()) it->second[comp - 1] += add;
    }
  /* p = -phi_t: multiplier +e^{-x_n q}/q on the time-differentiated data */
  double padd = -(cache.stencil(2, stt, true, 0, 0) * inv0).real() * pt.x_n;
  for (const auto& md : modes)
    padd += (md.phase * (std::exp(-pt.x_n * md.q) / md.q) *
             cache.stencil(2, stt, true, md.a, md.b))
                .real();
  out.press += padd;
  return out;
}

}  // namespace ustokes
