#include "ustokes/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "ustokes/gaussians.hpp"
#include "ustokes/laplace_kernel.hpp"
#include "ustokes/quadrature.hpp"

namespace ustokes {

namespace {

/* sup_s |H_k(s) exp(-s^2)|, used to size the round-off floor of the z dots */
double hermite_sup(int k) {
  static const std::array<double, 17> tab = [] {
    std::array<double, 17> a{};
    std::array<double, 17> d{};
    for (int i = 0; i <= 1024; ++i) {
      gauss1_derivs(16, i / 128.0, 0.25, d.data());
      for (int q = 0; q <= 16; ++q) a[q] = std::max(a[q], std::abs(d[q]));
    }
    for (auto& v : a) v *= std::sqrt(M_PI);
    return a;
  }();
  return tab[std::min(k, 16)];
}

/* ---- term algebra --------------------------------------------------------------
   every kernel here is a finite sum of terms

     c * W(z-rule) * C(form, kappa)(x', h, t),
     C(form,kappa)(x',h,t) = int Eform(x'-y', h) D^kappa Gamma_2(y', t) dy',

   where the z-rule is one of
     PanelGamma k : int_0^{x_n} g^{(k)}(z,t) C(..., x_n - z, t) dz
     BndGamma  gk : g^{(gk)}(0,t) * C(..., x_n, t)
     Amp        q : a^{(q)}(t)    * C(..., x_n, t)
   and Eform is E or D_nE; all tangential derivatives sit on the Gaussian side.
   Derivatives in x_n, x', t act as closed rewrite rules on term sets. */

enum class EForm { E, DnE };
enum class RuleKind { PanelGamma, BndGamma, Amp };

struct CTerm {
  double c;
  EForm form;
  std::array<int, 2> kappa;
  RuleKind rk;
  int ord;
};
using TermSet = std::vector<CTerm>;

void add_merged(TermSet& out, const CTerm& t) {
  if (t.c == 0.0) return;
  for (auto& u : out)
    if (u.form == t.form && u.kappa == t.kappa && u.rk == t.rk && u.ord == t.ord) {
      u.c += t.c;
      return;
    }
  out.push_back(t);
}

TermSet simplify(const TermSet& ts) {
  TermSet out;
  for (const auto& t : ts) {
    if (t.rk == RuleKind::BndGamma && t.ord % 2 == 1) continue; /* g^{(odd)}(0,t) = 0 */
    add_merged(out, t);
  }
  std::erase_if(out, [](const CTerm& t) { return t.c == 0.0; });
  return out;
}

TermSet d_tan(TermSet ts, int dir) {
  for (auto& t : ts) t.kappa[dir] += 1;
  return ts;
}

/* E-form chain in the height argument: D_h E = D_nE, D_h D_nE = -Delta_tan E */
void push_height_chain(TermSet& out, const CTerm& t) {
  if (t.form == EForm::E) {
    CTerm a = t;
    a.form = EForm::DnE;
    add_merged(out, a);
  } else {
    for (int ax = 0; ax < 2; ++ax) {
      CTerm a = t;
      a.form = EForm::E;
      a.kappa[ax] += 2;
      a.c = -t.c;
      add_merged(out, a);
    }
  }
}

TermSet d_normal(const TermSet& ts) {
  TermSet out;
  for (const auto& t : ts) {
    if (t.rk == RuleKind::PanelGamma) {
      CTerm a = t;
      a.ord += 1;
      add_merged(out, a);
      CTerm b = t; /* endpoint of the layer integral */
      b.rk = RuleKind::BndGamma;
      add_merged(out, b);
    } else {
      push_height_chain(out, t);
    }
  }
  return simplify(out);
}

TermSet d_time(const TermSet& ts) {
  TermSet out;
  for (const auto& t : ts) {
    CTerm a = t; /* time derivative of the z-rule weight */
    if (t.rk == RuleKind::Amp)
      a.ord += 1;
    else
      a.ord += 2; /* g_t = g_zz */
    add_merged(out, a);
    for (int ax = 0; ax < 2; ++ax) { /* time derivative of the Gaussian profile */
      CTerm b = t;
      b.kappa[ax] += 2;
      add_merged(out, b);
    }
  }
  return simplify(out);
}

TermSet apply_deriv(TermSet ts, const DerivOrder& d) {
  for (int q = 0; q < d.m0; ++q) ts = d_time(ts);
  for (int q = 0; q < d.l0; ++q) ts = d_normal(ts);
  for (int q = 0; q < d.k0; ++q) ts = d_tan(ts, d.tan_dir);
  return simplify(ts);
}

TermSet base_A() { return {{1.0, EForm::E, {0, 0}, RuleKind::Amp, 0}}; }

TermSet base_G(int i, int j) {
  if (i == kDim) {
    std::array<int, 2> kap{0, 0};
    kap[j - 1] = 1;
    return {{1.0, EForm::DnE, kap, RuleKind::PanelGamma, 1}};
  }
  std::array<int, 2> kap{0, 0};
  kap[i - 1] += 1;
  kap[j - 1] += 1;
  return {{1.0, EForm::E, kap, RuleKind::PanelGamma, 1}};
}

double factorial(int q) {
  double f = 1.0;
  for (int i = 2; i <= q; ++i) f *= i;
  return f;
}
double binom(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

/* pi_j = -(2/t) D_j A; Leibniz in t against the explicit 1/t factor */
TermSet pi_smooth_terms(int j, const DerivOrder& d, double t) {
  TermSet acc;
  for (int q = 0; q <= d.m0; ++q) {
    double coef = -2.0 * binom(d.m0, q) * ((q % 2) ? -1.0 : 1.0) * factorial(q) *
                  std::pow(t, -1.0 - q);
    TermSet s = d_tan(base_A(), j - 1);
    DerivOrder dd{d.l0, d.k0, d.tan_dir, d.m0 - q};
    s = apply_deriv(s, dd);
    for (auto& tt : s) {
      tt.c *= coef;
      add_merged(acc, tt);
    }
  }
  return simplify(acc);
}

/* ---- shared layer-quadrature engine -------------------------------------------- */

struct EvalRequest {
  TermSet terms;
  double analytic = 0.0;
  double floor = 0.0;
};

std::vector<double> engine_eval(const std::vector<EvalRequest>& reqs, const Vec2& xt,
                                double x_n, double t, const QuadratureConfig& qc) {
  validate(qc);
  require_backend_dim(qc.dim);
  if (!(x_n > 0.0)) throw DomainError("layer kernels need x_n > 0");
  if (!(t > 0.0)) throw DomainError("layer kernels need t > 0");
  const int m = static_cast<int>(reqs.size());
  const double sig = std::sqrt(2.0 * t);

  struct Rule {
    RuleKind rk;
    int ord;
    double single_w = 0.0;
    std::vector<double> wt; /* panel weights, aligned with shared z nodes */
    double msum = 0.0;      /* weighted box moment of D_nE, for the spike subtraction */
  };
  struct Dot {
    int rule;
    EForm form;
  };
  struct Flat {
    int comp, kap, dot;
    double c;
    bool sub;
  };
  std::vector<Rule> rules;
  std::vector<Dot> dots;
  std::vector<std::array<int, 2>> kappas;
  std::vector<Flat> flats;

  auto rule_id = [&](RuleKind rk, int ord) {
    for (size_t q = 0; q < rules.size(); ++q)
      if (rules[q].rk == rk && rules[q].ord == ord) return static_cast<int>(q);
    rules.push_back({rk, ord, 0.0, {}, 0.0});
    return static_cast<int>(rules.size() - 1);
  };
  auto dot_id = [&](int rule, EForm form) {
    for (size_t q = 0; q < dots.size(); ++q)
      if (dots[q].rule == rule && dots[q].form == form) return static_cast<int>(q);
    dots.push_back({rule, form});
    return static_cast<int>(dots.size() - 1);
  };
  auto kappa_id = [&](const std::array<int, 2>& k) {
    for (size_t q = 0; q < kappas.size(); ++q)
      if (kappas[q] == k) return static_cast<int>(q);
    kappas.push_back(k);
    return static_cast<int>(kappas.size() - 1);
  };

  int kap_sum_max = 0;
  for (int c = 0; c < m; ++c)
    for (const auto& tm : reqs[c].terms) {
      int r = rule_id(tm.rk, tm.ord);
      flats.push_back({c, kappa_id(tm.kappa), dot_id(r, tm.form), tm.c, false});
      kap_sum_max = std::max(kap_sum_max, tm.kappa[0] + tm.kappa[1]);
    }

  const double R = (qc.trunc_sigma + 0.4 * kap_sum_max) * sig;
  const bool x_inside = std::abs(xt[0]) <= R && std::abs(xt[1]) <= R;
  for (auto& fl : flats) fl.sub = x_inside && dots[fl.dot].form == EForm::DnE;

  /* shared z panels: Gauss-Legendre 4 on intervals refined geometrically toward
     z = x_n (where the Laplace factor loses height) and bounded by the Gaussian scale */
  bool any_panel = false;
  int panel_kmax = 0;
  for (const auto& r : rules)
    if (r.rk == RuleKind::PanelGamma) {
      any_panel = true;
      panel_kmax = std::max(panel_kmax, r.ord);
    }
  std::vector<double> znode, zweight;
  if (any_panel) {
    double zmax = std::min(x_n, qc.trunc_sigma * sig);
    std::vector<double> edges{0.0, zmax};
    double dlo = std::max(x_n - zmax, 1e-5 * std::min(x_n, sig));
    int guard = 0;
    for (double dd = 0.5 * x_n; dd > dlo && guard < 60; dd *= 0.5, ++guard) {
      double z = x_n - dd;
      if (z > 0.0 && z < zmax) edges.push_back(z);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    std::vector<double> full;
    double step = sig / 5.0;
    for (size_t q = 0; q + 1 < edges.size(); ++q) {
      full.push_back(edges[q]);
      double w = edges[q + 1] - edges[q];
      int extra = static_cast<int>(w / step);
      for (int e = 1; e <= extra; ++e) full.push_back(edges[q] + w * e / (extra + 1));
    }
    full.push_back(edges.back());
    std::vector<double> gtab(panel_kmax + 1);
    for (size_t q = 0; q + 1 < full.size(); ++q) {
      double h2 = 0.5 * (full[q + 1] - full[q]), mid = 0.5 * (full[q + 1] + full[q]);
      for (int e = 0; e < 4; ++e) {
        znode.push_back(mid + h2 * kGL4Node[e]);
        zweight.push_back(h2 * kGL4Weight[e]);
      }
    }
    for (auto& r : rules)
      if (r.rk == RuleKind::PanelGamma) r.wt.resize(znode.size());
    for (size_t jz = 0; jz < znode.size(); ++jz) {
      gauss1_derivs(panel_kmax, znode[jz], t, gtab.data());
      for (auto& r : rules)
        if (r.rk == RuleKind::PanelGamma) r.wt[jz] = zweight[jz] * gtab[r.ord];
    }
  }
  for (auto& r : rules) {
    if (r.rk == RuleKind::BndGamma) r.single_w = gauss1_zero(r.ord, t);
    if (r.rk == RuleKind::Amp) r.single_w = gauss_amp_deriv(r.ord, t);
  }

  std::vector<double> hnode(znode.size());
  for (size_t jz = 0; jz < znode.size(); ++jz) hnode[jz] = x_n - znode[jz];

  bool need_pe = false, need_pd = false, need_se = false, need_sd = false;
  for (const auto& dt : dots) {
    bool panel = rules[dt.rule].rk == RuleKind::PanelGamma;
    if (panel && dt.form == EForm::E) need_pe = true;
    if (panel && dt.form == EForm::DnE) need_pd = true;
    if (!panel && dt.form == EForm::E) need_se = true;
    if (!panel && dt.form == EForm::DnE) need_sd = true;
  }

  /* box moments of D_nE for the spike subtraction at y' = x' */
  if (x_inside) {
    std::vector<double> mrect(hnode.size());
    bool any_sub_panel = false, any_sub_single = false;
    for (const auto& fl : flats)
      if (fl.sub) {
        (rules[dots[fl.dot].rule].rk == RuleKind::PanelGamma ? any_sub_panel
                                                            : any_sub_single) = true;
      }
    if (any_sub_panel)
      for (size_t jz = 0; jz < hnode.size(); ++jz)
        mrect[jz] = dnE_rect_moment(xt, hnode[jz], -R, R, -R, R);
    double mrect_single =
        any_sub_single ? dnE_rect_moment(xt, x_n, -R, R, -R, R) : 0.0;
    for (auto& r : rules) {
      if (r.rk == RuleKind::PanelGamma && any_sub_panel) {
        double s = 0.0;
        for (size_t jz = 0; jz < r.wt.size(); ++jz) s += r.wt[jz] * mrect[jz];
        r.msum = s;
      } else if (r.rk != RuleKind::PanelGamma) {
        r.msum = r.single_w * mrect_single;
      }
    }
  }

  int ka_max = 0, kb_max = 0;
  for (const auto& kp : kappas) {
    ka_max = std::max(ka_max, kp[0]);
    kb_max = std::max(kb_max, kp[1]);
  }
  std::vector<double> gda(ka_max + 1), gdb(kb_max + 1), profx(kappas.size(), 0.0);
  if (x_inside) {
    gauss1_derivs(ka_max, xt[0], t, gda.data());
    gauss1_derivs(kb_max, xt[1], t, gdb.data());
    for (size_t q = 0; q < kappas.size(); ++q)
      profx[q] = gda[kappas[q][0]] * gdb[kappas[q][1]];
  }

  std::vector<double> aE(znode.size()), aD(znode.size()), profv(kappas.size()),
      dotv(dots.size());
  auto f = [&](double y1, double y2, double* out) {
    double ra = xt[0] - y1, rb = xt[1] - y2;
    double rho2 = ra * ra + rb * rb;
    gauss1_derivs(ka_max, y1, t, gda.data());
    gauss1_derivs(kb_max, y2, t, gdb.data());
    for (size_t q = 0; q < kappas.size(); ++q)
      profv[q] = gda[kappas[q][0]] * gdb[kappas[q][1]];
    if (need_pe)
      for (size_t jz = 0; jz < znode.size(); ++jz) aE[jz] = E3(rho2, hnode[jz]);
    if (need_pd)
      for (size_t jz = 0; jz < znode.size(); ++jz) aD[jz] = dnE3(rho2, hnode[jz]);
    double sE = need_se ? E3(rho2, x_n) : 0.0;
    double sD = need_sd ? dnE3(rho2, x_n) : 0.0;
    for (size_t q = 0; q < dots.size(); ++q) {
      const Rule& r = rules[dots[q].rule];
      if (r.rk == RuleKind::PanelGamma) {
        const std::vector<double>& arr = dots[q].form == EForm::E ? aE : aD;
        double s = 0.0;
        for (size_t jz = 0; jz < r.wt.size(); ++jz) s += r.wt[jz] * arr[jz];
        dotv[q] = s;
      } else {
        dotv[q] = r.single_w * (dots[q].form == EForm::E ? sE : sD);
      }
    }
    std::fill(out, out + m, 0.0);
    for (const auto& fl : flats) {
      double p = profv[fl.kap];
      if (fl.sub) p -= profx[fl.kap];
      out[fl.comp] += fl.c * p * dotv[fl.dot];
    }
  };

  QuadOptions opt;
  opt.rel_tol = qc.rel_tol;
  opt.max_depth = qc.max_depth + 8; /* spike cells need extra room below user depth */
  opt.abs_floor.resize(m);
  for (int c = 0; c < m; ++c) opt.abs_floor[c] = reqs[c].floor;
  /* the z dots subtract large gamma-derivative tables, so every sample carries FP
     noise ~ eps * (unsigned dot mass); integrated over the box that is an absolute
     error floor no amount of refinement can beat */
  {
    std::vector<double> rule_mass(rules.size(), 0.0);
    for (size_t q = 0; q < rules.size(); ++q) {
      if (rules[q].rk == RuleKind::PanelGamma)
        for (double w : rules[q].wt) rule_mass[q] += std::abs(w);
      else
        rule_mass[q] = std::abs(rules[q].single_w);
    }
    const double rt2 = 2.0 * std::sqrt(t);
    const double a2 = gauss_amp(t) * gauss_amp(t);
    opt.abs_noise.assign(m, 0.0);
    for (const auto& fl : flats) {
      const auto& kap = kappas[fl.kap];
      double psup = a2 * hermite_sup(kap[0]) * hermite_sup(kap[1]) /
                    std::pow(rt2, kap[0] + kap[1]);
      double flen = dots[fl.dot].form == EForm::E ? R : 0.5;
      opt.abs_noise[fl.comp] +=
          1e-15 * std::abs(fl.c) * psup * rule_mass[dots[fl.dot].rule] * flen;
    }
  }
  std::vector<double> xb, yb;
  if (std::abs(xt[0]) < R) xb.push_back(xt[0]);
  if (std::abs(xt[1]) < R) yb.push_back(xt[1]);
  auto qr = integrate_2d(f, m, -R, R, -R, R, xb, yb, opt, sig, sig);

  std::vector<double> out = qr.value;
  for (const auto& fl : flats)
    if (fl.sub) out[fl.comp] += fl.c * profx[fl.kap] * rules[dots[fl.dot].rule].msum;
  for (int c = 0; c < m; ++c) out[c] += reqs[c].analytic;
  return out;
}

void check_indices(KernelKind kind, int i, int j) {
  if (kind == KernelKind::G || kind == KernelKind::K) {
    if (i < 1 || i > kDim) throw ConfigError("component i must lie in 1..n");
  }
  if (kind != KernelKind::A) {
    if (j < 1 || j > kDim - 1) throw ConfigError("component j must lie in 1..n-1");
  }
}

}  // namespace

double heat_kernel(std::span<const double> x, double t, const DerivOrder& d) {
  if (!(t > 0.0)) throw DomainError("heat kernel needs t > 0");
  return heat_gamma_deriv(x, t, d);
}

std::vector<double> kernel_table(KernelKind kind, int i, int j, const Vec2& x_tan,
                                 double x_n, double t, std::span<const DerivOrder> ds,
                                 const QuadratureConfig& qc) {
  check_indices(kind, i, j);
  std::vector<EvalRequest> reqs;
  reqs.reserve(ds.size());
  for (const auto& d : ds) {
    require_supported(d);
    EvalRequest r;
    switch (kind) {
      case KernelKind::A:
        r.terms = apply_deriv(base_A(), d);
        break;
      case KernelKind::G:
        r.terms = apply_deriv(base_G(i, j), d);
        break;
      case KernelKind::K: {
        r.terms = apply_deriv(base_G(i, j), d);
        for (auto& tm : r.terms) tm.c *= 4.0;
        if (i == j) {
          VecN x{x_tan[0], x_tan[1], x_n};
          DerivOrder dn{d.l0 + 1, d.k0, d.tan_dir, d.m0};
          r.analytic = -2.0 * heat_gamma_deriv(std::span<const double>(x), t, dn);
        }
        break;
      }
      case KernelKind::PiSmooth:
        r.terms = pi_smooth_terms(j, d, t);
        break;
    }
    r.floor = 1e-6 * kernel_envelope(kind, d, x_tan, x_n, t);
    reqs.push_back(std::move(r));
  }
  return engine_eval(reqs, x_tan, x_n, t, qc);
}

double poisson_heat_A(const Vec2& x_tan, double x_n, double t, const DerivOrder& d,
                      const QuadratureConfig& qc) {
  DerivOrder ds[1] = {d};
  return kernel_table(KernelKind::A, 0, 0, x_tan, x_n, t, ds, qc)[0];
}

double G_kernel(int i, int j, const Vec2& x_tan, double x_n, double t, const DerivOrder& d,
                const QuadratureConfig& qc) {
  DerivOrder ds[1] = {d};
  return kernel_table(KernelKind::G, i, j, x_tan, x_n, t, ds, qc)[0];
}

double K_kernel(int i, int j, const Vec2& x_tan, double x_n, double t, const DerivOrder& d,
                const QuadratureConfig& qc) {
  DerivOrder ds[1] = {d};
  return kernel_table(KernelKind::K, i, j, x_tan, x_n, t, ds, qc)[0];
}

double pressure_kernel_smooth(int j, const Vec2& x_tan, double x_n, double t,
                              const DerivOrder& d, const QuadratureConfig& qc) {
  DerivOrder ds[1] = {d};
  return kernel_table(KernelKind::PiSmooth, 0, j, x_tan, x_n, t, ds, qc)[0];
}

double pressure_instantaneous(int j, const Vec2& x_tan, double x_n, const DerivOrder& d) {
  if (j < 1 || j > kDim - 1) throw ConfigError("component j must lie in 1..n-1");
  if (d.m0 != 0)
    throw UnsupportedOrderError("instantaneous pressure kernel has no time derivatives");
  if (d.k0 + d.l0 > 4) throw UnsupportedOrderError("derivative order beyond supported table");
  double r2 = x_tan[0] * x_tan[0] + x_tan[1] * x_tan[1] + x_n * x_n;
  if (r2 == 0.0) throw SingularityError("instantaneous pressure kernel at x = 0");
  int ka = (j == 1 ? 1 : 0) + (d.tan_dir == 0 ? d.k0 : 0);
  int kb = (j == 2 ? 1 : 0) + (d.tan_dir == 1 ? d.k0 : 0);
  return -2.0 * radial_eval(laplace_poly(kDim, ka, kb, d.l0 + 1), x_tan[0], x_tan[1], x_n, r2);
}

double kernel_envelope(KernelKind kind, const DerivOrder& d, const Vec2& x_tan, double x_n,
                       double t) {
  double x2 = x_tan[0] * x_tan[0] + x_tan[1] * x_tan[1] + x_n * x_n;
  double s = x2 + t, sn = x_n * x_n + t;
  switch (kind) {
    case KernelKind::G:
    case KernelKind::K:
      return std::pow(t, -d.m0 - 0.5) * std::pow(s, -0.5 * (kDim + d.k0)) *
             std::pow(sn, -0.5 * d.l0);
    case KernelKind::A:
      return std::pow(t, -d.m0 - 0.5) * std::pow(s, -0.5 * (kDim - 2 + d.k0 + d.l0));
    case KernelKind::PiSmooth:
      return std::pow(t, -d.m0 - 1.5) * std::pow(s, -0.5 * (kDim - 1 + d.k0 + d.l0));
  }
  return 0.0;
}

double kernel_bound_ratio(KernelKind kind, int i, int j, const Vec2& x_tan, double x_n,
                          double t, const DerivOrder& d, const QuadratureConfig& qc) {
  if (kind == KernelKind::PiSmooth)
    throw UnsupportedOrderError("no certified envelope family for the pressure kernel");
  DerivOrder ds[1] = {d};
  double v = kernel_table(kind, i, j, x_tan, x_n, t, ds, qc)[0];
  return std::abs(v) / kernel_envelope(kind, d, x_tan, x_n, t);
}

}  // namespace ustokes
