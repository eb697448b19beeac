#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ustokes/gaussians.hpp"
#include "ustokes/kernels.hpp"
#include "ustokes/laplace_kernel.hpp"
#include "ustokes/quadrature.hpp"

using namespace ustokes;

namespace {

/* direct route for C_nu(x',h,t) = int D^nu E(x'-y',h) Gamma_2(y',t) dy' without the
   derivative shuffle used by the production engine */
double C_brute(int ka, int kb, int l, const Vec2& xp, double h, double t, double rel) {
  RadialPoly poly = laplace_poly(3, ka, kb, l);
  auto f = [&](double y1, double y2, double* out) {
    double u1 = xp[0] - y1, u2 = xp[1] - y2;
    double r2 = u1 * u1 + u2 * u2 + h * h;
    out[0] = radial_eval(poly, u1, u2, h, r2) * gauss1(y1, t) * gauss1(y2, t);
  };
  double R = 8.0 * std::sqrt(2.0 * t);
  QuadOptions opt;
  opt.rel_tol = rel;
  opt.max_depth = 44;
  opt.abs_floor = {1e-8};
  std::vector<double> xb, yb;
  if (std::abs(xp[0]) < R) xb.push_back(xp[0]);
  if (std::abs(xp[1]) < R) yb.push_back(xp[1]);
  return integrate_2d(f, 1, -R, R, -R, R, xb, yb, opt).value[0];
}

double G_brute(int i, int j, const Vec2& xp, double xn, double t) {
  int ka = (i == 1) + (j == 1), kb = (i == 2) + (j == 2), l = (i == 3);
  double delta = 1e-3 * std::min(xn, std::sqrt(t));
  auto f = [&](double z, double* out) {
    out[0] = gauss1_deriv(1, z, t) * C_brute(ka, kb, l, xp, xn - z, t, 1e-7);
  };
  std::vector<double> breaks;
  for (int q = 1; q <= 9; ++q) {
    double z = xn * (1.0 - std::pow(0.5, q));
    if (z < xn - delta) breaks.push_back(z);
  }
  QuadOptions opt;
  opt.rel_tol = 1e-5;
  opt.max_depth = 18;
  double main = integrate_1d(f, 1, 0.0, xn - delta, breaks, opt).value[0];
  double tail = gauss1_deriv(1, xn - 0.5 * delta, t) * delta *
                C_brute(ka, kb, l, xp, 0.5 * delta, t, 1e-6);
  return main + tail;
}

double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace

TEST_CASE("one-dimensional heat kernel derivatives match finite differences") {
  double t = 0.37, z = 0.61, h = 1e-5;
  for (int k = 1; k <= 5; ++k) {
    double fd =
        (gauss1_deriv(k - 1, z + h, t) - gauss1_deriv(k - 1, z - h, t)) / (2.0 * h);
    CHECK(rel_diff(fd, gauss1_deriv(k, z, t)) < 1e-7);
  }
  for (int k = 0; k <= 6; ++k)
    CHECK(std::abs(gauss1_zero(k, t) - gauss1_deriv(k, 0.0, t)) <
          1e-13 * (1.0 + std::abs(gauss1_zero(k, t))));
}

TEST_CASE("amplitude time derivatives match finite differences") {
  double t = 0.8, h = 1e-6;
  for (int q = 1; q <= 3; ++q) {
    double fd = (gauss_amp_deriv(q - 1, t + h) - gauss_amp_deriv(q - 1, t - h)) / (2.0 * h);
    CHECK(rel_diff(fd, gauss_amp_deriv(q, t)) < 1e-8);
  }
}

TEST_CASE("full-space heat kernel satisfies the heat equation") {
  VecN x{0.3, -0.7, 0.5};
  double t = 0.45;
  double lhs = heat_kernel(x, t, DerivOrder{0, 0, 0, 1});
  double lap = heat_kernel(x, t, DerivOrder{2, 0, 0, 0}) +
               heat_kernel(x, t, DerivOrder{0, 2, 0, 0}) +
               heat_kernel(x, t, DerivOrder{0, 2, 1, 0});
  CHECK(rel_diff(lhs, lap) < 1e-12);
  double g = heat_kernel(x, t);
  double q = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
  CHECK(rel_diff(g, std::pow(4.0 * M_PI * t, -1.5) * std::exp(-q / (4.0 * t))) < 1e-14);
}

TEST_CASE("second time derivative of the heat kernel matches finite differences") {
  VecN x{0.2, 0.1, 0.9};
  double t = 0.6, h = 1e-4;
  DerivOrder d1{1, 1, 0, 1};
  double fd = (heat_gamma_deriv(x, t + h, d1) - heat_gamma_deriv(x, t - h, d1)) / (2.0 * h);
  CHECK(rel_diff(fd, heat_gamma_deriv(x, t, DerivOrder{1, 1, 0, 2})) < 1e-6);
}

TEST_CASE("Laplace fundamental solution and its derivative table") {
  VecN x{0.4, -0.2, 0.3};
  double r = normN(x);
  CHECK(rel_diff(laplace_fundamental(x, d000()), -0.25 * M_1_PI / r) < 1e-14);
  double h = 1e-5;
  for (int k0 = 0; k0 <= 1; ++k0)
    for (int l0 = 0; l0 <= 2 - k0; ++l0) {
      DerivOrder lo{l0, k0, 1, 0};
      DerivOrder hi{l0 + 1, k0, 1, 0};
      VecN xp = x, xm = x;
      xp[2] += h;
      xm[2] -= h;
      double fd = (laplace_fundamental(xp, lo) - laplace_fundamental(xm, lo)) / (2.0 * h);
      CHECK(rel_diff(fd, laplace_fundamental(x, hi)) < 1e-7);
    }
  /* mixed tangential derivative via the two-axis polynomial table */
  double mixed = radial_eval(laplace_poly(3, 1, 1, 0), x[0], x[1], x[2], r * r);
  VecN xp = x, xm = x;
  xp[1] += h;
  xm[1] -= h;
  DerivOrder da{0, 1, 0, 0};
  double fd = (laplace_fundamental(xp, da) - laplace_fundamental(xm, da)) / (2.0 * h);
  CHECK(rel_diff(fd, mixed) < 1e-7);
}

TEST_CASE("rectangle moment of D_nE matches direct quadrature and its limits") {
  Vec2 xp{0.2, -0.1};
  double h = 0.3;
  auto f = [&](double y1, double y2, double* out) {
    double u1 = xp[0] - y1, u2 = xp[1] - y2;
    out[0] = dnE3(u1 * u1 + u2 * u2, h);
  };
  QuadOptions opt;
  opt.rel_tol = 1e-10;
  double direct = integrate_2d(f, 1, -1.0, 2.0, -1.5, 0.5, {xp[0]}, {xp[1]}, opt).value[0];
  CHECK(rel_diff(direct, dnE_rect_moment(xp, h, -1.0, 2.0, -1.5, 0.5)) < 1e-9);
  CHECK(std::abs(dnE_rect_moment(xp, 1e-9, -1.0, 1.0, -1.0, 1.0) - 0.5) < 1e-8);
  CHECK(std::abs(dnE_rect_moment(Vec2{5.0, 5.0}, 1e-9, -1.0, 1.0, -1.0, 1.0)) < 1e-8);
}

TEST_CASE("single-layer heat potential matches its on-axis closed form") {
  /* A(0, x_n, t) = -(16 pi t)^{-1} e^{x_n^2/4t} erfc(x_n / (2 sqrt t)) */
  double cases[2][2] = {{0.5, 0.25}, {1.2, 0.8}};
  for (auto& c : cases) {
    double xn = c[0], t = c[1];
    double oracle = -std::exp(xn * xn / (4.0 * t)) * std::erfc(xn / (2.0 * std::sqrt(t))) /
                    (16.0 * M_PI * t);
    double v = poisson_heat_A(Vec2{0.0, 0.0}, xn, t);
    CHECK(rel_diff(v, oracle) < 1e-5);
  }
}

TEST_CASE("single-layer heat potential off axis matches direct convolution") {
  Vec2 xp{0.6, -0.4};
  double xn = 0.5, t = 0.3;
  double direct = gauss_amp(t) * C_brute(0, 0, 0, xp, xn, t, 1e-9);
  CHECK(rel_diff(direct, poisson_heat_A(xp, xn, t)) < 1e-5);
}

TEST_CASE("single-layer heat potential obeys its evolution identity") {
  /* D_n^2 A + D_t A = -A / (2t) */
  Vec2 xp{0.4, -0.3};
  double xn = 0.6, t = 0.5;
  double a0 = poisson_heat_A(xp, xn, t);
  double ann = poisson_heat_A(xp, xn, t, DerivOrder{2, 0, 0, 0});
  double at = poisson_heat_A(xp, xn, t, DerivOrder{0, 0, 0, 1});
  double resid = ann + at + a0 / (2.0 * t);
  double scale = std::abs(ann) + std::abs(at) + std::abs(a0 / (2.0 * t));
  CHECK(std::abs(resid) < 1e-4 * scale);
}

TEST_CASE("layer kernel matches a brute-force nested evaluation") {
  Vec2 xp{0.3, -0.2};
  double xn = 0.7, t = 0.5;
  CHECK(rel_diff(G_brute(3, 1, xp, xn, t), G_kernel(3, 1, xp, xn, t)) < 3e-3);
  CHECK(rel_diff(G_brute(1, 1, xp, xn, t), G_kernel(1, 1, xp, xn, t)) < 3e-3);
}

TEST_CASE("layer kernel derivatives match finite differences of the base kernel") {
  Vec2 xp{0.35, -0.15};
  double xn = 0.6, t = 0.4;
  QuadratureConfig qc;
  qc.rel_tol = 1e-8;
  double h = 2e-3;
  SUBCASE("normal derivative") {
    double fd = (G_kernel(3, 1, xp, xn + h, t, {}, qc) -
                 G_kernel(3, 1, xp, xn - h, t, {}, qc)) /
                (2.0 * h);
    CHECK(rel_diff(fd, G_kernel(3, 1, xp, xn, t, DerivOrder{1, 0, 0, 0}, qc)) < 1e-4);
  }
  SUBCASE("second normal derivative") {
    DerivOrder d1{1, 0, 0, 0};
    double fd = (G_kernel(1, 2, xp, xn + h, t, d1, qc) -
                 G_kernel(1, 2, xp, xn - h, t, d1, qc)) /
                (2.0 * h);
    CHECK(rel_diff(fd, G_kernel(1, 2, xp, xn, t, DerivOrder{2, 0, 0, 0}, qc)) < 1e-4);
  }
  SUBCASE("tangential derivative") {
    Vec2 xpp{xp[0] + h, xp[1]}, xpm{xp[0] - h, xp[1]};
    double fd =
        (G_kernel(2, 1, xpp, xn, t, {}, qc) - G_kernel(2, 1, xpm, xn, t, {}, qc)) /
        (2.0 * h);
    CHECK(rel_diff(fd, G_kernel(2, 1, xp, xn, t, DerivOrder{0, 1, 0, 0}, qc)) < 1e-4);
  }
  SUBCASE("time derivative") {
    double ht = 2e-3 * t;
    double fd = (G_kernel(3, 2, xp, xn, t + ht, {}, qc) -
                 G_kernel(3, 2, xp, xn, t - ht, {}, qc)) /
                (2.0 * ht);
    CHECK(rel_diff(fd, G_kernel(3, 2, xp, xn, t, DerivOrder{0, 0, 0, 1}, qc)) < 1e-4);
  }
}

TEST_CASE("kernels scale with their parabolic homogeneity exponents") {
  Vec2 xp{0.5, 0.3};
  double xn = 0.4, t = 0.35, lam = 2.0;
  Vec2 xl{lam * xp[0], lam * xp[1]};
  double xnl = lam * xn, tl = lam * lam * t;
  CHECK(rel_diff(G_kernel(3, 1, xl, xnl, tl) * std::pow(lam, 4.0),
                 G_kernel(3, 1, xp, xn, t)) < 1e-4);
  CHECK(rel_diff(K_kernel(1, 1, xl, xnl, tl) * std::pow(lam, 4.0),
                 K_kernel(1, 1, xp, xn, t)) < 1e-4);
  CHECK(rel_diff(poisson_heat_A(xl, xnl, tl) * std::pow(lam, 2.0),
                 poisson_heat_A(xp, xn, t)) < 1e-4);
  CHECK(rel_diff(pressure_kernel_smooth(1, xl, xnl, tl) * std::pow(lam, 5.0),
                 pressure_kernel_smooth(1, xp, xn, t)) < 1e-4);
  DerivOrder d1{1, 0, 0, 0};
  CHECK(rel_diff(G_kernel(3, 1, xl, xnl, tl, d1) * std::pow(lam, 5.0),
                 G_kernel(3, 1, xp, xn, t, d1)) < 1e-4);
}

TEST_CASE("velocity boundary kernel decomposes into its two parts") {
  Vec2 xp{0.25, 0.45};
  double xn = 0.55, t = 0.6;
  VecN x{xp[0], xp[1], xn};
  double dng = heat_gamma_deriv(x, t, DerivOrder{1, 0, 0, 0});
  CHECK(rel_diff(K_kernel(1, 1, xp, xn, t), -2.0 * dng + 4.0 * G_kernel(1, 1, xp, xn, t)) <
        1e-6);
  CHECK(rel_diff(K_kernel(3, 1, xp, xn, t), 4.0 * G_kernel(3, 1, xp, xn, t)) < 1e-10);
}

TEST_CASE("smooth pressure kernel is the scaled tangential gradient of the potential") {
  Vec2 xp{0.3, 0.2};
  double xn = 0.5, t = 0.45;
  double pj = pressure_kernel_smooth(2, xp, xn, t);
  double da = poisson_heat_A(xp, xn, t, DerivOrder{0, 1, 1, 0});
  CHECK(rel_diff(pj, -2.0 / t * da) < 1e-6);
}

TEST_CASE("instantaneous pressure kernel is harmonic and matches the derivative table") {
  Vec2 xp{0.4, -0.3};
  double xn = 0.6;
  VecN x{xp[0], xp[1], xn};
  CHECK(rel_diff(pressure_instantaneous(1, xp, xn),
                 -2.0 * laplace_fundamental(x, DerivOrder{1, 1, 0, 0})) < 1e-13);
  double h = 1e-4, base = pressure_instantaneous(2, xp, xn);
  double lap = (pressure_instantaneous(2, Vec2{xp[0] + h, xp[1]}, xn) +
                pressure_instantaneous(2, Vec2{xp[0] - h, xp[1]}, xn) +
                pressure_instantaneous(2, Vec2{xp[0], xp[1] + h}, xn) +
                pressure_instantaneous(2, Vec2{xp[0], xp[1] - h}, xn) +
                pressure_instantaneous(2, xp, xn + h) +
                pressure_instantaneous(2, xp, xn - h) - 6.0 * base) /
               (h * h);
  CHECK(std::abs(lap) < 1e-4 * std::abs(base) / (h * h) * h);
}

TEST_CASE("batched table agrees with individual evaluations") {
  Vec2 xp{0.3, 0.1};
  double xn = 0.45, t = 0.5;
  std::vector<DerivOrder> ds{{0, 0, 0, 0}, {1, 0, 0, 0}, {0, 2, 1, 0}, {0, 0, 0, 1}};
  auto tab = kernel_table(KernelKind::G, 3, 2, xp, xn, t, ds);
  for (size_t q = 0; q < ds.size(); ++q)
    CHECK(rel_diff(tab[q], G_kernel(3, 2, xp, xn, t, ds[q])) < 1e-5);
}

TEST_CASE("bound ratio is the kernel magnitude against its envelope") {
  Vec2 xp{0.8, -0.6};
  double xn = 0.9, t = 1.3;
  DerivOrder d{1, 1, 0, 0};
  double ratio = kernel_bound_ratio(KernelKind::K, 1, 1, xp, xn, t, d);
  double v = K_kernel(1, 1, xp, xn, t, d);
  CHECK(rel_diff(ratio, std::abs(v) / kernel_envelope(KernelKind::K, d, xp, xn, t)) < 1e-9);
  CHECK_THROWS_AS(kernel_bound_ratio(KernelKind::PiSmooth, 0, 1, xp, xn, t, d),
                  UnsupportedOrderError);
}

TEST_CASE("layer kernel evaluation is deterministic") {
  Vec2 xp{0.2, -0.5};
  double a = K_kernel(2, 1, xp, 0.3, 0.7);
  double b = K_kernel(2, 1, xp, 0.3, 0.7);
  CHECK(a == b);
}

TEST_CASE("kernel symmetry under tangential reflection") {
  Vec2 xp{0.4, 0.25};
  Vec2 xm{-0.4, 0.25};
  double xn = 0.5, t = 0.4;
  /* G_11 is even in x_1; G_31 is odd in x_1 */
  CHECK(rel_diff(G_kernel(1, 1, xp, xn, t), G_kernel(1, 1, xm, xn, t)) < 1e-5);
  CHECK(rel_diff(G_kernel(3, 1, xp, xn, t), -G_kernel(3, 1, xm, xn, t)) < 1e-5);
}
