#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ustokes/gaussians.hpp"
#include "ustokes/quadrature.hpp"

using namespace ustokes;

TEST_CASE("single panel is exact for low-degree polynomials") {
  auto f = [](double x, double* out) {
    out[0] = x * x * x * x;
    out[1] = 1.0 + 3.0 * x;
  };
  auto r = integrate_1d(f, 2, 0.0, 1.0, {}, {});
  CHECK(std::abs(r.value[0] - 0.2) < 1e-15);
  CHECK(std::abs(r.value[1] - 2.5) < 1e-14);
  CHECK(r.evals == 15);
}

TEST_CASE("vector integrand converges componentwise") {
  auto f = [](double x, double* out) {
    out[0] = std::sin(x);
    out[1] = std::cos(x);
    out[2] = std::exp(x);
  };
  QuadOptions opt;
  opt.rel_tol = 1e-10;
  auto r = integrate_1d(f, 3, 0.0, M_PI / 2, {}, opt);
  CHECK(std::abs(r.value[0] - 1.0) < 1e-12);
  CHECK(std::abs(r.value[1] - 1.0) < 1e-12);
  CHECK(std::abs(r.value[2] - (std::exp(M_PI / 2) - 1.0)) < 1e-11);
}

TEST_CASE("adaptive refinement handles an endpoint algebraic singularity") {
  auto f = [](double x, double* out) { out[0] = 1.0 / std::sqrt(x); };
  QuadOptions opt;
  opt.rel_tol = 1e-9;
  opt.max_depth = 60;
  auto r = integrate_1d(f, 1, 0.0, 1.0, {}, opt);
  CHECK(std::abs(r.value[0] - 2.0) < 1e-8);
}

TEST_CASE("interior breakpoints make a kink cheap and exact") {
  auto f = [](double x, double* out) { out[0] = std::abs(x - 1.0 / 3.0); };
  auto r = integrate_1d(f, 1, 0.0, 1.0, {1.0 / 3.0}, {});
  CHECK(std::abs(r.value[0] - 5.0 / 18.0) < 1e-15);
  CHECK(r.evals == 30); /* two exact panels, no refinement */
}

TEST_CASE("exhausted depth budget raises an accuracy error") {
  auto f = [](double x, double* out) { out[0] = (x < 0.123456) ? 0.0 : 1.0; };
  QuadOptions opt;
  opt.rel_tol = 1e-12;
  opt.max_depth = 3;
  bool threw = false;
  try {
    integrate_1d(f, 1, 0.0, 1.0, {}, opt);
  } catch (const AccuracyError& e) {
    threw = true;
    CHECK(e.achieved > 1e-12);
  }
  CHECK(threw);
}

TEST_CASE("absolute floor accepts a vanishing component") {
  /* odd component integrates to 0; without a floor the relative test can never pass */
  auto f = [](double x, double* out) {
    out[0] = x * std::exp(-x * x);
    out[1] = std::exp(-x * x);
  };
  QuadOptions opt;
  opt.rel_tol = 1e-10;
  opt.abs_floor = {1.0, 0.0};
  auto r = integrate_1d(f, 2, -6.0, 6.0, {}, opt);
  CHECK(std::abs(r.value[0]) < 1e-10);
  CHECK(std::abs(r.value[1] - std::sqrt(M_PI)) < 1e-10);
}

TEST_CASE("2-D product rule integrates a separable polynomial exactly") {
  auto f = [](double x, double y, double* out) { out[0] = x * y; };
  auto r = integrate_2d(f, 1, 0.0, 1.0, 0.0, 1.0, {}, {}, {});
  CHECK(std::abs(r.value[0] - 0.25) < 1e-15);
}

TEST_CASE("2-D adaptive captures a plane Gaussian to unit mass") {
  auto f = [](double x, double y, double* out) {
    out[0] = std::exp(-(x * x + y * y) / 4.0) / (4.0 * M_PI);
  };
  QuadOptions opt;
  opt.rel_tol = 1e-10;
  auto r = integrate_2d(f, 1, -12.0, 12.0, -12.0, 12.0, {}, {}, opt);
  CHECK(std::abs(r.value[0] - 1.0) < 1e-9);
}

TEST_CASE("anisotropy scales steer the split axis for an elongated peak") {
  auto f = [](double x, double y, double* out) {
    out[0] = std::exp(-x * x - 100.0 * y * y);
  };
  QuadOptions opt;
  opt.rel_tol = 1e-9;
  auto r = integrate_2d(f, 1, -8.0, 8.0, -0.8, 0.8, {}, {}, opt, 1.0, 0.1);
  CHECK(std::abs(r.value[0] - M_PI / 10.0) < 1e-9);
}

TEST_CASE("heat kernel in three dimensions carries unit mass") {
  auto f = [](double z, double* out) { out[0] = gauss1(z, 1.0); };
  QuadOptions opt;
  opt.rel_tol = 1e-12;
  double half = 8.0 * std::sqrt(2.0); /* 8 standard deviations at t = 1 */
  auto r = integrate_1d(f, 1, -half, half, {}, opt);
  double mass3 = r.value[0] * r.value[0] * r.value[0];
  CHECK(std::abs(mass3 - 1.0) < 1e-12);
}

TEST_CASE("gaussian moment recursion matches direct quadrature") {
  const double kInvSqrtPi = 0.56418958354775628695;
  double cases[4][2] = {{-0.7, 1.3}, {0.2, 2.5}, {-3.0, -0.4}, {-9.0, 9.0}};
  for (auto& c : cases) {
    double J[kJMax + 1];
    gauss_moments(c[0], c[1], 6, J);
    for (int q = 0; q <= 6; ++q) {
      auto f = [&](double s, double* out) {
        out[0] = kInvSqrtPi * std::pow(s, q) * std::exp(-s * s);
      };
      QuadOptions opt;
      opt.rel_tol = 1e-11;
      opt.abs_floor = {1e-6};
      auto r = integrate_1d(f, 1, c[0], c[1], {}, opt);
      CHECK(std::abs(J[q] - r.value[0]) < 1e-10);
    }
  }
}

TEST_CASE("repeated runs are bitwise identical") {
  auto f = [](double x, double* out) { out[0] = 1.0 / std::sqrt(std::abs(x - 0.3)); };
  QuadOptions opt;
  opt.rel_tol = 1e-8;
  opt.max_depth = 60;
  auto a = integrate_1d(f, 1, 0.0, 1.0, {0.3}, opt);
  auto b = integrate_1d(f, 1, 0.0, 1.0, {0.3}, opt);
  CHECK(a.value[0] == b.value[0]);
  CHECK(a.evals == b.evals);
}
