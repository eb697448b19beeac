#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <cstring>

#include "doctest.h"
#include "ustokes/boundary_field.hpp"

using namespace ustokes;

namespace {

double slice_l2(const std::vector<double>& s) {
  double q = 0.0;
  for (double v : s) q += v * v;
  return std::sqrt(q);
}

/* mean-zero multi-mode test slice below the Nyquist rows */
std::vector<double> make_modes(int n, double L) {
  std::vector<double> f(static_cast<size_t>(n) * n);
  double h = 2.0 * L / n;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      double x = -L + h * ix, y = -L + h * iy;
      double w = M_PI / L;
      f[static_cast<size_t>(iy) * n + ix] = std::cos(w * (2 * x + y)) +
                                            0.5 * std::sin(w * (x - 3 * y)) +
                                            0.25 * std::cos(w * 5 * x);
    }
  return f;
}

AtomExpansion demo_expansion() {
  AtomExpansion e;
  e.atoms = {make_atom(0.4, {0.3, -0.2}, 0.1, 0.5, 2.0, 0),
             make_atom(0.25, {-0.5, 0.4}, 0.5, 0.5, 2.0, 0)};
  e.coeffs = {0.7, -1.3};
  e.direction = {1, 2};
  return e;
}

}  // namespace

TEST_CASE("grid construction guards") {
  CHECK_THROWS_AS(make_field(0.0, 16, 1.0, 4), ConfigError);
  CHECK_THROWS_AS(make_field(1.0, 15, 1.0, 4), ConfigError);
  CHECK_THROWS_AS(make_field(1.0, 2, 1.0, 4), ConfigError);
  CHECK_THROWS_AS(make_field(1.0, 16, -1.0, 4), ConfigError);
  CHECK_THROWS_AS(make_field(1.0, 16, 1.0, 2), ConfigError);
  BoundaryField f = make_field(4.0, 16, 1.0, 4);
  CHECK(f.spacing_tan() == doctest::Approx(0.5));
  CHECK(f.node_tan(8) == doctest::Approx(0.0));
  CHECK(f.samples.size() == 5u * 16 * 16 * 3);
}

TEST_CASE("expansion sampling matches pointwise values") {
  AtomExpansion e = demo_expansion();
  BoundaryField f = sample_expansion(e, 4.0, 64, 1.0, 8);
  validate_field(f);
  for (int k : {1, 4, 7})
    for (int iy : {28, 32, 37})
      for (int ix : {25, 31, 36}) {
        VecN v = expansion_value(e, {f.node_tan(ix), f.node_tan(iy)}, f.node_time(k));
        CHECK(f.at(k, iy, ix, 0) == v[0]);
        CHECK(f.at(k, iy, ix, 1) == v[1]);
        CHECK(f.at(k, iy, ix, 2) == 0.0);
      }
  /* some sample is nonzero */
  double mx = 0.0;
  for (double v : f.samples) mx = std::max(mx, std::abs(v));
  CHECK(mx > 0.01);
}

TEST_CASE("expansion sampling rejects bad geometry") {
  AtomExpansion e = demo_expansion();
  CHECK_THROWS_AS(sample_expansion(e, 2.0, 32, 1.0, 4), ConfigError); /* L < 8r */
  AtomExpansion edge = e;
  edge.atoms[0].center_tan = {3.9, 0.0};
  CHECK_THROWS_AS(sample_expansion(edge, 4.0, 32, 1.0, 4), ConfigError);
  AtomExpansion late = e;
  late.atoms[0].t0 = 0.95; /* support exits the horizon */
  CHECK_THROWS_AS(sample_expansion(late, 4.0, 32, 1.0, 4), ConfigError);
  AtomExpansion bad = e;
  bad.direction[0] = 3;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = e;
  bad.coeffs.pop_back();
  CHECK_THROWS_AS(validate(bad), ConfigError);
}

TEST_CASE("riesz transform of a single commensurate mode") {
  const int n = 32;
  const double L = 1.0;
  const double w = M_PI / L;
  /* k = (2w, w): R_1 cos(k x) = (k_1/|k|) sin(k x) */
  std::vector<double> f(static_cast<size_t>(n) * n);
  double h = 2.0 * L / n;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix)
      f[static_cast<size_t>(iy) * n + ix] =
          std::cos(w * (2 * (-L + h * ix) + (-L + h * iy)));
  auto r1 = riesz_transform(f, n, L, 1);
  auto r2 = riesz_transform(f, n, L, 2);
  double c1 = 2.0 / std::sqrt(5.0), c2 = 1.0 / std::sqrt(5.0);
  double worst = 0.0;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      double s = std::sin(w * (2 * (-L + h * ix) + (-L + h * iy)));
      size_t q = static_cast<size_t>(iy) * n + ix;
      worst = std::max(worst, std::abs(r1[q] - c1 * s));
      worst = std::max(worst, std::abs(r2[q] - c2 * s));
    }
  CHECK(worst < 1e-10);
  CHECK_THROWS_AS(riesz_transform(f, n, L, 3), ConfigError);
  CHECK_THROWS_AS(riesz_transform(f, n + 1, L, 1), ConfigError);
}

TEST_CASE("riesz transform vanishes at the center of a radial field") {
  const int n = 32;
  const double L = 1.0;
  std::vector<double> f(static_cast<size_t>(n) * n);
  double h = 2.0 * L / n;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      double x = -L + h * ix, y = -L + h * iy;
      f[static_cast<size_t>(iy) * n + ix] = std::exp(-(x * x + y * y) / 0.08);
    }
  auto r = riesz_transform(f, n, L, 1);
  CHECK(std::abs(r[static_cast<size_t>(n / 2) * n + n / 2]) < 1e-12);
}

TEST_CASE("riesz multiplier identities on the grid") {
  const int n = 32;
  const double L = 1.5;
  auto f = make_modes(n, L);
  /* sum_j R_j R_j f = -f for mean-zero Nyquist-free data */
  auto r11 = riesz_transform(riesz_transform(f, n, L, 1), n, L, 1);
  auto r22 = riesz_transform(riesz_transform(f, n, L, 2), n, L, 2);
  double worst = 0.0;
  for (size_t q = 0; q < f.size(); ++q)
    worst = std::max(worst, std::abs(r11[q] + r22[q] + f[q]));
  CHECK(worst < 1e-10);
  /* contraction in the grid L2 norm */
  CHECK(slice_l2(riesz_transform(f, n, L, 1)) <= slice_l2(f) + 1e-10);
  CHECK(slice_l2(riesz_transform(f, n, L, 2)) <= slice_l2(f) + 1e-10);
  /* determinism */
  auto again = riesz_transform(f, n, L, 1);
  auto first = riesz_transform(f, n, L, 1);
  CHECK(std::memcmp(again.data(), first.data(), sizeof(double) * first.size()) == 0);
}

TEST_CASE("boundary data split") {
  const int n = 32;
  BoundaryField g = make_field(2.0, n, 1.0, 3);
  /* smooth compact data in all three components */
  for (int k = 0; k <= g.n_time; ++k)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        double x = g.node_tan(ix), y = g.node_tan(iy);
        double b = std::exp(-(x * x + y * y) / 0.15) * (1.0 + 0.3 * k);
        g.at(k, iy, ix, 0) = 0.4 * b;
        g.at(k, iy, ix, 1) = -0.2 * b * x;
        g.at(k, iy, ix, 2) = b * (1.0 - x * y);
      }
  auto [g1, g2] = split_boundary_data(g);
  /* g2 has no normal part; the split reconstructs g exactly */
  double worst = 0.0, gn2 = 0.0;
  for (size_t q = 0; q < g.samples.size(); ++q)
    worst = std::max(worst, std::abs(g1.samples[q] + g2.samples[q] - g.samples[q]));
  for (int k = 0; k <= g.n_time; ++k)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) gn2 = std::max(gn2, std::abs(g2.at(k, iy, ix, 2)));
  /* identity g1 + g2 = g holds exactly in exact arithmetic; recombining the
     rounded g2 = g - g1 can re-round by one ulp */
  CHECK(worst <= 1e-15);
  CHECK(gn2 == 0.0);
  /* g1 tangential part is the Riesz transform of g_n */
  std::vector<double> gn(static_cast<size_t>(n) * n);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix)
      gn[static_cast<size_t>(iy) * n + ix] = g.at(2, iy, ix, 2);
  auto r1 = riesz_transform(gn, n, g.L, 1);
  double dmax = 0.0;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix)
      dmax = std::max(dmax, std::abs(g1.at(2, iy, ix, 0) -
                                     r1[static_cast<size_t>(iy) * n + ix]));
  CHECK(dmax == 0.0);

  /* zero normal data: g1 vanishes, g2 = g */
  BoundaryField h = g;
  for (int k = 0; k <= h.n_time; ++k)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) h.at(k, iy, ix, 2) = 0.0;
  auto [h1, h2] = split_boundary_data(h);
  double h1max = 0.0, h2diff = 0.0;
  for (size_t q = 0; q < h.samples.size(); ++q) {
    h1max = std::max(h1max, std::abs(h1.samples[q]));
    h2diff = std::max(h2diff, std::abs(h2.samples[q] - h.samples[q]));
  }
  CHECK(h1max == 0.0);
  CHECK(h2diff == 0.0);
}

TEST_CASE("serialization round-trip and CSV export") {
  AtomExpansion e = demo_expansion();
  BoundaryField f = sample_expansion(e, 4.0, 32, 1.0, 4);
  const char* path = "field_roundtrip.txt";
  save_field(f, path);
  BoundaryField g = load_field(path);
  CHECK(g.L == f.L);
  CHECK(g.T == f.T);
  CHECK(g.n_tan == f.n_tan);
  CHECK(g.n_time == f.n_time);
  REQUIRE(g.samples.size() == f.samples.size());
  CHECK(std::memcmp(g.samples.data(), f.samples.data(),
                    sizeof(double) * f.samples.size()) == 0);
  std::remove(path);

  const char* csv = "field_export.csv";
  export_csv(f, csv);
  std::FILE* fp = std::fopen(csv, "r");
  REQUIRE(fp != nullptr);
  char line[256];
  REQUIRE(std::fgets(line, sizeof line, fp) != nullptr);
  CHECK(std::strncmp(line, "t,y,x,g1,g2,gn", 14) == 0);
  std::fclose(fp);
  std::remove(csv);

  CHECK_THROWS_AS(load_field("no_such_field_file.txt"), ConfigError);
}
