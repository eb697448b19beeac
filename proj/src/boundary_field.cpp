#include "ustokes/boundary_field.hpp"

#include <cinttypes>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <memory>

#include "ustokes/spectral.hpp"

namespace ustokes {

namespace {

void check_grid(double L, int n_tan, double T, int n_time) {
  if (!(L > 0.0) || !(T > 0.0)) throw ConfigError("field box and horizon must be positive");
  if (n_tan < 4 || n_tan % 2 != 0) throw ConfigError("n_tan must be even with n_tan >= 4");
  if (n_time < 3) throw ConfigError("n_time must be >= 3 (cubic time interpolation)");
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

BoundaryField make_field(double L, int n_tan, double T, int n_time) {
  check_grid(L, n_tan, T, n_time);
  BoundaryField f;
  f.L = L;
  f.T = T;
  f.n_tan = n_tan;
  f.n_time = n_time;
  f.samples.assign(static_cast<size_t>(n_time + 1) * n_tan * n_tan * kDim, 0.0);
  return f;
}

BoundaryField sample_function(double L, int n_tan, double T, int n_time,
                              const std::function<VecN(const Vec2&, double)>& g) {
  BoundaryField f = make_field(L, n_tan, T, n_time);
  for (int k = 0; k <= n_time; ++k)
    for (int iy = 0; iy < n_tan; ++iy)
      for (int ix = 0; ix < n_tan; ++ix) {
        VecN v = g({f.node_tan(ix), f.node_tan(iy)}, f.node_time(k));
        for (int c = 0; c < kDim; ++c) f.at(k, iy, ix, c) = v[c];
      }
  return f;
}

void validate(const AtomExpansion& e) {
  if (e.atoms.size() != e.coeffs.size() || e.atoms.size() != e.direction.size())
    throw ConfigError("expansion lists must have equal length");
  for (double c : e.coeffs)
    if (!std::isfinite(c)) throw ConfigError("expansion coefficients must be finite");
  for (int j : e.direction)
    if (j < 1 || j > kTan) throw ConfigError("expansion direction must be 1..n-1");
}

VecN expansion_value(const AtomExpansion& e, const Vec2& x_tan, double t) {
  VecN v{0.0, 0.0, 0.0};
  for (size_t q = 0; q < e.atoms.size(); ++q)
    v[e.direction[q] - 1] += e.coeffs[q] * atom_value(e.atoms[q], x_tan, t);
  return v;
}

BoundaryField sample_expansion(const AtomExpansion& e, double L, int n_tan, double T,
                               int n_time) {
  validate(e);
  BoundaryField f = make_field(L, n_tan, T, n_time);
  const double margin = 2.0 * f.spacing_tan();
  for (const Atom& a : e.atoms) {
    if (L < 8.0 * a.r) throw ConfigError("box too small: need L >= 8 r for every atom");
    double rho = a.r / std::sqrt(2.0);
    for (int ax = 0; ax < kTan; ++ax)
      if (a.center_tan[ax] - rho < -L + margin || a.center_tan[ax] + rho > L - margin)
        throw ConfigError("atom support must keep a two-cell margin from the box edge");
    if (a.t0 < 0.0 || a.t0 + a.r * a.r > T)
      throw ConfigError("atom time support must lie inside (0, T)");
  }
  for (int k = 0; k <= n_time; ++k)
    for (int iy = 0; iy < n_tan; ++iy)
      for (int ix = 0; ix < n_tan; ++ix) {
        VecN v = expansion_value(e, {f.node_tan(ix), f.node_tan(iy)}, f.node_time(k));
        for (int c = 0; c < kTan; ++c) f.at(k, iy, ix, c) = v[c];
      }
  return f;
}

void validate_grid(const BoundaryField& f) {
  check_grid(f.L, f.n_tan, f.T, f.n_time);
  if (f.samples.size() != static_cast<size_t>(f.n_time + 1) * f.n_tan * f.n_tan * kDim)
    throw ConfigError("field sample array has wrong size");
}

void validate_field(const BoundaryField& f) {
  validate_grid(f);
  for (int k = 0; k <= f.n_time; ++k)
    for (int iy = 0; iy < f.n_tan; ++iy)
      for (int ix = 0; ix < f.n_tan; ++ix) {
        bool edge = ix <= 1 || iy <= 1 || ix == f.n_tan - 1 || iy == f.n_tan - 1;
        if (!edge) continue;
        for (int c = 0; c < kDim; ++c)
          if (f.at(k, iy, ix, c) != 0.0)
            throw ContractError("boundary data must vanish within one cell of the box edge");
      }
}

std::vector<double> riesz_transform(const std::vector<double>& slice, int n_tan,
                                    double L, int j) {
  if (j < 1 || j > kTan) throw ConfigError("riesz component must be 1..n-1");
  if (!(L > 0.0)) throw ConfigError("riesz box half-width must be positive");
  auto spec = forward_spectrum(slice, n_tan);
  for (int a = 0; a < n_tan; ++a)
    for (int b = 0; b < n_tan; ++b) {
      auto& z = spec[static_cast<size_t>(a) * n_tan + b];
      if ((a == 0 && b == 0) || a == n_tan / 2 || b == n_tan / 2) {
        z = 0.0;
        continue;
      }
      double xi_x = spectral_freq(b, n_tan, L);
      double xi_y = spectral_freq(a, n_tan, L);
      double s = (j == 1 ? xi_x : xi_y) / std::hypot(xi_x, xi_y);
      z *= std::complex<double>(0.0, -s);
    }
  return inverse_slice(spec, n_tan);
}

std::pair<BoundaryField, BoundaryField> split_boundary_data(const BoundaryField& g) {
  check_grid(g.L, g.n_tan, g.T, g.n_time);
  BoundaryField g1 = make_field(g.L, g.n_tan, g.T, g.n_time);
  BoundaryField g2 = g1;
  const size_t ns = static_cast<size_t>(g.n_tan) * g.n_tan;
  std::vector<double> gn(ns);
  for (int k = 0; k <= g.n_time; ++k) {
    for (int iy = 0; iy < g.n_tan; ++iy)
      for (int ix = 0; ix < g.n_tan; ++ix)
        gn[static_cast<size_t>(iy) * g.n_tan + ix] = g.at(k, iy, ix, 2);
    for (int j = 1; j <= kTan; ++j) {
      auto r = riesz_transform(gn, g.n_tan, g.L, j);
      for (int iy = 0; iy < g.n_tan; ++iy)
        for (int ix = 0; ix < g.n_tan; ++ix)
          g1.at(k, iy, ix, j - 1) = r[static_cast<size_t>(iy) * g.n_tan + ix];
    }
    for (int iy = 0; iy < g.n_tan; ++iy)
      for (int ix = 0; ix < g.n_tan; ++ix) {
        g1.at(k, iy, ix, 2) = g.at(k, iy, ix, 2);
        for (int c = 0; c < kTan; ++c)
          g2.at(k, iy, ix, c) = g.at(k, iy, ix, c) - g1.at(k, iy, ix, c);
        /* g2_n = g_n - g_n = 0 identically */
      }
  }
  return {std::move(g1), std::move(g2)};
}

void save_field(const BoundaryField& f, const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "w"));
  if (!fp) throw ConfigError("cannot open " + path + " for writing");
  std::fprintf(fp.get(), "ustokes-field 1\n");
  std::fprintf(fp.get(), "dim %d\n", kDim);
  std::fprintf(fp.get(), "L %.17g\nT %.17g\n", f.L, f.T);
  std::fprintf(fp.get(), "n_tan %d\nn_time %d\n", f.n_tan, f.n_time);
  std::fprintf(fp.get(), "samples %" PRIu64 "\n", static_cast<uint64_t>(f.samples.size()));
  for (size_t i = 0; i < f.samples.size(); i += kDim)
    std::fprintf(fp.get(), "%.17g %.17g %.17g\n", f.samples[i], f.samples[i + 1],
                 f.samples[i + 2]);
}

BoundaryField load_field(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "r"));
  if (!fp) throw ConfigError("cannot open " + path);
  char tag[64];
  int ver = 0, dim = 0;
  if (std::fscanf(fp.get(), "%63s %d", tag, &ver) != 2 ||
      std::strcmp(tag, "ustokes-field") != 0 || ver != 1)
    throw ConfigError("not a ustokes-field v1 file: " + path);
  BoundaryField f;
  uint64_t count = 0;
  if (std::fscanf(fp.get(), " dim %d L %lg T %lg n_tan %d n_time %d samples %" SCNu64,
                  &dim, &f.L, &f.T, &f.n_tan, &f.n_time, &count) != 6 ||
      dim != kDim)
    throw ConfigError("malformed field header in " + path);
  check_grid(f.L, f.n_tan, f.T, f.n_time);
  f.samples.resize(count);
  for (size_t i = 0; i < f.samples.size(); ++i)
    if (std::fscanf(fp.get(), "%lg", &f.samples[i]) != 1)
      throw ConfigError("truncated field data in " + path);
  validate_field(f);
  return f;
}

void export_csv(const BoundaryField& f, const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "w"));
  if (!fp) throw ConfigError("cannot open " + path + " for writing");
  std::fprintf(fp.get(), "t,y,x,g1,g2,gn\n");
  for (int k = 0; k <= f.n_time; ++k)
    for (int iy = 0; iy < f.n_tan; ++iy)
      for (int ix = 0; ix < f.n_tan; ++ix)
        std::fprintf(fp.get(), "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n", f.node_time(k),
                     f.node_tan(iy), f.node_tan(ix), f.at(k, iy, ix, 0),
                     f.at(k, iy, ix, 1), f.at(k, iy, ix, 2));
}

}  // namespace ustokes
