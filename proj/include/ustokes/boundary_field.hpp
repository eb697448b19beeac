#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ustokes/atoms.hpp"
#include "ustokes/types.hpp"

namespace ustokes {

/* Boundary data g = (g', g_n) on a uniform grid: tangentially periodic on
   [-L, L)^2 with n_tan nodes per axis, time slices t_k = k T / n_time for
   k = 0..n_time.  Component 2 is the normal part g_n. */
struct BoundaryField {
  double L = 1.0;
  double T = 1.0;
  int n_tan = 0;
  int n_time = 0;
  std::vector<double> samples; /* [time][iy][ix][component] */

  double spacing_tan() const { return 2.0 * L / n_tan; }
  double spacing_time() const { return T / n_time; }
  double node_tan(int i) const { return -L + spacing_tan() * i; }
  double node_time(int k) const { return spacing_time() * k; }
  size_t idx(int k, int iy, int ix, int c) const {
    return ((static_cast<size_t>(k) * n_tan + iy) * n_tan + ix) * kDim + c;
  }
  double at(int k, int iy, int ix, int c) const { return samples[idx(k, iy, ix, c)]; }
  double& at(int k, int iy, int ix, int c) { return samples[idx(k, iy, ix, c)]; }
};

BoundaryField make_field(double L, int n_tan, double T, int n_time);
BoundaryField sample_function(double L, int n_tan, double T, int n_time,
                              const std::function<VecN(const Vec2&, double)>& g);

/* tangential atom data: g' = sum_k c_k a_k e_{j_k}, g_n = 0; j is 1-based */
struct AtomExpansion {
  std::vector<Atom> atoms;
  std::vector<double> coeffs;
  std::vector<int> direction;
};
void validate(const AtomExpansion& e);
VecN expansion_value(const AtomExpansion& e, const Vec2& x_tan, double t);
/* samples the expansion; every atom must fit the box with L >= 8r and a
   two-cell tangential margin, and sit inside the time horizon */
BoundaryField sample_expansion(const AtomExpansion& e, double L, int n_tan, double T,
                               int n_time);

/* grid sanity: positive box and horizon, even n_tan >= 4, n_time >= 3, sample
   array sized to the grid */
void validate_grid(const BoundaryField& f);
/* validate_grid plus: zero data within one cell of the tangential edge
   (periodic truncation then mimics whole-space data) */
void validate_field(const BoundaryField& f);

/* Riesz transform of one scalar slice (row-major n x n, iy outer): Fourier
   multiplier -i xi_j / |xi|; the zero mode and the Nyquist rows map to 0 */
std::vector<double> riesz_transform(const std::vector<double>& slice, int n_tan,
                                    double L, int j);

/* g = g1 + g2 with g1 = (R g_n, g_n), g2 = (g' - R g_n, 0); the sum is exact
   on every node because g2 is formed as g - g1 */
std::pair<BoundaryField, BoundaryField> split_boundary_data(const BoundaryField& g);

/* textual serialization (%.17g samples, exact double round-trip) and CSV export */
void save_field(const BoundaryField& f, const std::string& path);
BoundaryField load_field(const std::string& path);
void export_csv(const BoundaryField& f, const std::string& path);

}  // namespace ustokes
