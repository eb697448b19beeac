#pragma once

#include <functional>
#include <vector>

#include "ustokes/types.hpp"

namespace ustokes {

/* vector-valued adaptive quadrature with global error heaps; deterministic: single
   threaded, fixed refinement order (priority, then insertion id).
   Convergence: per component err_c <= rel_tol * max(|I_c|, floor_c, noise_rel/rel_tol
   * L1_c) where L1_c is the accumulated absolute mass; abs floors let integrals that
   vanish by symmetry converge, the noise term stops refinement at the round-off floor
   of heavily cancelling integrands. Failure raises AccuracyError. */

struct QuadResult {
  std::vector<double> value;
  double achieved = 0.0; /* worst component-relative error estimate */
  long evals = 0;
};

using Integrand1D = std::function<void(double, double*)>;
using Integrand2D = std::function<void(double, double, double*)>;

struct QuadOptions {
  double rel_tol = 1e-6;
  double noise_rel = 1e-13; /* round-off floor relative to the component L1 mass */
  int max_depth = 26;
  long max_intervals = 200000;
  std::vector<double> abs_floor; /* empty, size 1 (shared), or size m */
  std::vector<double> abs_noise; /* absolute error floor for integrands whose own
                                    evaluation cancels below this resolution */
};

QuadResult integrate_1d(const Integrand1D& f, int m, double a, double b,
                        const std::vector<double>& interior_breaks, const QuadOptions& opt);

/* rectangle [ax,bx] x [ay,by]; bisects the axis longer in units of (scale_x, scale_y) */
QuadResult integrate_2d(const Integrand2D& f, int m, double ax, double bx, double ay,
                        double by, const std::vector<double>& xbreaks,
                        const std::vector<double>& ybreaks, const QuadOptions& opt,
                        double scale_x = 0.0, double scale_y = 0.0);

}  // namespace ustokes
