#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ustokes {

/* spatial dimension of the half-space backend; closed-form kernels stay generic in n */
inline constexpr int kDim = 3;
inline constexpr int kTan = kDim - 1;

using Vec2 = std::array<double, kTan>;
using VecN = std::array<double, kDim>;

inline double norm2(const Vec2& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1]); }
inline double normN(const VecN& v) {
  return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

/* evaluation point (x', x_n, t); interior evaluation requires x_n > 0, t > 0 */
struct SpaceTimePoint {
  Vec2 x_tan{0.0, 0.0};
  double x_n = 0.0;
  double t = 0.0;
};

/* derivative request: l0 normal, k0 tangential along axis tan_dir (0-based), m0 time */
struct DerivOrder {
  int l0 = 0;
  int k0 = 0;
  int tan_dir = 0;
  int m0 = 0;

  int weight() const { return l0 + k0 + 2 * m0; }
  auto operator<=>(const DerivOrder&) const = default;
};

inline DerivOrder d000() { return DerivOrder{}; }

struct QuadratureConfig {
  double rel_tol = 1e-6;
  double trunc_sigma = 6.0; /* truncation radius in Gaussian standard deviations sqrt(2t) */
  int max_depth = 26;
  int dim = kDim;
};

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SingularityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnsupportedOrderError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ContractError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct AccuracyError : std::runtime_error {
  double achieved; /* worst relative error estimate when adaptivity gave up */
  AccuracyError(const std::string& msg, double a) : std::runtime_error(msg), achieved(a) {}
};

inline void validate(const QuadratureConfig& c) {
  if (!(c.rel_tol > 0.0 && c.rel_tol <= 1e-2))
    throw ConfigError("rel_tol must lie in (0, 1e-2], got " + std::to_string(c.rel_tol));
  if (!(c.trunc_sigma >= 6.0))
    throw ConfigError("trunc_sigma must be >= 6, got " + std::to_string(c.trunc_sigma));
  if (c.max_depth < 4) throw ConfigError("max_depth must be >= 4");
  if (c.dim < 3) throw ConfigError("dim must be >= 3, got " + std::to_string(c.dim));
}

/* quadrature backend is n = 3 only; closed-form evaluators accept any dim >= 3 */
inline void require_backend_dim(int dim) {
  if (dim != kDim)
    throw ConfigError("dim: quadrature backend supports dim = 3 only, got " +
                      std::to_string(dim));
}

inline void require_supported(const DerivOrder& d, int max_weight = 3) {
  if (d.l0 < 0 || d.k0 < 0 || d.m0 < 0)
    throw UnsupportedOrderError("derivative orders must be nonnegative");
  if (d.tan_dir < 0 || d.tan_dir >= kTan)
    throw UnsupportedOrderError("tan_dir out of range");
  if (d.weight() > max_weight)
    throw UnsupportedOrderError("derivative weight l0+k0+2*m0 exceeds supported range " +
                                std::to_string(max_weight));
}

inline void require_interior(const SpaceTimePoint& pt) {
  if (!(pt.x_n > 0.0)) throw DomainError("interior evaluation requires x_n > 0");
  if (!(pt.t > 0.0)) throw DomainError("interior evaluation requires t > 0");
}

}  // namespace ustokes
