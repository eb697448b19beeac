#include "ustokes/laplace_kernel.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace ustokes {

double unit_sphere_area(int n) {
  return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

namespace {

void add_term(RadialPoly& p, double c, int ea, int eb, int en, int rp) {
  if (c == 0.0) return;
  for (auto& t : p) {
    if (t.ea == ea && t.eb == eb && t.en == en && t.rp == rp) {
      t.c += c;
      return;
    }
  }
  p.push_back({c, ea, eb, en, rp});
}

/* d/dx_axis of sum c x_a^{ea} x_b^{eb} x_n^{en} r^{rp}, r^2 = |x|^2; axis 0 = a, 1 = b, 2 = n */
RadialPoly differentiate(const RadialPoly& p, int axis) {
  RadialPoly out;
  for (const auto& t : p) {
    int e = (axis == 0) ? t.ea : (axis == 1) ? t.eb : t.en;
    int da = (axis == 0), db = (axis == 1), dn = (axis == 2);
    if (e > 0) add_term(out, t.c * e, t.ea - da, t.eb - db, t.en - dn, t.rp);
    if (t.rp != 0) add_term(out, t.c * t.rp, t.ea + da, t.eb + db, t.en + dn, t.rp - 2);
  }
  return out;
}

}  // namespace

RadialPoly laplace_poly(int n, int ka, int kb, int l0) {
  static std::map<std::tuple<int, int, int, int>, RadialPoly> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_tuple(n, ka, kb, l0);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  RadialPoly p{{-1.0 / ((n - 2) * unit_sphere_area(n)), 0, 0, 0, 2 - n}};
  for (int i = 0; i < ka; ++i) p = differentiate(p, 0);
  for (int i = 0; i < kb; ++i) p = differentiate(p, 1);
  for (int i = 0; i < l0; ++i) p = differentiate(p, 2);
  cache.emplace(key, p);
  return p;
}

double radial_eval(const RadialPoly& p, double xa, double xb, double xn, double r2) {
  double r = std::sqrt(r2);
  double v = 0.0;
  for (const auto& t : p)
    v += t.c * std::pow(xa, t.ea) * std::pow(xb, t.eb) * std::pow(xn, t.en) *
         std::pow(r, t.rp);
  return v;
}

double laplace_fundamental(std::span<const double> x, const DerivOrder& d) {
  int n = static_cast<int>(x.size());
  if (n < 3) throw ConfigError("dim must be >= 3");
  if (d.m0 != 0) throw UnsupportedOrderError("laplace_fundamental is time-independent");
  if (d.k0 + d.l0 > 6) throw UnsupportedOrderError("derivative order beyond supported table");
  if (d.tan_dir < 0 || d.tan_dir >= n - 1) throw UnsupportedOrderError("tan_dir out of range");
  double r2 = 0.0;
  for (double xi : x) r2 += xi * xi;
  if (r2 == 0.0) throw SingularityError("laplace_fundamental at x = 0");
  return radial_eval(laplace_poly(n, d.k0, 0, d.l0), x[d.tan_dir], 0.0, x[n - 1], r2);
}

double dnE_rect_moment(const Vec2& xp, double h, double ax, double bx, double ay, double by) {
  if (!(h > 0.0)) throw DomainError("dnE_rect_moment requires h > 0");
  auto F = [&](double a, double b) {
    return std::atan2(a * b, h * std::sqrt(a * a + b * b + h * h));
  };
  double a1 = bx - xp[0], a0 = ax - xp[0];
  double b1 = by - xp[1], b0 = ay - xp[1];
  double omega = F(a1, b1) - F(a0, b1) - F(a1, b0) + F(a0, b0);
  return 0.25 * M_1_PI * omega;
}

}  // namespace ustokes
