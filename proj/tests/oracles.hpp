// Independent reference implementations for the tests: a fixed-step RK4
// integrator, adaptive Simpson quadrature, and a seeded generator.  These
// deliberately share no code with the library's own quadrature or series
// machinery.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

// Fixed-step classical RK4 for u' = f(t, u); returns u(t1).
inline cplx rk4(const std::function<cplx(double, cplx)>& f, double t0, cplx u0,
                double t1, int steps) {
  double h = (t1 - t0) / steps;
  cplx u = u0;
  double t = t0;
  for (int i = 0; i < steps; ++i) {
    cplx k1 = f(t, u);
    cplx k2 = f(t + h / 2, u + (h / 2) * k1);
    cplx k3 = f(t + h / 2, u + (h / 2) * k2);
    cplx k4 = f(t + h, u + h * k3);
    u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
  }
  return u;
}

namespace detail {
inline double simpson_rec(const std::function<double(double)>& f, double a,
                          double b, double fa, double fm, double fb,
                          double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}
}  // namespace detail

inline double simpson(const std::function<double(double)>& f, double a,
                      double b, double tol = 1e-12) {
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

// Borel sum of the alternating factorial series sum_n (-1)^n n! t^{n+1}:
// a(t) = t * int_0^inf e^{-s} / (1 + t s) ds for t > 0.
inline double euler_series_sum(double t) {
  double cut = 50.0;  // e^{-50} ~ 2e-22 tail
  return t * simpson([t](double s) { return std::exp(-s) / (1.0 + t * s); },
                     0.0, cut, 1e-14);
}

inline std::mt19937_64 seeded_rng(std::uint64_t salt = 0) {
  return std::mt19937_64(0xB0DE5EEDull + salt);
}

inline cplx random_cplx(std::mt19937_64& g, double scale = 1.0) {
  std::uniform_real_distribution<double> d(-scale, scale);
  return {d(g), d(g)};
}

}  // namespace oracle
