#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "borelsum/borel_laplace.hpp"
#include "borelsum/errors.hpp"
#include "oracles.hpp"

using namespace borelsum;

namespace {

XiSeries basis(int a, double k, int order, cplx scale = 1.0) {
  XiSeries e(k, order, 1, 0);
  e.set_coeff(a, XPoly::constant(scale, 1, 0));
  return e;
}

double rel(cplx got, cplx want) {
  return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

}  // namespace

TEST_CASE("laplace of a weighted basis element is the plain power") {
  // Integration stops where the kernel reaches tail_cut; a slowly decaying
  // kernel under a steep power (k = 1/2, a = 6) needs the cut pushed deeper
  // than the default to expose full quadrature accuracy.
  for (double k : {0.5, 1.0, 2.0}) {
    for (int a : {1, 2, 3, 6}) {
      for (cplx t : {cplx(0.12, 0.0), cplx(0.2, 0.04)}) {
        cplx got = laplace_eval(basis_ray_fn(a, k, 0.0), k, 0.0, t, 1e-22);
        cplx want = std::pow(t, a);
        CHECK(rel(got, want) < 1e-8);
      }
    }
  }
  // Rotated ray: t tracks the direction.
  double th = 0.4;
  cplx t = std::polar(0.15, th);
  cplx got = laplace_eval(basis_ray_fn(3, 1.0, th), 1.0, th, t, 1e-16);
  CHECK(rel(got, t * t * t) < 1e-8);
}

TEST_CASE("laplace rejects directions outside the kernel decay sector") {
  // Decay requires |k (theta - arg t)| < pi/2: at k = 1, arg t = 1.8 is out.
  CHECK_THROWS_AS(
      laplace_eval(basis_ray_fn(1, 1.0, 0.0), 1.0, 0.0, std::polar(0.1, 1.8), 1e-16),
      domain_error);
  // At k = 2 the sector is half as wide.
  CHECK_THROWS_AS(
      laplace_eval(basis_ray_fn(1, 2.0, 0.0), 2.0, 0.0, std::polar(0.1, 0.9), 1e-16),
      domain_error);
  CHECK_NOTHROW(
      laplace_eval(basis_ray_fn(1, 2.0, 0.0), 2.0, 0.0, std::polar(0.1, 0.6), 1e-16));

  CHECK_THROWS_AS(
      laplace_eval(basis_ray_fn(1, 1.0, 0.0), 1.0, 0.0, cplx(0.1, 0.0), -1.0),
      parameter_error);

  // A strongly divergent endpoint (integrand ~ rho^{-1} d(rho^k) at k = 1)
  // is flagged rather than integrated.
  RayFn bad = [](double r) { return cplx(1.0 / r, 0.0); };
  CHECK_THROWS_AS(laplace_eval(bad, 1.0, 0.0, cplx(0.1, 0.0), 1e-16), domain_error);
}

TEST_CASE("derivative of t times laplace matches the shifted euler image") {
  // With c mapped by (xi d/dxi + k + 1), d/dt [t L(c)](t) = L(euler c)(t).
  for (double k : {0.5, 1.0, 2.0}) {
    XiSeries c = basis(2, k, 8) + basis(5, k, 8, cplx(0.3, 0.1));
    XiSeries ec = euler_apply(c);
    auto ray = [&](const XiSeries& s) {
      return RayFn([&s](double r) { return s.eval_truncated(r, 0.0, {cplx(0.0)}); });
    };
    for (double tm : {0.08, 0.15, 0.25}) {
      cplx t(tm, 0.02 * tm);
      double h = 1e-5 * std::abs(t);
      auto tl = [&](cplx tt) {
        return tt * laplace_eval(ray(c), k, 0.0, tt, 1e-16);
      };
      cplx fd = (tl(t + h) - tl(t - h)) / (2.0 * h);
      cplx want = laplace_eval(ray(ec), k, 0.0, t, 1e-16);
      CHECK(rel(fd, want) < 1e-6);
    }
  }
}

TEST_CASE("contour transform inverts the laplace integral on the basis") {
  // psi(t) = t^a pulls back to e_a: compare at a sample point on the ray.
  for (double k : {1.0, 2.0}) {
    ContourSpec contour = default_accel_contour(k, 2 * k, 0.0, 1.0);
    // For a direct inverse at level k any leg angle > pi/(2k) works; reuse
    // the accelerating contour of the doubled level which satisfies it.
    ContourSpec direct{0.0, M_PI / (2 * k) * 1.3, 1.0};
    for (int a : {1, 2, 4}) {
      SectorFn psi = [a](cplx t) { return std::pow(t, a); };
      double rho = 0.45;
      cplx got = borel_contour_eval(psi, k, direct, cplx(rho, 0.0));
      cplx want = basis(a, k, a + 1).eval_truncated(rho, 0.0, {cplx(0.0)});
      CHECK(rel(got, want) < 1e-10);
    }
    (void)contour;
  }

  ContourSpec too_narrow{0.0, 0.5, 1.0};
  CHECK_THROWS_AS(too_narrow.validate(1.0), validation_error);
  ContourSpec ok{0.0, 2.0, 1.0};
  CHECK_NOTHROW(ok.validate(1.0));

  // xi far outside the re-summable wedge of the contour must be rejected.
  SectorFn psi1 = [](cplx t) { return t; };
  ContourSpec c1{0.0, 1.8, 1.0};
  CHECK_THROWS_AS(borel_contour_eval(psi1, 1.0, c1, std::polar(0.4, 2.9)),
                  domain_error);
}

TEST_CASE("sector membership and validation") {
  SectorSpec s{0.0, 1.0, 0.0};
  CHECK(s.unbounded());
  CHECK(s.contains_arg(0.5));
  CHECK(!s.contains_arg(1.5));
  CHECK_NOTHROW(s.validate(2.0));       // needs opening > pi/4
  CHECK_THROWS_AS(s.validate(1.0), validation_error);  // needs > pi/2
}

TEST_CASE("rational continuation recovers poles of meromorphic transforms") {
  // b_a = Gamma(a) makes the plain part the geometric series 1/(1 - xi).
  XiSeries geo(1.0, 12, 1, 0);
  for (int a = 1; a <= 12; ++a)
    geo.set_coeff(a, XPoly::constant(std::tgamma(double(a)), 1, 0));
  RationalApprox r = pade_continue(geo, {cplx(0.0)}, 3, 1);
  REQUIRE(r.poles.size() == 1);
  CHECK(std::abs(r.poles[0] - cplx(1.0)) < 1e-10);
  CHECK(std::abs(r.residues[0] - cplx(-1.0)) < 1e-9);
  CHECK(std::abs(r.eval_plain(cplx(0.5, 0.0)) - cplx(2.0)) < 1e-10);

  // Weighted evaluation reapplies xi^{1-k}.
  XiSeries geo2(2.0, 12, 1, 0);
  for (int a = 1; a <= 12; ++a)
    geo2.set_coeff(a, XPoly::constant(std::tgamma(a / 2.0), 1, 0));
  RationalApprox r2 = pade_continue(geo2, {cplx(0.0)}, 3, 1);
  cplx xi(0.25, 0.0);
  CHECK(std::abs(r2.eval_weighted(xi) -
                 std::pow(xi, cplx(-1.0)) * r2.eval_plain(xi)) < 1e-12);

  // The alternating kernel 1/(1 + xi): pole at -1, residue 1.
  XiSeries alt(1.0, 12, 1, 0);
  for (int a = 1; a <= 12; ++a)
    alt.set_coeff(a, XPoly::constant((a % 2 ? 1.0 : -1.0) * std::tgamma(double(a)),
                                     1, 0));
  RationalApprox ra = pade_continue(alt, {cplx(0.0)}, 3, 1);
  REQUIRE(ra.poles.size() == 1);
  CHECK(std::abs(ra.poles[0] - cplx(-1.0)) < 1e-10);
  CHECK(std::abs(ra.residues[0] - cplx(1.0)) < 1e-9);

  // A [2/2] fit of a degree-1 rational function is rank deficient.
  CHECK_THROWS_AS(pade_continue(geo, {cplx(0.0)}, 2, 2), degeneracy_error);
  // Not enough coefficients for the requested degrees.
  CHECK_THROWS_AS(pade_continue(geo, {cplx(0.0)}, 8, 6), parameter_error);
}

TEST_CASE("laplace of the continued euler kernel matches the integral oracle") {
  // The summed series solves a(t) = int_0^inf e^{-s/t}/(1+s) ds.
  XiSeries alt(1.0, 22, 1, 0);
  for (int a = 1; a <= 22; ++a)
    alt.set_coeff(a, XPoly::constant((a % 2 ? 1.0 : -1.0) * std::tgamma(double(a)),
                                     1, 0));
  // The plain part is exactly 1/(1+xi), so a single denominator root
  // suffices; higher denominator degrees would be rank deficient.
  RationalApprox ra = pade_continue(alt, {cplx(0.0)}, 10, 1);
  RayFn f = rational_ray_fn(ra, 0.0);
  for (double t : {0.05, 0.1, 0.2, 0.3}) {
    cplx got = laplace_eval(f, 1.0, 0.0, cplx(t, 0.0), 1e-16);
    // Substituting s = xi/t in the ray integral gives exactly the driver
    // integral t int_0^inf e^{-s}/(1+ts) ds.
    double want = oracle::euler_series_sum(t);
    CHECK(std::abs(got - want) < 1e-7 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("numeric acceleration agrees with the exact basis map") {
  // e_a at level 1 accelerates to e_a at level 2; compare pointwise.
  ContourSpec contour = default_accel_contour(1.0, 2.0, 0.0, 0.8);
  CHECK_NOTHROW(contour.validate(2.0));
  for (int a : {1, 2, 3, 4}) {
    double rho = 0.6;
    cplx got = accelerate_numeric(basis_ray_fn(a, 1.0, 0.0), 1.0, 2.0, 0.0,
                                  contour, cplx(rho, 0.0));
    cplx want = basis(a, 2.0, a + 1).eval_truncated(rho, 0.0, {cplx(0.0)});
    CHECK(rel(got, want) < 1e-5);
  }
}

TEST_CASE("exponential order fit reads the double-log slope") {
  std::vector<double> radii, mags;
  for (int i = 0; i < 24; ++i) {
    double r = 1.0 + 0.35 * i;
    radii.push_back(r);
    mags.push_back(std::exp(2.0 * std::pow(r, 1.5)));
  }
  CHECK(fit_exp_order(radii, mags) == doctest::Approx(1.5).epsilon(0.05));

  std::vector<double> flat(radii.size(), 1.0);
  CHECK_THROWS_AS(fit_exp_order(radii, flat), degenerate_input_error);
  CHECK_THROWS_AS(fit_exp_order({1.0}, {2.0, 3.0}), parameter_error);
}

TEST_CASE("quadrature error reporting") {
  double est = -1.0;
  EvalOptions opt;
  opt.err_out = &est;
  cplx v = laplace_eval(basis_ray_fn(2, 1.0, 0.0), 1.0, 0.0, cplx(0.1, 0.0),
                        1e-16, opt);
  CHECK(std::abs(v - cplx(0.01)) < 1e-8);
  CHECK(est >= 0.0);
  CHECK(est < 1e-6);

  EvalOptions strict;
  strict.rel_tol = 1e-18;
  strict.nodes = 4;
  strict.panels = 3;
  try {
    laplace_eval(basis_ray_fn(5, 0.5, 0.0), 0.5, 0.0, cplx(0.3, 0.0), 1e-16,
                 strict);
  } catch (const numeric_error& e) {
    CHECK(e.estimate > 0.0);
  }
}
