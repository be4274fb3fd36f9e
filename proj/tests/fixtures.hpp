// Shared problem definitions used by the unit tests and the acceptance
// suite.  Each returns a fully populated CauchyProblem; the matching JSON
// files under fixtures/ encode the same data for the CLI tests.
#pragma once

#include <cmath>
#include <vector>

#include "borelsum/cauchy.hpp"

namespace fixtures {

using namespace borelsum;

inline XPoly xconst(double v, int n = 1, int maxdeg = 8) {
  return XPoly::constant(v, n, maxdeg);
}

// d_t u = A(t) (1 + u), u(0) = 0, with A(t) = sum_n (-1)^n n! t^{n+1}.
// The Borel transform of A is 1/(1+xi); the resummed solution solves the
// same equation driven by the Laplace integral of that kernel.
inline CauchyProblem euler_problem(int ncoeff = 48, int maxdeg = 8) {
  CauchyProblem p;
  p.m = 1;
  p.n_space = 1;
  TSeries A(ncoeff - 1, 1, maxdeg);
  double fact = 1.0;
  for (int n = 0; n + 1 < ncoeff; ++n) {
    A.set_coeff(n + 1, xconst((n % 2 ? -fact : fact), 1, maxdeg));
    fact *= n + 1.0;
  }
  p.initial = {XPoly(1, maxdeg)};
  TermIndex data{{0}, {0}}, linear{{1}, {0}};
  p.terms.resize(1);
  p.terms[0].emplace(data, A);
  p.terms[0].emplace(linear, A);
  return p;
}

// d_t u = u, u(0) = 1: the solution is e^t and every transform converges.
inline CauchyProblem convergent_problem(int order = 32, int maxdeg = 8) {
  CauchyProblem p;
  p.m = 1;
  p.n_space = 1;
  p.initial = {xconst(1.0, 1, maxdeg)};
  TSeries one(order, 1, maxdeg);
  one.set_coeff(0, xconst(1.0, 1, maxdeg));
  p.terms.resize(1);
  p.terms[0].emplace(TermIndex{{1}, {0}}, one);
  return p;
}

// d_t u = u^2, u(0) = 1: solution 1/(1-t), all t-coefficients equal 1.
inline CauchyProblem nonlinear_problem(int order = 32, int maxdeg = 8) {
  CauchyProblem p;
  p.m = 1;
  p.n_space = 1;
  p.initial = {xconst(1.0, 1, maxdeg)};
  TSeries one(order, 1, maxdeg);
  one.set_coeff(0, xconst(1.0, 1, maxdeg));
  p.terms.resize(1);
  p.terms[0].emplace(TermIndex{{2}, {0}}, one);
  return p;
}

// d_t u = u d_x u, u(0,x) = x: solution x/(1-t), coefficient of t^n is x.
inline CauchyProblem pde_problem(int order = 32, int maxdeg = 8) {
  CauchyProblem p;
  p.m = 1;
  p.n_space = 1;
  p.initial = {XPoly::monomial(1.0, {1}, 1, maxdeg)};
  TSeries one(order, 1, maxdeg);
  one.set_coeff(0, xconst(1.0, 1, maxdeg));
  p.terms.resize(1);
  p.terms[0].emplace(TermIndex{{1}, {1}}, one);
  return p;
}

// d_t u1 = u2, d_t u2 = -u1, u(0) = (1, 0): solution (cos t, -sin t).
inline CauchyProblem system_problem(int order = 32, int maxdeg = 8) {
  CauchyProblem p;
  p.m = 2;
  p.n_space = 1;
  p.initial = {xconst(1.0, 1, maxdeg), XPoly(1, maxdeg)};
  TSeries one(order, 1, maxdeg);
  one.set_coeff(0, xconst(1.0, 1, maxdeg));
  p.terms.resize(2);
  p.terms[0].emplace(TermIndex{{0, 1}, {0, 0}}, one);
  TSeries minus_one = one * cplx(-1.0);
  p.terms[1].emplace(TermIndex{{1, 0}, {0, 0}}, minus_one);
  return p;
}

// d_t u = B(t) with B(t) = sum_n (-1)^n [Gamma(n+1) + Gamma(n/2+1)] t^{n+1}:
// a pure-data mixture of level-1 and level-2 factorial growth, summable with
// the level pair k = (1, 2).
inline CauchyProblem two_level_problem(int ncoeff = 40, int maxdeg = 8) {
  CauchyProblem p;
  p.m = 1;
  p.n_space = 1;
  TSeries B(ncoeff - 1, 1, maxdeg);
  for (int n = 0; n + 1 < ncoeff; ++n) {
    double v = std::tgamma(n + 1.0) + std::tgamma(n / 2.0 + 1.0);
    B.set_coeff(n + 1, xconst(n % 2 ? -v : v, 1, maxdeg));
  }
  p.initial = {XPoly(1, maxdeg)};
  p.terms.resize(1);
  p.terms[0].emplace(TermIndex{{0}, {0}}, B);
  return p;
}

inline MultiLevel single_level(double k = 1.0, double theta = 0.0) {
  MultiLevel ml;
  ml.ks = {k};
  ml.thetas = {theta};
  return ml;
}

inline MultiLevel level_pair(double k1 = 1.0, double k2 = 2.0,
                             double th1 = 0.0, double th2 = 0.0) {
  MultiLevel ml;
  ml.ks = {k1, k2};
  ml.thetas = {th1, th2};
  return ml;
}

}  // namespace fixtures
