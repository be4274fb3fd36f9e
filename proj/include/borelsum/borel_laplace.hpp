// Numerical transforms between the two planes: Laplace evaluation along a
// ray, the inverse contour transform, rational continuation of truncated
// series, and level-to-level acceleration by composing the two.
#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "borelsum/convolution.hpp"
#include "borelsum/errors.hpp"
#include "borelsum/series.hpp"

namespace borelsum {

// Callable on a sector: receives the full complex argument.
using SectorFn = std::function<cplx(cplx)>;

// Sector { |arg t - theta| < half_opening, 0 < |t| < r_max }.
// r_max <= 0 encodes an unbounded sector.
struct SectorSpec {
  double theta = 0.0;
  double half_opening = 0.0;
  double r_max = 0.0;

  bool unbounded() const { return r_max <= 0.0; }
  // A summation sector at level k must open wider than pi/(2k).
  void validate(double k) const;
  bool contains_arg(double phi) const;
};

// Contour for the inverse transform at level k: out from the origin along
// arg t = theta - delta_prime, arc at |t| = r0, back in along
// arg t = theta + delta_prime.  Requires delta_prime > pi/(2k).
struct ContourSpec {
  double theta = 0.0;
  double delta_prime = 0.0;
  double r0 = 0.0;

  void validate(double k) const;
};

// Contour usable for accelerating level k_prev data to level k_next > k_prev:
// the leg angle must exceed pi/(2 k_next) for the inverse transform yet stay
// below pi/(2 k_prev) so the inner Laplace integral still converges on the
// legs.  Picks the 60/40 point between those bounds.
ContourSpec default_accel_contour(double k_prev, double k_next, double theta,
                                  double r0);

// Quadrature knobs shared by the ray and contour integrators.  err_out, when
// non-null, receives the difference between the base and refined node counts.
struct EvalOptions {
  int nodes = 32;        // Gauss nodes per panel (refined run uses 3n/2)
  int panels = 18;       // geometric panels covering the decay length
  double rel_tol = 1e-6; // exceeding this relative estimate raises an error
  double* err_out = nullptr;
};

// Weighted Laplace integral along the ray arg xi = theta, evaluated at t:
//   int_0^{inf e^{i theta}} exp(-(xi/t)^k) f(xi) d(xi^k),
// with f supplied by radius (the callable carries the ray phase itself).
// The kernel decays only when |k(theta - arg t)| < pi/2; otherwise a domain
// error is raised.  Integration stops where the kernel drops below tail_cut.
cplx laplace_eval(const RayFn& f, double k, double theta, cplx t,
                  double tail_cut, const EvalOptions& opt = {});

// Inverse transform at level k: (1/2 pi i) int_C exp((xi/t)^k) psi(t) d(-t^-k)
// over the three-leg contour described by `contour`.  Defined for xi with
// arg xi within delta_prime - pi/(2k) of the contour bisector.
cplx borel_contour_eval(const SectorFn& psi, double k,
                        const ContourSpec& contour, cplx xi,
                        double tail_cut = 1e-16, const EvalOptions& opt = {});

// Rational continuation of the plain power part of a level-k series.
// A series sum_a b_a xi^{a-k}/Gamma(a/k) factors as xi^{1-k} * P(xi) with
// P(xi) = sum_{j>=0} c_j xi^j, c_j = b_{j+1}(x)/Gamma((j+1)/k); the rational
// approximant tracks P and the prefactor is reapplied at evaluation time.
struct RationalApprox {
  double k = 1.0;
  std::vector<cplx> num;       // ascending powers, degree num.size()-1
  std::vector<cplx> den;       // den[0] = 1
  std::vector<cplx> poles;     // roots of den
  std::vector<cplx> residues;  // num(p)/den'(p) per pole

  cplx eval_plain(cplx z) const;
  // xi^{1-k} * plain part, principal branch of the power.
  cplx eval_weighted(cplx xi) const;
};

// Builds the [num_deg/den_deg] rational interpolant of the plain power part
// of g at the space point x_point.  Needs num_deg + den_deg + 1 coefficients.
// A rank-deficient linear system raises a degeneracy error suggesting lower
// degrees.
RationalApprox pade_continue(const XiSeries& g, const std::vector<cplx>& x_point,
                             int num_deg, int den_deg);

// Ray restriction of a RationalApprox with the phase baked in, suitable for
// laplace_eval and conv_numeric.
RayFn rational_ray_fn(const RationalApprox& r, double theta);

// Acceleration from level k_prev to k_next at the point xi: the inverse
// transform at k_next applied to the Laplace integral of f_prev at k_prev,
// both along direction theta_prev.  Errors are tagged with the stage that
// raised them.
cplx accelerate_numeric(const RayFn& f_prev, double k_prev, double k_next,
                        double theta_prev, const ContourSpec& contour, cplx xi,
                        double tail_cut = 1e-14, const EvalOptions& opt = {});

// Least-squares fit of the exponential order kappa in |g| ~ exp(c rho^kappa)
// from samples along a ray: regresses log log |g| on log rho over the samples
// with |g| large enough for the double logarithm to be meaningful.  Used to
// track growth orders rather than certify them.
double fit_exp_order(const std::vector<double>& radii,
                     const std::vector<double>& magnitudes);

}  // namespace borelsum
