#pragma once
#include <functional>

#include "borelsum/series.hpp"

namespace borelsum {

// Callable sampled along a fixed ray; the argument is the radius.
using RayFn = std::function<cplx(double)>;

// Record form |phi(xi)| <= C |xi|^{s-k} e^{c |xi|^kappa} / Gamma(s/k).
// Constants are tracked (fitted or composed), not certified.
struct GrowthBound {
  double C = 0.0;      // >= 0
  double s = 1.0;      // power offset, > 0
  double c = 0.0;      // exponential prefactor, >= 0
  double kappa = 1.0;  // exponential order, > 0

  // Bound value at radius rho for level k (log-Gamma weighted).
  double value(double rho, double k) const;
};

// Convolution composes bounds: (C1, s1) x (C2, s2) -> (C1 C2, s1+s2), same
// (c, kappa); kappa must not fall below the working level.
GrowthBound conv_growth_bound(const GrowthBound& b1, const GrowthBound& b2,
                              double k);

// Exact k-convolution on the weighted basis: e_a * e_b = e_{a+b} with XPoly
// coefficient products; truncated at the common xi-order.
XiSeries conv(const XiSeries& a, const XiSeries& b);

// Left fold of conv over a nonempty factor list.
XiSeries conv_power(const std::vector<XiSeries>& factors);

struct ConvNumericOptions {
  double tol = 1e-10;          // relative tolerance on the refinement step
  double alpha_hint = std::nan("");  // endpoint exponent at u=1 (phi1 side)
  double beta_hint = std::nan("");   // endpoint exponent at u=0 (phi2 side)
};

// Quadrature of the k-convolution of two sampled functions along the ray of
// xi.  The substitution u = (r/|xi|)^k turns the integral into a Beta-type
// one on (0,1); endpoint exponents are taken from the hints or probed from
// the callables, then a Gauss-Jacobi rule with increasing node counts is
// applied until two consecutive estimates agree.
cplx conv_numeric(const RayFn& phi1, const RayFn& phi2, double k, cplx xi,
                  const ConvNumericOptions& opt = {});

// Basis element e_a at level k as a ray callable: the value of
// xi^{a-k}/Gamma(a/k) at xi = rho e^{i theta}, as a function of rho.
RayFn basis_ray_fn(int a, double k, double theta = 0.0);

}  // namespace borelsum
