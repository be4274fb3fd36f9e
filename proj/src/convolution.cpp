#include "borelsum/convolution.hpp"

#include <cmath>

#include "borelsum/quadrature.hpp"

namespace borelsum {

double GrowthBound::value(double rho, double k) const {
  if (rho <= 0.0) throw domain_error("GrowthBound::value: rho must be > 0");
  double lv = std::log(C) + (s - k) * std::log(rho) + c * std::pow(rho, kappa) -
              std::lgamma(s / k);
  return std::exp(lv);
}

GrowthBound conv_growth_bound(const GrowthBound& b1, const GrowthBound& b2,
                              double k) {
  if (b1.c != b2.c || b1.kappa != b2.kappa)
    throw parameter_error("conv_growth_bound: exponential factors must match");
  if (b1.kappa < k)
    throw parameter_error("conv_growth_bound: kappa below the working level");
  GrowthBound r;
  r.C = b1.C * b2.C;
  r.s = b1.s + b2.s;
  r.c = b1.c;
  r.kappa = b1.kappa;
  return r;
}

XiSeries conv(const XiSeries& a, const XiSeries& b) {
  a.require_compatible(b, "conv");
  XiSeries r(a.level(), a.order(), a.nspace(), a.max_degree());
  for (int i = 1; i <= a.order(); ++i) {
    if (a.coeff(i).is_zero()) continue;
    for (int j = 1; i + j <= b.order(); ++j) {
      if (b.coeff(j).is_zero()) continue;
      r.coeff(i + j) += a.coeff(i).mul(b.coeff(j));
    }
  }
  return r;
}

XiSeries conv_power(const std::vector<XiSeries>& factors) {
  if (factors.empty())
    throw parameter_error("conv_power: empty factor list (no convolution unit)");
  XiSeries acc = factors.front();
  for (size_t i = 1; i < factors.size(); ++i) acc = conv(acc, factors[i]);
  return acc;
}

cplx conv_numeric(const RayFn& phi1, const RayFn& phi2, double k, cplx xi,
                  const ConvNumericOptions& opt) {
  if (k <= 0.0) throw parameter_error("conv_numeric: level k must be positive");
  const double xm = std::abs(xi);
  if (xm <= 0.0) throw parameter_error("conv_numeric: xi must be nonzero");
  const double theta = std::arg(xi);

  // After u = (r/|xi|)^k the integral is
  //   |xi|^k e^{ik theta} * int_0^1 phi1(|xi|(1-u)^{1/k}) phi2(|xi| u^{1/k}) du
  // with the callables evaluated by radius along the ray.  Endpoint behavior
  // r^p maps to u^{p/k} (and (1-u)^{p/k} on the phi1 side).
  double p1 = std::isnan(opt.alpha_hint)
                  ? estimate_power_at_zero(phi1, xm)
                  : opt.alpha_hint;
  double p2 = std::isnan(opt.beta_hint) ? estimate_power_at_zero(phi2, xm)
                                        : opt.beta_hint;
  double alpha = p1 / k, beta = p2 / k;
  if (alpha <= -1.0 || beta <= -1.0)
    throw domain_error("conv_numeric: endpoint singularity not integrable");

  const cplx prefactor = std::pow(xm, k) * std::exp(cplx(0.0, k * theta));

  auto evaluate = [&](int n) -> cplx {
    QuadRule rule = gauss_jacobi(n, alpha, beta);
    cplx acc(0.0);
    for (int i = 0; i < n; ++i) {
      double u = 0.5 * (1.0 + rule.x[i]);
      if (u <= 0.0 || u >= 1.0) continue;  // guard against endpoint rounding
      double r1 = xm * std::pow(1.0 - u, 1.0 / k);
      double r2 = xm * std::pow(u, 1.0 / k);
      cplx h = phi1(r1) * phi2(r2);
      // divide off the Jacobi weight's singular factors
      h /= std::pow(1.0 - u, alpha) * std::pow(u, beta);
      acc += rule.w[i] * h;
    }
    return prefactor * acc * std::pow(2.0, -(alpha + beta + 1.0));
  };

  static const int node_counts[] = {16, 24, 32, 48, 64, 96, 128};
  cplx prev = evaluate(node_counts[0]);
  double est = std::numeric_limits<double>::infinity();
  for (size_t i = 1; i < std::size(node_counts); ++i) {
    cplx cur = evaluate(node_counts[i]);
    est = std::abs(cur - prev);
    double scale = std::max(1e-300, std::abs(cur));
    if (est <= opt.tol * std::max(1.0, scale)) return cur;
    prev = cur;
  }
  throw numeric_error("conv_numeric: refinement did not reach tolerance", est);
}

RayFn basis_ray_fn(int a, double k, double theta) {
  if (a < 1) throw parameter_error("basis_ray_fn: index must be >= 1");
  if (k <= 0.0) throw parameter_error("basis_ray_fn: level must be positive");
  double lg = std::lgamma(a / k);
  return [a, k, theta, lg](double rho) -> cplx {
    if (rho <= 0.0) return cplx(0.0);
    double lw = (a - k) * std::log(rho) - lg;
    return std::exp(cplx(lw, (a - k) * theta));
  };
}

}  // namespace borelsum
