#pragma once
#include <complex>
#include <functional>
#include <vector>

namespace borelsum {

// Nodes and weights on the reference interval [-1, 1].
struct QuadRule {
  std::vector<double> x, w;
};

// Gauss-Legendre rule, cached per n.
const QuadRule& gauss_legendre(int n);

// Gauss-Jacobi rule for the weight (1-x)^alpha (1+x)^beta, alpha, beta > -1.
// Built by the Golub-Welsch eigenvalue method; cached per (n, alpha, beta).
QuadRule gauss_jacobi(int n, double alpha, double beta);

// Log-slope of |f| at 0+: fits p in |f(r)| ~ r^p from two small radii
// proportional to scale.  Exact for pure powers, which is all the quadrature
// preconditions admit at the endpoints.  Returns 0 for (numerically) zero f.
double estimate_power_at_zero(const std::function<std::complex<double>(double)>& f,
                              double scale);

}  // namespace borelsum
