#include "borelsum/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "borelsum/errors.hpp"

namespace borelsum {

namespace {

// Newton iteration on Legendre polynomials; nodes are symmetric so only half
// are solved for.
QuadRule build_gauss_legendre(int n) {
  QuadRule r;
  r.x.resize(n);
  r.w.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      double z1 = z;
      z = z1 - p0 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    r.w[n - 1 - i] = r.w[i];
  }
  return r;
}

QuadRule build_gauss_jacobi(int n, double alpha, double beta) {
  // Three-term recurrence coefficients of the monic Jacobi polynomials,
  // then the Golub-Welsch symmetric tridiagonal eigenproblem.
  const double ab = alpha + beta;
  Eigen::VectorXd diag(n), sub(n > 1 ? n - 1 : 0);
  diag(0) = (beta - alpha) / (ab + 2.0);
  for (int j = 1; j < n; ++j) {
    double d = (2.0 * j + ab) * (2.0 * j + ab + 2.0);
    diag(j) = (beta * beta - alpha * alpha) / d;
  }
  if (n > 1) {
    sub(0) = std::sqrt(4.0 * (1.0 + alpha) * (1.0 + beta) /
                       ((2.0 + ab) * (2.0 + ab) * (3.0 + ab)));
    for (int j = 2; j < n; ++j) {
      double t = 2.0 * j + ab;
      double b2 = 4.0 * j * (j + alpha) * (j + beta) * (j + ab) /
                  (t * t * (t + 1.0) * (t - 1.0));
      sub(j - 1) = std::sqrt(b2);
    }
  }
  // total weight mu0 = 2^{ab+1} B(alpha+1, beta+1)
  double lmu0 = (ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0);
  double mu0 = std::exp(lmu0);

  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) J(j, j) = diag(j);
  for (int j = 0; j + 1 < n; ++j) {
    J(j, j + 1) = sub(j);
    J(j + 1, j) = sub(j);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  if (es.info() != Eigen::Success)
    throw internal_error("gauss_jacobi: eigen decomposition failed");

  QuadRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int j = 0; j < n; ++j) {
    r.x[j] = es.eigenvalues()(j);
    double v0 = es.eigenvectors()(0, j);
    r.w[j] = mu0 * v0 * v0;
  }
  return r;
}

std::mutex cache_mutex;

}  // namespace

const QuadRule& gauss_legendre(int n) {
  if (n < 1) throw parameter_error("gauss_legendre: n must be >= 1");
  static std::map<int, QuadRule> cache;
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_gauss_legendre(n)).first;
  return it->second;
}

QuadRule gauss_jacobi(int n, double alpha, double beta) {
  if (n < 1) throw parameter_error("gauss_jacobi: n must be >= 1");
  if (alpha <= -1.0 || beta <= -1.0)
    throw parameter_error("gauss_jacobi: exponents must be > -1 (integrable)");
  static std::map<std::tuple<int, double, double>, QuadRule> cache;
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto key = std::make_tuple(n, alpha, beta);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, build_gauss_jacobi(n, alpha, beta)).first;
  return it->second;
}

double estimate_power_at_zero(const std::function<std::complex<double>(double)>& f,
                              double scale) {
  const double r1 = 1e-7 * scale, r2 = 1e-6 * scale;
  double f1 = std::abs(f(r1)), f2 = std::abs(f(r2));
  if (f1 == 0.0 || f2 == 0.0) return 0.0;
  return std::log(f2 / f1) / std::log(r2 / r1);
}

}  // namespace borelsum
