#pragma once
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "borelsum/xpoly.hpp"

namespace borelsum {

// Truncated formal power series in t with XPoly coefficients a_0..a_N.
class TSeries {
public:
  TSeries() = default;
  TSeries(int order, int nspace, int max_degree);

  int order() const { return static_cast<int>(coeffs_.size()) - 1; }
  int nspace() const { return nspace_; }
  int max_degree() const { return maxdeg_; }

  const XPoly& coeff(int n) const;
  XPoly& coeff(int n);
  void set_coeff(int n, const XPoly& p);

  bool is_zero() const;
  void require_compatible(const TSeries& o, const char* what) const;

  TSeries& operator+=(const TSeries& o);
  TSeries& operator-=(const TSeries& o);
  TSeries& operator*=(cplx s);
  friend TSeries operator+(TSeries a, const TSeries& b) { return a += b; }
  friend TSeries operator-(TSeries a, const TSeries& b) { return a -= b; }
  friend TSeries operator*(TSeries a, cplx s) { return a *= s; }

  // Multiply by t^j (shift coefficients up; top orders fall off the truncation).
  TSeries tshift(int j) const;

  bool operator==(const TSeries& o) const {
    return nspace_ == o.nspace_ && maxdeg_ == o.maxdeg_ && coeffs_ == o.coeffs_;
  }

private:
  int nspace_ = 1;
  int maxdeg_ = 0;
  std::vector<XPoly> coeffs_;
};

// Borel-plane series at level k on the weighted basis e_a = xi^{a-k}/Gamma(a/k),
// a = 1..N.  Coefficients b_a are stored unweighted; the Gamma factors are the
// basis normalization and appear only when a numeric value is requested.
class XiSeries {
public:
  XiSeries() = default;
  XiSeries(double level, int order, int nspace, int max_degree);

  double level() const { return level_; }
  int order() const { return static_cast<int>(coeffs_.size()); }
  int nspace() const { return nspace_; }
  int max_degree() const { return maxdeg_; }

  const XPoly& coeff(int a) const;  // a in 1..N
  XPoly& coeff(int a);
  void set_coeff(int a, const XPoly& p);

  bool is_zero() const;
  // Smallest index a with a nonzero coefficient, or 0 if the series is zero.
  int lowest_index() const;

  void require_compatible(const XiSeries& o, const char* what) const;

  XiSeries& operator+=(const XiSeries& o);
  XiSeries& operator-=(const XiSeries& o);
  XiSeries& operator*=(cplx s);
  friend XiSeries operator+(XiSeries a, const XiSeries& b) { return a += b; }
  friend XiSeries operator-(XiSeries a, const XiSeries& b) { return a -= b; }
  friend XiSeries operator*(XiSeries a, cplx s) { return a *= s; }

  bool operator==(const XiSeries& o) const {
    return level_ == o.level_ && nspace_ == o.nspace_ && maxdeg_ == o.maxdeg_ &&
           coeffs_ == o.coeffs_;
  }

  // Value of the truncated series at xi = rho * e^{i theta}, x fixed; the
  // Gamma weights enter here through lgamma.  Only meaningful where the
  // truncated tail is negligible (entire or within the convergence radius).
  cplx eval_truncated(double rho, double theta, const std::vector<cplx>& x) const;

private:
  double level_ = 1.0;
  int nspace_ = 1;
  int maxdeg_ = 0;
  std::vector<XPoly> coeffs_;  // index 0 holds b_1
};

struct GevreyFit {
  bool convergent = false;
  double k_est = 0.0;      // meaningful when !convergent
  double inv_k = 0.0;      // fitted 1/k (the n*log n slope)
  double M_est = 0.0;
  double C_est = 0.0;
  double residual = 0.0;   // rms regression misfit
};

// ---- operations ---------------------------------------------------------

TSeries ts_mul(const TSeries& a, const TSeries& b);

// t^n -> e_n bookkeeping; requires zero constant term.
XiSeries formal_borel(const TSeries& f, double k);

// Exact inverse of formal_borel (e_a -> t^a).
TSeries formal_laplace(const XiSeries& g);

// Exact basis map e_a^{(k)} -> e_a^{(k_to)}; coefficients unchanged.
XiSeries accelerate_formal(const XiSeries& g, double k_to);

// (xi d/dxi + k + 1) is diagonal on the basis with eigenvalue a+1.
XiSeries euler_apply(const XiSeries& g);
XiSeries euler_inverse(const XiSeries& g);

// Least-squares estimate of the Gevrey order from coefficient norms.
// Regresses log norms[n] on {1, n, n log n, log n}; 1/k is the n log n slope.
GevreyFit gevrey_fit(const std::vector<double>& norms,
                     double convergent_threshold = 0.05, int n_min = 4);

// Coefficient norms of a formal solution (max coefficient magnitude per order).
std::vector<double> coeff_norms(const TSeries& f);

// Exponential-order certificate of the level-k series g near its summation
// direction: re-weights the coefficients to level k_next (exact acceleration)
// and reads the residual Gevrey slope there, whose reciprocal is the growth
// order kappa with 1/kappa = 1/k - 1/k_next saturated by the level-k part.
// Returns nullopt when no growth is detected at level k_next.
std::optional<double> growth_order_estimate(const XiSeries& g, double k_next);

// ---- serialization (line-oriented text, bit-identical round trip) -------

void write_tseries(std::ostream& os, const TSeries& f);
TSeries read_tseries(std::istream& is);
void write_xiseries(std::ostream& os, const XiSeries& g);
XiSeries read_xiseries(std::istream& is);

}  // namespace borelsum
