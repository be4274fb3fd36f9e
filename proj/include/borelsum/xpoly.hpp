#pragma once
#include <complex>
#include <map>
#include <vector>

#include "borelsum/errors.hpp"

namespace borelsum {

using cplx = std::complex<double>;

// Truncated polynomial in the space variables x_1..x_nspace.  Coefficients
// are stored sparsely as exponent-vector -> complex; every arithmetic
// operation drops monomials whose total degree exceeds max_degree, so the
// truncation is deterministic and closed under the ring operations.
class XPoly {
public:
  using exp_vec = std::vector<int>;
  using coeff_map = std::map<exp_vec, cplx>;

  XPoly() : nspace_(1), maxdeg_(0) {}
  XPoly(int nspace, int max_degree);

  static XPoly constant(cplx c, int nspace, int max_degree);
  // Single monomial c * x^exps (dropped silently if beyond max_degree).
  static XPoly monomial(cplx c, const exp_vec& exps, int nspace, int max_degree);

  int nspace() const { return nspace_; }
  int max_degree() const { return maxdeg_; }
  const coeff_map& coeffs() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }

  cplx coeff(const exp_vec& e) const;
  void set_coeff(const exp_vec& e, cplx v);

  XPoly& operator+=(const XPoly& o);
  XPoly& operator-=(const XPoly& o);
  XPoly& operator*=(cplx s);
  friend XPoly operator+(XPoly a, const XPoly& b) { return a += b; }
  friend XPoly operator-(XPoly a, const XPoly& b) { return a -= b; }
  friend XPoly operator*(XPoly a, cplx s) { return a *= s; }

  XPoly mul(const XPoly& o) const;      // truncating product
  XPoly deriv(int j) const;             // d/dx_j, exact
  cplx eval(const std::vector<cplx>& x) const;

  // Largest coefficient magnitude over the exponent map (0 for the zero
  // polynomial); the sup-norm proxy used by the Gevrey fitter.
  double norm_max() const;

  bool operator==(const XPoly& o) const {
    return nspace_ == o.nspace_ && maxdeg_ == o.maxdeg_ && coeffs_ == o.coeffs_;
  }

  void require_compatible(const XPoly& o, const char* what) const;

private:
  void prune_zero(const exp_vec& e);
  int nspace_;
  int maxdeg_;
  coeff_map coeffs_;
};

int total_degree(const XPoly::exp_vec& e);

}  // namespace borelsum
