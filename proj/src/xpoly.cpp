#include "borelsum/xpoly.hpp"

#include <cstdlib>
#include <numeric>

namespace borelsum {

int total_degree(const XPoly::exp_vec& e) {
  return std::accumulate(e.begin(), e.end(), 0);
}

XPoly::XPoly(int nspace, int max_degree) : nspace_(nspace), maxdeg_(max_degree) {
  if (nspace < 1) throw parameter_error("XPoly: nspace must be >= 1");
  if (max_degree < 0) throw parameter_error("XPoly: max_degree must be >= 0");
}

XPoly XPoly::constant(cplx c, int nspace, int max_degree) {
  XPoly p(nspace, max_degree);
  if (c != cplx(0.0)) p.coeffs_[exp_vec(nspace, 0)] = c;
  return p;
}

XPoly XPoly::monomial(cplx c, const exp_vec& exps, int nspace, int max_degree) {
  XPoly p(nspace, max_degree);
  if (static_cast<int>(exps.size()) != nspace)
    throw parameter_error("XPoly::monomial: exponent vector length != nspace");
  for (int e : exps)
    if (e < 0) throw parameter_error("XPoly::monomial: negative exponent");
  if (c != cplx(0.0) && total_degree(exps) <= max_degree) p.coeffs_[exps] = c;
  return p;
}

cplx XPoly::coeff(const exp_vec& e) const {
  auto it = coeffs_.find(e);
  return it == coeffs_.end() ? cplx(0.0) : it->second;
}

void XPoly::set_coeff(const exp_vec& e, cplx v) {
  if (static_cast<int>(e.size()) != nspace_)
    throw parameter_error("XPoly::set_coeff: exponent vector length != nspace");
  if (total_degree(e) > maxdeg_) return;
  if (v == cplx(0.0))
    coeffs_.erase(e);
  else
    coeffs_[e] = v;
}

void XPoly::require_compatible(const XPoly& o, const char* what) const {
  if (nspace_ != o.nspace_ || maxdeg_ != o.maxdeg_)
    throw parameter_error(std::string(what) +
                          ": operands have different truncation parameters");
}

void XPoly::prune_zero(const exp_vec& e) {
  auto it = coeffs_.find(e);
  if (it != coeffs_.end() && it->second == cplx(0.0)) coeffs_.erase(it);
}

XPoly& XPoly::operator+=(const XPoly& o) {
  require_compatible(o, "XPoly::operator+=");
  for (const auto& [e, v] : o.coeffs_) {
    coeffs_[e] += v;
    prune_zero(e);
  }
  return *this;
}

XPoly& XPoly::operator-=(const XPoly& o) {
  require_compatible(o, "XPoly::operator-=");
  for (const auto& [e, v] : o.coeffs_) {
    coeffs_[e] -= v;
    prune_zero(e);
  }
  return *this;
}

XPoly& XPoly::operator*=(cplx s) {
  if (s == cplx(0.0)) {
    coeffs_.clear();
    return *this;
  }
  for (auto& [e, v] : coeffs_) v *= s;
  return *this;
}

XPoly XPoly::mul(const XPoly& o) const {
  require_compatible(o, "XPoly::mul");
  XPoly r(nspace_, maxdeg_);
  exp_vec sum(nspace_);
  for (const auto& [ea, va] : coeffs_) {
    int da = total_degree(ea);
    for (const auto& [eb, vb] : o.coeffs_) {
      if (da + total_degree(eb) > maxdeg_) continue;
      for (int i = 0; i < nspace_; ++i) sum[i] = ea[i] + eb[i];
      r.coeffs_[sum] += va * vb;
      r.prune_zero(sum);
    }
  }
  return r;
}

XPoly XPoly::deriv(int j) const {
  if (j < 0 || j >= nspace_) throw parameter_error("XPoly::deriv: bad variable index");
  XPoly r(nspace_, maxdeg_);
  for (const auto& [e, v] : coeffs_) {
    if (e[j] == 0) continue;
    exp_vec d = e;
    d[j] -= 1;
    r.coeffs_[d] += v * static_cast<double>(e[j]);
    r.prune_zero(d);
  }
  return r;
}

cplx XPoly::eval(const std::vector<cplx>& x) const {
  if (static_cast<int>(x.size()) != nspace_)
    throw parameter_error("XPoly::eval: point dimension != nspace");
  cplx acc(0.0);
  for (const auto& [e, v] : coeffs_) {
    cplx term = v;
    for (int i = 0; i < nspace_; ++i)
      for (int p = 0; p < e[i]; ++p) term *= x[i];
    acc += term;
  }
  return acc;
}

double XPoly::norm_max() const {
  double m = 0.0;
  for (const auto& [e, v] : coeffs_) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace borelsum
