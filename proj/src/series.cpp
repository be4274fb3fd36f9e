#include "borelsum/series.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace borelsum {

// ---- TSeries ------------------------------------------------------------

TSeries::TSeries(int order, int nspace, int max_degree)
    : nspace_(nspace), maxdeg_(max_degree) {
  if (order < 0) throw parameter_error("TSeries: order must be >= 0");
  coeffs_.assign(order + 1, XPoly(nspace, max_degree));
}

const XPoly& TSeries::coeff(int n) const {
  if (n < 0 || n > order()) throw parameter_error("TSeries::coeff: index out of range");
  return coeffs_[n];
}

XPoly& TSeries::coeff(int n) {
  if (n < 0 || n > order()) throw parameter_error("TSeries::coeff: index out of range");
  return coeffs_[n];
}

void TSeries::set_coeff(int n, const XPoly& p) {
  coeff(n);  // range check
  if (p.nspace() != nspace_ || p.max_degree() != maxdeg_)
    throw parameter_error("TSeries::set_coeff: coefficient truncation mismatch");
  coeffs_[n] = p;
}

bool TSeries::is_zero() const {
  for (const auto& c : coeffs_)
    if (!c.is_zero()) return false;
  return true;
}

void TSeries::require_compatible(const TSeries& o, const char* what) const {
  if (order() != o.order() || nspace_ != o.nspace_ || maxdeg_ != o.maxdeg_)
    throw parameter_error(std::string(what) +
                          ": operands have different truncation parameters");
}

TSeries& TSeries::operator+=(const TSeries& o) {
  require_compatible(o, "TSeries::operator+=");
  for (int n = 0; n <= order(); ++n) coeffs_[n] += o.coeffs_[n];
  return *this;
}

TSeries& TSeries::operator-=(const TSeries& o) {
  require_compatible(o, "TSeries::operator-=");
  for (int n = 0; n <= order(); ++n) coeffs_[n] -= o.coeffs_[n];
  return *this;
}

TSeries& TSeries::operator*=(cplx s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

TSeries TSeries::tshift(int j) const {
  if (j < 0) throw parameter_error("TSeries::tshift: negative shift");
  TSeries r(order(), nspace_, maxdeg_);
  for (int n = 0; n + j <= order(); ++n) r.coeffs_[n + j] = coeffs_[n];
  return r;
}

TSeries ts_mul(const TSeries& a, const TSeries& b) {
  a.require_compatible(b, "ts_mul");
  const int N = a.order();
  TSeries r(N, a.nspace(), a.max_degree());
  for (int i = 0; i <= N; ++i) {
    if (a.coeff(i).is_zero()) continue;
    for (int j = 0; i + j <= N; ++j) {
      if (b.coeff(j).is_zero()) continue;
      r.coeff(i + j) += a.coeff(i).mul(b.coeff(j));
    }
  }
  return r;
}

// ---- XiSeries -----------------------------------------------------------

XiSeries::XiSeries(double level, int order, int nspace, int max_degree)
    : level_(level), nspace_(nspace), maxdeg_(max_degree) {
  if (level <= 0.0) throw parameter_error("XiSeries: level k must be positive");
  if (order < 1) throw parameter_error("XiSeries: order must be >= 1");
  coeffs_.assign(order, XPoly(nspace, max_degree));
}

const XPoly& XiSeries::coeff(int a) const {
  if (a < 1 || a > order()) throw parameter_error("XiSeries::coeff: index out of range");
  return coeffs_[a - 1];
}

XPoly& XiSeries::coeff(int a) {
  if (a < 1 || a > order()) throw parameter_error("XiSeries::coeff: index out of range");
  return coeffs_[a - 1];
}

void XiSeries::set_coeff(int a, const XPoly& p) {
  coeff(a);  // range check
  if (p.nspace() != nspace_ || p.max_degree() != maxdeg_)
    throw parameter_error("XiSeries::set_coeff: coefficient truncation mismatch");
  coeffs_[a - 1] = p;
}

bool XiSeries::is_zero() const {
  for (const auto& c : coeffs_)
    if (!c.is_zero()) return false;
  return true;
}

int XiSeries::lowest_index() const {
  for (int a = 1; a <= order(); ++a)
    if (!coeffs_[a - 1].is_zero()) return a;
  return 0;
}

void XiSeries::require_compatible(const XiSeries& o, const char* what) const {
  if (level_ != o.level_)
    throw parameter_error(std::string(what) + ": level mismatch");
  if (order() != o.order() || nspace_ != o.nspace_ || maxdeg_ != o.maxdeg_)
    throw parameter_error(std::string(what) +
                          ": operands have different truncation parameters");
}

XiSeries& XiSeries::operator+=(const XiSeries& o) {
  require_compatible(o, "XiSeries::operator+=");
  for (size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

XiSeries& XiSeries::operator-=(const XiSeries& o) {
  require_compatible(o, "XiSeries::operator-=");
  for (size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

XiSeries& XiSeries::operator*=(cplx s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

cplx XiSeries::eval_truncated(double rho, double theta,
                              const std::vector<cplx>& x) const {
  if (rho <= 0.0) throw domain_error("XiSeries::eval_truncated: rho must be > 0");
  cplx acc(0.0);
  const double lr = std::log(rho);
  for (int a = 1; a <= order(); ++a) {
    const XPoly& c = coeffs_[a - 1];
    if (c.is_zero()) continue;
    // e_a(xi) = xi^{a-k} / Gamma(a/k) evaluated on the ray via log scaling.
    double lw = (a - level_) * lr - std::lgamma(a / level_);
    cplx basis = std::exp(cplx(lw, (a - level_) * theta));
    acc += c.eval(x) * basis;
  }
  return acc;
}

// ---- formal transforms --------------------------------------------------

XiSeries formal_borel(const TSeries& f, double k) {
  if (k <= 0.0) throw parameter_error("formal_borel: level k must be positive");
  if (!f.coeff(0).is_zero())
    throw domain_error(
        "formal_borel: nonzero constant term; split off f(0,x) first and "
        "transform the remainder");
  if (f.order() < 1)
    throw parameter_error("formal_borel: need order >= 1");
  XiSeries g(k, f.order(), f.nspace(), f.max_degree());
  for (int n = 1; n <= f.order(); ++n) g.set_coeff(n, f.coeff(n));
  return g;
}

TSeries formal_laplace(const XiSeries& g) {
  TSeries f(g.order(), g.nspace(), g.max_degree());
  for (int a = 1; a <= g.order(); ++a) f.set_coeff(a, g.coeff(a));
  return f;
}

XiSeries accelerate_formal(const XiSeries& g, double k_to) {
  if (k_to <= g.level())
    throw parameter_error("accelerate_formal: target level must exceed current level");
  XiSeries r(k_to, g.order(), g.nspace(), g.max_degree());
  for (int a = 1; a <= g.order(); ++a) r.set_coeff(a, g.coeff(a));
  return r;
}

XiSeries euler_apply(const XiSeries& g) {
  XiSeries r = g;
  for (int a = 1; a <= g.order(); ++a) r.coeff(a) *= cplx(a + 1.0);
  return r;
}

XiSeries euler_inverse(const XiSeries& g) {
  XiSeries r = g;
  for (int a = 1; a <= g.order(); ++a) r.coeff(a) *= cplx(1.0 / (a + 1.0));
  return r;
}

// ---- Gevrey fit ---------------------------------------------------------

GevreyFit gevrey_fit(const std::vector<double>& norms,
                     double convergent_threshold, int n_min) {
  std::vector<double> ns, ys;
  for (size_t n = 0; n < norms.size(); ++n) {
    if (norms[n] < 0.0) throw parameter_error("gevrey_fit: negative norm");
    if (static_cast<int>(n) >= n_min && norms[n] > 0.0) {
      ns.push_back(static_cast<double>(n));
      ys.push_back(std::log(norms[n]));
    }
  }
  if (ns.size() < 8)
    throw degenerate_input_error("gevrey_fit: need at least 8 usable entries");

  const int rows = static_cast<int>(ns.size());
  Eigen::MatrixXd A(rows, 4);
  Eigen::VectorXd y(rows);
  for (int i = 0; i < rows; ++i) {
    double n = ns[i], ln = std::log(n);
    A(i, 0) = 1.0;
    A(i, 1) = n;
    A(i, 2) = n * ln;
    A(i, 3) = ln;
    y(i) = ys[i];
  }
  Eigen::VectorXd beta = A.colPivHouseholderQr().solve(y);
  Eigen::VectorXd resid = A * beta - y;

  GevreyFit fit;
  fit.inv_k = beta(2);
  fit.M_est = std::exp(beta(0));
  fit.C_est = std::exp(beta(1));
  fit.residual = std::sqrt(resid.squaredNorm() / rows);
  if (fit.inv_k < convergent_threshold) {
    fit.convergent = true;
    fit.k_est = 0.0;
  } else {
    fit.convergent = false;
    fit.k_est = 1.0 / fit.inv_k;
  }
  return fit;
}

std::vector<double> coeff_norms(const TSeries& f) {
  std::vector<double> norms(f.order() + 1);
  for (int n = 0; n <= f.order(); ++n) norms[n] = f.coeff(n).norm_max();
  return norms;
}

std::optional<double> growth_order_estimate(const XiSeries& g, double k_next) {
  if (k_next <= g.level())
    throw parameter_error("growth_order_estimate: k_next must exceed the level");
  // Norms of the level-k_next re-weighted coefficients b_a / Gamma(a/k_next);
  // the scale is harmless for the slope, so work in logs for stability.
  std::vector<double> norms(g.order() + 1, 0.0);
  for (int a = 1; a <= g.order(); ++a) {
    double m = g.coeff(a).norm_max();
    if (m > 0.0) norms[a] = std::exp(std::log(m) - std::lgamma(a / k_next));
  }
  GevreyFit fit = gevrey_fit(norms);
  if (fit.convergent) return std::nullopt;
  return fit.k_est;  // slope 1/kappa at level k_next <=> order kappa
}

// ---- serialization ------------------------------------------------------

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_poly_records(std::ostream& os, int n, const XPoly& p) {
  for (const auto& [e, v] : p.coeffs()) {
    os << n << '\t';
    for (size_t i = 0; i < e.size(); ++i) {
      if (i) os << ',';
      os << e[i];
    }
    os << '\t' << fmt_double(v.real()) << '\t' << fmt_double(v.imag()) << '\n';
  }
}

struct Header {
  std::string kind;
  double level = 0.0;
  int order = 0, nspace = 0, maxdeg = 0;
};

Header parse_header(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.empty() || line[0] != '#')
    throw validation_error("series read: missing header line");
  Header h;
  std::istringstream ss(line.substr(1));
  ss >> h.kind;
  std::string kv;
  while (ss >> kv) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw validation_error("series read: malformed header field '" + kv + "'");
    std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
    if (key == "level")
      h.level = std::stod(val);
    else if (key == "order")
      h.order = std::stoi(val);
    else if (key == "nspace")
      h.nspace = std::stoi(val);
    else if (key == "maxdeg")
      h.maxdeg = std::stoi(val);
    else
      throw validation_error("series read: unknown header field '" + key + "'");
  }
  if (h.order < 1 || h.nspace < 1 || h.maxdeg < 0)
    throw validation_error("series read: bad header values");
  return h;
}

struct Record {
  int n;
  XPoly::exp_vec e;
  cplx v;
};

bool parse_record(const std::string& line, int nspace, Record& rec) {
  if (line.empty()) return false;
  std::istringstream ss(line);
  std::string idx, ev, re, im;
  if (!std::getline(ss, idx, '\t') || !std::getline(ss, ev, '\t') ||
      !std::getline(ss, re, '\t') || !std::getline(ss, im))
    throw validation_error("series read: malformed record '" + line + "'");
  rec.n = std::stoi(idx);
  rec.e.clear();
  std::istringstream es(ev);
  std::string tok;
  while (std::getline(es, tok, ',')) rec.e.push_back(std::stoi(tok));
  if (static_cast<int>(rec.e.size()) != nspace)
    throw validation_error("series read: exponent vector length mismatch");
  rec.v = cplx(std::stod(re), std::stod(im));
  return true;
}

}  // namespace

void write_tseries(std::ostream& os, const TSeries& f) {
  os << "# tseries order=" << f.order() << " nspace=" << f.nspace()
     << " maxdeg=" << f.max_degree() << '\n';
  for (int n = 0; n <= f.order(); ++n) write_poly_records(os, n, f.coeff(n));
}

TSeries read_tseries(std::istream& is) {
  Header h = parse_header(is);
  if (h.kind != "tseries") throw validation_error("series read: expected tseries");
  TSeries f(h.order, h.nspace, h.maxdeg);
  std::string line;
  Record rec;
  while (std::getline(is, line)) {
    if (!parse_record(line, h.nspace, rec)) continue;
    if (rec.n < 0 || rec.n > h.order)
      throw validation_error("series read: coefficient index out of range");
    f.coeff(rec.n).set_coeff(rec.e, rec.v);
  }
  return f;
}

void write_xiseries(std::ostream& os, const XiSeries& g) {
  os << "# xiseries level=" << fmt_double(g.level()) << " order=" << g.order()
     << " nspace=" << g.nspace() << " maxdeg=" << g.max_degree() << '\n';
  for (int a = 1; a <= g.order(); ++a) write_poly_records(os, a, g.coeff(a));
}

XiSeries read_xiseries(std::istream& is) {
  Header h = parse_header(is);
  if (h.kind != "xiseries") throw validation_error("series read: expected xiseries");
  if (h.level <= 0.0) throw validation_error("series read: bad level");
  XiSeries g(h.level, h.order, h.nspace, h.maxdeg);
  std::string line;
  Record rec;
  while (std::getline(is, line)) {
    if (!parse_record(line, h.nspace, rec)) continue;
    if (rec.n < 1 || rec.n > h.order)
      throw validation_error("series read: coefficient index out of range");
    g.coeff(rec.n).set_coeff(rec.e, rec.v);
  }
  return g;
}

}  // namespace borelsum
