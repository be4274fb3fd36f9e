#include "borelsum/cauchy.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "borelsum/convolution.hpp"

namespace borelsum {

namespace {

constexpr double kPi = 3.14159265358979323846;

double wrap_angle(double a) {
  while (a > kPi) a -= 2.0 * kPi;
  while (a <= -kPi) a += 2.0 * kPi;
  return a;
}

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

XPoly refit_xpoly(const XPoly& p, int nspace, int maxdeg) {
  XPoly out(nspace, maxdeg);
  for (const auto& [e, v] : p.coeffs()) out.set_coeff(e, v);
  return out;
}

TSeries refit_tseries(const TSeries& f, int order, int nspace, int maxdeg) {
  TSeries out(order, nspace, maxdeg);
  for (int a = 0; a <= std::min(order, f.order()); ++a)
    out.set_coeff(a, refit_xpoly(f.coeff(a), nspace, maxdeg));
  return out;
}

TSeries ts_truncated(const TSeries& f, int order) {
  TSeries out(order, f.nspace(), f.max_degree());
  for (int a = 0; a <= std::min(order, f.order()); ++a)
    out.set_coeff(a, f.coeff(a));
  return out;
}

TSeries ts_constant(const XPoly& p, int order) {
  TSeries out(order, p.nspace(), p.max_degree());
  out.set_coeff(0, p);
  return out;
}

TSeries ts_pow(const TSeries& base, int e) {
  TSeries acc = ts_constant(
      XPoly::constant(1.0, base.nspace(), base.max_degree()), base.order());
  for (int i = 0; i < e; ++i) acc = ts_mul(acc, base);
  return acc;
}

XiSeries xs_deriv(const XiSeries& g, int j) {
  XiSeries out(g.level(), g.order(), g.nspace(), g.max_degree());
  for (int a = 1; a <= g.order(); ++a) out.set_coeff(a, g.coeff(a).deriv(j));
  return out;
}

// Iterates all componentwise sub-multi-indices 0 <= sub <= idx.
bool next_subindex(std::vector<int>& sub, const std::vector<int>& idx) {
  for (size_t i = 0; i < idx.size(); ++i) {
    if (sub[i] < idx[i]) {
      ++sub[i];
      return true;
    }
    sub[i] = 0;
  }
  return false;
}

}  // namespace

int TermIndex::total() const {
  int s = 0;
  for (int v : alpha) s += v;
  for (int v : A) s += v;
  return s;
}

int TermIndex::sum_A() const {
  int s = 0;
  for (int v : A) s += v;
  return s;
}

void TermIndex::validate(int m, int n) const {
  if ((int)alpha.size() != m || (int)A.size() != m * n)
    throw validation_error("term index shape does not match (m, n_space)");
  for (int v : alpha)
    if (v < 0) throw validation_error("negative power in term index");
  for (int v : A)
    if (v < 0) throw validation_error("negative power in term index");
}

std::vector<FactorSlot> term_slots(const TermIndex& t, int m, int n) {
  std::vector<FactorSlot> slots;
  for (int i = 0; i < m; ++i)
    for (int c = 0; c < t.alpha[i]; ++c) slots.push_back({i, -1});
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      for (int c = 0; c < t.A[i * n + j]; ++c) slots.push_back({i, j});
  return slots;
}

void for_each_composition(
    int budget, int nslots,
    const std::function<void(const std::vector<int>&)>& visit) {
  if (nslots == 0) {
    if (budget == 0) visit({});
    return;
  }
  if (budget < nslots) return;
  std::vector<int> parts(nslots, 1);
  parts[nslots - 1] = budget - (nslots - 1);
  // Lexicographic successor: find the rightmost non-final slot that can grow.
  while (true) {
    visit(parts);
    int pos = nslots - 2;
    while (pos >= 0) {
      // raising parts[pos] by one must leave >= 1 per remaining slot
      int tail = 0;
      for (int q = pos + 1; q < nslots; ++q) tail += parts[q];
      if (tail - 1 >= nslots - pos - 1) break;
      --pos;
    }
    if (pos < 0) return;
    ++parts[pos];
    int remaining = budget;
    for (int q = 0; q <= pos; ++q) remaining -= parts[q];
    for (int q = pos + 1; q < nslots; ++q) parts[q] = 1;
    parts[nslots - 1] = remaining - (nslots - pos - 2);
  }
}

void CauchyProblem::validate() const {
  if (m < 1) throw validation_error("problem needs at least one unknown");
  if (n_space < 1)
    throw validation_error("problem needs at least one space variable");
  if ((int)terms.size() != m)
    throw validation_error("terms list length must equal the unknown count");
  if ((int)initial.size() != m)
    throw validation_error("initial data length must equal the unknown count");
  if (!(R0 > 0.0) || !(R1 > 0.0))
    throw validation_error("radii R0, R1 must be positive");
  for (const auto& eq : terms)
    for (const auto& [idx, ts] : eq) {
      idx.validate(m, n_space);
      if (ts.nspace() != n_space)
        throw validation_error("term series space dimension mismatch");
    }
  for (const XPoly& p : initial)
    if (p.nspace() != n_space)
      throw validation_error("initial data space dimension mismatch");
}

std::vector<double> MultiLevel::kappas() const {
  std::vector<double> ka(ks.size());
  for (size_t i = 0; i + 1 < ks.size(); ++i)
    ka[i] = 1.0 / (1.0 / ks[i] - 1.0 / ks[i + 1]);
  if (!ks.empty()) ka.back() = ks.back();
  return ka;
}

void MultiLevel::validate() const {
  if (ks.empty()) throw validation_error("no summation levels given");
  if (thetas.size() != ks.size())
    throw validation_error("levels and directions must have equal length");
  for (size_t i = 0; i < ks.size(); ++i) {
    if (!(ks[i] > 0.0)) throw validation_error("levels must be positive");
    if (i > 0 && !(ks[i] > ks[i - 1]))
      throw validation_error("levels must be strictly increasing");
  }
  std::vector<double> ka = kappas();
  for (size_t i = 0; i + 1 < ks.size(); ++i) {
    double gap = std::abs(wrap_angle(thetas[i] - thetas[i + 1]));
    if (gap > kPi / (2.0 * ka[i]) + 1e-12) {
      std::ostringstream os;
      os << "directions " << i + 1 << " and " << i + 2
         << " violate the multidirection condition: |theta_" << i + 1
         << " - theta_" << i + 2 << "| = " << gap << " > pi/(2 kappa) with kappa = "
         << ka[i];
      throw validation_error(os.str());
    }
  }
}

const XiSeries& EpsGraded::at(int r, int ell) const {
  if (r < 0 || r >= (int)v.size() || ell < 1 || ell > (int)v[r].size())
    throw internal_error("graded solution is missing a required grade");
  return v[r][ell - 1];
}

NormalizedProblem normalize(const CauchyProblem& p, int order, int maxdeg) {
  p.validate();
  if (order < 1) throw parameter_error("normalize: order must be >= 1");
  if (maxdeg < 0) throw parameter_error("normalize: max degree must be >= 0");
  const int m = p.m, n = p.n_space;

  NormalizedProblem np;
  np.m = m;
  np.n_space = n;
  np.order = order;
  np.maxdeg = maxdeg;
  np.u0.reserve(m);
  for (const XPoly& q : p.initial) np.u0.push_back(refit_xpoly(q, n, maxdeg));

  // d_i(x) = f_i(0, x, U0, grad U0): the t-linear part of u that must be
  // split off so the remaining unknown vanishes to second order.
  std::vector<XPoly> du0(m * n, XPoly(n, maxdeg));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) du0[i * n + j] = np.u0[i].deriv(j);
  np.d.assign(m, XPoly(n, maxdeg));
  for (int i = 0; i < m; ++i) {
    XPoly acc(n, maxdeg);
    for (const auto& [idx, ts] : p.terms[i]) {
      if (ts.order() < 0) continue;
      XPoly part = refit_xpoly(ts.coeff(0), n, maxdeg);
      for (int jj = 0; jj < m; ++jj)
        for (int c = 0; c < idx.alpha[jj]; ++c) part = part.mul(np.u0[jj]);
      for (int ii = 0; ii < m; ++ii)
        for (int j = 0; j < n; ++j)
          for (int c = 0; c < idx.A[ii * n + j]; ++c)
            part = part.mul(du0[ii * n + j]);
      acc += part;
    }
    np.d[i] = acc;
  }

  // Shift series u_i = S_i + w_i with S_i = u0_i + t d_i, then re-expand
  // every term around the shift by the binomial theorem; the unknown w and
  // its gradient keep the powers alpha', A' of the sub-indices.
  std::vector<TSeries> S(m), dS(m * n);
  for (int i = 0; i < m; ++i) {
    S[i] = TSeries(order, n, maxdeg);
    S[i].set_coeff(0, np.u0[i]);
    S[i].set_coeff(1, np.d[i]);
    for (int j = 0; j < n; ++j) {
      dS[i * n + j] = TSeries(order, n, maxdeg);
      dS[i * n + j].set_coeff(0, du0[i * n + j]);
      dS[i * n + j].set_coeff(1, np.d[i].deriv(j));
    }
  }

  np.terms.assign(m, {});
  for (int i = 0; i < m; ++i) {
    std::map<TermIndex, TSeries> h;
    for (const auto& [idx, ts_raw] : p.terms[i]) {
      TSeries fterm = refit_tseries(ts_raw, order, n, maxdeg);
      if (fterm.is_zero()) continue;
      std::vector<int> full = idx.alpha;
      full.insert(full.end(), idx.A.begin(), idx.A.end());
      std::vector<int> sub(full.size(), 0);
      do {
        TermIndex sidx;
        sidx.alpha.assign(sub.begin(), sub.begin() + m);
        sidx.A.assign(sub.begin() + m, sub.end());
        double bin = 1.0;
        for (size_t q = 0; q < full.size(); ++q)
          bin *= binom(full[q], sub[q]);
        TSeries part = fterm * cplx(bin);
        for (int jj = 0; jj < m; ++jj)
          if (idx.alpha[jj] > sidx.alpha[jj])
            part = ts_mul(part, ts_pow(S[jj], idx.alpha[jj] - sidx.alpha[jj]));
        for (int e = 0; e < m * n; ++e)
          if (idx.A[e] > sidx.A[e])
            part = ts_mul(part, ts_pow(dS[e], idx.A[e] - sidx.A[e]));
        auto it = h.find(sidx);
        if (it == h.end())
          h.emplace(sidx, part);
        else
          it->second += part;
      } while (next_subindex(sub, full));
    }

    // Remove the split-off slope from the constant term; by construction the
    // t = 0 value then cancels exactly, which we enforce after checking.
    TermIndex zero_idx;
    zero_idx.alpha.assign(m, 0);
    zero_idx.A.assign(m * n, 0);
    auto z = h.find(zero_idx);
    if (z == h.end())
      z = h.emplace(zero_idx, TSeries(order, n, maxdeg)).first;
    z->second.coeff(0) -= np.d[i];
    double scale = 1.0;
    for (const auto& [sidx, ts] : h)
      for (int a = 0; a <= ts.order(); ++a)
        scale = std::max(scale, ts.coeff(a).norm_max());
    if (z->second.coeff(0).norm_max() > 1e-10 * scale)
      throw internal_error(
          "normalize: constant part failed to cancel after the slope shift");
    z->second.set_coeff(0, XPoly(n, maxdeg));

    // Dress each term with t^{|alpha|+|A|} (the unknown substitution
    // w = t v pushes one t into every factor).
    for (const auto& [sidx, hts] : h) {
      if (hts.is_zero()) continue;
      int F = sidx.total();
      if (F > order)
        throw truncation_error(
            "normalize: a re-expanded term needs a higher truncation order "
            "to survive its t-dressing",
            F);
      np.terms[i].emplace(sidx, hts.tshift(F));
    }
  }
  return np;
}

cplx unnormalize_value(const NormalizedProblem& np, int i, cplx t,
                       const std::vector<cplx>& x, cplx v_value) {
  if (i < 0 || i >= np.m) throw parameter_error("unknown index out of range");
  return np.u0[i].eval(x) + t * np.d[i].eval(x) + t * v_value;
}

std::vector<TSeries> formal_solve(const NormalizedProblem& np, int N) {
  if (N > np.order)
    throw truncation_error("formal_solve: requested order exceeds capacity", N);
  const int m = np.m, n = np.n_space;
  std::vector<TSeries> v(m, TSeries(N, n, np.maxdeg));
  for (int q = 1; q <= N; ++q) {
    // Order-q coefficient of each right-hand side; factors only involve
    // orders below q, so truncating every factor at q is exact here.
    std::vector<XPoly> rhs(m, XPoly(n, np.maxdeg));
    for (int i = 0; i < m; ++i) {
      for (const auto& [idx, g] : np.terms[i]) {
        TSeries prod = ts_truncated(g, q);
        for (int jj = 0; jj < m; ++jj)
          for (int c = 0; c < idx.alpha[jj]; ++c)
            prod = ts_mul(prod, ts_truncated(v[jj], q));
        for (int ii = 0; ii < m; ++ii)
          for (int j = 0; j < n; ++j)
            for (int c = 0; c < idx.A[ii * n + j]; ++c) {
              TSeries dv(q, n, np.maxdeg);
              for (int a = 0; a <= std::min(q, v[ii].order()); ++a)
                dv.set_coeff(a, v[ii].coeff(a).deriv(j));
              prod = ts_mul(prod, dv);
            }
        rhs[i] += prod.coeff(q);
      }
    }
    for (int i = 0; i < m; ++i)
      v[i].set_coeff(q, rhs[i] * cplx(1.0 / (q + 1)));
  }
  return v;
}

TSeries reconstruct_u(const NormalizedProblem& np, const TSeries& v, int i) {
  if (i < 0 || i >= np.m) throw parameter_error("unknown index out of range");
  TSeries u(v.order(), v.nspace(), v.max_degree());
  u.set_coeff(0, np.u0[i]);
  if (u.order() >= 1) u.set_coeff(1, np.d[i]);
  for (int a = 1; a <= u.order(); ++a) u.coeff(a) += v.coeff(a - 1);
  return u;
}

XiSeries borel_tshift(const XiSeries& f_hat, int j) {
  if (j < 1) throw parameter_error("borel_tshift: shift must be >= 1");
  XiSeries ej(f_hat.level(), f_hat.order(), f_hat.nspace(), f_hat.max_degree());
  if (j <= ej.order())
    ej.set_coeff(j, XPoly::constant(1.0, f_hat.nspace(), f_hat.max_degree()));
  return conv(f_hat, ej);
}

std::map<TermIndex, XiSeries> borel_terms(const NormalizedProblem& np, int r,
                                          double k) {
  if (r < 0 || r >= np.m) throw parameter_error("equation index out of range");
  std::map<TermIndex, XiSeries> out;
  for (const auto& [idx, g] : np.terms[r]) {
    if (g.is_zero()) continue;
    out.emplace(idx, formal_borel(g, k));
  }
  return out;
}

std::vector<XiSeries> assemble_G(const NormalizedProblem& np, double k, int ell,
                                 const EpsGraded& lower) {
  if (ell < 1) throw parameter_error("assemble_G: grade must be >= 1");
  const int m = np.m, n = np.n_space;
  std::vector<XiSeries> G(m, XiSeries(k, np.order, n, np.maxdeg));
  for (int r = 0; r < m; ++r) {
    auto hatg = borel_terms(np, r, k);
    for (const auto& [idx, gh] : hatg) {
      int F = idx.total();
      if (ell == 1) {
        if (F == 0) G[r] += gh;
        continue;
      }
      if (F == 0 || ell - F < F) continue;
      std::vector<FactorSlot> slots = term_slots(idx, m, n);
      for_each_composition(ell - F, F, [&](const std::vector<int>& parts) {
        XiSeries prod = gh;
        for (size_t s = 0; s < slots.size(); ++s) {
          const XiSeries& base = lower.at(slots[s].unknown, parts[s]);
          prod = conv(prod, slots[s].deriv_axis < 0
                                ? base
                                : xs_deriv(base, slots[s].deriv_axis));
        }
        G[r] += prod;
      });
    }
  }
  return G;
}

EpsGraded convolution_fixpoint(const NormalizedProblem& np, double k,
                               double theta, int L) {
  if (!std::isfinite(theta))
    throw parameter_error("convolution_fixpoint: direction must be finite");
  if (L < 1) throw parameter_error("convolution_fixpoint: need L >= 1");
  if (L > np.order)
    throw truncation_error("convolution_fixpoint: grade count exceeds order", L);
  EpsGraded grading;
  grading.k = k;
  grading.v.assign(np.m, {});
  for (int ell = 1; ell <= L; ++ell) {
    std::vector<XiSeries> G = assemble_G(np, k, ell, grading);
    for (int r = 0; r < np.m; ++r) {
      XiSeries vh = euler_inverse(G[r]);
      int low = vh.lowest_index();
      if (low != 0 && low < ell)
        throw internal_error(
            "convolution_fixpoint: grade shape violated (index below grade)");
      grading.v[r].push_back(std::move(vh));
    }
  }
  return grading;
}

std::vector<XiSeries> grading_sum(const EpsGraded& g) {
  std::vector<XiSeries> out;
  out.reserve(g.v.size());
  for (const auto& grades : g.v) {
    if (grades.empty()) throw parameter_error("grading_sum: empty grading");
    XiSeries acc = grades.front();
    for (size_t l = 1; l < grades.size(); ++l) acc += grades[l];
    out.push_back(std::move(acc));
  }
  return out;
}

void ResumOptions::validate() const {
  if (order < 4) throw validation_error("order must be at least 4");
  if (maxdeg < 0) throw validation_error("max degree must be >= 0");
  if (!(tail_cut > 0.0) || !(tail_cut < 1.0))
    throw validation_error("tail_cut must lie in (0,1)");
  if (!(quad_tol > 0.0)) throw validation_error("quad_tol must be positive");
  if (!(direction_guard > 0.0))
    throw validation_error("direction_guard must be positive");
  if (!(froissart_rel > 0.0))
    throw validation_error("froissart_rel must be positive");
  if (threads < 1) throw validation_error("threads must be >= 1");
}

namespace {

bool xiseries_vanishes_at(const XiSeries& g, const std::vector<cplx>& x) {
  for (int a = 1; a <= g.order(); ++a)
    if (std::abs(g.coeff(a).eval(x)) != 0.0) return false;
  return true;
}

}  // namespace

RationalApprox pade_auto(const XiSeries& g, const std::vector<cplx>& x, int L0,
                         int M0, bool* reduced) {
  if (xiseries_vanishes_at(g, x)) {
    RationalApprox r;
    r.k = g.level();
    r.num = {cplx(0.0)};
    r.den = {cplx(1.0)};
    return r;
  }
  for (int M = M0; M >= 0; --M) {
    int L = std::min(L0, g.order() - 1 - M);
    if (L < 0) continue;
    try {
      RationalApprox r = pade_continue(g, x, L, M);
      if (reduced && (M < M0 || L < L0)) *reduced = true;
      return r;
    } catch (const degeneracy_error&) {
      continue;
    }
  }
  throw degeneracy_error("pade_auto: no admissible degrees");
}

namespace {

// Rejects the direction when a credible pole of the continuation sits within
// the angular guard of the summation ray.  Credible means: not a numerically
// spurious residue doublet, and with a kernel-weighted contribution
// |res| exp(-(|pole|/t_scale)^k) that the requested evaluations could actually
// feel; high-degree continuations of noisy high-order coefficients otherwise
// manufacture far-out artifacts that no integral ever reaches.  When several
// poles offend, the one closest to the origin names the binding singularity.
void screen_direction(const RationalApprox& ra, double theta, double guard,
                      double froissart_rel, double k, double t_scale,
                      double quad_tol) {
  double res_scale = 0.0;
  for (const cplx& res : ra.residues)
    if (std::isfinite(std::abs(res))) res_scale = std::max(res_scale, std::abs(res));
  double negligible = quad_tol;
  const cplx* offender = nullptr;
  for (size_t i = 0; i < ra.poles.size(); ++i) {
    const cplx& pole = ra.poles[i];
    if (std::abs(pole) < 1e-9) continue;
    double res_mag = std::abs(ra.residues[i]);
    if (std::isfinite(res_mag) && res_mag < froissart_rel * res_scale)
      continue;  // numerically spurious doublet
    if (std::isfinite(res_mag) && t_scale > 0.0 &&
        res_mag * std::exp(-std::pow(std::abs(pole) / t_scale, k)) < negligible)
      continue;  // beyond the kernel's reach at every requested point
    double gap = std::abs(wrap_angle(std::arg(pole) - theta));
    if (gap <= guard &&
        (!offender || std::abs(pole) < std::abs(*offender)))
      offender = &pole;
  }
  if (offender) {
    std::ostringstream os;
    os << "summation ray theta = " << theta << " passes within " << guard
       << " rad of a continuation pole at (" << offender->real() << ", "
       << offender->imag() << ")";
    throw direction_rejected(os.str(), offender->real(), offender->imag());
  }
}

}  // namespace

SolutionTable resum(const CauchyProblem& p, const MultiLevel& ml,
                    const std::vector<cplx>& t_points,
                    const std::vector<std::vector<cplx>>& x_points,
                    const ResumOptions& cfg) {
  ml.validate();
  cfg.validate();
  if (t_points.empty() || x_points.empty())
    throw parameter_error("resum: need at least one t point and one x point");
  for (const auto& x : x_points)
    if ((int)x.size() != p.n_space)
      throw parameter_error("resum: x point dimension mismatch");

  NormalizedProblem np = normalize(p, cfg.order, cfg.maxdeg);
  const int pL = ml.levels();
  const double kp = ml.ks.back();
  const double thp = ml.thetas.back();

  EpsGraded grading =
      convolution_fixpoint(np, ml.ks.front(), ml.thetas.front(), cfg.order);
  std::vector<XiSeries> base = grading_sum(grading);

  // Level chain: the basis map is exact, so each level is the same
  // coefficient list reinterpreted at the next level.
  std::vector<std::vector<XiSeries>> chain(pL);
  chain[0] = base;
  for (int s = 1; s < pL; ++s) {
    chain[s].reserve(np.m);
    for (int r = 0; r < np.m; ++r)
      chain[s].push_back(accelerate_formal(chain[s - 1][r], ml.ks[s]));
  }

  int L0 = cfg.pade_num >= 0 ? cfg.pade_num : (cfg.order - 1) / 2;
  int M0 = cfg.pade_den >= 0 ? cfg.pade_den : (cfg.order - 1) / 2;

  double t_scale = 0.0;
  for (const cplx& t : t_points) t_scale = std::max(t_scale, std::abs(t));

  // Rational continuation per (x point, unknown) at every level: the
  // intermediate levels contribute pole screening for their directions, the
  // last level feeds the Laplace evaluation.
  std::vector<std::vector<RationalApprox>> continuation(x_points.size());
  std::vector<bool> reduced_at_x(x_points.size(), false);
  for (size_t ix = 0; ix < x_points.size(); ++ix) {
    bool reduced = false;
    for (int s = 0; s < pL; ++s) {
      for (int r = 0; r < np.m; ++r) {
        RationalApprox ra =
            pade_auto(chain[s][r], x_points[ix], L0, M0, &reduced);
        screen_direction(ra, ml.thetas[s], cfg.direction_guard,
                         cfg.froissart_rel, ml.ks[s], t_scale, cfg.quad_tol);
        if (s == pL - 1) continuation[ix].push_back(std::move(ra));
      }
    }
    reduced_at_x[ix] = reduced;
  }

  SolutionTable table;
  table.ml = ml;
  table.cfg = cfg;
  table.rows.resize(t_points.size() * x_points.size());

  std::exception_ptr first_error;
  std::mutex err_mutex;
  auto work = [&](size_t begin, size_t step) {
    for (size_t row = begin; row < table.rows.size(); row += step) {
      try {
        size_t it = row / x_points.size();
        size_t ix = row % x_points.size();
        SolutionRow out;
        out.t = t_points[it];
        out.x = x_points[ix];
        out.u.resize(np.m);
        double err = 0.0;
        for (int r = 0; r < np.m; ++r) {
          cplx v_val(0.0);
          double est = 0.0;
          if (!(continuation[ix][r].num.size() == 1 &&
                continuation[ix][r].num[0] == cplx(0.0))) {
            EvalOptions eo;
            eo.rel_tol = cfg.quad_tol;
            eo.err_out = &est;
            v_val = laplace_eval(rational_ray_fn(continuation[ix][r], thp), kp,
                                 thp, out.t, cfg.tail_cut, eo);
          }
          out.u[r] = unnormalize_value(np, r, out.t, out.x, v_val);
          err = std::max(err, std::abs(out.t) * est);
        }
        out.err_est = err;
        out.stage_flags = reduced_at_x[ix] ? "pade-reduced" : "ok";
        table.rows[row] = std::move(out);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  int width = std::max(1, std::min<int>(cfg.threads, (int)table.rows.size()));
  if (width == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < width; ++w) pool.emplace_back(work, w, width);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return table;
}

namespace {

// Value of a data series f(t, x) whose t-expansion may diverge: the constant
// term is exact and the remainder goes through the same transform chain as
// the solution (its sum is what the equation means by f at this t).
cplx resum_data_series(const TSeries& f, const MultiLevel& ml,
                       const ResumOptions& cfg, cplx t,
                       const std::vector<cplx>& x) {
  cplx c0 = f.coeff(0).eval(x);
  TSeries rest = f;
  rest.set_coeff(0, XPoly(f.nspace(), f.max_degree()));
  if (rest.is_zero()) return c0;
  XiSeries hat = formal_borel(rest, ml.ks.front());
  for (int s = 1; s < ml.levels(); ++s) hat = accelerate_formal(hat, ml.ks[s]);
  int L0 = cfg.pade_num >= 0 ? cfg.pade_num : (cfg.order - 1) / 2;
  int M0 = cfg.pade_den >= 0 ? cfg.pade_den : (cfg.order - 1) / 2;
  RationalApprox ra = pade_auto(hat, x, L0, M0, nullptr);
  EvalOptions eo;
  eo.rel_tol = cfg.quad_tol;
  cplx tail = laplace_eval(rational_ray_fn(ra, ml.ks.back()), ml.ks.back(),
                           ml.thetas.back(), t, cfg.tail_cut, eo);
  return c0 + tail;
}

struct XKey {
  std::vector<cplx> x;
  bool operator<(const XKey& o) const {
    if (x.size() != o.x.size()) return x.size() < o.x.size();
    for (size_t i = 0; i < x.size(); ++i) {
      if (x[i].real() != o.x[i].real()) return x[i].real() < o.x[i].real();
      if (x[i].imag() != o.x[i].imag()) return x[i].imag() < o.x[i].imag();
    }
    return false;
  }
};

}  // namespace

ResidualReport residual_check(const SolutionTable& table,
                              const CauchyProblem& p, double h) {
  if (!(h > 0.0) || !(h < 1.0))
    throw parameter_error("residual_check: step must lie in (0,1)");
  const ResumOptions& cfg = table.cfg;
  const MultiLevel& ml = table.ml;
  NormalizedProblem np = normalize(p, cfg.order, cfg.maxdeg);

  // Re-derive the final-level series once; the x-gradient of the solution
  // is the transform of the exactly differentiated series.
  EpsGraded grading =
      convolution_fixpoint(np, ml.ks.front(), ml.thetas.front(), cfg.order);
  std::vector<XiSeries> what = grading_sum(grading);
  for (int s = 1; s < ml.levels(); ++s)
    for (int r = 0; r < np.m; ++r)
      what[r] = accelerate_formal(what[r], ml.ks[s]);
  const double kp = ml.ks.back(), thp = ml.thetas.back();
  int L0 = cfg.pade_num >= 0 ? cfg.pade_num : (cfg.order - 1) / 2;
  int M0 = cfg.pade_den >= 0 ? cfg.pade_den : (cfg.order - 1) / 2;

  std::map<XKey, std::vector<const SolutionRow*>> groups;
  for (const auto& row : table.rows) groups[{row.x}].push_back(&row);

  ResidualReport rep;
  double sum = 0.0;
  int count = 0;
  for (const auto& [key, rows] : groups) {
    const std::vector<cplx>& x = key.x;
    // gradient continuations at this x point
    std::vector<std::vector<RationalApprox>> dra(np.m);
    for (int r = 0; r < np.m; ++r)
      for (int j = 0; j < np.n_space; ++j)
        dra[r].push_back(pade_auto(xs_deriv(what[r], j), x, L0, M0, nullptr));

    for (const SolutionRow* center : rows) {
      cplx t = center->t;
      if (std::abs(t) == 0.0) continue;
      const SolutionRow *plus = nullptr, *minus = nullptr;
      for (const SolutionRow* cand : rows) {
        if (std::abs(cand->t - t * (1.0 + h)) <= 1e-9 * std::abs(t))
          plus = cand;
        if (std::abs(cand->t - t * (1.0 - h)) <= 1e-9 * std::abs(t))
          minus = cand;
      }
      if (!plus || !minus) continue;

      for (int i = 0; i < np.m; ++i) {
        cplx dudt = (plus->u[i] - minus->u[i]) / (plus->t - minus->t);
        // f_i(t, x, U, P) with U from the table and P from the
        // differentiated-series transforms
        cplx fval(0.0);
        for (const auto& [idx, fts] : p.terms[i]) {
          cplx part = resum_data_series(
              refit_tseries(fts, cfg.order, np.n_space, cfg.maxdeg), ml, cfg,
              t, x);
          for (int jj = 0; jj < np.m; ++jj)
            for (int c = 0; c < idx.alpha[jj]; ++c) part *= center->u[jj];
          for (int ii = 0; ii < np.m; ++ii)
            for (int j = 0; j < np.n_space; ++j)
              for (int c = 0; c < idx.A[ii * np.n_space + j]; ++c) {
                EvalOptions eo;
                eo.rel_tol = cfg.quad_tol;
                cplx dv = laplace_eval(rational_ray_fn(dra[ii][j], thp), kp,
                                       thp, t, cfg.tail_cut, eo);
                cplx pij = np.u0[ii].deriv(j).eval(x) +
                           t * np.d[ii].deriv(j).eval(x) + t * dv;
                part *= pij;
              }
          fval += part;
        }
        double resid = std::abs(dudt - fval);
        rep.max_resid = std::max(rep.max_resid, resid);
        sum += resid;
        ++count;
      }
      ++rep.stencils;
    }
  }
  if (rep.stencils == 0)
    throw parameter_error(
        "residual_check: the table contains no complete centered stencil for "
        "this step");
  rep.mean_resid = sum / count;
  return rep;
}

}  // namespace borelsum
