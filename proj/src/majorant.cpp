#include "borelsum/majorant.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace borelsum {

namespace {

std::vector<double> cauchy_product(const std::vector<double>& a,
                                   const std::vector<double>& b, int order) {
  std::vector<double> out(order + 1, 0.0);
  for (int i = 0; i <= order && i < (int)a.size(); ++i)
    for (int j = 0; i + j <= order && j < (int)b.size(); ++j)
      out[i + j] += a[i] * b[j];
  return out;
}

double max_ratio(const std::vector<double>& lhs,
                 const std::vector<double>& rhs) {
  double worst = 0.0;
  for (size_t n = 0; n < lhs.size() && n < rhs.size(); ++n) {
    if (rhs[n] > 0.0)
      worst = std::max(worst, lhs[n] / rhs[n]);
    else if (lhs[n] > 0.0)
      return std::numeric_limits<double>::infinity();
  }
  return worst;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// All tuples (parts >= 0) of length nslots summing to budget.
void for_each_weak_composition(
    int budget, int nslots,
    const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> parts(nslots, 0);
  if (nslots == 0) {
    if (budget == 0) visit(parts);
    return;
  }
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == nslots - 1) {
      parts[pos] = left;
      visit(parts);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      parts[pos] = v;
      rec(pos + 1, left - v);
    }
  };
  rec(0, budget);
}

}  // namespace

MajorantSeries theta_build(int N) {
  if (N < 16) throw parameter_error("theta_build: order must be at least 16");
  std::vector<double> P(N + 1), Q(N + 1);
  for (int n = 0; n <= N; ++n) {
    P[n] = 1.0 / std::pow(n + 1.0, 3);
    Q[n] = (n + 1.0) / std::pow(n + 2.0, 3);
  }
  std::vector<double> PP = cauchy_product(P, P, N);
  std::vector<double> PQ = cauchy_product(P, Q, N);
  std::vector<double> QQ = cauchy_product(Q, Q, N);
  double c2 = 0.0;
  for (int n = 0; n <= N; ++n) {
    c2 = std::max(c2, PP[n] / P[n]);
    c2 = std::max(c2, PQ[n] / Q[n]);
    c2 = std::max(c2, QQ[n] / Q[n]);
  }
  double c = std::min(1.0, 1.0 / c2);

  MajorantSeries mj;
  mj.coeffs.resize(N + 1);
  for (int n = 0; n <= N; ++n) mj.coeffs[n] = c * P[n];
  mj.R = 1.0;
  mj.c_const = c;
  for (int n = 0; n <= N; ++n) mj.C1 = std::max(mj.C1, P[n] / Q[n]);

  // Re-verify the three product relations at the chosen c.
  const double tol = 1.0 + 1e-12;
  for (int n = 0; n <= N; ++n) {
    if (c * c * PP[n] > tol * c * P[n] || c * c * PQ[n] > tol * c * Q[n] ||
        c * c * QQ[n] > tol * c * Q[n])
      throw internal_error(
          "theta_build: self-bound verification failed at the computed c");
    if (c * P[n] > tol * mj.C1 * c * Q[n])
      throw internal_error(
          "theta_build: derivative comparison constant verification failed");
  }
  return mj;
}

std::vector<double> theta_scaled(const MajorantSeries& mj, double R) {
  if (!(R > 0.0)) throw parameter_error("theta_scaled: scale must be positive");
  std::vector<double> out(mj.coeffs.size());
  double rp = 1.0;
  for (size_t n = 0; n < out.size(); ++n) {
    out[n] = mj.coeffs[n] / rp;
    rp *= R;
  }
  return out;
}

std::vector<double> theta_deriv_over_factorial(const MajorantSeries& mj,
                                               double R, int ell, int N) {
  if (!(R > 0.0) || ell < 0 || N < 0)
    throw parameter_error("theta_deriv_over_factorial: bad parameters");
  if (N + ell > mj.order())
    throw truncation_error(
        "theta_deriv_over_factorial: comparison series is too short", N + ell);
  std::vector<double> out(N + 1);
  double bin = 1.0;                   // binom(n + ell, ell)
  double rp = std::pow(R, ell);       // R^{n + ell}
  for (int n = 0; n <= N; ++n) {
    if (n > 0) bin *= double(n + ell) / n;
    out[n] = bin * mj.coeffs[n + ell] / rp;
    rp *= R;
  }
  return out;
}

double deriv_bound_constant(const MajorantSeries& mj, double R) {
  (void)mj;
  if (!(R > 0.0))
    throw parameter_error("deriv_bound_constant: scale must be positive");
  // R^ell (ell+1)^3 <= B^ell needs B >= R (ell+1)^{3/ell}; the maximum of
  // (ell+1)^{3/ell} over ell >= 1 is 8 at ell = 1.
  return 8.0 * R;
}

bool majorize(const std::vector<cplx>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    throw parameter_error("majorize: truncation orders differ");
  for (size_t n = 0; n < a.size(); ++n)
    if (std::abs(a[n]) > b[n]) return false;
  return true;
}

bool majorize(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    throw parameter_error("majorize: truncation orders differ");
  for (size_t n = 0; n < a.size(); ++n)
    if (std::abs(a[n]) > b[n]) return false;
  return true;
}

double multinomial_weight(const std::vector<int>& beta) {
  double r = 1.0;
  int partial = 0;
  for (int b : beta) {
    if (b < 0)
      throw parameter_error("multinomial_weight: negative exponent");
    partial += b;
    // times binom(partial, b)
    double f = 1.0;
    for (int i = 1; i <= b; ++i) f = f * (partial - b + i) / i;
    r *= f;
  }
  return r;
}

bool x_majorize(const XPoly& p, const std::vector<double>& t) {
  for (const auto& [beta, v] : p.coeffs()) {
    int d = total_degree(beta);
    double lhs = std::abs(v);
    if (d >= (int)t.size()) {
      if (lhs > 0.0) return false;
      continue;
    }
    if (lhs > t[d] * multinomial_weight(beta)) return false;
  }
  return true;
}

std::vector<double> x_profile(const XPoly& p) {
  std::vector<double> out(p.max_degree() + 1, 0.0);
  for (const auto& [beta, v] : p.coeffs()) {
    int d = total_degree(beta);
    out[d] = std::max(out[d], std::abs(v) / multinomial_weight(beta));
  }
  return out;
}

DerivProductReport lemma33_audit(const MajorantSeries& mj, int n_factors,
                                 int ell_budget) {
  if (n_factors < 1 || ell_budget < 0)
    throw parameter_error("lemma33_audit: bad parameters");
  const double R = mj.R;
  const int W = mj.order() - ell_budget - 1;
  if (W < 8)
    throw truncation_error("lemma33_audit: comparison series is too short",
                           ell_budget + 9);
  // D[j] holds the plain derivative series Theta^{(j)} to order W.
  std::vector<std::vector<double>> D(ell_budget + 2);
  for (int j = 0; j <= ell_budget + 1; ++j) {
    D[j] = theta_deriv_over_factorial(mj, R, j, W);
    double jf = factorial(j);
    for (double& v : D[j]) v *= jf;
  }

  DerivProductReport rep;
  rep.passed = true;
  const double tol = 1.0 + 1e-12;
  auto note = [&](double ratio, double& slot, const char* rule, int ell,
                  const std::vector<int>* parts) {
    slot = std::max(slot, ratio);
    if (ratio > tol && rep.passed) {
      rep.passed = false;
      std::ostringstream os;
      os << rule << " violated at ell = " << ell;
      if (parts) {
        os << ", parts =";
        for (int p : *parts) os << ' ' << p;
      }
      rep.failure = os.str();
    }
  };

  for (int ell = 0; ell <= ell_budget; ++ell) {
    std::vector<double> sum_lhs(W + 1, 0.0), deriv_lhs(W + 1, 0.0);
    double lf = factorial(ell);
    for_each_weak_composition(ell, n_factors, [&](const std::vector<int>& parts) {
      double multinom = multinomial_weight(parts);
      std::vector<double> prod(W + 1, 0.0), prod1(W + 1, 0.0);
      prod[0] = prod1[0] = 1.0;
      double pf = 1.0;
      for (int s = 0; s < n_factors; ++s) {
        prod = cauchy_product(prod, D[parts[s]], W);
        prod1 = cauchy_product(prod1, D[parts[s] + 1], W);
        pf *= factorial(parts[s]);
      }
      for (int nn = 0; nn <= W; ++nn) {
        sum_lhs[nn] += multinom * prod[nn];
        deriv_lhs[nn] += multinom * prod1[nn];
      }
      // per-composition factorial-normalized forms
      std::vector<double> r1 = D[ell], r2 = D[ell + 1];
      for (double& v : r1) v /= lf;
      for (double& v : r2) v *= std::pow(R, 1 - n_factors) / lf;
      std::vector<double> l1 = prod, l2 = prod1;
      for (double& v : l1) v /= pf;
      for (double& v : l2) v /= pf;
      note(max_ratio(l1, r1), rep.per_term_first, "per-composition sum rule",
           ell, &parts);
      note(max_ratio(l2, r2), rep.per_term_second,
           "per-composition derivative rule", ell, &parts);
    });
    note(max_ratio(sum_lhs, D[ell]), rep.sum_rule, "sum rule", ell, nullptr);
    std::vector<double> deriv_rhs = D[ell + 1];
    for (double& v : deriv_rhs) v *= std::pow(R, 1 - n_factors);
    note(max_ratio(deriv_lhs, deriv_rhs), rep.deriv_rule, "derivative rule",
         ell, nullptr);
    if (n_factors == 2) {
      // same sum with one factor shifted: parts (l1, l2), factor product
      // Theta^{(l1)} Theta^{(l2+1)}
      std::vector<double> mixed(W + 1, 0.0);
      for (int l1 = 0; l1 <= ell; ++l1) {
        int l2 = ell - l1;
        double multinom = lf / (factorial(l1) * factorial(l2));
        std::vector<double> pr = cauchy_product(D[l1], D[l2 + 1], W);
        for (int nn = 0; nn <= W; ++nn) mixed[nn] += multinom * pr[nn];
      }
      note(max_ratio(mixed, D[ell + 1]), rep.mixed_rule, "mixed rule", ell,
           nullptr);
    }
  }
  return rep;
}

MajorantFit fit_majorant_constants(const NormalizedProblem& np, double k,
                                   double R, const MajorantSeries& mj) {
  if (!(R > 0.0))
    throw parameter_error("fit_majorant_constants: scale must be positive");
  MajorantFit fit;
  fit.R = R;
  fit.B = deriv_bound_constant(mj, R);
  fit.M1.assign(np.m, 0.0);

  TermIndex zero_idx;
  zero_idx.alpha.assign(np.m, 0);
  zero_idx.A.assign(np.m * np.n_space, 0);

  std::map<TermIndex, double> gamma;
  std::vector<double> t1 = theta_deriv_over_factorial(mj, R, 1, np.maxdeg);
  for (int r = 0; r < np.m; ++r) {
    auto hatg = borel_terms(np, r, k);
    for (const auto& [idx, gh] : hatg) {
      int F = idx.total();
      if (F == 0) {
        XiSeries vh = euler_inverse(gh);
        std::vector<double> prof = x_profile(vh.coeff(1));
        for (int d = 0; d <= np.maxdeg; ++d)
          fit.M1[r] = std::max(fit.M1[r], prof[d] / t1[d]);
        continue;
      }
      std::vector<double> tf =
          theta_deriv_over_factorial(mj, R, F - 1, np.maxdeg);
      std::vector<double> prof = x_profile(gh.coeff(F));
      double g = 0.0;
      for (int d = 0; d <= np.maxdeg; ++d) g = std::max(g, prof[d] / tf[d]);
      auto it = gamma.find(idx);
      if (it == gamma.end())
        gamma.emplace(idx, g);
      else
        it->second = std::max(it->second, g);
    }
  }

  fit.C0 = 1.0;
  for (const auto& [idx, g] : gamma)
    if (g > 0.0) fit.C0 = std::max(fit.C0, std::pow(g, 1.0 / idx.total()));
  fit.G = 0.0;
  for (const auto& [idx, g] : gamma)
    fit.G = std::max(fit.G, g / std::pow(fit.C0, idx.total()));
  return fit;
}

double MSequence::at(int r, int ell) const {
  if (r < 0 || r >= unknowns() || ell < 1 || ell > grades())
    throw parameter_error("MSequence::at: index out of range");
  return M[r][ell - 1];
}

double MSequence::g_prime(const TermIndex& t) const {
  return G * std::pow(C0, t.total()) / std::pow(R, t.sum_A() - 1);
}

MSequence m_sequence(const NormalizedProblem& np, const MajorantFit& fit,
                     int L) {
  if (L < 1) throw parameter_error("m_sequence: need L >= 1");
  MSequence ms;
  ms.G = fit.G;
  ms.C0 = fit.C0;
  ms.R = fit.R;
  ms.B = fit.B;
  ms.M.assign(np.m, std::vector<double>(L, 0.0));
  for (int r = 0; r < np.m; ++r) ms.M[r][0] = fit.M1[r];

  std::set<TermIndex> uni;
  for (int r = 0; r < np.m; ++r)
    for (const auto& [idx, g] : np.terms[r])
      if (idx.total() >= 1 && !g.is_zero()) uni.insert(idx);

  const double inf = std::numeric_limits<double>::infinity();
  for (int ell = 2; ell <= L; ++ell) {
    double total = 0.0;
    for (const TermIndex& idx : uni) {
      int F = idx.total();
      if (ell - F < F) continue;
      double gp = ms.g_prime(idx);
      if (gp == 0.0) continue;
      std::vector<FactorSlot> slots = term_slots(idx, np.m, np.n_space);
      for_each_composition(ell - F, F, [&](const std::vector<int>& parts) {
        double prod = gp;
        bool has_zero = false, has_inf = false;
        for (size_t s = 0; s < slots.size(); ++s) {
          double f = ms.M[slots[s].unknown][parts[s] - 1];
          if (f == 0.0) has_zero = true;
          if (!std::isfinite(f)) has_inf = true;
          prod *= f;
        }
        if (has_zero) return;
        total += has_inf ? inf : prod;
      });
    }
    if (!std::isfinite(total) || total > 1e300) {
      total = inf;
      ms.saturated = true;
    }
    for (int r = 0; r < np.m; ++r) ms.M[r][ell - 1] = total;
  }
  return ms;
}

WitnessReport implicit_witness(const NormalizedProblem& np, const MSequence& ms,
                               int L) {
  if (L < 1 || L > ms.grades())
    throw parameter_error("implicit_witness: L out of range");
  const int m = np.m;

  std::set<TermIndex> uni;
  for (int r = 0; r < m; ++r)
    for (const auto& [idx, g] : np.terms[r])
      if (idx.total() >= 1 && !g.is_zero()) uni.insert(idx);

  auto mul = [&](const std::vector<double>& a, const std::vector<double>& b) {
    return cauchy_product(a, b, L);
  };

  std::vector<std::vector<double>> y(m, std::vector<double>(L + 1, 0.0));
  for (int iter = 0; iter < L; ++iter) {
    std::vector<std::vector<double>> yn(m, std::vector<double>(L + 1, 0.0));
    for (int r = 0; r < m; ++r) {
      yn[r][1] = ms.at(r, 1);
      for (const TermIndex& idx : uni) {
        int F = idx.total();
        if (F > L) continue;
        double gp = ms.g_prime(idx);
        if (gp == 0.0) continue;
        std::vector<double> prod(L + 1, 0.0);
        prod[0] = 1.0;
        for (const FactorSlot& slot : term_slots(idx, m, np.n_space))
          prod = mul(prod, y[slot.unknown]);
        for (int p = L; p >= F; --p) {
          double v = gp * prod[p - F];
          if (std::isfinite(v)) yn[r][p] += v;
        }
      }
    }
    y.swap(yn);
  }

  WitnessReport rep;
  rep.C.assign(m, std::vector<double>(L, 0.0));
  bool equal = true;
  for (int r = 0; r < m; ++r)
    for (int ell = 1; ell <= L; ++ell) {
      double C = y[r][ell];
      rep.C[r][ell - 1] = C;
      double M = ms.at(r, ell);
      if (!std::isfinite(M) || !std::isfinite(C)) continue;
      double rel = std::abs(C - M) / std::max(1.0, std::abs(M));
      rep.max_rel_diff = std::max(rep.max_rel_diff, rel);
      if (rel > 1e-9) equal = false;
    }
  rep.equal = equal;

  double worst = 0.0;
  for (int r = 0; r < m; ++r)
    for (int ell = std::max(1, L / 2); ell <= L; ++ell) {
      double C = rep.C[r][ell - 1];
      if (C > 0.0 && std::isfinite(C))
        worst = std::max(worst, std::pow(C, 1.0 / ell));
    }
  rep.radius_estimate =
      worst > 0.0 ? 1.0 / worst : std::numeric_limits<double>::infinity();
  return rep;
}

BoundAuditReport bound_audit(const EpsGraded& grading, const MSequence& ms,
                             const MajorantSeries& mj, double k) {
  if (std::abs(grading.k - k) > 1e-12)
    throw parameter_error("bound_audit: grading level does not match k");
  BoundAuditReport rep;
  rep.passed = true;
  const double tol = 1.0 + 1e-9;
  int m = (int)grading.v.size();
  if (m == 0 || m != ms.unknowns())
    throw parameter_error("bound_audit: unknown counts do not match");
  int grades = std::min(grading.grades(), ms.grades());
  for (int r = 0; r < m; ++r) {
    for (int ell = 1; ell <= grades; ++ell) {
      const XiSeries& vh = grading.at(r, ell);
      if (ell > vh.order()) continue;
      double Mv = ms.at(r, ell);
      if (!std::isfinite(Mv)) continue;  // saturated target disabled
      const XPoly& lead = vh.coeff(ell);
      std::vector<double> target =
          theta_deriv_over_factorial(mj, ms.R, ell, lead.max_degree());
      for (const auto& [beta, v] : lead.coeffs()) {
        double lhs = std::abs(v);
        double rhs = Mv * target[total_degree(beta)] * multinomial_weight(beta);
        double slack;
        if (rhs > 0.0)
          slack = lhs / rhs;
        else if (lhs == 0.0)
          continue;
        else
          slack = std::numeric_limits<double>::infinity();
        if (slack > rep.worst_slack) {
          rep.worst_slack = slack;
          rep.worst = {r, ell, beta, lhs, rhs};
        }
        if (slack > tol) {
          rep.passed = false;
          rep.violations.push_back({r, ell, beta, lhs, rhs});
        }
      }
    }
  }
  return rep;
}

}  // namespace borelsum
