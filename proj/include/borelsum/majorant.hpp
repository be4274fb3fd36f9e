#pragma once

#include <limits>
#include <string>
#include <vector>

#include "borelsum/cauchy.hpp"
#include "borelsum/errors.hpp"
#include "borelsum/xpoly.hpp"

namespace borelsum {

// Comparison series theta(tau) = sum_n c tau^n / (n+1)^3, truncated.  The
// constant c is chosen constructively so that, coefficientwise up to the
// truncation order,
//   theta * theta  <<  theta
//   theta * theta' <<  theta'
//   theta'* theta' <<  theta'
// where << is coefficientwise domination and * the Cauchy product.  C1 is a
// verified constant with theta << C1 * theta'.
struct MajorantSeries {
  std::vector<double> coeffs;  // theta_n for n = 0..order
  double R = 1.0;              // default scale for Theta(tau) = theta(tau/R)
  double c_const = 0.0;
  double C1 = 0.0;

  int order() const { return static_cast<int>(coeffs.size()) - 1; }
};

// Builds theta to order N (N >= 16) and re-verifies the three product
// relations at the chosen c; a verification failure is a bug, not bad input.
MajorantSeries theta_build(int N);

// Coefficients of Theta(tau) = theta(tau/R): entry n is theta_n / R^n.
std::vector<double> theta_scaled(const MajorantSeries& mj, double R);

// Coefficients of Theta^{(ell)}(tau) / ell!: entry n (0 <= n <= N) equals
// binom(n+ell, ell) * theta_{n+ell} / R^{n+ell}.
std::vector<double> theta_deriv_over_factorial(const MajorantSeries& mj,
                                               double R, int ell, int N);

// Constructive constant B with Theta << B^ell Theta^{(ell)}/ell! for ell >= 1.
double deriv_bound_constant(const MajorantSeries& mj, double R);

// Coefficientwise domination |a_n| <= b_n (sizes must agree).
bool majorize(const std::vector<cplx>& a, const std::vector<double>& b);
bool majorize(const std::vector<double>& a, const std::vector<double>& b);

// Multinomial weight |beta|! / (beta_1! ... beta_n!).
double multinomial_weight(const std::vector<int>& beta);

// Domination of a polynomial in x by a univariate series T through the
// substitution X = x_1 + ... + x_n: true iff for every monomial beta
// |P_beta| <= T_{|beta|} * multinomial_weight(beta).
bool x_majorize(const XPoly& p, const std::vector<double>& t);

// Tightest univariate dominator of p under the same substitution: entry d is
// max over |beta| = d of |P_beta| / multinomial_weight(beta).
std::vector<double> x_profile(const XPoly& p);

// Brute-force audit of the derivative-product inequalities satisfied by
// Theta.  For each ell <= ell_budget and n = n_factors it enumerates the
// compositions ell_1 + ... + ell_n = ell (parts >= 0), forms both sides as
// truncated series, and checks:
//   sum rule    sum multinom * prod Theta^{(ell_s)}          <<  Theta^{(ell)}
//   deriv rule  sum multinom * prod Theta^{(ell_s + 1)}      <<  R^{1-n} Theta^{(ell+1)}
//   mixed rule  (n = 2 only)  sum multinom * Theta^{(l1)} Theta^{(l2+1)} << Theta^{(ell+1)}
// plus the per-composition factorial-normalized forms
//   prod Theta^{(ell_s)} / ell_s!      <<  Theta^{(ell)} / ell!
//   prod Theta^{(ell_s+1)} / ell_s!    <<  R^{1-n} Theta^{(ell+1)} / ell!
// Slack fields report the worst lhs/rhs coefficient ratio seen (<= 1 passes).
struct DerivProductReport {
  double sum_rule = 0.0;
  double deriv_rule = 0.0;
  double mixed_rule = 0.0;
  double per_term_first = 0.0;
  double per_term_second = 0.0;
  bool passed = false;
  std::string failure;  // names the first violating composition, if any
};

DerivProductReport lemma33_audit(const MajorantSeries& mj, int n_factors,
                                 int ell_budget);

// Constants fitted from the transformed problem data: per-unknown anchors
// M_{r,1} from the grade-1 solution, and (G, C0) so that every data term
// with F = |alpha|+|A| >= 1 factors is dominated, through X-substitution, by
// G C0^F [Theta^{(F-1)}/(F-1)!] on its leading basis index.
struct MajorantFit {
  double G = 0.0;
  double C0 = 1.0;
  double R = 1.0;
  double B = 0.0;
  std::vector<double> M1;  // per unknown
};

MajorantFit fit_majorant_constants(const NormalizedProblem& np, double k,
                                   double R, const MajorantSeries& mj);

// The recursively defined bound sequence M_{r,ell}.  Grade 1 is the fitted
// anchor; higher grades sum G'_{alpha,A} times products of lower entries over
// exactly the slot/composition enumeration used to assemble the graded right
// sides (shared code path).  Entries that overflow are set to infinity and
// the saturated flag is raised; audits treat such targets as disabled.
struct MSequence {
  std::vector<std::vector<double>> M;  // M[r][ell-1], ell = 1..grades()
  double G = 0.0;
  double C0 = 1.0;
  double R = 1.0;
  double B = 0.0;
  bool saturated = false;

  int unknowns() const { return static_cast<int>(M.size()); }
  int grades() const { return M.empty() ? 0 : static_cast<int>(M[0].size()); }
  double at(int r, int ell) const;  // ell is 1-based
  double g_prime(const TermIndex& t) const;
};

MSequence m_sequence(const NormalizedProblem& np, const MajorantFit& fit,
                     int L);

// Independent convergence witness: solves the scalar-coefficient functional
// system  y_r = z M_{r,1} + sum_terms G'_{alpha,A} z^F y^alpha y^A  order by
// order in z and compares its Taylor coefficients C_{r,ell} with M_{r,ell}.
struct WitnessReport {
  std::vector<std::vector<double>> C;  // C[r][ell-1]
  bool equal = false;
  double max_rel_diff = 0.0;
  double radius_estimate = 0.0;  // from root tests on the top half of C
};

WitnessReport implicit_witness(const NormalizedProblem& np, const MSequence& ms,
                               int L);

// Coefficientwise audit of the graded solution against its bound sequence:
// for each unknown r and grade ell the leading basis index ell of v_{r,ell}
// is compared, monomial by monomial through X-substitution, against
// M_{r,ell} * Theta^{(ell)}/ell!.  The shared basis weight and the
// exponential growth factor cancel from both sides, so the comparison is the
// literal coefficient inequality.  Ratios up to 1 + 1e-9 pass.
struct BoundWitness {
  int r = 0;
  int ell = 0;
  std::vector<int> monomial;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct BoundAuditReport {
  bool passed = false;
  double worst_slack = 0.0;
  BoundWitness worst;
  std::vector<BoundWitness> violations;
};

BoundAuditReport bound_audit(const EpsGraded& grading, const MSequence& ms,
                             const MajorantSeries& mj, double k);

}  // namespace borelsum
