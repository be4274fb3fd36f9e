// Problem normalization, the order-matching formal recursion, the graded
// convolution fixed point, and the end-to-end summation pipeline that turns a
// divergent formal solution into numeric values.
#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "borelsum/borel_laplace.hpp"
#include "borelsum/series.hpp"

namespace borelsum {

// Which power of each unknown and of each spatial derivative a right-hand
// side term carries: the term reads f(t,x) * prod_i u_i^{alpha_i} *
// prod_{i,j} (d u_i / d x_j)^{A_{i,j}}.
struct TermIndex {
  std::vector<int> alpha;  // length m
  std::vector<int> A;      // m*n, row-major: A[i*n + j]

  int total() const;  // |alpha| + |A|
  int sum_A() const;  // |A|
  bool operator<(const TermIndex& o) const {
    return alpha != o.alpha ? alpha < o.alpha : A < o.A;
  }
  bool operator==(const TermIndex& o) const {
    return alpha == o.alpha && A == o.A;
  }
  void validate(int m, int n) const;
};

// One convolution factor of a term: unknown index i, differentiated along
// x_j when deriv_axis >= 0.
struct FactorSlot {
  int unknown;
  int deriv_axis;  // -1 for a plain factor
};

// Canonical factor order of a term: all alpha slots (i ascending, repeated
// alpha_i times), then all A slots in row-major (i, j) order.  Both the
// fixed-point assembly and the majorant recursion walk slots in this order.
std::vector<FactorSlot> term_slots(const TermIndex& t, int m, int n);

// Calls visit(parts) for every way to write `budget` as an ordered sum of
// `nslots` parts, each >= 1, in lexicographic order.  No calls when
// budget < nslots or nslots == 0 (with the convention that budget == 0,
// nslots == 0 yields one empty assignment).
void for_each_composition(int budget, int nslots,
                          const std::function<void(const std::vector<int>&)>& visit);

// The input problem dt u_i = f_i(t, x, U, grad U), u_i(0,x) = initial_i(x),
// with polynomial data truncated at the shared (order, max_degree).
struct CauchyProblem {
  int m = 1;
  int n_space = 1;
  std::vector<std::map<TermIndex, TSeries>> terms;  // per equation
  std::vector<XPoly> initial;
  double R0 = 1.0;  // radius used for the xi-plane region bookkeeping
  double R1 = 1.0;  // polydisc radius for the majorant scale

  void validate() const;
};

// Result of the two normalizing shifts: with u_i = u_{i,0}(x) + t d_i(x)
// + t v_i, the system becomes dt(t v_i) = sum g_{i,alpha,A}(t,x) V^alpha
// (grad V)^A where each g term carries the t^{|alpha|+|A|} dressing and
// g_{i,0,0}(0,x) = 0.  u0 and d are kept for un-normalization.
struct NormalizedProblem {
  int m = 1;
  int n_space = 1;
  int order = 0;
  int maxdeg = 0;
  std::vector<std::map<TermIndex, TSeries>> terms;
  std::vector<XPoly> u0;
  std::vector<XPoly> d;
};

// Summation levels k_1 < ... < k_p with their directions.  kappas() derives
// the acceleration gaps 1/kappa_i = 1/k_i - 1/k_{i+1} (kappa_p = k_p); a
// valid multidirection keeps adjacent directions within pi/(2 kappa_i).
struct MultiLevel {
  std::vector<double> ks;
  std::vector<double> thetas;

  int levels() const { return static_cast<int>(ks.size()); }
  std::vector<double> kappas() const;
  void validate() const;
};

// The graded fixed-point solution at one level: v[r][l-1] holds the grade-l
// slice of unknown r; its lowest basis index is at least l.
struct EpsGraded {
  double k = 1.0;
  std::vector<std::vector<XiSeries>> v;

  int grades() const { return v.empty() ? 0 : static_cast<int>(v[0].size()); }
  const XiSeries& at(int r, int ell) const;  // ell is 1-based
};

NormalizedProblem normalize(const CauchyProblem& p, int order, int maxdeg);

// Undoes the shifts at one space point: u_i = u0_i(x) + t d_i(x) + t v_value.
cplx unnormalize_value(const NormalizedProblem& np, int i, cplx t,
                       const std::vector<cplx>& x, cplx v_value);

// The unique formal solution of the normalized system to t-order N, obtained
// by matching t-orders: the order-q coefficient of dt(t v_i) is (q+1) v_{i,q}.
std::vector<TSeries> formal_solve(const NormalizedProblem& np, int N);

// Formal solution re-assembled as the original unknown u_i.
TSeries reconstruct_u(const NormalizedProblem& np, const TSeries& v, int i);

// Borel-plane image of multiplication by t^j: convolution with the basis
// element e_j, i.e. every index shifts up by j.
XiSeries borel_tshift(const XiSeries& f_hat, int j);

// Level-k transforms of the g terms of equation r (0-based).
std::map<TermIndex, XiSeries> borel_terms(const NormalizedProblem& np, int r,
                                          double k);

// Grade-ell right-hand side of the convolution equation: grade 1 is
// g_{r,0,0} transformed; higher grades sum, over every term and every
// assignment of grades >= 1 to its factors with (sum of grades) +
// |alpha| + |A| = ell, the convolution product of the transformed term
// coefficient with the graded factors from `lower`.
std::vector<XiSeries> assemble_G(const NormalizedProblem& np, double k, int ell,
                                 const EpsGraded& lower);

// Solves grade by grade: v_{r,ell} applies the diagonal Euler inverse to the
// grade-ell right-hand side.  theta tags the intended summation direction.
EpsGraded convolution_fixpoint(const NormalizedProblem& np, double k,
                               double theta, int L);

// Sum of all grades at the bookkeeping value 1 of the grading parameter.
std::vector<XiSeries> grading_sum(const EpsGraded& g);

// Rational continuation with automatic degree fallback: walks the denominator
// degree down from M0 until the table is nonsingular.  Sets *reduced (when
// given) if the degrees actually used fall short of the request; an
// identically zero series returns the zero approximant.
RationalApprox pade_auto(const XiSeries& g, const std::vector<cplx>& x, int L0,
                         int M0, bool* reduced);

// Evaluation-phase knobs; the CLI's config maps onto this.
struct ResumOptions {
  int order = 32;               // t and xi truncation
  int maxdeg = 6;               // x-degree cap
  int pade_num = -1;            // -1: floor((order-1)/2)
  int pade_den = -1;
  double tail_cut = 1e-16;
  double quad_tol = 1e-6;       // Laplace convergence requirement
  double direction_guard = 0.05;  // radians between a pole and the ray
  double froissart_rel = 1e-10;   // relative residue cutoff for fake poles
  int threads = 1;

  void validate() const;
};

struct SolutionRow {
  cplx t;
  std::vector<cplx> x;
  std::vector<cplx> u;  // one value per unknown
  double err_est = 0.0;
  std::string stage_flags;  // "|"-joined tokens, e.g. "ok", "pade-reduced"
};

struct SolutionTable {
  std::vector<SolutionRow> rows;
  MultiLevel ml;     // context for re-runs (residual checks)
  ResumOptions cfg;
};

// End-to-end pipeline: normalize, solve the graded fixed point at the first
// level, sum the grades, lift the result through the level chain by the
// exact basis map, continue each unknown rationally at every x point, check
// summation directions against the pole map, and evaluate the final-level
// Laplace integral at every t point.  Rows come out in t-major order over
// the (t_points x x_points) grid.
SolutionTable resum(const CauchyProblem& p, const MultiLevel& ml,
                    const std::vector<cplx>& t_points,
                    const std::vector<std::vector<cplx>>& x_points,
                    const ResumOptions& cfg);

struct ResidualReport {
  double max_resid = 0.0;
  double mean_resid = 0.0;
  int stencils = 0;  // number of complete centered stencils found
};

// Checks dt u_i = f_i(t,x,U,grad U) on the table: dt by centered differences
// over table rows at t(1 -+ h), grad_x u by resumming the exactly
// differentiated series, and the f coefficient series (possibly divergent)
// by their own resummation.
ResidualReport residual_check(const SolutionTable& table,
                              const CauchyProblem& p, double h);

}  // namespace borelsum
