// Acceptance gate: nine end-to-end checks over the whole pipeline, each
// printing exactly one PASS/FAIL line.  The process exit code is the number
// of failed criteria, so CI can gate on it directly.  Tolerances are pinned
// here, next to the checks they govern.

#include <sys/wait.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "borelsum/borel_laplace.hpp"
#include "borelsum/cauchy.hpp"
#include "borelsum/cli_io.hpp"
#include "borelsum/convolution.hpp"
#include "borelsum/errors.hpp"
#include "borelsum/majorant.hpp"
#include "borelsum/series.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace borelsum;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int checked = 0;
  int failed = 0;
  std::string first;

  bool ok() const { return failed == 0 && checked > 0; }
  void expect(bool cond, const std::string& what) {
    ++checked;
    if (!cond) {
      ++failed;
      if (first.empty()) first = what;
    }
  }
};

XiSeries basis(int a, double k, int order, cplx scale = 1.0) {
  XiSeries e(k, order, 1, 0);
  e.set_coeff(a, XPoly::constant(scale, 1, 0));
  return e;
}

cplx const_coeff(const XPoly& p) { return p.coeff(std::vector<int>{0}); }

double rel(cplx got, cplx want) {
  return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

// Largest relative coefficient deviation between two xi-plane series, with a
// scale floor of one so factorially growing entries are judged relatively.
double xs_diff(const XiSeries& a, const XiSeries& b) {
  double worst = 0.0;
  for (int i = 1; i <= std::min(a.order(), b.order()); ++i) {
    double scale = std::max(
        1.0, std::max(a.coeff(i).norm_max(), b.coeff(i).norm_max()));
    worst = std::max(worst, (a.coeff(i) - b.coeff(i)).norm_max() / scale);
  }
  return worst;
}

std::vector<double> cprod(const std::vector<double>& a,
                          const std::vector<double>& b) {
  size_t n = std::min(a.size(), b.size());
  std::vector<double> out(n, 0.0);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; i + j < n; ++j) out[i + j] += a[i] * b[j];
  return out;
}

bool dominated(const std::vector<double>& small,
               const std::vector<double>& big) {
  for (size_t i = 0; i < std::min(small.size(), big.size()); ++i)
    if (small[i] > big[i] * (1.0 + 1e-12)) return false;
  return true;
}

// ---- criterion 1: exact formal algebra ----------------------------------

Outcome criterion1() {
  Outcome o;
  const double tol = 1e-10;  // relative, a,b <= 40
  auto g = oracle::seeded_rng(1);
  for (double k : {0.5, 1.0, 2.0}) {
    // Laplace-Borel round trip on a random zero-constant series.
    TSeries f(40, 1, 0);
    for (int n = 1; n <= 40; ++n)
      f.set_coeff(n, XPoly::constant(oracle::random_cplx(g), 1, 0));
    TSeries back = formal_laplace(formal_borel(f, k));
    for (int n = 0; n <= 40; ++n) {
      double scale = std::max(1.0, f.coeff(n).norm_max());
      o.expect((back.coeff(n) - f.coeff(n)).norm_max() <= tol * scale,
               "laplace(borel(f)) differs at order " + std::to_string(n));
    }

    // Basis convolution adds indices: e_a * e_b = e_{a+b}.
    for (int a = 1; a <= 39; ++a)
      for (int b = 1; a + b <= 40; ++b) {
        XiSeries c = conv(basis(a, k, 40), basis(b, k, 40));
        bool clean = true;
        for (int j = 1; j <= 40; ++j) {
          double want = (j == a + b) ? 1.0 : 0.0;
          if (std::abs(const_coeff(c.coeff(j)) - want) > tol) clean = false;
        }
        o.expect(clean, "conv(e_" + std::to_string(a) + ", e_" +
                            std::to_string(b) + ") != e_{a+b}");
      }

    // The Euler operator and its inverse cancel on every index.
    XiSeries r(k, 40, 1, 0);
    for (int a = 1; a <= 40; ++a)
      r.set_coeff(a, XPoly::constant(oracle::random_cplx(g), 1, 0));
    XiSeries id1 = euler_apply(euler_inverse(r));
    XiSeries id2 = euler_inverse(euler_apply(r));
    for (int a = 1; a <= 40; ++a) {
      double scale = std::max(1.0, r.coeff(a).norm_max());
      o.expect((id1.coeff(a) - r.coeff(a)).norm_max() <= tol * scale,
               "euler_apply(euler_inverse) misses index " + std::to_string(a));
      o.expect((id2.coeff(a) - r.coeff(a)).norm_max() <= tol * scale,
               "euler_inverse(euler_apply) misses index " + std::to_string(a));
    }

    // Acceleration re-tags the level and keeps every coefficient.
    double k_to = 2.0 * k;
    XiSeries up = accelerate_formal(r, k_to);
    o.expect(up.level() == k_to, "accelerate_formal level tag");
    bool kept = true;
    for (int a = 1; a <= 40; ++a)
      if ((up.coeff(a) - r.coeff(a)).norm_max() != 0.0) kept = false;
    o.expect(kept, "accelerate_formal changed coefficients");
  }
  return o;
}

// ---- criterion 2: derivative identity under the integral -----------------

Outcome criterion2() {
  Outcome o;
  const double tol = 1e-6;        // relative
  const double cut = 1e-20;       // deep cut so truncation bias stays far below tol
  for (double k : {0.5, 1.0, 2.0}) {
    XiSeries c = basis(2, k, 8) + basis(5, k, 8, cplx(0.3, 0.1));
    XiSeries ec = euler_apply(c);
    auto ray = [](const XiSeries& s) {
      return RayFn(
          [&s](double r) { return s.eval_truncated(r, 0.0, {cplx(0.0)}); });
    };
    RayFn rc = ray(c), re = ray(ec);
    for (int i = 0; i < 20; ++i) {
      double tm = 0.06 + 0.24 * i / 19.0;
      cplx t(tm, 0.02 * tm);
      double h = 1e-5 * std::abs(t);
      auto tl = [&](cplx tt) { return tt * laplace_eval(rc, k, 0.0, tt, cut); };
      cplx fd = (tl(t + h) - tl(t - h)) / (2.0 * h);
      cplx want = laplace_eval(re, k, 0.0, t, cut);
      o.expect(rel(fd, want) <= tol,
               "d/dt[t L(c)] != L(euler c) at k = " + std::to_string(k) +
                   ", |t| = " + std::to_string(tm));
    }
  }
  return o;
}

// ---- criterion 3: acceleration respects convolution and the Euler map ----

Outcome criterion3() {
  Outcome o;
  auto g = oracle::seeded_rng(3);

  // Exact on the basis: both routes land on e_{a+b} at the higher level.
  for (int a = 1; a <= 10; ++a)
    for (int b = 1; a + b <= 20; ++b) {
      XiSeries ea = basis(a, 1.0, 20), eb = basis(b, 1.0, 20);
      XiSeries lhs = accelerate_formal(conv(ea, eb), 2.0);
      XiSeries rhs = conv(accelerate_formal(ea, 2.0), accelerate_formal(eb, 2.0));
      o.expect(lhs == rhs, "conv-homomorphism fails on (e_a, e_b)");
    }

  // Random series: the identities are pure index bookkeeping, so the two
  // evaluation orders produce bit-identical results.
  XiSeries f(1.0, 24, 1, 0), h(1.0, 24, 1, 0);
  for (int a = 1; a <= 24; ++a) {
    f.set_coeff(a, XPoly::constant(oracle::random_cplx(g), 1, 0));
    h.set_coeff(a, XPoly::constant(oracle::random_cplx(g), 1, 0));
  }
  o.expect(accelerate_formal(conv(f, h), 2.0) ==
               conv(accelerate_formal(f, 2.0), accelerate_formal(h, 2.0)),
           "conv-homomorphism fails on random series");
  o.expect(euler_apply(accelerate_formal(f, 2.0)) ==
               accelerate_formal(euler_apply(f), 2.0),
           "Euler commutation fails");

  // Numeric composition against the exact basis map on e_1..e_4.
  const double tol = 1e-5;
  ContourSpec contour = default_accel_contour(1.0, 2.0, 0.0, 0.8);
  for (int a = 1; a <= 4; ++a) {
    double rho = 0.6;
    cplx got = accelerate_numeric(basis_ray_fn(a, 1.0, 0.0), 1.0, 2.0, 0.0,
                                  contour, cplx(rho, 0.0));
    cplx want = basis(a, 2.0, a + 1).eval_truncated(rho, 0.0, {cplx(0.0)});
    o.expect(rel(got, want) <= tol,
             "accelerate_numeric off on e_" + std::to_string(a));
  }
  return o;
}

// ---- criterion 4: graded fixed point == direct recursion -----------------

Outcome criterion4() {
  Outcome o;
  const double tol = 1e-10;  // relative, scale floor 1
  const int L = 12;
  auto check_problem = [&](const char* name, const CauchyProblem& p) {
    NormalizedProblem np = normalize(p, L, 4);
    std::vector<TSeries> v = formal_solve(np, L);
    EpsGraded gr = convolution_fixpoint(np, 1.0, 0.0, L);
    std::vector<XiSeries> sum = grading_sum(gr);
    for (int r = 0; r < np.m; ++r) {
      XiSeries direct = formal_borel(v[r], 1.0);
      o.expect(xs_diff(sum[r], direct) <= tol,
               std::string("fixpoint != recursion for ") + name +
                   ", unknown " + std::to_string(r + 1));
    }
  };
  check_problem("euler", fixtures::euler_problem(L + 2));
  check_problem("convergent", fixtures::convergent_problem());
  check_problem("nonlinear", fixtures::nonlinear_problem());
  check_problem("pde", fixtures::pde_problem());
  check_problem("system", fixtures::system_problem());
  check_problem("two-level", fixtures::two_level_problem(L + 2));
  return o;
}

// ---- criterion 5: end-to-end resummation values --------------------------

Outcome criterion5() {
  Outcome o;
  const double tol = 1e-6;  // absolute
  std::vector<cplx> ts = {cplx(0.05), cplx(0.1), cplx(0.2), cplx(0.3)};
  std::vector<std::vector<cplx>> xs = {{cplx(0.0)}};
  ResumOptions cfg;
  cfg.order = 32;
  cfg.maxdeg = 2;

  SolutionTable et = resum(fixtures::euler_problem(34),
                           fixtures::single_level(1.0, 0.0), ts, xs, cfg);
  for (size_t i = 0; i < ts.size(); ++i) {
    double t = ts[i].real();
    // Oracle: RK4 on u' = a(t)(1+u), u(0) = 0, with the driver a given by
    // its independent integral representation.
    cplx ref = oracle::rk4(
        [](double tt, cplx uu) {
          return oracle::euler_series_sum(tt) * (1.0 + uu);
        },
        0.0, cplx(0.0), t, 400);
    o.expect(std::abs(et.rows[i].u[0] - ref) <= tol,
             "divergent fixture off at t = " + std::to_string(t) + " by " +
                 std::to_string(std::abs(et.rows[i].u[0] - ref)));
  }

  ResumOptions cfg2;
  cfg2.order = 24;
  cfg2.maxdeg = 2;
  SolutionTable ct = resum(fixtures::convergent_problem(),
                           fixtures::single_level(1.0, 0.0), ts, xs, cfg2);
  for (size_t i = 0; i < ts.size(); ++i)
    o.expect(std::abs(ct.rows[i].u[0] - std::exp(ts[i])) <= tol,
             "convergent fixture misses exp(t) at t = " +
                 std::to_string(ts[i].real()));
  return o;
}

// ---- criterion 6: growth-order certification -----------------------------

Outcome criterion6() {
  Outcome o;
  const double tol = 0.05;  // 5 percent on k
  std::vector<double> fact, half;
  for (int n = 0; n <= 40; ++n) {
    fact.push_back(std::tgamma(n + 1.0));
    half.push_back(std::tgamma(n / 2.0 + 1.0));
  }
  GevreyFit f1 = gevrey_fit(fact);
  o.expect(!f1.convergent, "n! stream labeled convergent");
  o.expect(std::abs(f1.k_est - 1.0) <= tol, "n! stream: k_est = " +
                                                std::to_string(f1.k_est));
  GevreyFit f2 = gevrey_fit(half);
  o.expect(!f2.convergent, "gamma(n/2+1) stream labeled convergent");
  o.expect(std::abs(f2.k_est - 2.0) <= 2.0 * tol,
           "gamma(n/2+1) stream: k_est = " + std::to_string(f2.k_est));

  NormalizedProblem np = normalize(fixtures::convergent_problem(), 32, 2);
  TSeries u = reconstruct_u(np, formal_solve(np, 32)[0], 0);
  GevreyFit f3 = gevrey_fit(coeff_norms(u));
  o.expect(f3.convergent, "convergent fixture not labeled convergent");
  return o;
}

// ---- criterion 7: majorant relations, audits, witness --------------------

Outcome criterion7() {
  Outcome o;

  // Product relations of the comparison series to order 200.
  MajorantSeries big = theta_build(200);
  int N = big.order();
  std::vector<double> th = big.coeffs, thp(N + 1, 0.0);
  for (int n = 0; n + 1 <= N; ++n) thp[n] = (n + 1.0) * th[n + 1];
  o.expect(dominated(cprod(th, th), th), "theta*theta exceeds theta");
  std::vector<double> thp_trim(thp.begin(), thp.end() - 1);
  std::vector<double> lhs1 = cprod(th, thp), lhs2 = cprod(thp, thp);
  lhs1.resize(N);
  lhs2.resize(N);
  o.expect(dominated(lhs1, thp_trim), "theta*theta' exceeds theta'");
  o.expect(dominated(lhs2, thp_trim), "theta'*theta' exceeds theta'");

  // Derivative-product inequality audits for up to three factors.
  MajorantSeries mj = theta_build(64);
  for (int n = 1; n <= 3; ++n) {
    DerivProductReport rep = lemma33_audit(mj, n, 6);
    o.expect(rep.passed, "derivative-product audit fails at " +
                             std::to_string(n) + " factors: " + rep.failure);
  }

  std::vector<std::pair<const char*, CauchyProblem>> fixtures_list;
  fixtures_list.emplace_back("euler", fixtures::euler_problem(16));
  fixtures_list.emplace_back("convergent", fixtures::convergent_problem());
  fixtures_list.emplace_back("nonlinear", fixtures::nonlinear_problem());
  fixtures_list.emplace_back("pde", fixtures::pde_problem());
  fixtures_list.emplace_back("system", fixtures::system_problem());
  fixtures_list.emplace_back("two-level", fixtures::two_level_problem(16));

  for (const auto& [name, p] : fixtures_list) {
    NormalizedProblem np = normalize(p, 14, 2);
    MajorantFit fit = fit_majorant_constants(np, 1.0, 1.0, mj);

    // Bound sequence vs the independent implicit witness, grades up to 12.
    MSequence ms = m_sequence(np, fit, 12);
    WitnessReport w = implicit_witness(np, ms, 12);
    o.expect(w.equal && w.max_rel_diff <= 1e-9,
             std::string("witness mismatch on ") + name + " (rel diff " +
                 std::to_string(w.max_rel_diff) + ")");

    // Coefficientwise audit of the graded solution, grades up to 10.
    EpsGraded gr = convolution_fixpoint(np, 1.0, 0.0, 10);
    MSequence ms10 = m_sequence(np, fit, 10);
    BoundAuditReport rep = bound_audit(gr, ms10, mj, 1.0);
    o.expect(rep.passed && rep.worst_slack <= 1.0 + 1e-9,
             std::string("bound audit fails on ") + name);

    // Detector sanity: halved bounds must be caught.
    MSequence weak = ms10;
    for (auto& row : weak.M)
      for (double& v : row) v *= 0.5;
    BoundAuditReport bad = bound_audit(gr, weak, mj, 1.0);
    o.expect(!bad.passed && !bad.violations.empty(),
             std::string("halved bounds slip through on ") + name);
  }
  return o;
}

// ---- criterion 8: multilevel growth order and chain agreement ------------

Outcome criterion8() {
  Outcome o;

  // The level-1 transform of the mixed-growth fixture keeps exponential
  // growth of order kappa_1 = 2 along the real direction.
  CauchyProblem p = fixtures::two_level_problem(40);
  NormalizedProblem np = normalize(p, 38, 2);
  std::vector<TSeries> v = formal_solve(np, 38);
  XiSeries hat = formal_borel(v[0], 1.0);
  auto kappa = growth_order_estimate(hat, 2.0);
  o.expect(kappa.has_value(), "no growth detected at level 1");
  if (kappa)
    o.expect(std::abs(*kappa - 2.0) <= 0.2,  // 10 percent of kappa_1 = 2
             "kappa estimate " + std::to_string(*kappa));

  // An entire transform sums identically through one level or two.
  const double tol = 1e-5;
  std::vector<cplx> ts = {cplx(0.05), cplx(0.1), cplx(0.2)};
  std::vector<std::vector<cplx>> xs = {{cplx(0.0)}};
  ResumOptions cfg;
  cfg.order = 24;
  cfg.maxdeg = 2;
  SolutionTable single = resum(fixtures::convergent_problem(),
                               fixtures::single_level(1.0, 0.0), ts, xs, cfg);
  SolutionTable chain = resum(fixtures::convergent_problem(),
                              fixtures::level_pair(1.0, 2.0, 0.0, 0.0), ts, xs,
                              cfg);
  for (size_t i = 0; i < ts.size(); ++i)
    o.expect(std::abs(single.rows[i].u[0] - chain.rows[i].u[0]) <= tol,
             "chain differs from single level at t = " +
                 std::to_string(ts[i].real()) + " by " +
                 std::to_string(std::abs(single.rows[i].u[0] -
                                         chain.rows[i].u[0])));
  return o;
}

// ---- criterion 9: persistence round trip and direction rejection ---------

bool bundles_equal(const ProblemBundle& a, const ProblemBundle& b) {
  if (a.problem.m != b.problem.m || a.problem.n_space != b.problem.n_space)
    return false;
  if (a.problem.R0 != b.problem.R0 || a.problem.R1 != b.problem.R1)
    return false;
  if (a.ml.ks != b.ml.ks || a.ml.thetas != b.ml.thetas) return false;
  if (a.problem.initial.size() != b.problem.initial.size()) return false;
  for (size_t i = 0; i < a.problem.initial.size(); ++i)
    if (!(a.problem.initial[i].coeffs() == b.problem.initial[i].coeffs()))
      return false;
  if (a.problem.terms.size() != b.problem.terms.size()) return false;
  for (size_t i = 0; i < a.problem.terms.size(); ++i) {
    if (a.problem.terms[i].size() != b.problem.terms[i].size()) return false;
    for (const auto& [idx, ts] : a.problem.terms[i]) {
      auto it = b.problem.terms[i].find(idx);
      if (it == b.problem.terms[i].end()) return false;
      if (ts.order() != it->second.order()) return false;
      for (int n = 0; n <= ts.order(); ++n)
        if (!(ts.coeff(n).coeffs() == it->second.coeff(n).coeffs()))
          return false;
    }
  }
  return true;
}

Outcome criterion9() {
  Outcome o;
  std::string fixture_dir = BORELSUM_FIXTURE_DIR;
  fs::path tmp = fs::temp_directory_path() /
                 ("borelsum_accept_" + std::to_string(getpid()));
  fs::create_directories(tmp);

  for (const char* name : {"euler.json", "convergent.json", "two_level.json"}) {
    ProblemBundle b1 = load_problem(fixture_dir + "/" + name);
    fs::path copy = tmp / name;
    save_problem(copy.string(), b1);
    ProblemBundle b2 = load_problem(copy.string());
    o.expect(bundles_equal(b1, b2),
             std::string("round trip altered ") + name);
  }

  // Summing the divergent fixture straight through its singularity must be
  // rejected, and the reported location must be the pole at -1.
  ResumOptions cfg;
  cfg.order = 32;
  cfg.maxdeg = 2;
  bool rejected = false;
  double pole_re = 0.0, pole_im = 0.0;
  try {
    resum(fixtures::euler_problem(34),
          fixtures::single_level(1.0, 3.14159265358979323846),
          {cplx(-0.1), cplx(-0.2)}, {{cplx(0.0)}}, cfg);
  } catch (const direction_rejected& e) {
    rejected = true;
    pole_re = e.pole_real;
    pole_im = e.pole_imag;
  }
  o.expect(rejected, "theta = pi was not rejected");
  if (rejected) {
    // The cut of the continued transform renders as a pole string on
    // (-inf, -1]; its leading pole approximates the branch point loosely.
    o.expect(std::abs(pole_re + 1.0) < 0.05,
             "rejection names pole_re = " + std::to_string(pole_re));
    o.expect(std::abs(pole_im) < 1e-6,
             "rejection names pole_im = " + std::to_string(pole_im));
  }

  // Same behavior through the installed binary.
  fs::path errfile = tmp / "stderr.txt";
  std::string cmd = std::string(BORELSUM_CLI_PATH) + " --problem " +
                    fixture_dir + "/euler.json --out " + tmp.string() +
                    " --theta 180 resum 2>" + errfile.string();
  FILE* pipe = popen(cmd.c_str(), "r");
  o.expect(pipe != nullptr, "could not launch the CLI");
  if (pipe) {
    char buf[512];
    while (fread(buf, 1, sizeof(buf), pipe) > 0) {
    }
    int rc = pclose(pipe);
    int code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    o.expect(code == 2, "CLI exit code " + std::to_string(code));
    std::string err;
    if (FILE* ef = std::fopen(errfile.string().c_str(), "r")) {
      size_t got;
      while ((got = fread(buf, 1, sizeof(buf), ef)) > 0) err.append(buf, got);
      std::fclose(ef);
    }
    o.expect(err.find("direction-rejected") != std::string::npos,
             "CLI stderr lacks the rejection record");
  }
  fs::remove_all(tmp);
  return o;
}

}  // namespace

int main() {
  struct Entry {
    int n;
    const char* title;
    std::function<Outcome()> run;
  };
  const std::vector<Entry> entries = {
      {1, "formal algebra exact on the weighted basis", criterion1},
      {2, "derivative identity holds under the integral", criterion2},
      {3, "acceleration is a convolution homomorphism", criterion3},
      {4, "graded fixed point equals the direct recursion", criterion4},
      {5, "resummed values match independent oracles", criterion5},
      {6, "growth-order fits recover the divergence class", criterion6},
      {7, "majorant relations, audits and witness agree", criterion7},
      {8, "multilevel growth order and chain agreement", criterion8},
      {9, "problem persistence and direction rejection", criterion9},
  };

  int failures = 0;
  for (const Entry& e : entries) {
    Outcome o;
    std::string crash;
    try {
      o = e.run();
    } catch (const std::exception& ex) {
      o.expect(false, std::string("unexpected exception: ") + ex.what());
      crash = ex.what();
    }
    if (o.ok()) {
      std::printf("PASS criterion %d: %s (%d checks)\n", e.n, e.title,
                  o.checked);
    } else {
      ++failures;
      std::printf("FAIL criterion %d: %s (%d/%d checks failed; first: %s)\n",
                  e.n, e.title, o.failed, o.checked, o.first.c_str());
    }
    std::fflush(stdout);
  }
  return failures;
}
