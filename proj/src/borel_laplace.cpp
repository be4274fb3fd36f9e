#include "borelsum/borel_laplace.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "borelsum/quadrature.hpp"

namespace borelsum {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Wraps an angle difference into (-pi, pi].
double wrap_angle(double a) {
  while (a > kPi) a -= 2.0 * kPi;
  while (a <= -kPi) a += 2.0 * kPi;
  return a;
}

// Integrates h over [lo, lo + len] with `panels` geometrically widening
// panels (each twice the previous) and an n-node Gauss-Legendre rule per
// panel.  Suits integrands that decay on the scale len / log(1/tail).
cplx geometric_gl(const std::function<cplx(double)>& h, double lo, double len,
                  int panels, int n) {
  const QuadRule& gl = gauss_legendre(n);
  double w0 = len / (std::pow(2.0, panels - 1) - 0.5);
  cplx acc(0.0);
  double left = lo;
  double width = w0;
  for (int p = 0; p < panels; ++p) {
    double mid = left + 0.5 * width;
    double half = 0.5 * width;
    cplx panel(0.0);
    for (int i = 0; i < n; ++i) panel += gl.w[i] * h(mid + half * gl.x[i]);
    acc += half * panel;
    left += width;
    width *= 2.0;
  }
  return acc;
}

// As above but the first panel starts at 0 where the integrand carries an
// s^beta endpoint factor; that panel uses a Jacobi rule with the factor
// divided out of h.
cplx geometric_gl_jacobi0(const std::function<cplx(double)>& h, double beta,
                          double len, int panels, int n) {
  double w0 = len / (std::pow(2.0, panels - 1) - 0.5);
  QuadRule gj = gauss_jacobi(n, 0.0, beta);
  cplx first(0.0);
  for (int i = 0; i < n; ++i) {
    double u = 0.5 * (1.0 + gj.x[i]);
    if (u <= 0.0) continue;
    double s = w0 * u;
    // dividing by u^beta (not s^beta) keeps the scale in the prefactor
    first += gj.w[i] * (h(s) / std::pow(u, beta));
  }
  first *= w0 * std::pow(2.0, -(beta + 1.0));
  if (panels <= 1) return first;

  const QuadRule& gl = gauss_legendre(n);
  cplx acc = first;
  double left = w0;
  double width = w0;
  for (int p = 1; p < panels; ++p) {
    double mid = left + 0.5 * width;
    double half = 0.5 * width;
    cplx panel(0.0);
    for (int i = 0; i < n; ++i) panel += gl.w[i] * h(mid + half * gl.x[i]);
    acc += half * panel;
    left += width;
    width *= 2.0;
  }
  return acc;
}

void check_tail_cut(double tail_cut) {
  if (!(tail_cut > 0.0) || !(tail_cut < 1.0))
    throw parameter_error("tail_cut must lie in (0, 1)");
}

}  // namespace

void SectorSpec::validate(double k) const {
  if (!(half_opening > 0.0))
    throw validation_error("sector half-opening must be positive");
  if (!(half_opening > kPi / (2.0 * k)))
    throw validation_error(
        "summation sector opens too narrowly for its level: need half-opening "
        "> pi/(2k)");
}

bool SectorSpec::contains_arg(double phi) const {
  return std::abs(wrap_angle(phi - theta)) < half_opening;
}

void ContourSpec::validate(double k) const {
  if (!(r0 > 0.0)) throw validation_error("contour radius r0 must be positive");
  if (!(delta_prime > kPi / (2.0 * k)))
    throw validation_error(
        "contour leg angle too small for its level: need delta_prime > "
        "pi/(2k)");
}

ContourSpec default_accel_contour(double k_prev, double k_next, double theta,
                                  double r0) {
  if (!(k_prev > 0.0) || !(k_next > k_prev))
    throw parameter_error(
        "acceleration contour needs 0 < source level < target level");
  double lo = kPi / (2.0 * k_next);
  double hi = kPi / (2.0 * k_prev);
  ContourSpec c;
  c.theta = theta;
  c.delta_prime = lo + 0.6 * (hi - lo);
  c.r0 = r0;
  return c;
}

cplx laplace_eval(const RayFn& f, double k, double theta, cplx t,
                  double tail_cut, const EvalOptions& opt) {
  if (!(k > 0.0)) throw parameter_error("laplace_eval: level must be positive");
  if (t == cplx(0.0)) throw domain_error("laplace_eval: t must be nonzero");
  check_tail_cut(tail_cut);

  // Substituting s = rho^k turns the integral into
  //   e^{ik theta} int_0^inf exp(-c s) f(s^{1/k}) ds,  c = e^{ik theta}/t^k,
  // so the kernel decays exactly when Re c > 0.
  cplx c = std::exp(cplx(0.0, k * theta)) / std::pow(t, cplx(k));
  if (!(c.real() > 0.0))
    throw domain_error(
        "laplace_eval: kernel does not decay along this ray (|arg t - theta| "
        "must stay below pi/(2k))");
  double len = std::log(1.0 / tail_cut) / c.real();

  // Endpoint exponent: f ~ rho^p near 0 gives an s^{p/k} factor.
  double p = estimate_power_at_zero(f, std::pow(len, 1.0 / k));
  double beta = p / k;
  if (beta <= -0.98)
    throw domain_error("laplace_eval: endpoint singularity not integrable");
  beta = std::min(beta, 60.0);
  if (std::abs(beta) < 1e-12) beta = 0.0;

  auto h = [&](double s) -> cplx {
    return std::exp(-c * s) * f(std::pow(s, 1.0 / k));
  };
  auto run = [&](int n) {
    return std::exp(cplx(0.0, k * theta)) *
           geometric_gl_jacobi0(h, beta, len, opt.panels, n);
  };
  cplx lo_v = run(opt.nodes);
  cplx hi_v = run(opt.nodes + opt.nodes / 2);
  double est = std::abs(hi_v - lo_v);
  if (opt.err_out) *opt.err_out = est;
  if (!std::isfinite(hi_v.real()) || !std::isfinite(hi_v.imag()))
    throw numeric_error("laplace_eval: non-finite quadrature value", est);
  if (est > opt.rel_tol * std::max(1.0, std::abs(hi_v)))
    throw numeric_error("laplace_eval: quadrature did not converge", est);
  return hi_v;
}

cplx borel_contour_eval(const SectorFn& psi, double k,
                        const ContourSpec& contour, cplx xi, double tail_cut,
                        const EvalOptions& opt) {
  if (!(k > 0.0))
    throw parameter_error("borel_contour_eval: level must be positive");
  contour.validate(k);
  check_tail_cut(tail_cut);
  if (xi == cplx(0.0))
    throw domain_error("borel_contour_eval: xi must be nonzero");

  double phi_hi = contour.theta + contour.delta_prime;
  double phi_lo = contour.theta - contour.delta_prime;
  cplx xik = std::pow(xi, cplx(k));

  // On the leg arg t = phi, substituting sigma = |t|^-k gives the integrand
  // exp(xi^k e^{-ik phi} sigma) psi(sigma^{-1/k} e^{i phi}); it decays only
  // if Re(xi^k e^{-ik phi}) < 0, which pins arg xi to the shrunken sector.
  cplx lam_hi = -xik * std::exp(cplx(0.0, -k * phi_hi));
  cplx lam_lo = -xik * std::exp(cplx(0.0, -k * phi_lo));
  if (!(lam_hi.real() > 0.0) || !(lam_lo.real() > 0.0))
    throw domain_error(
        "borel_contour_eval: xi outside the sector where the contour "
        "converges (|arg xi - theta| must stay below delta_prime - pi/(2k))");

  double sig0 = std::pow(contour.r0, -k);

  auto leg = [&](double phi, cplx lam, int n) -> cplx {
    auto h = [&](double sig) -> cplx {
      return std::exp(-lam * sig) * psi(std::pow(sig, -1.0 / k) *
                                        std::exp(cplx(0.0, phi)));
    };
    double len = std::log(1.0 / tail_cut) / lam.real();
    return geometric_gl(h, sig0, len, opt.panels, n);
  };
  auto arc = [&](int n) -> cplx {
    // t = r0 e^{i phi}, phi from phi_lo to phi_hi; d(-t^-k) contributes
    // i k sigma0 e^{-ik phi} d phi.
    const QuadRule& gl = gauss_legendre(n);
    int segments = 4;
    double width = (phi_hi - phi_lo) / segments;
    cplx acc(0.0);
    for (int sgm = 0; sgm < segments; ++sgm) {
      double mid = phi_lo + (sgm + 0.5) * width;
      cplx seg(0.0);
      for (int i = 0; i < n; ++i) {
        double phi = mid + 0.5 * width * gl.x[i];
        cplx rot = std::exp(cplx(0.0, -k * phi));
        seg += gl.w[i] *
               (std::exp(xik * sig0 * rot) *
                psi(contour.r0 * std::exp(cplx(0.0, phi))) * rot);
      }
      acc += 0.5 * width * seg;
    }
    return acc * cplx(0.0, k * sig0);
  };

  auto run = [&](int n) -> cplx {
    cplx total = -std::exp(cplx(0.0, -k * phi_hi)) * leg(phi_hi, lam_hi, n) +
                 std::exp(cplx(0.0, -k * phi_lo)) * leg(phi_lo, lam_lo, n) +
                 arc(n);
    return total / cplx(0.0, 2.0 * kPi);
  };

  cplx lo_v = run(opt.nodes);
  cplx hi_v = run(opt.nodes + opt.nodes / 2);
  double est = std::abs(hi_v - lo_v);
  if (opt.err_out) *opt.err_out = est;
  if (!std::isfinite(hi_v.real()) || !std::isfinite(hi_v.imag()))
    throw numeric_error("borel_contour_eval: non-finite quadrature value", est);
  if (est > opt.rel_tol * std::max(1.0, std::abs(hi_v)))
    throw numeric_error("borel_contour_eval: quadrature did not converge", est);
  return hi_v;
}

cplx RationalApprox::eval_plain(cplx z) const {
  cplx n(0.0);
  for (size_t i = num.size(); i-- > 0;) n = n * z + num[i];
  cplx d(0.0);
  for (size_t i = den.size(); i-- > 0;) d = d * z + den[i];
  return n / d;
}

cplx RationalApprox::eval_weighted(cplx xi) const {
  cplx w = std::pow(xi, cplx(1.0 - k));
  return w * eval_plain(xi);
}

RationalApprox pade_continue(const XiSeries& g, const std::vector<cplx>& x_point,
                             int num_deg, int den_deg) {
  if (num_deg < 0 || den_deg < 0)
    throw parameter_error("pade_continue: degrees must be nonnegative");
  if ((int)x_point.size() != g.nspace())
    throw parameter_error("pade_continue: space point has wrong dimension");
  int need = num_deg + den_deg + 1;
  if (g.order() < need)
    throw parameter_error(
        "pade_continue: series too short for the requested degrees");

  // Plain power coefficients c_j = b_{j+1}(x) / Gamma((j+1)/k).
  std::vector<cplx> c(g.order());
  for (int j = 0; j < g.order(); ++j)
    c[j] = g.coeff(j + 1).eval(x_point) *
           std::exp(-std::lgamma((j + 1) / g.level()));

  RationalApprox r;
  r.k = g.level();
  int L = num_deg, M = den_deg;
  r.den.assign(1, cplx(1.0));
  if (M > 0) {
    // Denominator from the window of linearized conditions: the series
    // coefficients of P * D must vanish at powers L+1 .. L+M.
    Eigen::MatrixXcd T(M, M);
    Eigen::VectorXcd rhs(M);
    auto cc = [&](int idx) -> cplx { return idx >= 0 ? c[idx] : cplx(0.0); };
    for (int row = 0; row < M; ++row) {
      for (int col = 0; col < M; ++col) T(row, col) = cc(L + row - col);
      rhs(row) = -c[L + 1 + row];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(T);
    if (qr.rank() < M)
      throw degeneracy_error(
          "pade_continue: singular linear system; retry with lower degrees");
    Eigen::VectorXcd d = qr.solve(rhs);
    double resid = (T * d - rhs).norm();
    if (!d.allFinite() || resid > 1e-6 * (rhs.norm() + 1.0))
      throw degeneracy_error(
          "pade_continue: unreliable denominator solve; retry with lower "
          "degrees");
    for (int m = 0; m < M; ++m) r.den.push_back(d(m));
  }
  r.num.assign(L + 1, cplx(0.0));
  for (int i = 0; i <= L; ++i)
    for (int m = 0; m <= std::min(i, M); ++m) r.num[i] += r.den[m] * c[i - m];

  // Poles: companion-matrix roots of the (trimmed) denominator.
  std::vector<cplx> den = r.den;
  double dmax = 0.0;
  for (const cplx& v : den) dmax = std::max(dmax, std::abs(v));
  while (den.size() > 1 && std::abs(den.back()) <= 1e-13 * dmax)
    den.pop_back();
  int deg = (int)den.size() - 1;
  if (deg > 0) {
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -den[i] / den[deg];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp);
    if (es.info() != Eigen::Success)
      throw degeneracy_error("pade_continue: pole solve failed");
    for (int i = 0; i < deg; ++i) {
      cplx pole = es.eigenvalues()(i);
      r.poles.push_back(pole);
      // Residue num(p)/den'(p) for a simple pole; a confluent pair just
      // yields a large value, which the direction filter treats as real.
      cplx dp(0.0);
      for (size_t j = 1; j < r.den.size(); ++j)
        dp += (double)j * r.den[j] * std::pow(pole, cplx((double)(j - 1)));
      cplx np(0.0);
      for (size_t j = r.num.size(); j-- > 0;) np = np * pole + r.num[j];
      r.residues.push_back(std::abs(dp) > 0 ? np / dp
                                            : cplx(std::numeric_limits<
                                                   double>::infinity()));
    }
  }
  return r;
}

RayFn rational_ray_fn(const RationalApprox& r, double theta) {
  double km = r.k;
  return [r, theta, km](double rho) -> cplx {
    if (rho <= 0.0) {
      if (km < 1.0) return cplx(0.0);
      if (km == 1.0) return r.eval_plain(cplx(0.0));
      throw domain_error("rational_ray_fn: rho must be positive when k > 1");
    }
    cplx phase = std::exp(cplx(0.0, theta));
    cplx w = std::exp(cplx((1.0 - km) * std::log(rho), (1.0 - km) * theta));
    return w * r.eval_plain(rho * phase);
  };
}

cplx accelerate_numeric(const RayFn& f_prev, double k_prev, double k_next,
                        double theta_prev, const ContourSpec& contour, cplx xi,
                        double tail_cut, const EvalOptions& opt) {
  if (!(k_next > k_prev) || !(k_prev > 0.0))
    throw parameter_error(
        "accelerate_numeric: need 0 < source level < target level");
  // The contour legs must keep the inner Laplace integral convergent.
  if (!(contour.delta_prime < kPi / (2.0 * k_prev)))
    throw parameter_error(
        "accelerate_numeric: contour leg angle reaches pi/(2 k_prev); the "
        "inner integral would diverge on the legs");

  EvalOptions inner = opt;
  inner.rel_tol = std::numeric_limits<double>::infinity();
  inner.err_out = nullptr;
  const std::string ltag = "acceleration (laplace stage): ";
  SectorFn mid = [&, ltag](cplx t) -> cplx {
    try {
      return laplace_eval(f_prev, k_prev, theta_prev, t, tail_cut, inner);
    } catch (const numeric_error& e) {
      throw numeric_error(ltag + e.what(), e.estimate);
    } catch (const domain_error& e) {
      throw domain_error(ltag + e.what());
    }
  };
  try {
    return borel_contour_eval(mid, k_next, contour, xi, tail_cut, opt);
  } catch (const numeric_error& e) {
    if (std::string(e.what()).rfind(ltag, 0) == 0) throw;
    throw numeric_error("acceleration (contour stage): " + std::string(e.what()),
                        e.estimate);
  } catch (const domain_error& e) {
    if (std::string(e.what()).rfind(ltag, 0) == 0) throw;
    throw domain_error("acceleration (contour stage): " +
                       std::string(e.what()));
  }
}

double fit_exp_order(const std::vector<double>& radii,
                     const std::vector<double>& magnitudes) {
  if (radii.size() != magnitudes.size())
    throw parameter_error("fit_exp_order: mismatched sample lists");
  std::vector<double> xs, ys;
  for (size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || !std::isfinite(magnitudes[i])) continue;
    double lg = std::log(magnitudes[i]);
    if (lg <= 0.5) continue;  // double log needs comfortably large samples
    xs.push_back(std::log(radii[i]));
    ys.push_back(std::log(lg));
  }
  if (xs.size() < 3)
    throw degenerate_input_error(
        "fit_exp_order: too few samples with |g| large enough to fit");
  Eigen::MatrixXd A(xs.size(), 2);
  Eigen::VectorXd b(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = xs[i];
    b(i) = ys[i];
  }
  Eigen::Vector2d sol = A.colPivHouseholderQr().solve(b);
  return sol(1);
}

}  // namespace borelsum
