#include "borelsum/cli_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "borelsum/majorant.hpp"
#include "borelsum/series.hpp"

namespace borelsum {

namespace {

using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

cplx parse_complex(const json& j, const std::string& where) {
  if (j.is_number()) return cplx(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return cplx(j[0].get<double>(), j[1].get<double>());
  throw validation_error(where + ": expected a number or an [re, im] pair");
}

json dump_complex(cplx v) {
  if (v.imag() == 0.0) return json(v.real());
  return json::array({v.real(), v.imag()});
}

std::vector<int> parse_exponent_key(const std::string& key, int n_space,
                                    const std::string& where) {
  std::vector<int> e;
  if (!key.empty()) {
    std::stringstream ss(key);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        size_t pos = 0;
        int v = std::stoi(tok, &pos);
        if (pos != tok.size() || v < 0) throw std::invalid_argument(tok);
        e.push_back(v);
      } catch (const std::exception&) {
        throw validation_error(where + ": bad exponent key '" + key + "'");
      }
    }
  }
  if ((int)e.size() != n_space)
    throw validation_error(where + ": exponent key '" + key + "' has " +
                           std::to_string(e.size()) + " entries, expected " +
                           std::to_string(n_space));
  return e;
}

std::string exponent_key(const std::vector<int>& e) {
  std::string s;
  for (size_t i = 0; i < e.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(e[i]);
  }
  return s;
}

// Reads one monomial map at the file's declared n_space, extending exponent
// vectors by one zero entry when the file declares n_space = 0.
XPoly parse_xpoly(const json& j, int file_n, int eff_n, int maxdeg,
                  const std::string& where) {
  if (!j.is_object())
    throw validation_error(where + ": expected a monomial map object");
  XPoly p(eff_n, maxdeg);
  for (const auto& [key, val] : j.items()) {
    std::vector<int> e = parse_exponent_key(key, file_n, where);
    if (file_n == 0) e.push_back(0);
    if (total_degree(e) > maxdeg)
      throw internal_error(where + ": monomial above the scanned max degree");
    p.set_coeff(e, p.coeff(e) + parse_complex(val, where));
  }
  return p;
}

json dump_xpoly(const XPoly& p) {
  json j = json::object();
  for (const auto& [e, v] : p.coeffs()) j[exponent_key(e)] = dump_complex(v);
  return j;
}

int scan_max_degree(const json& j) {
  // max total degree over every monomial map in the file
  int d = 0;
  if (j.is_object()) {
    bool monomap = true;
    for (const auto& [key, val] : j.items()) {
      if (!val.is_number() &&
          !(val.is_array() && val.size() == 2 && val[0].is_number())) {
        monomap = false;
        break;
      }
      int td = 0;
      std::stringstream ss(key);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        try {
          td += std::max(0, std::stoi(tok));
        } catch (const std::exception&) {
          monomap = false;
        }
      }
      if (monomap) d = std::max(d, td);
    }
    if (!monomap)
      for (const auto& [key, val] : j.items()) d = std::max(d, scan_max_degree(val));
  } else if (j.is_array()) {
    for (const auto& v : j) d = std::max(d, scan_max_degree(v));
  }
  return d;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw validation_error("parse error in " + path + ": " + e.what());
  }
}

}  // namespace

void RunConfig::validate() const {
  if (order < 4) throw validation_error("config: order must be at least 4");
  if (maxdeg < 0) throw validation_error("config: maxdeg must be >= 0");
  if (!(tail_cut > 0.0) || !(tail_cut < 1.0))
    throw validation_error("config: tail_cut must lie in (0,1)");
  if (!(quad_tol > 0.0))
    throw validation_error("config: quad_tol must be positive");
  if (!(direction_guard > 0.0))
    throw validation_error("config: direction_guard must be positive");
  if (!(froissart_rel > 0.0))
    throw validation_error("config: froissart_rel must be positive");
  if (threads < 1) throw validation_error("config: threads must be >= 1");
}

ResumOptions RunConfig::resum_options() const {
  ResumOptions o;
  o.order = order;
  o.maxdeg = maxdeg;
  o.pade_num = pade_num;
  o.pade_den = pade_den;
  o.tail_cut = tail_cut;
  o.quad_tol = quad_tol;
  o.direction_guard = direction_guard;
  o.froissart_rel = froissart_rel;
  o.threads = threads;
  return o;
}

RunConfig load_config(const std::string& path) {
  json j = read_json_file(path);
  if (!j.is_object())
    throw validation_error("config " + path + ": expected a JSON object");
  RunConfig cfg;
  for (const auto& [key, val] : j.items()) {
    try {
      if (key == "order")
        cfg.order = val.get<int>();
      else if (key == "maxdeg")
        cfg.maxdeg = val.get<int>();
      else if (key == "pade_num")
        cfg.pade_num = val.get<int>();
      else if (key == "pade_den")
        cfg.pade_den = val.get<int>();
      else if (key == "tail_cut")
        cfg.tail_cut = val.get<double>();
      else if (key == "quad_tol")
        cfg.quad_tol = val.get<double>();
      else if (key == "direction_guard")
        cfg.direction_guard = val.get<double>();
      else if (key == "froissart_rel")
        cfg.froissart_rel = val.get<double>();
      else if (key == "threads")
        cfg.threads = val.get<int>();
      else if (key == "out_dir")
        cfg.out_dir = val.get<std::string>();
      else
        throw validation_error("config " + path + ": unknown key '" + key +
                               "'");
    } catch (const json::exception&) {
      throw validation_error("config " + path + ": bad value for '" + key +
                             "'");
    }
  }
  cfg.validate();
  return cfg;
}

void apply_env_overrides(RunConfig& cfg) {
  auto get_int = [](const char* name, int& slot) {
    const char* v = std::getenv(name);
    if (!v) return;
    try {
      size_t pos = 0;
      int parsed = std::stoi(v, &pos);
      if (pos != std::string(v).size()) throw std::invalid_argument(v);
      slot = parsed;
    } catch (const std::exception&) {
      throw validation_error(std::string("bad integer in ") + name);
    }
  };
  auto get_double = [](const char* name, double& slot) {
    const char* v = std::getenv(name);
    if (!v) return;
    try {
      size_t pos = 0;
      double parsed = std::stod(v, &pos);
      if (pos != std::string(v).size()) throw std::invalid_argument(v);
      slot = parsed;
    } catch (const std::exception&) {
      throw validation_error(std::string("bad number in ") + name);
    }
  };
  get_int("BORELSUM_ORDER", cfg.order);
  get_int("BORELSUM_MAXDEG", cfg.maxdeg);
  get_int("BORELSUM_PADE_NUM", cfg.pade_num);
  get_int("BORELSUM_PADE_DEN", cfg.pade_den);
  get_double("BORELSUM_TAIL_CUT", cfg.tail_cut);
  get_double("BORELSUM_QUAD_TOL", cfg.quad_tol);
  get_double("BORELSUM_DIRECTION_GUARD", cfg.direction_guard);
  get_double("BORELSUM_FROISSART_REL", cfg.froissart_rel);
  get_int("BORELSUM_THREADS", cfg.threads);
  if (const char* v = std::getenv("BORELSUM_OUT_DIR")) cfg.out_dir = v;
}

std::string serialize_config(const RunConfig& cfg) {
  json j;
  j["order"] = cfg.order;
  j["maxdeg"] = cfg.maxdeg;
  j["pade_num"] = cfg.pade_num;
  j["pade_den"] = cfg.pade_den;
  j["tail_cut"] = cfg.tail_cut;
  j["quad_tol"] = cfg.quad_tol;
  j["direction_guard"] = cfg.direction_guard;
  j["froissart_rel"] = cfg.froissart_rel;
  j["threads"] = cfg.threads;
  j["out_dir"] = cfg.out_dir;
  return j.dump();
}

std::string config_hash(const RunConfig& cfg) {
  std::string s = serialize_config(cfg);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)h);
  return buf;
}

ProblemBundle load_problem(const std::string& path) {
  json j = read_json_file(path);
  if (!j.is_object())
    throw validation_error("problem " + path + ": expected a JSON object");
  for (const char* field : {"m", "n_space", "initial", "terms", "levels"})
    if (!j.contains(field))
      throw validation_error("problem " + path + ": missing field '" +
                             std::string(field) + "'");

  ProblemBundle b;
  int m = j["m"].get<int>();
  int file_n = j["n_space"].get<int>();
  if (m < 1) throw validation_error("problem: m must be >= 1");
  if (file_n < 0) throw validation_error("problem: n_space must be >= 0");
  int eff_n = std::max(1, file_n);
  int maxdeg = scan_max_degree(j["initial"]);
  maxdeg = std::max(maxdeg, scan_max_degree(j["terms"]));

  b.problem.m = m;
  b.problem.n_space = eff_n;
  b.problem.R0 = j.value("R0", 1.0);
  b.problem.R1 = j.value("R1", 1.0);

  const json& init = j["initial"];
  if (!init.is_array() || (int)init.size() != m)
    throw validation_error("problem: 'initial' must list one entry per unknown");
  for (int i = 0; i < m; ++i)
    b.problem.initial.push_back(
        parse_xpoly(init[i], file_n, eff_n, maxdeg,
                    "initial[" + std::to_string(i) + "]"));

  // Determine a common t-order across all terms first.
  const json& terms = j["terms"];
  if (!terms.is_array())
    throw validation_error("problem: 'terms' must be a list");
  int order = 0;
  for (const auto& t : terms)
    if (t.contains("t_coeffs") && t["t_coeffs"].is_array())
      order = std::max(order, (int)t["t_coeffs"].size() - 1);

  b.problem.terms.assign(m, {});
  int tn = 0;
  for (const auto& t : terms) {
    std::string where = "terms[" + std::to_string(tn++) + "]";
    for (const char* field : {"i", "alpha", "t_coeffs"})
      if (!t.contains(field))
        throw validation_error("problem: " + where + " missing '" +
                               std::string(field) + "'");
    int i = t["i"].get<int>();
    if (i < 1 || i > m)
      throw validation_error("problem: " + where + " equation index out of range");
    TermIndex idx;
    if (!t["alpha"].is_array() || (int)t["alpha"].size() != m)
      throw validation_error("problem: " + where + " alpha must have m entries");
    for (const auto& a : t["alpha"]) idx.alpha.push_back(a.get<int>());
    idx.A.assign(m * eff_n, 0);
    if (t.contains("A")) {
      const json& A = t["A"];
      if (!A.is_array() || (int)A.size() != m)
        throw validation_error("problem: " + where +
                               " A must list one row per unknown");
      for (int r = 0; r < m; ++r) {
        if (!A[r].is_array() || (int)A[r].size() != file_n)
          throw validation_error("problem: " + where +
                                 " A rows must have n_space entries");
        for (int c = 0; c < file_n; ++c) idx.A[r * eff_n + c] = A[r][c].get<int>();
      }
    }
    idx.validate(m, eff_n);
    TSeries ts(order, eff_n, maxdeg);
    const json& tc = t["t_coeffs"];
    for (int a = 0; a < (int)tc.size(); ++a)
      ts.set_coeff(a, parse_xpoly(tc[a], file_n, eff_n, maxdeg,
                                  where + ".t_coeffs[" + std::to_string(a) +
                                      "]"));
    auto& eq = b.problem.terms[i - 1];
    auto it = eq.find(idx);
    if (it == eq.end())
      eq.emplace(idx, ts);
    else
      it->second += ts;
  }

  const json& lv = j["levels"];
  if (!lv.is_object() || !lv.contains("ks") || !lv.contains("thetas"))
    throw validation_error("problem: 'levels' needs 'ks' and 'thetas'");
  for (const auto& v : lv["ks"]) b.ml.ks.push_back(v.get<double>());
  for (const auto& v : lv["thetas"]) b.ml.thetas.push_back(v.get<double>());

  b.problem.validate();
  b.ml.validate();
  return b;
}

void save_problem(const std::string& path, const ProblemBundle& b) {
  json j;
  j["m"] = b.problem.m;
  j["n_space"] = b.problem.n_space;
  j["R0"] = b.problem.R0;
  j["R1"] = b.problem.R1;
  j["initial"] = json::array();
  for (const XPoly& p : b.problem.initial) j["initial"].push_back(dump_xpoly(p));
  j["terms"] = json::array();
  for (int i = 0; i < b.problem.m; ++i) {
    for (const auto& [idx, ts] : b.problem.terms[i]) {
      json t;
      t["i"] = i + 1;
      t["alpha"] = idx.alpha;
      json A = json::array();
      for (int r = 0; r < b.problem.m; ++r) {
        json row = json::array();
        for (int c = 0; c < b.problem.n_space; ++c)
          row.push_back(idx.A[r * b.problem.n_space + c]);
        A.push_back(row);
      }
      t["A"] = A;
      json tc = json::array();
      for (int a = 0; a <= ts.order(); ++a) tc.push_back(dump_xpoly(ts.coeff(a)));
      t["t_coeffs"] = tc;
      j["terms"].push_back(t);
    }
  }
  j["levels"]["ks"] = b.ml.ks;
  j["levels"]["thetas"] = b.ml.thetas;

  std::ofstream out(path);
  if (!out) throw validation_error("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

PointSet load_points(const std::string& path, int n_space) {
  json j = read_json_file(path);
  if (!j.is_object() || !j.contains("t"))
    throw validation_error("points " + path + ": expected an object with 't'");
  PointSet ps;
  for (const auto& v : j["t"]) ps.t.push_back(parse_complex(v, "points.t"));
  if (ps.t.empty()) throw validation_error("points: 't' must be non-empty");
  if (j.contains("x")) {
    for (const auto& pt : j["x"]) {
      if (!pt.is_array() || (int)pt.size() != n_space)
        throw validation_error("points: each x entry needs n_space values");
      std::vector<cplx> x;
      for (const auto& v : pt) x.push_back(parse_complex(v, "points.x"));
      ps.x.push_back(x);
    }
  }
  if (ps.x.empty()) ps.x.push_back(std::vector<cplx>(n_space, cplx(0.0)));
  return ps;
}

PointSet default_points(int n_space) {
  PointSet ps;
  for (int i = 0; i < 8; ++i) ps.t.push_back(cplx(0.05 * std::pow(1.5, i), 0.0));
  ps.x.push_back(std::vector<cplx>(n_space, cplx(0.0)));
  return ps;
}

void write_solution_csv(std::ostream& os, const SolutionTable& table,
                        const std::string& cfg_hash) {
  if (table.rows.empty()) throw parameter_error("csv: empty table");
  size_t nx = table.rows.front().x.size();
  size_t nu = table.rows.front().u.size();
  os << "t_re,t_im";
  for (size_t jx = 1; jx <= nx; ++jx)
    os << ",x_" << jx << "_re,x_" << jx << "_im";
  for (size_t i = 1; i <= nu; ++i) os << ",u_" << i << "_re,u_" << i << "_im";
  os << ",err_est,stage_flags,config_hash\n";
  for (const auto& row : table.rows) {
    os << fmt17(row.t.real()) << ',' << fmt17(row.t.imag());
    for (const cplx& xv : row.x)
      os << ',' << fmt17(xv.real()) << ',' << fmt17(xv.imag());
    for (const cplx& uv : row.u)
      os << ',' << fmt17(uv.real()) << ',' << fmt17(uv.imag());
    os << ',' << fmt17(row.err_est) << ',' << row.stage_flags << ','
       << cfg_hash << "\n";
  }
}

namespace {

int exit_code_for(const std::string& kind) {
  if (kind == "numeric" || kind == "degeneracy" || kind == "internal") return 3;
  return 2;
}

void emit_error_record(const error& e) {
  json rec;
  rec["kind"] = e.kind();
  rec["message"] = e.what();
  if (const auto* d = dynamic_cast<const direction_rejected*>(&e)) {
    rec["pole_re"] = d->pole_real;
    rec["pole_im"] = d->pole_imag;
  }
  if (const auto* n = dynamic_cast<const numeric_error*>(&e))
    rec["estimate"] = n->estimate;
  if (const auto* t = dynamic_cast<const truncation_error*>(&e))
    rec["required_order"] = t->required_order;
  std::cerr << rec.dump() << "\n";
}

std::filesystem::path prep_out_dir(const RunConfig& cfg) {
  std::filesystem::path dir(cfg.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec && !std::filesystem::is_directory(dir))
    throw validation_error("cannot create output directory: " + cfg.out_dir);
  return dir;
}

int cmd_formal_solve(const RunConfig& cfg, const ProblemBundle& b) {
  NormalizedProblem np = normalize(b.problem, cfg.order, cfg.maxdeg);
  std::vector<TSeries> v = formal_solve(np, cfg.order);
  auto dir = prep_out_dir(cfg);
  for (int i = 0; i < np.m; ++i) {
    TSeries u = reconstruct_u(np, v[i], i);
    auto p = dir / ("u_" + std::to_string(i + 1) + ".tseries");
    std::ofstream out(p);
    if (!out) throw validation_error("cannot write " + p.string());
    write_tseries(out, u);
    std::cout << "wrote " << p.string() << "\n";
  }
  return 0;
}

int cmd_borel(const RunConfig& cfg, const ProblemBundle& b) {
  NormalizedProblem np = normalize(b.problem, cfg.order, cfg.maxdeg);
  EpsGraded grading = convolution_fixpoint(np, b.ml.ks.front(),
                                           b.ml.thetas.front(), cfg.order);
  std::vector<XiSeries> sum = grading_sum(grading);
  auto dir = prep_out_dir(cfg);
  for (int r = 0; r < np.m; ++r) {
    auto p = dir / ("v_" + std::to_string(r + 1) + ".xiseries");
    std::ofstream out(p);
    if (!out) throw validation_error("cannot write " + p.string());
    write_xiseries(out, sum[r]);
    std::cout << "wrote " << p.string() << "\n";
  }
  return 0;
}

int cmd_gevrey(const RunConfig& cfg, const ProblemBundle& b) {
  NormalizedProblem np = normalize(b.problem, cfg.order, cfg.maxdeg);
  std::vector<TSeries> v = formal_solve(np, cfg.order);
  json rep = json::array();
  for (int i = 0; i < np.m; ++i) {
    TSeries u = reconstruct_u(np, v[i], i);
    GevreyFit fit = gevrey_fit(coeff_norms(u));
    json f;
    f["unknown"] = i + 1;
    f["convergent"] = fit.convergent;
    f["k_est"] = fit.k_est;
    f["inv_k"] = fit.inv_k;
    f["M_est"] = fit.M_est;
    f["C_est"] = fit.C_est;
    f["residual"] = fit.residual;
    rep.push_back(f);
  }
  auto dir = prep_out_dir(cfg);
  auto p = dir / "gevrey.json";
  std::ofstream out(p);
  if (!out) throw validation_error("cannot write " + p.string());
  out << rep.dump(2) << "\n";
  std::cout << rep.dump() << "\n";
  return 0;
}

int cmd_resum(const RunConfig& cfg, const ProblemBundle& b,
              const PointSet& pts) {
  SolutionTable table =
      resum(b.problem, b.ml, pts.t, pts.x, cfg.resum_options());
  auto dir = prep_out_dir(cfg);
  auto p = dir / "solution.csv";
  std::ofstream out(p);
  if (!out) throw validation_error("cannot write " + p.string());
  write_solution_csv(out, table, config_hash(cfg));
  std::cout << "wrote " << p.string() << "\n";
  return 0;
}

int cmd_majorant_audit(const RunConfig& cfg, const ProblemBundle& b) {
  NormalizedProblem np = normalize(b.problem, cfg.order, cfg.maxdeg);
  int L = std::min(cfg.order, 12);
  double k1 = b.ml.ks.front();
  MajorantSeries mj = theta_build(std::max(64, L + cfg.maxdeg + 8));
  mj.R = b.problem.R1;
  MajorantFit fit = fit_majorant_constants(np, k1, b.problem.R1, mj);
  MSequence ms = m_sequence(np, fit, L);
  WitnessReport wit = implicit_witness(np, ms, L);
  EpsGraded grading =
      convolution_fixpoint(np, k1, b.ml.thetas.front(), std::min(L, np.order));
  BoundAuditReport audit = bound_audit(grading, ms, mj, k1);

  json rep;
  rep["L"] = L;
  rep["G"] = ms.G;
  rep["C0"] = ms.C0;
  rep["R"] = ms.R;
  rep["B"] = ms.B;
  rep["saturated"] = ms.saturated;
  rep["M"] = ms.M;
  rep["witness_C"] = wit.C;
  rep["witness_equal"] = wit.equal;
  rep["witness_max_rel_diff"] = wit.max_rel_diff;
  rep["radius_estimate"] = wit.radius_estimate;
  rep["bound_passed"] = audit.passed;
  rep["bound_worst_slack"] = audit.worst_slack;
  rep["violations"] = audit.violations.size();

  auto dir = prep_out_dir(cfg);
  auto p = dir / "majorant_audit.json";
  std::ofstream out(p);
  if (!out) throw validation_error("cannot write " + p.string());
  out << rep.dump(2) << "\n";
  std::cout << rep.dump() << "\n";
  return 0;
}

int cmd_plot_data(const RunConfig& cfg, const ProblemBundle& b,
                  const PointSet& pts) {
  NormalizedProblem np = normalize(b.problem, cfg.order, cfg.maxdeg);
  EpsGraded grading = convolution_fixpoint(np, b.ml.ks.front(),
                                           b.ml.thetas.front(), cfg.order);
  std::vector<XiSeries> what = grading_sum(grading);
  auto dir = prep_out_dir(cfg);
  std::string hash = config_hash(cfg);

  int L0 = cfg.pade_num >= 0 ? cfg.pade_num : (cfg.order - 1) / 2;
  int M0 = cfg.pade_den >= 0 ? cfg.pade_den : (cfg.order - 1) / 2;
  const std::vector<cplx>& x0 = pts.x.front();
  {
    auto p = dir / "poles.csv";
    std::ofstream out(p);
    if (!out) throw validation_error("cannot write " + p.string());
    out << "level,unknown,pole_re,pole_im,residue_re,residue_im,config_hash\n";
    std::vector<XiSeries> cur = what;
    for (int s = 0; s < b.ml.levels(); ++s) {
      if (s > 0)
        for (int r = 0; r < np.m; ++r)
          cur[r] = accelerate_formal(cur[r], b.ml.ks[s]);
      for (int r = 0; r < np.m; ++r) {
        RationalApprox ra;
        try {
          ra = pade_auto(cur[r], x0, L0, M0, nullptr);
        } catch (const degeneracy_error&) {
          continue;
        }
        for (size_t q = 0; q < ra.poles.size(); ++q)
          out << s + 1 << ',' << r + 1 << ',' << fmt17(ra.poles[q].real())
              << ',' << fmt17(ra.poles[q].imag()) << ','
              << fmt17(ra.residues[q].real()) << ','
              << fmt17(ra.residues[q].imag()) << ',' << hash << "\n";
      }
    }
    std::cout << "wrote " << p.string() << "\n";
  }
  {
    SolutionTable table =
        resum(b.problem, b.ml, pts.t, {x0}, cfg.resum_options());
    auto p = dir / "ray_profile.csv";
    std::ofstream out(p);
    if (!out) throw validation_error("cannot write " + p.string());
    out << "t_abs";
    for (int i = 1; i <= np.m; ++i) out << ",u_" << i << "_abs";
    out << ",err_est,config_hash\n";
    for (const auto& row : table.rows) {
      out << fmt17(std::abs(row.t));
      for (const cplx& uv : row.u) out << ',' << fmt17(std::abs(uv));
      out << ',' << fmt17(row.err_est) << ',' << hash << "\n";
    }
    std::cout << "wrote " << p.string() << "\n";
  }
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Borel-Laplace summation of formal Cauchy-problem solutions"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path, problem_path, points_path;
  std::string out_flag;
  int order_flag = -1;
  double theta_deg = 0.0;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--problem", problem_path, "JSON problem file");
  app.add_option("--out", out_flag, "output directory");
  app.add_option("--order", order_flag, "truncation order override");
  CLI::Option* theta_opt = app.add_option(
      "--theta", theta_deg, "summation direction override, degrees");
  app.add_option("--points", points_path, "JSON t/x evaluation points");

  CLI::App* sc_formal =
      app.add_subcommand("formal-solve", "emit the truncated formal solution");
  CLI::App* sc_borel =
      app.add_subcommand("borel", "emit the level-1 Borel-plane solution");
  CLI::App* sc_gevrey =
      app.add_subcommand("gevrey", "fit the Gevrey order of the formal solution");
  CLI::App* sc_resum =
      app.add_subcommand("resum", "evaluate the resummed solution table");
  CLI::App* sc_audit =
      app.add_subcommand("majorant-audit", "run the majorant bound audits");
  CLI::App* sc_plot =
      app.add_subcommand("plot-data", "emit pole map and ray profile CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    apply_env_overrides(cfg);
    if (order_flag >= 0) cfg.order = order_flag;
    if (!out_flag.empty()) cfg.out_dir = out_flag;
    cfg.validate();

    if (problem_path.empty())
      throw validation_error("--problem is required");
    ProblemBundle b = load_problem(problem_path);
    if (theta_opt->count() > 0) {
      double th = theta_deg * kPi / 180.0;
      for (double& t : b.ml.thetas) t = th;
      b.ml.validate();
    }

    PointSet pts = points_path.empty()
                       ? default_points(b.problem.n_space)
                       : load_points(points_path, b.problem.n_space);

    if (sc_formal->parsed()) return cmd_formal_solve(cfg, b);
    if (sc_borel->parsed()) return cmd_borel(cfg, b);
    if (sc_gevrey->parsed()) return cmd_gevrey(cfg, b);
    if (sc_resum->parsed()) return cmd_resum(cfg, b, pts);
    if (sc_audit->parsed()) return cmd_majorant_audit(cfg, b);
    if (sc_plot->parsed()) return cmd_plot_data(cfg, b, pts);
    throw internal_error("no subcommand dispatched");
  } catch (const error& e) {
    emit_error_record(e);
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    emit_error_record(internal_error(e.what()));
    return 3;
  }
}

}  // namespace borelsum
