#include "lcq/experiments.hpp"

#include "lcq/sampling.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace fs = std::filesystem;

namespace lcq {

namespace {

class Checker {
 public:
  explicit Checker(std::string suite) : suite_(std::move(suite)) {}
  void suite(std::string s) { suite_ = std::move(s); }
  // value <= threshold passes
  void at_most(const std::string& check, double value, double threshold) {
    rows.push_back({suite_, check, value, threshold, value <= threshold});
  }
  // value >= threshold passes
  void at_least(const std::string& check, double value, double threshold) {
    rows.push_back({suite_, check, value, threshold, value >= threshold});
  }
  void inform() {
    for (CheckRow& r : rows) r.informational = true;
  }
  void truth(const std::string& check, bool ok) { rows.push_back({suite_, check, ok ? 1.0 : 0.0, 1.0, ok}); }
  void clause_set(const std::string& name, const std::vector<Clause>& clauses) {
    double worst = std::numeric_limits<double>::infinity();
    for (const Clause& c : clauses) worst = std::min(worst, c.margin);
    const std::string fail = first_failure(clauses);
    rows.push_back({suite_, fail.empty() ? name : name + " fails at " + fail, worst, 0.0, all_hold(clauses)});
  }

  std::vector<CheckRow> rows;

 private:
  std::string suite_;
};

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

std::string fmt(double v) {
  std::ostringstream o;
  o << std::setprecision(17) << v;
  return o.str();
}

void ensure_dir(const std::string& dir) { fs::create_directories(dir); }

std::string table(const std::vector<CheckRow>& rows) {
  std::ostringstream o;
  o << std::setprecision(6);
  for (const CheckRow& r : rows)
    o << (r.informational ? (r.pass ? "TRUE  " : "FALSE ") : (r.pass ? "PASS  " : "FAIL  ")) << r.suite << ": " << r.check << "  (value " << r.value << ", threshold "
      << r.threshold << ")\n";
  return o.str();
}

bool all_pass(const std::vector<CheckRow>& rows) {
  for (const CheckRow& r : rows)
    if (!r.pass && !r.informational) return false;
  return true;
}

// ---------------------------------------------------------------------------
// verify suites

void tensor_suite(const ExperimentConfig& cfg, Checker& ck, Rng& rng) {
  ck.suite("tensor");
  const double s = cfg.bulk.s_plus;
  double worst_identity = 0.0, worst_norm = 0.0;
  for (long i = 0; i < cfg.verify_samples; ++i) {
    const QTensor q = from_director(random_unit(rng), s);
    worst_identity = std::max(worst_identity, uniaxial_identity_residual(q, s));
    worst_norm = std::max(worst_norm, std::abs(q.squaredNorm() - 2.0 * s * s / 3.0));
  }
  ck.at_most("uniaxial identity residual on random S_* tensors", worst_identity, 1e-12);
  ck.at_most("|Q|^2 = 2 s^2/3 on S_*", worst_norm, 1e-12);
  std::uniform_real_distribution<double> uni(0.1, 3.0);
  double worst_stat = std::abs(2 * cfg.bulk.c * s * s - cfg.bulk.b * s - 3 * cfg.bulk.a);
  for (int i = 0; i < 100; ++i) {
    const BulkParams bp(uni(rng), uni(rng), uni(rng));
    worst_stat = std::max(worst_stat, std::abs(2 * bp.c * bp.s_plus * bp.s_plus - bp.b * bp.s_plus - 3 * bp.a));
  }
  ck.at_most("s_+ stationarity 2c s^2 - b s - 3a", worst_stat, 1e-10);
}

void constants_suite(const ExperimentConfig& cfg, Checker& ck, Rng& rng) {
  ck.suite("constants");
  const double s = cfg.bulk.s_plus;
  const ElasticConstants& L = cfg.L;
  const FrankConstants k = frank_from_elastic(L, s);
  ck.clause_set("L-conditions", L_cond_clauses(L, s));
  ck.clause_set("coercivity", coercivity_iff_clauses(L, s));
  ck.clause_set("Er1", er1_clauses(L, s));
  ck.clause_set("Ericksen for the bridged Frank constants", ericksen_clauses(k));
  const ElasticConstants back = elastic_from_frank(k, s);
  ck.at_most("bridge round trip",
             std::max({rel_diff(back.L1, L.L1), rel_diff(back.L2, L.L2), rel_diff(back.L3, L.L3), rel_diff(back.L4, L.L4)}),
             1e-12);

  long mismatch = 0, alpha_bad = 0, tau_bad = 0;
  for (long i = 0; i < cfg.verify_samples; ++i) {
    const ElasticConstants r = random_elastic(rng, s, [](const ElasticConstants&) { return true; });
    const bool er1 = check_er1(r, s), eri = check_ericksen(frank_from_elastic(r, s));
    mismatch += er1 != eri;
    if (er1 && !(alpha(r, s) > 0 && alpha_e2(r, s) > 0)) ++alpha_bad;
    if (eri && !(tilde_alpha(frank_from_elastic(r, s)) > 0)) ++tau_bad;
  }
  ck.at_most("Er1 <=> Ericksen disagreements on random constants", static_cast<double>(mismatch), 0);
  ck.at_most("alpha <= 0 while Er1 holds", static_cast<double>(alpha_bad), 0);
  ck.at_most("tilde alpha <= 0 while Ericksen holds", static_cast<double>(tau_bad), 0);
}

void density_suite(const ExperimentConfig& cfg, Checker& ck, Rng& rng) {
  ck.suite("densities");
  const double s = cfg.bulk.s_plus;
  const ElasticConstants& L = cfg.L;
  const FrankConstants k = frank_from_elastic(L, s);
  const bool er1 = check_er1(L, s);
  double e1 = 0, e2 = 0, ew = 0;
  for (long i = 0; i < cfg.verify_samples; ++i) {
    const UniaxialSample u = random_uniaxial_sample(rng, s);
    const double fe = elastic_fE(u.q, u.p, L);
    e1 = std::max(e1, rel_diff(elastic_fE1(u.q, u.p, L, s).total, fe));
    if (er1) e2 = std::max(e2, rel_diff(elastic_fE2(u.q, u.p, L, s).total, fe));
    ew = std::max(ew, rel_diff(oseen_frank_W(u.u, u.g, k), fe));
  }
  ck.at_most("f_E = f_E1 on S_*", e1, 1e-9);
  if (er1) ck.at_most("f_E = f_E2 on S_*", e2, 1e-9);
  ck.at_most("f_E = W under the constant bridge", ew, 1e-9);

  if (er1) {
    const double a2 = alpha_e2(L, s);
    double worst = std::numeric_limits<double>::infinity();
    for (long i = 0; i < cfg.verify_samples; ++i) {
      const QTensor q = random_s0(rng, 2.0);
      const GradQ p = random_gradq(rng);
      worst = std::min(worst, elastic_fE2(q, p, L, s).total - 0.5 * a2 * norm2(p));
    }
    ck.at_least("f_E2 - (alpha/2)|p|^2 on random (Q, p)", worst, -1e-12);
  }

  // Bulk Hessian on S_*: rotations give a 2-dim kernel; the normal block is bounded below.
  const BulkParams& bp = cfg.bulk;
  const double normal_bound = std::min(s * bp.b, 2 * bp.a + s * bp.b / 3);
  int kernel_bad = 0;
  double worst_normal = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 20; ++i) {
    const Eigen::SelfAdjointEigenSolver<Mat5> es(bulk_hessian(from_director(random_unit(rng), s), bp));
    const Vec5 ev = es.eigenvalues();
    kernel_bad += !(std::abs(ev(0)) < 1e-9 && std::abs(ev(1)) < 1e-9);
    worst_normal = std::min(worst_normal, ev(2));
  }
  ck.at_most("bulk Hessian kernel on S_* is two-dimensional (violations)", kernel_bad, 0);
  ck.at_least("bulk Hessian normal eigenvalues minus min{s b, 2a + s b/3}", worst_normal - normal_bound, -1e-9);
}

void grid_suite(const ExperimentConfig& cfg, Checker& ck, Rng& rng) {
  ck.suite("grid");
  const GridSpec& g = cfg.grid;
  const auto& B = s0_basis();
  QField lin(g);
  for (long n = 0; n < g.num_nodes(); ++n) {
    const Vec3 x = g.position(n);
    lin.values[n] = B[0] + x(0) * B[1] + x(1) * B[2] + x(2) * B[3];
  }
  double worst = 0;
  for (long n = 0; n < g.num_nodes(); ++n) {
    const GradQ p = fd_gradient(lin, n);
    worst = std::max({worst, (p[0] - B[1]).norm(), (p[1] - B[2]).norm(), (p[2] - B[3]).norm()});
  }
  ck.at_most("finite differences exact on linear fields", worst, 1e-11);

  EnergyModel m;
  m.density = cfg.solve.density;
  m.L = check_er1(cfg.L, cfg.bulk.s_plus) ? cfg.L : ElasticConstants{1, 0, 0, 0};
  m.bp = cfg.bulk;
  m.L_param = cfg.solve.L_param;
  m.M = cfg.solve.M_cutoff;
  try {
    m.validate();
  } catch (const precondition_error&) {
    m.density = Density::modified;
  }
  QField f = make_boundary(cfg);
  InitPolicy noisy = cfg.init;
  noisy.noise = 0.3;
  initialize_interior(f, cfg.bulk.s_plus, noisy);
  const std::vector<Mat3> grad = discrete_energy_gradient(f, m);
  std::uniform_int_distribution<long> pick(0, g.num_nodes() - 1);
  double worst_rel = 0;
  for (int checked = 0; checked < 20;) {
    const long n = pick(rng);
    if (f.boundary[n]) continue;
    ++checked;
    for (int b = 0; b < 5; ++b) {
      QField fp = f, fm = f;
      fp.values[n] += 1e-5 * B[b];
      fm.values[n] -= 1e-5 * B[b];
      const double fd = (total_energy(fp, m) - total_energy(fm, m)) / 2e-5;
      const double an = (grad[n].array() * B[b].array()).sum();
      worst_rel = std::max(worst_rel, std::abs(fd - an) / std::max(std::abs(an), grad[n].norm()));
    }
  }
  ck.at_most("energy gradient vs central differences at 20 random nodes", worst_rel, 1e-6);
}

void solver_suite(const ExperimentConfig& cfg, Checker& ck) {
  ck.suite("solver");
  const double s = cfg.bulk.s_plus;
  ExperimentConfig small = cfg;
  small.grid = cube_grid(7, 0.5 * cfg.grid.h * (cfg.grid.dims[0] - 1));
  EnergyModel m = model_from(check_er1(cfg.L, s) ? cfg.L : ElasticConstants{1, 0, 0, 0}, cfg.bulk, cfg.solve);
  if (cfg.solve.density != Density::modified && cfg.solve.density != Density::fE2) m.density = Density::modified;
  QField f = make_boundary(small);
  initialize_interior(f, s, cfg.init);
  SolveConfig sc = cfg.solve;
  sc.max_iters = std::min(sc.max_iters, 5000);
  const auto [q, rep] = minimize(f, m, sc);
  bool mono = true;
  for (std::size_t i = 1; i < rep.energy_trace.size(); ++i) mono = mono && rep.energy_trace[i] <= rep.energy_trace[i - 1];
  ck.truth("energy trace non-increasing", mono);
  ck.truth("descent converged to grad_tol", rep.converged);
  ck.truth("max|Q| <= M + 1 at every iterate", max_norm_monitor(rep, sc.M_cutoff));

  EnergyModel one = m;
  one.L = {1, 0, 0, 0};
  const auto general = el_residual_modified_nodes(q, one);
  const auto simple = el_residual_one_constant_nodes(q, 1.0, cfg.bulk, sc.L_param);
  double worst = 0;
  for (std::size_t n = 0; n < general.size(); ++n) worst = std::max(worst, (general[n] - simple[n]).norm());
  ck.at_most("one-constant residual: general path vs explicit path", worst, 1e-12);

  const QField c = constant_field(small.grid, from_director(Vec3(0, 0, 1), s));
  ck.at_most("modified residual of a constant S_* field", el_residual_modified(c, m), 1e-10);
  ck.at_most("constrained residual of a constant S_* field", el_residual_constrained(c, {1, 0, 0, 0}, s), 1e-10);
}

void falsifier_suite(const ExperimentConfig& cfg, Checker& ck) {
  ck.suite("falsifier");
  const double s = cfg.bulk.s_plus;
  const ElasticConstants& L = cfg.L;
  const long budget = std::min<long>(cfg.falsify_budget, 100000);
  const FalsifyResult r = coercivity_falsify(L, s, budget, cfg.seed);
  if (L.L4 > 0 && !check_L_cond(L, s)) ck.truth("witness found for constants failing the L-conditions", r.witness.has_value());
  else if (L.L4 >= 0 && check_coercivity_iff(L, s)) ck.truth("no witness for coercive constants", !r.witness);
  else ck.truth("falsifier ran", true);
}

void write_sweep_csv(const SweepResult& r, const std::string& path) {
  std::ofstream out(path);
  out << std::setprecision(17);
  out << "L_param,iterations,converged,energy,penalty,dist_Sstar,w12_to_final,max_q,monitor,flag\n";
  for (const SweepRow& row : r.rows)
    out << row.L_param << ',' << row.iterations << ',' << row.converged << ',' << row.energy << ',' << row.penalty
        << ',' << row.dist_Sstar << ',' << row.w12_to_final << ',' << row.max_q << ',' << row.monitor << ','
        << (row.converged ? "" : "not_converged") << '\n';
}

} // namespace

void write_checks_csv(const std::vector<CheckRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << std::setprecision(17);
  out << "suite,check,value,threshold,pass,informational\n";
  for (const CheckRow& r : rows)
    out << r.suite << ",\"" << r.check << "\"," << r.value << ',' << r.threshold << ',' << (r.pass ? 1 : 0) << ','
        << (r.informational ? 1 : 0) << '\n';
}

ExperimentResult run_verify(const ExperimentConfig& cfg) {
  Rng rng(cfg.seed);
  Checker ck("tensor");
  tensor_suite(cfg, ck, rng);
  constants_suite(cfg, ck, rng);
  density_suite(cfg, ck, rng);
  grid_suite(cfg, ck, rng);
  solver_suite(cfg, ck);
  falsifier_suite(cfg, ck);
  ExperimentResult res;
  res.checks = std::move(ck.rows);
  res.ok = all_pass(res.checks);
  res.summary = "verify\n" + table(res.checks);
  return res;
}

SweepResult sweep_L(const ExperimentConfig& cfg) {
  cfg.validate();
  const double s = cfg.bulk.s_plus;
  SweepResult out;
  QField start = make_boundary(cfg);
  initialize_interior(start, s, cfg.init);
  const QField initial = start;
  for (double Lp : cfg.L_sweep) {
    SolveConfig sc = cfg.solve;
    sc.L_param = Lp;
    const EnergyModel m = model_from(cfg.L, cfg.bulk, sc);
    auto [q, rep] = minimize(cfg.warm_start ? start : initial, m, sc);
    SweepRow row;
    row.L_param = Lp;
    row.iterations = rep.iterations;
    row.converged = rep.converged;
    row.energy = rep.final_energy;
    row.penalty = penalty_integral(q, m);
    row.dist_Sstar = dist_to_Sstar_L2(q, s);
    row.max_q = max_q_norm(q);
    row.monitor = max_norm_monitor(rep, sc.M_cutoff);
    row.message = rep.message;
    out.rows.push_back(row);
    out.reports.push_back(rep);
    out.fields.push_back(q);
    start = std::move(q);
  }
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    out.rows[i].w12_to_final = w12_distance(out.fields[i], out.fields.back());
    out.monitor_ok = out.monitor_ok && out.rows[i].monitor;
    if (i == 0) continue;
    out.dist_monotone = out.dist_monotone && out.rows[i].dist_Sstar <= (1 + kSweepSlack) * out.rows[i - 1].dist_Sstar;
    out.penalty_monotone = out.penalty_monotone && out.rows[i].penalty <= (1 + kSweepSlack) * out.rows[i - 1].penalty;
  }
  QField projected = out.fields.back();
  for (auto& v : projected.values) v = project_uniaxial(v, s).q;
  out.qh_residual_final = qh_residual(projected, s);
  return out;
}

ExperimentResult run_sweep_L(const ExperimentConfig& cfg) {
  const SweepResult r = sweep_L(cfg);
  ensure_dir(cfg.output_dir + "/fields");
  for (std::size_t i = 0; i < r.fields.size(); ++i) {
    std::ostringstream name;
    name << cfg.output_dir << "/fields/sweep_" << std::setw(2) << std::setfill('0') << i << ".vtk";
    write_vtk(r.fields[i], name.str(), cfg.bulk.s_plus, "L_param " + fmt(r.rows[i].L_param));
  }
  write_sweep_csv(r, cfg.output_dir + "/sweep.csv");
  Checker ck("sweep");
  ck.truth("dist to S_* decreasing across the sweep (5% slack per step)", r.dist_monotone);
  ck.truth("penalty (1/L) int f_B~ decreasing across the sweep (5% slack per step)", r.penalty_monotone);
  ck.truth("max|Q| <= M + 1 at every iterate of every run", r.monitor_ok);
  ExperimentResult res;
  res.checks = ck.rows;
  res.ok = all_pass(res.checks);
  std::ostringstream o;
  o << std::setprecision(6) << "sweep-L\n";
  for (const SweepRow& row : r.rows)
    o << "L " << row.L_param << ": iterations " << row.iterations << (row.converged ? "" : " (not converged)")
      << ", energy " << row.energy << ", penalty " << row.penalty << ", dist " << row.dist_Sstar << ", w12 to final "
      << row.w12_to_final << ", max|Q| " << row.max_q << '\n';
  o << "qh residual of the projected final field " << r.qh_residual_final << '\n' << table(res.checks);
  res.summary = o.str();
  return res;
}

ExperimentResult run_minimize(const ExperimentConfig& cfg) {
  cfg.validate();
  QField f = make_boundary(cfg);
  initialize_interior(f, cfg.bulk.s_plus, cfg.init);
  const EnergyModel m = model_from(cfg.L, cfg.bulk, cfg.solve);
  const auto [q, rep] = minimize(f, m, cfg.solve);
  ensure_dir(cfg.output_dir + "/fields");
  write_report_csv(rep, cfg.output_dir + "/iterations.csv");
  write_vtk(q, cfg.output_dir + "/fields/final.vtk", cfg.bulk.s_plus, "minimizer");
  write_node_csv(q, cfg.output_dir + "/fields/final_nodes.csv", m);
  Checker ck("minimize");
  ck.truth("converged (" + rep.message + ")", rep.converged);
  ck.truth("max|Q| <= M + 1 at every iterate", max_norm_monitor(rep, cfg.solve.M_cutoff));
  Checker info("minimize");
  info.at_least("modified residual", el_residual_modified(q, m), 0.0);
  QField projected = q;
  for (auto& v : projected.values) v = project_uniaxial(v, cfg.bulk.s_plus).q;
  if (check_er1(cfg.L, cfg.bulk.s_plus))
    info.at_least("constrained weak residual of the projected field",
                  el_residual_constrained(projected, cfg.L, cfg.bulk.s_plus, cfg.constrained_form), 0.0);
  info.inform();
  ck.rows.insert(ck.rows.end(), info.rows.begin(), info.rows.end());
  ExperimentResult res;
  res.checks = ck.rows;
  res.ok = all_pass(res.checks);
  std::ostringstream o;
  o << std::setprecision(10) << "minimize\niterations " << rep.iterations << "\nenergy " << rep.final_energy
    << "\ngrad norm " << rep.final_grad_norm << "\ndist to S_* " << dist_to_Sstar_L2(q, cfg.bulk.s_plus) << '\n'
    << table(res.checks);
  res.summary = o.str();
  return res;
}

ExperimentResult run_falsify(const ExperimentConfig& cfg) {
  cfg.validate();
  const double s = cfg.bulk.s_plus;
  const FalsifyResult r = coercivity_falsify(cfg.L, s, cfg.falsify_budget, cfg.seed);
  Checker ck("falsify");
  ck.clause_set("L-conditions", L_cond_clauses(cfg.L, s));
  if (cfg.L.L4 >= 0) ck.clause_set("coercivity", coercivity_iff_clauses(cfg.L, s));
  ck.at_least("evaluations used", static_cast<double>(r.evaluations), 0.0);
  ck.inform();
  // A witness contradicts a passing coercivity test.
  const bool coercive = cfg.L.L4 >= 0 && check_coercivity_iff(cfg.L, s);
  ck.suite("falsify");
  ck.truth("witness and coercivity test agree", !(coercive && r.witness));
  ExperimentResult res;
  res.checks = ck.rows;
  res.ok = all_pass(res.checks);
  std::ostringstream o;
  o << std::setprecision(17) << "falsify\n";
  if (r.witness)
    o << "witness: density " << r.witness->density << " at scale t = " << r.witness->t << " after "
      << r.witness->evaluations << " evaluations\n";
  else
    o << "no witness within " << r.evaluations << " evaluations\n";
  o << table(res.checks);
  res.summary = o.str();
  return res;
}

ExperimentResult run_convert(const ExperimentConfig& cfg) {
  cfg.validate();
  const double s = cfg.bulk.s_plus;
  FrankConstants k;
  ElasticConstants L;
  double round_trip = 0;
  std::ostringstream o;
  o << std::setprecision(17) << "convert (s_+ = " << s << ")\n";
  if (cfg.frank) {
    k = *cfg.frank;
    L = elastic_from_frank(k, s);
    const FrankConstants kb = frank_from_elastic(L, s);
    round_trip = std::max({rel_diff(kb.k1, k.k1), rel_diff(kb.k2, k.k2), rel_diff(kb.k3, k.k3), rel_diff(kb.k4, k.k4)});
    o << "k = (" << k.k1 << ", " << k.k2 << ", " << k.k3 << ", " << k.k4 << ") -> L = (" << L.L1 << ", " << L.L2
      << ", " << L.L3 << ", " << L.L4 << ")\n";
  } else {
    L = cfg.L;
    k = frank_from_elastic(L, s);
    const ElasticConstants lb = elastic_from_frank(k, s);
    round_trip = std::max({rel_diff(lb.L1, L.L1), rel_diff(lb.L2, L.L2), rel_diff(lb.L3, L.L3), rel_diff(lb.L4, L.L4)});
    o << "L = (" << L.L1 << ", " << L.L2 << ", " << L.L3 << ", " << L.L4 << ") -> k = (" << k.k1 << ", " << k.k2
      << ", " << k.k3 << ", " << k.k4 << ")\n";
  }
  Checker ck("convert");
  ck.at_most("round trip", round_trip, 1e-12);
  Checker pred("predicates");
  pred.clause_set("L-conditions", L_cond_clauses(L, s));
  if (L.L4 >= 0) pred.clause_set("coercivity", coercivity_iff_clauses(L, s));
  pred.clause_set("Er1", er1_clauses(L, s));
  pred.clause_set("Ericksen", ericksen_clauses(k));
  pred.inform();
  ExperimentResult res;
  res.checks = ck.rows;
  res.ok = all_pass(res.checks);
  res.checks.insert(res.checks.end(), pred.rows.begin(), pred.rows.end());
  o << "alpha " << alpha(L, s) << ", sharp alpha " << alpha_e2(L, s) << ", bar alpha " << bar_alpha(L, s)
    << ", tilde alpha " << tilde_alpha(k) << '\n'
    << table(res.checks);
  res.summary = o.str();
  return res;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult res;
  switch (cfg.command) {
  case Command::verify: cfg.validate(); res = run_verify(cfg); break;
  case Command::minimize: res = run_minimize(cfg); break;
  case Command::sweep_L: res = run_sweep_L(cfg); break;
  case Command::falsify: res = run_falsify(cfg); break;
  case Command::convert: res = run_convert(cfg); break;
  }
  ensure_dir(cfg.output_dir);
  write_checks_csv(res.checks, cfg.output_dir + "/report.csv");
  std::ofstream(cfg.output_dir + "/summary.txt") << res.summary << (res.ok ? "status: all assertions passed\n"
                                                                           : "status: assertion failures\n");
  return res;
}

} // namespace lcq
