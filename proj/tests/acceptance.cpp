// Acceptance criteria. Usage: acceptance [1..9 ...]; no argument runs all.
// Prints one PASS/FAIL line per criterion; exit status 0 iff all selected pass.

#include "lcq/experiments.hpp"
#include "lcq/sampling.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>

using namespace lcq;

namespace {

// Pinned tolerances.
constexpr double kIdentityTol = 1e-12;
constexpr double kStationarityTol = 1e-10;
constexpr double kDensityRelTol = 1e-9;
constexpr double kBridgeTol = 1e-12;
constexpr double kHessianSlack = 1e-9;
constexpr double kDiagonalTol = 1e-12;
constexpr double kWitnessLevel = -1e6;
constexpr long kFalsifyBudget = 100000;
constexpr double kCoerciveRelTol = 1e-12;
constexpr double kGradientRelTol = 1e-6;
constexpr double kLinearExactTol = 1e-11;
constexpr double kOrderMin = 1.9;
constexpr double kRefineRatioMin = 2.0;
constexpr double kPathAgreeTol = 1e-12;

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double rel(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

bool report(int id, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  return pass;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

BulkParams random_bulk(Rng& rng) {
  std::uniform_real_distribution<double> u(0.1, 3.0);
  const double a = u(rng), b = u(rng), c = u(rng);
  return BulkParams(a, b, c);
}

// 1. Algebraic identities.
bool criterion1() {
  const auto t0 = Clock::now();
  Rng rng(101);
  double ident = 0, norm = 0;
  for (int i = 0; i < 10000; ++i) {
    const BulkParams bp = random_bulk(rng);
    const QTensor q = from_director(random_unit(rng), bp.s_plus);
    ident = std::max(ident, uniaxial_identity_residual(q, bp.s_plus));
    norm = std::max(norm, std::abs(q.squaredNorm() - 2.0 / 3.0 * bp.s_plus * bp.s_plus));
  }
  double stat = 0;
  for (int i = 0; i < 100; ++i) {
    const BulkParams bp = random_bulk(rng);
    stat = std::max(stat, std::abs(2 * bp.c * bp.s_plus * bp.s_plus - bp.b * bp.s_plus - 3 * bp.a));
  }
  const double t = seconds_since(t0);
  return report(1, ident <= kIdentityTol && norm <= kIdentityTol && stat <= kStationarityTol && t < 1.0,
                fmt("identity residual %.2e, | |Q|^2 - 2s^2/3 | %.2e, stationarity %.2e, %.3f s", ident, norm, stat, t));
}

// 2. Density equivalence on S_*.
bool criterion2() {
  const auto t0 = Clock::now();
  Rng rng(202);
  double e1 = 0, e2 = 0, ew = 0;
  for (int set = 0; set < 10; ++set) {
    const BulkParams bp = random_bulk(rng);
    const double s = bp.s_plus;
    const ElasticConstants L = random_elastic(rng, s, [s](const ElasticConstants& c) { return check_er1(c, s); });
    const FrankConstants k = frank_from_elastic(L, s);
    for (int i = 0; i < 1000; ++i) {
      const UniaxialSample u = random_uniaxial_sample(rng, s);
      const double fe = elastic_fE(u.q, u.p, L);
      e1 = std::max(e1, rel(elastic_fE1(u.q, u.p, L, s).total, fe));
      e2 = std::max(e2, rel(elastic_fE2(u.q, u.p, L, s).total, fe));
      ew = std::max(ew, rel(oseen_frank_W(u.u, u.g, k), fe));
    }
  }
  const double t = seconds_since(t0);
  return report(2, e1 <= kDensityRelTol && e2 <= kDensityRelTol && ew <= kDensityRelTol && t < 10.0,
                fmt("max rel |f_E1-f_E| %.2e, |f_E2-f_E| %.2e, |W-f_E| %.2e, %.3f s", e1, e2, ew, t));
}

// 3. Bridge round trip and predicate equivalences.
bool criterion3() {
  const auto t0 = Clock::now();
  Rng rng(303);
  auto any = [](const ElasticConstants&) { return true; };
  double trip = 0;
  long mismatch = 0, alpha_bad = 0, tau_bad = 0, er1_count = 0;
  for (int i = 0; i < 10000; ++i) {
    const BulkParams bp = random_bulk(rng);
    const double s = bp.s_plus;
    const ElasticConstants L = random_elastic(rng, s, any);
    const FrankConstants k = frank_from_elastic(L, s);
    const ElasticConstants b = elastic_from_frank(k, s);
    const double scale = std::max({std::abs(L.L1), std::abs(L.L2), std::abs(L.L3), std::abs(L.L4)});
    trip = std::max(trip, std::max({std::abs(b.L1 - L.L1), std::abs(b.L2 - L.L2), std::abs(b.L3 - L.L3),
                                    std::abs(b.L4 - L.L4)}) / scale);
    const bool er1 = check_er1(L, s), eri = check_ericksen(k);
    er1_count += er1;
    mismatch += er1 != eri;
    if (er1 && !(alpha(L, s) > 0)) ++alpha_bad;
    if (eri && !(tilde_alpha(k) > 0)) ++tau_bad;
  }
  const double t = seconds_since(t0);
  return report(3, trip <= kBridgeTol && mismatch == 0 && alpha_bad == 0 && tau_bad == 0 && t < 1.0,
                fmt("round trip %.2e, Er1/Ericksen mismatches %ld (Er1 held in %ld of 10000), alpha<=0 %ld, "
                    "tilde alpha<=0 %ld, %.3f s",
                    trip, mismatch, er1_count, alpha_bad, tau_bad, t));
}

// 4. Bulk Hessian lower bound on S_* and the two stated diagonal entries.
bool criterion4() {
  Rng rng(404);
  double worst_gap = std::numeric_limits<double>::infinity(), worst_eig = 0;
  for (int set = 0; set < 10; ++set) {
    const BulkParams bp = random_bulk(rng);
    const double bound = std::min(11.0 / 9.0 * bp.s_plus * bp.b, bp.a);
    for (int i = 0; i < 100; ++i) {
      const Eigen::SelfAdjointEigenSolver<Mat5> es(bulk_hessian(from_director(random_unit(rng), bp.s_plus), bp));
      const double gap = es.eigenvalues()(0) - bound;
      if (gap < worst_gap) {
        worst_gap = gap;
        worst_eig = es.eigenvalues()(0);
      }
    }
  }
  double diag_err = 0, e00 = 0, e88 = 0;
  for (int set = 0; set < 10; ++set) {
    const BulkParams bp = random_bulk(rng);
    const double s = bp.s_plus;
    const auto H = bulk_hessian_full(from_director(Vec3(0, 0, 1), s), bp);
    const double d00 = bp.a / 3 + 4 * s * bp.b / 3, d88 = 4 * bp.a / 3 - s * bp.b / 3;
    if (set == 0) {
      e00 = H(0, 0) - d00;
      e88 = H(8, 8) - d88;
    }
    diag_err = std::max({diag_err, std::abs(H(0, 0) - d00), std::abs(H(8, 8) - d88)});
  }
  return report(4, worst_gap >= -kHessianSlack && diag_err <= kDiagonalTol,
                fmt("min eigenvalue minus min{11 s b/9, a}: %.3e (eigenvalue %.2e, rotation kernel); "
                    "diagonal entries off by %.3e (first set: %.3e, %.3e)",
                    worst_gap, worst_eig, diag_err, e00, e88));
}

// 5. Coercivity dichotomy.
bool criterion5() {
  const auto t0 = Clock::now();
  Rng rng(505);
  const double s = BulkParams(1, 1, 1).s_plus;
  int found = 0;
  double weakest_witness = -std::numeric_limits<double>::infinity();
  for (int set = 0; set < 20; ++set) {
    const ElasticConstants L =
        random_elastic(rng, s, [s](const ElasticConstants& c) { return c.L4 > 0 && !check_L_cond(c, s); });
    const FalsifyResult r = coercivity_falsify(L, s, kFalsifyBudget, 1000 + set);
    if (r.witness && r.witness->density < kWitnessLevel) {
      ++found;
      weakest_witness = std::max(weakest_witness, r.witness->density);
    }
  }
  long violations = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (int set = 0; set < 20; ++set) {
    const ElasticConstants L = random_elastic(rng, s, [s](const ElasticConstants& c) { return check_er1(c, s); });
    const double half_alpha = 0.5 * alpha_e2(L, s);
    for (long i = 0; i < 100000; ++i) {
      const QTensor q = random_s0(rng, 2.0);
      const GradQ p = random_gradq(rng);
      const double f = elastic_fE2(q, p, L, s).total, lower = half_alpha * norm2(p);
      const double gap = (f - lower) / std::max(std::abs(f), lower);
      worst = std::min(worst, gap);
      violations += gap < -kCoerciveRelTol;
    }
  }
  const double t = seconds_since(t0);
  return report(5, found == 20 && violations == 0 && t < 30.0,
                fmt("witnesses below -1e6 for %d/20 sets (weakest %.3e); f_E2 >= (alpha/2)|p|^2 violated %ld times "
                    "in 2e6 samples (worst relative gap %.2e); %.2f s",
                    found, weakest_witness, violations, worst, t));
}

// 6. Discrete calculus.
bool criterion6() {
  Rng rng(606);
  const BulkParams bp(1, 1, 1);
  const auto& B = s0_basis();
  const GridSpec g = cube_grid(9);

  QField f = hedgehog_boundary(g, bp.s_plus);
  InitPolicy noisy;
  noisy.noise = 0.3;
  noisy.seed = 606;
  initialize_interior(f, bp.s_plus, noisy);
  double grad_rel = 0;
  for (Density d : {Density::modified, Density::fE2}) {
    EnergyModel m;
    m.density = d;
    m.L = {1, 0.5, -0.2, 0.3};
    m.bp = bp;
    m.L_param = 0.1;
    const std::vector<Mat3> an = discrete_energy_gradient(f, m);
    std::uniform_int_distribution<long> pick(0, g.num_nodes() - 1);
    for (int checked = 0; checked < 20;) {
      const long n = pick(rng);
      if (g.on_boundary(n)) continue;
      ++checked;
      for (int b = 0; b < 5; ++b) {
        QField fp = f, fm = f;
        fp.values[n] += 1e-5 * B[b];
        fm.values[n] -= 1e-5 * B[b];
        const double fd = (total_energy(fp, m) - total_energy(fm, m)) / 2e-5;
        const double a = (an[n].array() * B[b].array()).sum();
        grad_rel = std::max(grad_rel, std::abs(fd - a) / std::max(std::abs(a), an[n].norm()));
      }
    }
  }

  QField lin(g);
  for (long n = 0; n < g.num_nodes(); ++n) {
    const Vec3 x = g.position(n);
    lin.values[n] = B[0] + 0.7 * x(0) * B[1] - 1.3 * x(1) * B[2] + 2.1 * x(2) * B[4];
  }
  double lin_err = 0;
  for (long n = 0; n < g.num_nodes(); ++n) {
    const GradQ p = fd_gradient(lin, n);
    lin_err = std::max({lin_err, (p[0] - 0.7 * B[1]).norm(), (p[1] + 1.3 * B[2]).norm(), (p[2] - 2.1 * B[4]).norm()});
  }

  // Manufactured smooth field: stencil errors at fixed points and the energy quadrature.
  auto field = [&](const Vec3& x) {
    return Mat3(std::sin(x(0)) * B[0] + std::cos(x(1) + 0.3 * x(2)) * B[1] + x(0) * x(2) * B[3] +
                std::exp(0.5 * x(1)) * B[4]);
  };
  auto exact_grad = [&](const Vec3& x) {
    const double a = x(1) + 0.3 * x(2);
    GradQ p;
    p[0] = std::cos(x(0)) * B[0] + x(2) * B[3];
    p[1] = -std::sin(a) * B[1] + 0.5 * std::exp(0.5 * x(1)) * B[4];
    p[2] = -0.3 * std::sin(a) * B[1] + x(0) * B[3];
    return p;
  };
  EnergyModel quad;
  quad.density = Density::fE;
  quad.include_bulk = false;
  double err_in[3], err_edge[3], energy[3];
  int i = 0;
  for (int n : {9, 17, 33}) {
    const GridSpec gs = cube_grid(n);
    QField m(gs);
    for (long k = 0; k < gs.num_nodes(); ++k) m.values[k] = field(gs.position(k));
    const int q = (n - 1) / 4;
    auto gerr = [&](long node) {
      const GradQ p = fd_gradient(m, node), e = exact_grad(gs.position(node));
      return std::sqrt(norm2({p[0] - e[0], p[1] - e[1], p[2] - e[2]}));
    };
    err_in[i] = gerr(gs.index(q, 3 * q, q));
    err_edge[i] = gerr(gs.index(0, 2 * q, 3 * q));
    energy[i] = total_energy(m, quad);
    ++i;
  }
  const double o_in = std::log2(err_in[1] / err_in[2]), o_edge = std::log2(err_edge[1] / err_edge[2]);
  const double o_energy = std::log2(std::abs(energy[0] - energy[1]) / std::abs(energy[1] - energy[2]));
  return report(6, grad_rel <= kGradientRelTol && lin_err <= kLinearExactTol && std::min({o_in, o_edge, o_energy}) >= kOrderMin,
                fmt("gradient vs FD rel %.2e; linear-field stencil error %.2e; orders: interior %.3f, one-sided %.3f, "
                    "energy %.3f",
                    grad_rel, lin_err, o_in, o_edge, o_energy));
}

// 7. L -> 0 sweep.
bool criterion7() {
  const auto t0 = Clock::now();
  bool all = true;
  std::string detail;
  const ElasticConstants sets[2] = {{1, 0, 0, 0}, {1, 0.5, -0.2, 0.3}};
  const char* names[2] = {"one-constant", "general (1, 0.5, -0.2, 0.3)"};
  for (int k = 0; k < 2; ++k) {
    ExperimentConfig cfg;
    cfg.command = Command::sweep_L;
    cfg.L = sets[k];
    cfg.grid = cube_grid(9);
    cfg.L_sweep = {1e-1, 3e-2, 1e-2, 3e-3};
    const SweepResult r = sweep_L(cfg);
    bool conv = true;
    std::string pen = "penalty", dist = "dist";
    for (const SweepRow& row : r.rows) {
      conv = conv && row.converged;
      pen += fmt(" %.4g", row.penalty);
      dist += fmt(" %.4g", row.dist_Sstar);
    }
    const bool ok = r.dist_monotone && r.penalty_monotone && r.monitor_ok;
    all = all && ok;
    detail += fmt("%s%s: %s [%s], %s [%s], monitor %s, converged %s", k ? "; " : "", names[k], dist.c_str(),
                  r.dist_monotone ? "ok" : "NOT monotone", pen.c_str(), r.penalty_monotone ? "ok" : "NOT monotone",
                  r.monitor_ok ? "ok" : "violated", conv ? "all" : "not all");
  }
  const double t = seconds_since(t0);
  return report(7, all && t < 300.0, detail + fmt("; %.1f s", t));
}

// 8. Euler-Lagrange consistency under refinement (smooth edge-flat twist boundary).
bool criterion8() {
  const BulkParams bp(1, 1, 1);
  const double s = bp.s_plus, Lp = 0.5;
  const ElasticConstants one{1, 0, 0, 0};
  std::vector<int> ns{9, 17, 33, 65};
  std::vector<double> modified, constrained;
  double path = 0;
  for (int n : ns) {
    const GridSpec g = cube_grid(n);
    QField f = twist_bump_boundary(g, s, 1.0);
    initialize_interior(f, s, InitPolicy{});
    SolveConfig cfg;
    cfg.L_param = Lp;
    cfg.grad_tol = 1e-6; // residuals match a 1e-8 solve to five digits
    cfg.max_iters = 100000;
    const auto [q, rep] = minimize(f, one, bp, cfg);
    if (!rep.converged) return report(8, false, fmt("minimizer at n = %d did not converge: %s", n, rep.message.c_str()));
    const EnergyModel m = model_from(one, bp, cfg);
    const auto general = el_residual_modified_nodes(q, m);
    const auto simple = el_residual_one_constant_nodes(q, 1.0, bp, Lp);
    for (std::size_t i = 0; i < general.size(); ++i) path = std::max(path, (general[i] - simple[i]).norm());
    modified.push_back(interior_l2(q, general));
    if (n == 65) break;

    // Projected limit: nearest S_* field, relaxed among S_*-valued fields.
    DirectorField d = directors_from_qfield(q);
    for (long i = 0; i < g.num_nodes(); ++i)
      if (g.on_boundary(i)) d.values[i] = project_uniaxial(f.values[i], s).director;
    SolveConfig dc;
    dc.grad_tol = 1e-9;
    dc.max_iters = 100000;
    const auto [u, drep] = minimize_on_Sstar(d, frank_from_elastic(one, s), dc);
    if (!drep.converged) return report(8, false, fmt("director relaxation at n = %d did not converge", n));
    constrained.push_back(el_residual_constrained(qfield_from_directors(u, s, q.boundary), one, s));
  }
  std::string mr = "modified residual", cr = "constrained weak residual";
  for (std::size_t i = 0; i < modified.size(); ++i)
    mr += fmt(" n=%d %.4e%s", ns[i], modified[i], i ? fmt(" (x%.2f)", modified[i - 1] / modified[i]).c_str() : "");
  for (std::size_t i = 0; i < constrained.size(); ++i)
    cr += fmt(" n=%d %.4e%s", ns[i], constrained[i],
              i ? fmt(" (x%.2f)", constrained[i - 1] / constrained[i]).c_str() : "");
  // The modified residual is asserted on the finest pair; the constrained one on every pair.
  const double finest = modified[modified.size() - 2] / modified.back();
  bool cons = true;
  for (std::size_t i = 1; i < constrained.size(); ++i) cons = cons && constrained[i - 1] / constrained[i] >= kRefineRatioMin;
  return report(8, finest >= kRefineRatioMin && cons && path <= kPathAgreeTol,
                mr + "; " + cr + fmt("; general vs explicit path %.2e", path));
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// 9. Determinism of verify + sweep outputs.
bool criterion9() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "lcq_acceptance_c9";
  fs::remove_all(root);
  std::vector<std::string> files;
  std::vector<std::string> out[2];
  for (int run = 0; run < 2; ++run) {
    for (Command c : {Command::verify, Command::sweep_L}) {
      ExperimentConfig cfg;
      cfg.command = c;
      cfg.seed = 7;
      cfg.solve.seed = 7;
      cfg.init.seed = 7;
      cfg.output_dir = (root / std::to_string(run) / command_name(c)).string();
      run_experiment(cfg);
    }
    for (const auto& e : fs::recursive_directory_iterator(root / std::to_string(run))) {
      if (!e.is_regular_file()) continue;
      if (run == 0) files.push_back(fs::relative(e.path(), root / "0").string());
    }
  }
  std::sort(files.begin(), files.end());
  long csv = 0, differ = 0;
  for (const std::string& f : files) {
    csv += f.ends_with(".csv");
    differ += slurp((root / "0" / f).string()) != slurp((root / "1" / f).string());
  }
  fs::remove_all(root);
  return report(9, csv >= 3 && differ == 0,
                fmt("%zu output files (%ld CSV) compared byte for byte, %ld differ", files.size(), csv, differ));
}

} // namespace

int main(int argc, char** argv) {
  const std::function<bool()> all[] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                       criterion6, criterion7, criterion8, criterion9};
  std::vector<int> pick;
  for (int i = 1; i < argc; ++i) pick.push_back(std::stoi(argv[i]));
  if (pick.empty())
    for (int i = 1; i <= 9; ++i) pick.push_back(i);
  bool ok = true;
  for (int id : pick) {
    if (id < 1 || id > 9) {
      std::fprintf(stderr, "unknown criterion %d\n", id);
      return 2;
    }
    try {
      ok = all[id - 1]() && ok;
    } catch (const std::exception& e) {
      ok = report(id, false, std::string("exception: ") + e.what()) && ok;
    }
  }
  return ok ? 0 : 1;
}
