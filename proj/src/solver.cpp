#include "lcq/solver.hpp"

#include "lcq/sampling.hpp"

#include <algorithm>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lcq {

namespace {

constexpr double kStepFloor = 1e-16;
// Consecutive steps accepted only at roundoff level before giving up.
constexpr int kMaxStalls = 50;

double ddot(const Mat3& a, const Mat3& b) { return (a.array() * b.array()).sum(); }
Mat3 sym(const Mat3& m) { return 0.5 * (m + m.transpose()); }

// Visits every (cell, corner) pair in a fixed order. fn(node, lo[3], hi[3]) gets
// the corner node and, per axis, the two nodes of the cell edge through it.
template <class Fn>
void for_each_corner(const GridSpec& g, Fn&& fn) {
  for (int k = 0; k + 1 < g.dims[2]; ++k)
    for (int j = 0; j + 1 < g.dims[1]; ++j)
      for (int i = 0; i + 1 < g.dims[0]; ++i)
        for (int corner = 0; corner < 8; ++corner) {
          const int c[3] = {i + (corner & 1), j + ((corner >> 1) & 1), k + ((corner >> 2) & 1)};
          const int base[3] = {i, j, k};
          long lo[3], hi[3];
          for (int a = 0; a < 3; ++a) {
            int l[3] = {c[0], c[1], c[2]}, u[3] = {c[0], c[1], c[2]};
            l[a] = base[a];
            u[a] = base[a] + 1;
            lo[a] = g.index(l[0], l[1], l[2]);
            hi[a] = g.index(u[0], u[1], u[2]);
          }
          fn(g.index(c[0], c[1], c[2]), lo, hi);
        }
}

bool interior_node(const QField& f, long n) { return !f.boundary[n]; }

} // namespace

void SolveConfig::validate() const {
  if (max_iters < 0) throw precondition_error("SolveConfig: max_iters must be nonnegative");
  if (!(step0 > 0.0)) throw precondition_error("SolveConfig: step0 must be positive");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw precondition_error("SolveConfig: armijo_c must lie in (0,1)");
  if (!(backtrack > 0.0 && backtrack < 1.0)) throw precondition_error("SolveConfig: backtrack must lie in (0,1)");
  if (!(grad_tol >= 0.0)) throw precondition_error("SolveConfig: grad_tol must be nonnegative");
  if (!(L_param > 0.0)) throw precondition_error("SolveConfig: L_param must be positive");
  if (!(M_cutoff > 0.0)) throw precondition_error("SolveConfig: M_cutoff must be positive");
}

EnergyModel model_from(const ElasticConstants& L, const BulkParams& bp, const SolveConfig& cfg) {
  EnergyModel m;
  m.density = cfg.density;
  m.L = L;
  m.bp = bp;
  m.L_param = cfg.L_param;
  m.M = cfg.M_cutoff;
  return m;
}

std::vector<Mat3> discrete_energy_gradient(const QField& field, const EnergyModel& model) {
  model.validate();
  const GridSpec& g = field.spec;
  const DensityParams prm = model.density_params();
  const double w = g.h * g.h * g.h / 8.0, wh = w / g.h;
  std::vector<Mat3> grad(g.num_nodes(), Mat3::Zero());
  for_each_corner(g, [&](long n, const long* lo, const long* hi) {
    GradQ p;
    for (int a = 0; a < 3; ++a) p[a] = (field.values[hi[a]] - field.values[lo[a]]) / g.h;
    const PointDerivs d = density_derivs(model.density, field.values[n], p, prm);
    grad[n] += w * d.dq;
    for (int a = 0; a < 3; ++a) {
      grad[hi[a]] += wh * d.dp[a];
      grad[lo[a]] -= wh * d.dp[a];
    }
  });
  if (model.include_bulk) {
    const std::vector<double> nw = node_weights(g);
    for (long n = 0; n < g.num_nodes(); ++n)
      grad[n] += (nw[n] / model.L_param) * bulk_gradient(field.values[n], model.bp);
  }
  for (long n = 0; n < g.num_nodes(); ++n)
    grad[n] = interior_node(field, n) ? Mat3(sym_traceless(grad[n])) : Mat3(Mat3::Zero());
  return grad;
}

double gradient_norm(const QField& field, const std::vector<Mat3>& grad) {
  const std::vector<double> nw = node_weights(field.spec);
  double acc = 0.0;
  for (long n = 0; n < field.spec.num_nodes(); ++n)
    if (interior_node(field, n)) acc += grad[n].squaredNorm() / nw[n];
  return std::sqrt(acc);
}

void initialize_interior(QField& field, double s_plus, const InitPolicy& policy) {
  const GridSpec& g = field.spec;
  if (policy.harmonic) {
    // SOR on the 7-point Laplacian, boundary values fixed.
    const int nmax = std::max({g.dims[0], g.dims[1], g.dims[2]});
    const double omega = 2.0 / (1.0 + std::sin(M_PI / (nmax - 1)));
    for (int sweep = 0; sweep < 100000; ++sweep) {
      double change = 0.0;
      for (long n = 0; n < g.num_nodes(); ++n) {
        if (!interior_node(field, n)) continue;
        const auto c = g.coords(n);
        Mat3 acc = Mat3::Zero();
        for (int a = 0; a < 3; ++a) {
          auto cp = c, cm = c;
          ++cp[a];
          --cm[a];
          acc += field.values[g.index(cp[0], cp[1], cp[2])] + field.values[g.index(cm[0], cm[1], cm[2])];
        }
        const Mat3 delta = omega * (acc / 6.0 - field.values[n]);
        field.values[n] += delta;
        change = std::max(change, delta.norm());
      }
      if (change < 1e-13) break;
    }
  }
  if (policy.project)
    for (long n = 0; n < g.num_nodes(); ++n)
      if (interior_node(field, n)) field.values[n] = project_uniaxial(field.values[n], s_plus).q;
  if (policy.noise > 0.0) {
    Rng rng(policy.seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    const auto& basis = s0_basis();
    for (long n = 0; n < g.num_nodes(); ++n) {
      if (!interior_node(field, n)) continue;
      for (int m = 0; m < 5; ++m) field.values[n] += policy.noise * nd(rng) * basis[m];
    }
  }
}

std::pair<QField, SolveReport> minimize(const QField& field, const ElasticConstants& L, const BulkParams& bp,
                                        const SolveConfig& cfg) {
  return minimize(field, model_from(L, bp, cfg), cfg);
}

std::pair<QField, SolveReport> minimize(const QField& start, const EnergyModel& model, const SolveConfig& cfg) {
  cfg.validate();
  model.validate();
  for (long n = 0; n < start.spec.num_nodes(); ++n)
    if (start.boundary[n] && uniaxial_identity_residual(start.values[n], model.bp.s_plus) > 1e-8)
      throw precondition_error("minimize: boundary data must be S_*-valued");

  const GridSpec& g = start.spec;
  const std::vector<double> nw = node_weights(g);
  QField x = start;
  SolveReport rep;

  double E = total_energy(x, model);
  std::vector<Mat3> grad = discrete_energy_gradient(x, model);
  double gn = gradient_norm(x, grad);
  auto record = [&] {
    rep.energy_trace.push_back(E);
    rep.grad_norm_trace.push_back(gn);
    rep.max_Q_norm_trace.push_back(max_q_norm(x));
    rep.penalty_trace.push_back(model.include_bulk ? penalty_integral(x, model) : 0.0);
  };
  record();

  std::vector<Mat3> prev_x, prev_dir;
  double t_prev = cfg.step0;
  rep.message = "max_iters reached";
  int it = 0, stalls = 0;
  for (;; ++it) {
    if (gn < cfg.grad_tol) {
      rep.converged = true;
      rep.message = "grad_tol reached";
      break;
    }
    if (it >= cfg.max_iters) break;

    // Descent direction is the Riesz representative -g/w; its slope is -gn^2.
    std::vector<Mat3> dir(g.num_nodes(), Mat3::Zero());
    for (long n = 0; n < g.num_nodes(); ++n)
      if (interior_node(x, n)) dir[n] = -grad[n] / nw[n];

    // Barzilai-Borwein initial step in the weighted inner product.
    double t = cfg.step0;
    if (it > 0) {
      double ss = 0.0, sy = 0.0;
      for (long n = 0; n < g.num_nodes(); ++n) {
        if (!interior_node(x, n)) continue;
        const Mat3 sn = x.values[n] - prev_x[n];
        const Mat3 yn = prev_dir[n] - dir[n];
        ss += nw[n] * sn.squaredNorm();
        sy += nw[n] * ddot(sn, yn);
      }
      t = (sy > 0.0 && std::isfinite(ss / sy)) ? ss / sy : t_prev;
      t = std::clamp(t, 1e-3 * cfg.step0, 1e6 * cfg.step0);
    }

    const double slope = gn * gn;
    QField trial = x;
    double Et = 0.0;
    bool accepted = false;
    while (t >= kStepFloor) {
      for (long n = 0; n < g.num_nodes(); ++n)
        if (interior_node(x, n)) trial.values[n] = x.values[n] + t * dir[n];
      Et = total_energy(trial, model);
      const double predicted = cfg.armijo_c * t * slope;
      if (std::isfinite(Et) && Et <= E - predicted) {
        accepted = true;
        stalls = 0;
        break;
      }
      if (std::isfinite(Et) && predicted < 1e-14 * std::abs(E) && Et <= E) {
        accepted = true;
        ++stalls;
        break;
      }
      t *= cfg.backtrack;
    }
    if (!accepted) {
      rep.failed = true;
      rep.message = "step underflow";
      break;
    }
    if (stalls >= kMaxStalls) {
      rep.message = "stalled at roundoff level";
      break;
    }
    prev_x = x.values;
    prev_dir = dir;
    t_prev = t;
    x = std::move(trial);
    E = Et;
    grad = discrete_energy_gradient(x, model);
    gn = gradient_norm(x, grad);
    record();
  }
  rep.iterations = it;
  rep.final_energy = E;
  rep.final_grad_norm = gn;
  return {std::move(x), std::move(rep)};
}

// ---------------------------------------------------------------------------
// Residuals

std::vector<Mat3> el_residual_modified_nodes(const QField& field, const EnergyModel& model) {
  model.validate();
  const GridSpec& g = field.spec;
  const DensityParams prm = model.density_params();
  const double c = isotropic_constant(model.density, model.L, model.bp.s_plus);
  const long N = g.num_nodes();

  // Pointwise flux sym0(c p_k + dV/dp_k) at every node, then its central divergence.
  std::array<std::vector<Mat3>, 3> flux;
  std::vector<Mat3> vq(N);
  for (auto& f : flux) f.assign(N, Mat3::Zero());
  for (long n = 0; n < N; ++n) {
    const GradQ p = fd_gradient(field, n);
    const PointDerivs d = remainder_derivs(model.density, field.values[n], p, prm);
    for (int k = 0; k < 3; ++k) flux[k][n] = sym_traceless(c * p[k] + d.dp[k]);
    vq[n] = sym_traceless(d.dq);
  }

  std::vector<Mat3> r(N, Mat3::Zero());
  for (long n = 0; n < N; ++n) {
    if (g.on_boundary(n)) continue;
    Mat3 rn = Mat3::Zero();
    for (int k = 0; k < 3; ++k) rn += fd_gradient_of(g, flux[k], n)[k];
    rn -= vq[n];
    rn -= bulk_gradient(field.values[n], model.bp) / model.L_param;
    r[n] = rn;
  }
  return r;
}

std::vector<Mat3> el_residual_one_constant_nodes(const QField& field, double c, const BulkParams& bp, double L_param) {
  const GridSpec& g = field.spec;
  const long N = g.num_nodes();
  std::array<std::vector<Mat3>, 3> flux;
  for (auto& f : flux) f.assign(N, Mat3::Zero());
  for (long n = 0; n < N; ++n) {
    const GradQ p = fd_gradient(field, n);
    for (int k = 0; k < 3; ++k) flux[k][n] = sym_traceless(c * p[k]);
  }
  std::vector<Mat3> r(N, Mat3::Zero());
  for (long n = 0; n < N; ++n) {
    if (g.on_boundary(n)) continue;
    Mat3 rn = Mat3::Zero();
    for (int k = 0; k < 3; ++k) rn += fd_gradient_of(g, flux[k], n)[k];
    rn -= bulk_gradient(field.values[n], bp) / L_param;
    r[n] = rn;
  }
  return r;
}

double interior_l2(const QField& field, const std::vector<Mat3>& r) {
  const GridSpec& g = field.spec;
  const double h3 = g.h * g.h * g.h;
  double acc = 0.0;
  for (long n = 0; n < g.num_nodes(); ++n)
    if (!g.on_boundary(n)) acc += h3 * r[n].squaredNorm();
  return std::sqrt(acc);
}

double el_residual_modified(const QField& field, const EnergyModel& model) {
  return interior_l2(field, el_residual_modified_nodes(field, model));
}

std::vector<TestTensor> test_bank(const GridSpec& spec) {
  const Vec3 half = 0.5 * spec.h * Vec3(spec.dims[0] - 1, spec.dims[1] - 1, spec.dims[2] - 1);
  const Vec3 center = spec.origin + half;
  const double hw = half.minCoeff();
  std::vector<TestTensor> bank;
  const double offs[3] = {-0.5, 0.0, 0.5};
  for (double oz : offs)
    for (double oy : offs)
      for (double ox : offs)
        for (int m = 0; m < 5; ++m) bank.push_back({center + hw * Vec3(ox, oy, oz), 0.5 * hw, m});
  return bank;
}

double bump(const TestTensor& t, const Vec3& x) {
  const double r2 = (x - t.center).squaredNorm() / (t.radius * t.radius);
  if (r2 >= 1.0) return 0.0;
  const double v = 1.0 - r2;
  return v * v * v;
}

namespace {

void require_uniaxial(const QField& field, double s) {
  for (long n = 0; n < field.spec.num_nodes(); ++n)
    if (uniaxial_identity_residual(field.values[n], s) > 1e-8)
      throw precondition_error("el_residual_constrained: field is not S_*-valued at node " + std::to_string(n));
}

// bar_alpha (-s Lap Q + 2 sum_k p_k p_k - 2 (Q/s + I/3)|p|^2) at an interior node.
Mat3 harmonic_block(const QField& field, long n, double ba, double s) {
  const GradQ p = fd_gradient(field, n);
  Mat3 pp = Mat3::Zero();
  for (int k = 0; k < 3; ++k) pp += p[k] * p[k];
  const Mat3 P = field.values[n] / s + Mat3::Identity() / 3.0;
  return ba * (-s * fd_laplacian_of(field.spec, field.values, n) + 2.0 * pp - 2.0 * norm2(p) * P);
}

} // namespace

std::vector<Mat3> el_constrained_nodes(const QField& field, const ElasticConstants& L, double s,
                                       ConstrainedForm form) {
  require_uniaxial(field, s);
  validate_density(Density::fE1, L, s);
  const GridSpec& g = field.spec;
  const long N = g.num_nodes();
  const double ba = form == ConstrainedForm::bar_alpha ? bar_alpha(L, s) : 1.0, is = 1.0 / s;
  const DensityParams prm{L, s, 10.0};

  // Flux F_k = Ph Vp_k + Vp_k Ph - 2/s (Ph:Vp_k) Ph, Ph = Q + s/3 I, at every node.
  std::array<std::vector<Mat3>, 3> flux;
  for (auto& f : flux) f.assign(N, Mat3::Zero());
  std::vector<Mat3> local(N, Mat3::Zero());
  for (long n = 0; n < N; ++n) {
    const Mat3& q = field.values[n];
    const Mat3 Ph = q + (s / 3.0) * Mat3::Identity();
    const GradQ p = fd_gradient(field, n);
    const PointDerivs d = remainder_derivs(Density::fE1, q, p, prm);
    Mat3 loc = Ph * d.dq + d.dq * Ph - 2.0 * is * ddot(Ph, d.dq) * Ph;
    for (int k = 0; k < 3; ++k) {
      const Mat3& V = d.dp[k];
      flux[k][n] = Ph * V + V * Ph - 2.0 * is * ddot(Ph, V) * Ph;
      loc += p[k] * V + V * p[k] - 2.0 * is * (ddot(V, p[k]) * Ph + ddot(V, Ph) * p[k]);
    }
    local[n] = loc;
  }

  std::vector<Mat3> e(N, Mat3::Zero());
  for (long n = 0; n < N; ++n) {
    if (g.on_boundary(n)) continue;
    Mat3 en = harmonic_block(field, n, ba, s);
    Mat3 vb = local[n];
    for (int k = 0; k < 3; ++k) vb -= fd_gradient_of(g, flux[k], n)[k];
    en += vb;
    e[n] = sym(en);
  }
  return e;
}

std::vector<Mat3> el_constrained_one_constant_nodes(const QField& field, double ba, double s) {
  require_uniaxial(field, s);
  const GridSpec& g = field.spec;
  std::vector<Mat3> e(g.num_nodes(), Mat3::Zero());
  for (long n = 0; n < g.num_nodes(); ++n)
    if (!g.on_boundary(n)) e[n] = sym(harmonic_block(field, n, ba, s));
  return e;
}

double weak_residual(const QField& field, const std::vector<Mat3>& nodes) {
  const GridSpec& g = field.spec;
  const double h3 = g.h * g.h * g.h;
  const auto& basis = s0_basis();
  double worst = 0.0;
  for (const TestTensor& t : test_bank(g)) {
    double acc = 0.0;
    for (long n = 0; n < g.num_nodes(); ++n) {
      if (g.on_boundary(n)) continue;
      const double b = bump(t, g.position(n));
      if (b != 0.0) acc += h3 * b * ddot(nodes[n], basis[t.basis]);
    }
    worst = std::max(worst, std::abs(acc));
  }
  return worst;
}

double el_residual_constrained(const QField& field, const ElasticConstants& L, double s_plus,
                               ConstrainedForm form) {
  return weak_residual(field, el_constrained_nodes(field, L, s_plus, form));
}

double harmonic_residual(const DirectorField& d) {
  const GridSpec& g = d.spec;
  const double h3 = g.h * g.h * g.h;
  double acc = 0.0;
  for (long n = 0; n < g.num_nodes(); ++n) {
    if (g.on_boundary(n)) continue;
    const GradU gu = fd_gradient(d, n);
    const Vec3 r = fd_laplacian_of(g, d.values, n) + gu.squaredNorm() * d.values[n];
    acc += h3 * r.squaredNorm();
  }
  return std::sqrt(acc);
}

double qh_residual(const QField& field, double s) {
  const GridSpec& g = field.spec;
  std::vector<Mat3> r(g.num_nodes(), Mat3::Zero());
  for (long n = 0; n < g.num_nodes(); ++n) {
    if (g.on_boundary(n)) continue;
    const GradQ p = fd_gradient(field, n);
    Mat3 pp = Mat3::Zero();
    for (int k = 0; k < 3; ++k) pp += p[k] * p[k];
    const Mat3 P = field.values[n] / s + Mat3::Identity() / 3.0;
    r[n] = fd_laplacian_of(g, field.values, n) - (2.0 / s) * pp + (2.0 / s) * norm2(p) * P;
  }
  return interior_l2(field, r);
}

bool max_norm_monitor(const SolveReport& report, double M) {
  for (double v : report.max_Q_norm_trace)
    if (!(v <= M + 1.0)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Oseen-Frank relaxation on S_*

namespace {

Vec3 curl_of(const GradU& g) { return Vec3(g(1, 2) - g(2, 1), g(2, 0) - g(0, 2), g(0, 1) - g(1, 0)); }

// E(u)(a,b) = sum_i u_i eps_iab
Mat3 eps_contract(const Vec3& u) {
  Mat3 e;
  e << 0, u(2), -u(1), -u(2), 0, u(0), u(1), -u(0), 0;
  return e;
}

double of_energy(const DirectorField& d, const FrankConstants& k) {
  const GridSpec& g = d.spec;
  const double w = g.h * g.h * g.h / 8.0;
  CompensatedSum e;
  for_each_corner(g, [&](long n, const long* lo, const long* hi) {
    GradU gu;
    for (int a = 0; a < 3; ++a) gu.row(a) = ((d.values[hi[a]] - d.values[lo[a]]) / g.h).transpose();
    e.add(w * oseen_frank_W(d.values[n], gu, k));
  });
  return e.value();
}

} // namespace

void oseen_frank_derivs(const Vec3& u, const GradU& g, const FrankConstants& k, Vec3& du, GradU& dg) {
  const Vec3 c = curl_of(g);
  const double div = g.trace(), tw = u.dot(c);
  const Vec3 wc = 0.5 * k.k3 * (2.0 * u.squaredNorm() * c - 2.0 * tw * u); // d/dc of (k3/2)|u x c|^2
  dg = k.k1 * div * Mat3::Identity() + k.k2 * tw * eps_contract(u) + eps_contract(wc) +
       (k.k2 + k.k4) * (g.transpose() - div * Mat3::Identity());
  du = k.k2 * tw * c + k.k3 * (c.squaredNorm() * u - tw * c);
}

double oseen_frank_energy(const DirectorField& d, const FrankConstants& k) { return of_energy(d, k); }

std::vector<Vec3> oseen_frank_gradient(const DirectorField& d, const FrankConstants& k) {
  const GridSpec& g = d.spec;
  const double w = g.h * g.h * g.h / 8.0, wh = w / g.h;
  std::vector<Vec3> grad(g.num_nodes(), Vec3::Zero());
  for_each_corner(g, [&](long n, const long* lo, const long* hi) {
    GradU gu;
    for (int a = 0; a < 3; ++a) gu.row(a) = ((d.values[hi[a]] - d.values[lo[a]]) / g.h).transpose();
    Vec3 du;
    GradU dg;
    oseen_frank_derivs(d.values[n], gu, k, du, dg);
    grad[n] += w * du;
    for (int a = 0; a < 3; ++a) {
      grad[hi[a]] += wh * dg.row(a).transpose();
      grad[lo[a]] -= wh * dg.row(a).transpose();
    }
  });
  for (long n = 0; n < g.num_nodes(); ++n)
    if (g.on_boundary(n)) grad[n].setZero();
  return grad;
}

std::pair<DirectorField, SolveReport> minimize_on_Sstar(const DirectorField& start, const FrankConstants& k,
                                                        const SolveConfig& cfg) {
  cfg.validate();
  if (!check_ericksen(k)) throw precondition_error("minimize_on_Sstar: Ericksen condition fails at " +
                                                    first_failure(ericksen_clauses(k)));
  const GridSpec& g = start.spec;
  for (long n = 0; n < g.num_nodes(); ++n)
    if (g.on_boundary(n) && std::abs(start.values[n].norm() - 1.0) > 1e-10)
      throw precondition_error("minimize_on_Sstar: boundary directors must be unit vectors");

  const std::vector<double> nw = node_weights(g);
  DirectorField x = start;
  for (long n = 0; n < g.num_nodes(); ++n)
    if (!g.on_boundary(n)) x.values[n].normalize();

  SolveReport rep;
  auto tangent_grad = [&](const DirectorField& f) {
    std::vector<Vec3> gr = oseen_frank_gradient(f, k);
    for (long n = 0; n < g.num_nodes(); ++n) gr[n] -= gr[n].dot(f.values[n]) * f.values[n];
    return gr;
  };
  auto norm_of = [&](const std::vector<Vec3>& gr) {
    double acc = 0.0;
    for (long n = 0; n < g.num_nodes(); ++n)
      if (!g.on_boundary(n)) acc += gr[n].squaredNorm() / nw[n];
    return std::sqrt(acc);
  };

  double E = of_energy(x, k);
  std::vector<Vec3> grad = tangent_grad(x);
  double gn = norm_of(grad);
  auto record = [&] {
    rep.energy_trace.push_back(E);
    rep.grad_norm_trace.push_back(gn);
  };
  record();

  std::vector<Vec3> prev_x, prev_dir;
  double t_prev = cfg.step0;
  rep.message = "max_iters reached";
  int it = 0, stalls = 0;
  for (;; ++it) {
    if (gn < cfg.grad_tol) {
      rep.converged = true;
      rep.message = "grad_tol reached";
      break;
    }
    if (it >= cfg.max_iters) break;
    std::vector<Vec3> dir(g.num_nodes(), Vec3::Zero());
    for (long n = 0; n < g.num_nodes(); ++n)
      if (!g.on_boundary(n)) dir[n] = -grad[n] / nw[n];

    double t = cfg.step0;
    if (it > 0) {
      double ss = 0.0, sy = 0.0;
      for (long n = 0; n < g.num_nodes(); ++n) {
        if (g.on_boundary(n)) continue;
        const Vec3 sn = x.values[n] - prev_x[n];
        const Vec3 yn = prev_dir[n] - dir[n];
        ss += nw[n] * sn.squaredNorm();
        sy += nw[n] * sn.dot(yn);
      }
      t = (sy > 0.0 && std::isfinite(ss / sy)) ? ss / sy : t_prev;
      t = std::clamp(t, 1e-3 * cfg.step0, 1e6 * cfg.step0);
    }

    const double slope = gn * gn;
    DirectorField trial = x;
    double Et = 0.0;
    bool accepted = false;
    while (t >= kStepFloor) {
      bool degenerate = false;
      for (long n = 0; n < g.num_nodes() && !degenerate; ++n) {
        if (g.on_boundary(n)) continue;
        const Vec3 v = x.values[n] + t * dir[n];
        const double vn = v.norm();
        if (vn < 1e-12) degenerate = true;
        else trial.values[n] = v / vn;
      }
      if (degenerate) {
        t *= 0.5;
        continue;
      }
      Et = of_energy(trial, k);
      const double predicted = cfg.armijo_c * t * slope;
      if (std::isfinite(Et) && Et <= E - predicted) {
        accepted = true;
        stalls = 0;
        break;
      }
      if (std::isfinite(Et) && predicted < 1e-14 * std::abs(E) && Et <= E) {
        accepted = true;
        ++stalls;
        break;
      }
      t *= cfg.backtrack;
    }
    if (!accepted) {
      rep.failed = true;
      rep.message = "step underflow";
      break;
    }
    if (stalls >= kMaxStalls) {
      rep.message = "stalled at roundoff level";
      break;
    }
    prev_x = x.values;
    prev_dir = dir;
    t_prev = t;
    x = std::move(trial);
    E = Et;
    grad = tangent_grad(x);
    gn = norm_of(grad);
    record();
  }
  rep.iterations = it;
  rep.final_energy = E;
  rep.final_grad_norm = gn;
  return {std::move(x), std::move(rep)};
}

void write_report_csv(const SolveReport& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << std::setprecision(17);
  out << "iter,energy,grad_norm,max_q_norm,penalty\n";
  for (std::size_t i = 0; i < r.energy_trace.size(); ++i) {
    out << i << ',' << r.energy_trace[i] << ',' << r.grad_norm_trace[i] << ',';
    if (i < r.max_Q_norm_trace.size()) out << r.max_Q_norm_trace[i];
    out << ',';
    if (i < r.penalty_trace.size()) out << r.penalty_trace[i];
    out << '\n';
  }
}

} // namespace lcq
