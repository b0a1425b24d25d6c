#include "lcq/densities.hpp"
#include "lcq/frames.hpp"
#include "lcq/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace lcq {

namespace {

double sign0(double x) { return x < 0.0 ? -1.0 : 1.0; }

double ddot(const Mat3& a, const Mat3& b) { return (a.array() * b.array()).sum(); }

Mat3 skew(const Mat3& m) { return 0.5 * (m - m.transpose()); }
Mat3 sym(const Mat3& m) { return 0.5 * (m + m.transpose()); }

// D_i = sum_j d_j Q_ij
Vec3 divergence(const GradQ& p) {
  Vec3 d = Vec3::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) d(i) += p[j](i, j);
  return d;
}

// sum_ijk d_j Q_ik d_k Q_ij
double cross_term(const GradQ& p) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) s += p[j](i, k) * p[k](i, j);
  return s;
}

// G_lk = d_l Q : d_k Q
Mat3 gram(const GradQ& p) {
  Mat3 g;
  for (int l = 0; l < 3; ++l)
    for (int k = 0; k < 3; ++k) g(l, k) = ddot(p[l], p[k]);
  return g;
}

// Terms shared by f_E and f_E1: the L1, L2, L3 parts with isotropic weight c1.
void add_quadratic_derivs(double c1, const ElasticConstants& L, const GradQ& p, GradQ& dp) {
  const Vec3 d = divergence(p);
  for (int m = 0; m < 3; ++m) {
    dp[m] += c1 * p[m];
    for (int i = 0; i < 3; ++i) {
      dp[m](i, m) += L.L2 * d(i);
      for (int j = 0; j < 3; ++j) dp[m](i, j) += L.L3 * p[j](i, m);
    }
  }
}

// sum_lk A_lk d_l Q : d_k Q, derivative in p
void add_weighted_gram_dp(double coef, const Mat3& A, const GradQ& p, GradQ& dp) {
  const Mat3 As = A + A.transpose();
  for (int m = 0; m < 3; ++m)
    for (int k = 0; k < 3; ++k) dp[m] += coef * As(m, k) * p[k];
}

struct FE2Frank {
  double tau, ct, cS, cK, cb;
};

FE2Frank fe2_coefficients(const ElasticConstants& L, double s) {
  const FrankConstants k = frank_from_elastic(L, s);
  const double tau = tilde_alpha(k);
  return {tau, 0.5 * (2 * k.k1 - k.k2 - k.k4 - tau), k.k2 + k.k4 - tau, k.k2 - k.k4 - tau, k.k3 - tau};
}

// 2V of the f_E2 remainder with optional partial derivatives of 2V.
struct FE2Parts {
  double splay = 0, shear = 0, twist = 0, bend = 0; // each already multiplied by its coefficient
  double two_v() const { return splay + shear + twist + bend; }
};

FE2Parts fe2_remainder(const Mat3& q, const GradQ& p, double s, const FE2Frank& c, GradQ* dp2v, Mat3* dq2v) {
  const double is = 1.0 / s;
  const Mat3 P = is * q + Mat3::Identity() / 3.0;
  const Mat3 Pi = Mat3::Identity() - P;

  // Ghat[m](k,i) = s^-1 sum_j P_mj p[k](i,j)
  std::array<Mat3, 3> Ghat;
  for (int m = 0; m < 3; ++m)
    for (int k = 0; k < 3; ++k) Ghat[m].row(k) = is * (p[k] * P.row(m).transpose()).transpose();

  Vec3 qv = Vec3::Zero();
  for (int k = 0; k < 3; ++k) qv += is * (p[k] * P.row(k).transpose());
  const Vec3 b = Pi * qv;

  FE2Parts parts;
  std::array<Mat3, 3> H, S, K;
  std::array<double, 3> t{};
  for (int m = 0; m < 3; ++m) {
    H[m] = Pi * Ghat[m];
    t[m] = H[m].trace();
    S[m] = sym(H[m]) - 0.5 * t[m] * Pi;
    K[m] = skew(H[m]);
    parts.splay += c.ct * t[m] * t[m];
    parts.shear += c.cS * S[m].squaredNorm();
    parts.twist += c.cK * K[m].squaredNorm();
  }
  parts.bend = c.cb * b.squaredNorm();

  if (dp2v && dq2v) {
    GradQ& dp = *dp2v;
    for (auto& m : dp) m.setZero();
    Mat3 dP = Mat3::Zero();
    for (int m = 0; m < 3; ++m) {
      const Mat3 Z = 2 * c.ct * t[m] * Mat3::Identity() + c.cS * (2 * S[m] - ddot(S[m], Pi) * Mat3::Identity()) +
                     2 * c.cK * K[m];
      const Mat3 W = Pi.transpose() * Z;
      for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) {
            dp[k](i, j) += is * P(m, j) * W(k, i);
            dP(m, j) += is * W(k, i) * p[k](i, j);
          }
      dP -= Z * Ghat[m].transpose();
      dP += c.cS * t[m] * S[m];
    }
    const Vec3 r = Pi.transpose() * (2 * c.cb * b);
    dP -= 2 * c.cb * b * qv.transpose();
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          dp[k](i, j) += is * P(k, j) * r(i);
          dP(k, j) += is * r(i) * p[k](i, j);
        }
    *dq2v = is * dP;
  }
  return parts;
}

DensityBreakdown fe1_breakdown(const QTensor& q, const GradQ& p, const ElasticConstants& L, double s, double sigma) {
  DensityBreakdown out;
  out.isotropic = 0.5 * bar_alpha(L, s) * norm2(p);
  const Vec3 d = divergence(p);
  double curl = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        const double e = p[j](i, k) + sigma * p[k](i, j);
        curl += e * e;
      }
  double weighted = 0.0;
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l) weighted += (q * q.transpose())(l, k) * ddot(p[l], p[k]);
  out.square_terms = {{"divergence", 0.5 * L.L2 * d.squaredNorm()},
                      {"curl_symmetrized", 0.25 * std::abs(L.L3) * curl},
                      {"q_weighted", 1.5 * L.L4 / s * weighted}};
  out.total = out.isotropic + out.square_sum();
  return out;
}

} // namespace

GradQ zero_gradq() {
  GradQ p;
  for (auto& m : p) m.setZero();
  return p;
}

double norm2(const GradQ& p) { return p[0].squaredNorm() + p[1].squaredNorm() + p[2].squaredNorm(); }

double DensityBreakdown::square_sum() const {
  double s = 0.0;
  for (const auto& t : square_terms) s += t.second;
  return s;
}

double bulk_f(const QTensor& q, const BulkParams& bp) {
  const Mat3 q2 = q * q;
  const double tr2 = q2.trace(), tr3 = (q2 * q).trace();
  return -0.5 * bp.a * tr2 - bp.b / 3.0 * tr3 + 0.25 * bp.c * tr2 * tr2;
}

double bulk_min_value(const BulkParams& bp) {
  const double s = bp.s_plus;
  return -bp.a * s * s / 3.0 - 2.0 * bp.b * s * s * s / 27.0 + bp.c * s * s * s * s / 9.0;
}

double bulk_f_tilde(const QTensor& q, const BulkParams& bp) { return bulk_f(q, bp) - bulk_min_value(bp); }

QTensor bulk_gradient(const QTensor& q, const BulkParams& bp) {
  const Mat3 q2 = q * q;
  return sym_traceless(-bp.a * q - bp.b * q2 + bp.c * q2.trace() * q);
}

double bulk_second_derivative(const Mat3& q, const Mat3& xi, const Mat3& eta, const BulkParams& bp) {
  const double tr2 = (q * q).trace();
  return -bp.a * (xi * eta).trace() - bp.b * ((q * xi * eta).trace() + (q * eta * xi).trace()) +
         2.0 * bp.c * (q * xi).trace() * (q * eta).trace() + bp.c * tr2 * (xi * eta).trace();
}

Mat5 bulk_hessian(const QTensor& q, const BulkParams& bp) {
  const auto& e = s0_basis();
  Mat5 h;
  for (int a = 0; a < 5; ++a)
    for (int b = a; b < 5; ++b) h(a, b) = h(b, a) = bulk_second_derivative(q, e[a], e[b], bp);
  return h;
}

Eigen::Matrix<double, 9, 9> bulk_hessian_full(const Mat3& q, const BulkParams& bp) {
  Eigen::Matrix<double, 9, 9> h;
  for (int a = 0; a < 9; ++a)
    for (int b = 0; b < 9; ++b) {
      Mat3 xi = Mat3::Zero(), eta = Mat3::Zero();
      xi(a / 3, a % 3) = 1.0;
      eta(b / 3, b % 3) = 1.0;
      h(a, b) = bulk_second_derivative(q, xi, eta, bp);
    }
  return h;
}

double elastic_fE(const QTensor& q, const GradQ& p, const ElasticConstants& L) {
  return 0.5 * L.L1 * norm2(p) + 0.5 * L.L2 * divergence(p).squaredNorm() + 0.5 * L.L3 * cross_term(p) +
         0.5 * L.L4 * ddot(q, gram(p));
}

DensityBreakdown elastic_fE1(const QTensor& q, const GradQ& p, const ElasticConstants& L, double s_plus) {
  return fe1_breakdown(q, p, L, s_plus, sign0(L.L3));
}

DensityBreakdown elastic_fE1_printed_sign(const QTensor& q, const GradQ& p, const ElasticConstants& L,
                                          double s_plus) {
  return fe1_breakdown(q, p, L, s_plus, -sign0(L.L3));
}

DensityBreakdown elastic_fE2(const QTensor& q, const GradQ& p, const ElasticConstants& L, double s_plus) {
  if (!check_er1(L, s_plus))
    throw precondition_error("elastic_fE2: condition Er1 fails at " + first_failure(er1_clauses(L, s_plus)));
  const FE2Parts parts = fe2_remainder(q, p, s_plus, fe2_coefficients(L, s_plus), nullptr, nullptr);
  DensityBreakdown out;
  out.isotropic = 0.5 * alpha_e2(L, s_plus) * norm2(p);
  out.square_terms = {{"splay", 0.5 * parts.splay},
                      {"bend", 0.5 * parts.bend},
                      {"shear", 0.5 * parts.shear},
                      {"twist", 0.5 * parts.twist}};
  out.total = out.isotropic + out.square_sum();
  return out;
}

DensityBreakdown v_giaq(const QTensor& q, const GradQ& p, const ElasticConstants& L, double s_plus) {
  const double s = s_plus;
  const FrankConstants k = frank_from_elastic(L, s);
  const double t = k.k2 + k.k4;
  if (!(t > 0.0 && std::min({k.k1, k.k2, k.k3}) >= t && L.L3 <= 0.0))
    throw precondition_error("v_giaq: requires min(k1,k2,k3) >= k2+k4 > 0 and L3 <= 0");
  const double a2 = alpha_e2(L, s);
  const Mat3 P = q / s + Mat3::Identity() / 3.0;

  // d_i Q_ij summed over i
  Vec3 dv = Vec3::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) dv(j) += p[i](i, j);
  const double x1 = (P * dv).squaredNorm();

  // curl of the j-th row of Q: (curl Q_j)_i = eps_iab d_a Q_jb
  std::array<Vec3, 3> curl;
  for (int j = 0; j < 3; ++j)
    curl[j] = Vec3(p[1](j, 2) - p[2](j, 1), p[2](j, 0) - p[0](j, 2), p[0](j, 1) - p[1](j, 0));
  double twist = 0.0;
  Vec3 bend = Vec3::Zero();
  for (int j = 0; j < 3; ++j) {
    twist += P.col(j).dot(curl[j]);
    bend += Vec3(P.col(j)).cross(curl[j]);
  }

  DensityBreakdown out;
  out.isotropic = 0.5 * a2 * norm2(p);
  out.square_terms = {{"divergence", (L.L1 + L.L2 / 2 + L.L3 / 2 - s * L.L4 / 3 - a2) * x1},
                      {"curl_contraction", (L.L1 - s * L.L4 / 3 - a2) * twist * twist},
                      {"cross_product", (L.L1 + L.L2 / 2 + L.L3 / 2 + 2 * s * L.L4 / 3 - a2) * bend.squaredNorm()}};
  out.total = out.isotropic + out.square_sum();
  return out;
}

double fE2_growth_constant(const ElasticConstants& L, double s, double q_norm) {
  const FE2Frank c = fe2_coefficients(L, s);
  const double pn = q_norm / s + 1.0 / std::sqrt(3.0); // bound on |P|
  const double pin = std::sqrt(3.0) + pn;              // bound on |Pi|
  const double h2 = pin * pin * pn * pn / (s * s);     // sum_m |H_m|^2 <= h2 |p|^2, also |b|^2
  const double two_v = (3 * c.ct + c.cS * 2 * (1 + 0.75 * pin * pin) + c.cK + c.cb) * h2;
  return 0.5 * two_v;
}

double cutoff_eta(double r, double M) {
  if (!(M > 0.0)) throw precondition_error("cutoff_eta: M must be positive");
  return 1.0 - smoothstep5(r - M);
}

double cutoff_eta_prime(double r, double M) {
  const double x = r - M;
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -30.0 * x * x * (1.0 - x) * (1.0 - x);
}

double modified_fE(const QTensor& q, const GradQ& p, const ElasticConstants& L, double s_plus, double M) {
  const DensityBreakdown b = elastic_fE2(q, p, L, s_plus);
  return b.isotropic + cutoff_eta(q.norm(), M) * b.square_sum();
}

double modified_fE_upper_constant(const ElasticConstants& L, double s_plus, double M) {
  return 0.5 * alpha_e2(L, s_plus) + fE2_growth_constant(L, s_plus, M + 1.0);
}

double oseen_frank_W(const Vec3& u, const GradU& g, const FrankConstants& k) {
  const double div = g.trace();
  // curl_i = eps_iab d_a u_b
  const Vec3 curl(g(1, 2) - g(2, 1), g(2, 0) - g(0, 2), g(0, 1) - g(1, 0));
  const double twist = u.dot(curl);
  const Vec3 bend = u.cross(curl);
  const double tr_g2 = (g * g).trace();
  return 0.5 * k.k1 * div * div + 0.5 * k.k2 * twist * twist + 0.5 * k.k3 * bend.squaredNorm() +
         0.5 * (k.k2 + k.k4) * (tr_g2 - div * div);
}

DensityBreakdown oseen_frank_V(const Vec3& u, const GradU& g, const FrankConstants& k) {
  const double tau = tilde_alpha(k);
  if (!(tau > 0.0)) throw precondition_error("oseen_frank_V: strong Ericksen condition fails");
  const ChartWeights cw = sphere_partition(u);
  const Vec3 v = u.normalized();
  const double sg = sign0(k.k4);
  double terms[5] = {0, 0, 0, 0, 0};
  for (int c = 0; c < 6; ++c) {
    if (cw.w[c] <= 0.0) continue;
    const Mat3 R = rotation_to_pole(v, c + 1);
    const Mat3 gt = R * g * R.transpose();
    const double a = gt(0, 0), d = gt(1, 1), b = gt(0, 1), e = gt(1, 0);
    const double piece[5] = {
        0.25 * (2 * k.k1 - k.k2 - k.k4 - tau) * (a + d) * (a + d),
        0.25 * (k.k2 + k.k4 - tau) * (a - d) * (a - d),
        0.5 * (k.k2 - std::abs(k.k4) - tau) * (b * b + e * e),
        0.5 * std::abs(k.k4) * (b + sg * e) * (b + sg * e),
        0.5 * (k.k3 - tau) * (gt(2, 0) * gt(2, 0) + gt(2, 1) * gt(2, 1)),
    };
    for (int i = 0; i < 5; ++i) terms[i] += cw.w[c] * piece[i];
  }
  DensityBreakdown out;
  out.isotropic = 0.5 * tau * g.squaredNorm();
  out.square_terms = {{"splay", terms[0]},
                      {"transverse_stretch", terms[1]},
                      {"transverse_shear", terms[2]},
                      {"saddle", terms[3]},
                      {"bend", terms[4]}};
  out.total = out.isotropic + out.square_sum();
  return out;
}

GradQ induced_gradq(const Vec3& u, const GradU& g, double s) {
  GradQ p;
  for (int k = 0; k < 3; ++k) {
    const Vec3 gk = g.row(k).transpose();
    p[k] = s * (gk * u.transpose() + u * gk.transpose());
  }
  return p;
}

Density parse_density(const std::string& name) {
  if (name == "fE") return Density::fE;
  if (name == "fE1") return Density::fE1;
  if (name == "fE2") return Density::fE2;
  if (name == "modified") return Density::modified;
  throw precondition_error("unknown density '" + name + "'");
}

std::string density_name(Density d) {
  switch (d) {
  case Density::fE: return "fE";
  case Density::fE1: return "fE1";
  case Density::fE2: return "fE2";
  case Density::modified: return "modified";
  }
  return "?";
}

void validate_density(Density d, const ElasticConstants& L, double s) {
  std::string fail;
  switch (d) {
  case Density::fE:
    if (L.L4 < 0.0) fail = "L4>=0";
    else fail = first_failure(coercivity_iff_clauses(L, s));
    break;
  case Density::fE1: fail = first_failure(L_cond_clauses(L, s)); break;
  case Density::fE2:
  case Density::modified: fail = first_failure(er1_clauses(L, s)); break;
  }
  if (!fail.empty())
    throw precondition_error("constants inadmissible for density " + density_name(d) + ": " + fail + " fails");
}

double density_value(Density d, const Mat3& q, const GradQ& p, const DensityParams& dp) {
  switch (d) {
  case Density::fE: return elastic_fE(q, p, dp.L);
  case Density::fE1: return elastic_fE1(q, p, dp.L, dp.s_plus).total;
  case Density::fE2:
  case Density::modified: {
    // Same value as elastic_fE2 / modified_fE without the breakdown; constants are validated by the caller.
    const FE2Frank c = fe2_coefficients(dp.L, dp.s_plus);
    double v = 0.0;
    if (c.ct != 0.0 || c.cS != 0.0 || c.cK != 0.0 || c.cb != 0.0)
      v = 0.5 * fe2_remainder(q, p, dp.s_plus, c, nullptr, nullptr).two_v();
    if (d == Density::modified) v *= cutoff_eta(q.norm(), dp.M);
    return 0.5 * alpha_e2(dp.L, dp.s_plus) * norm2(p) + v;
  }
  }
  return 0.0;
}

double isotropic_constant(Density d, const ElasticConstants& L, double s) {
  switch (d) {
  case Density::fE: return L.L1;
  case Density::fE1: return bar_alpha(L, s);
  case Density::fE2:
  case Density::modified: return alpha_e2(L, s);
  }
  return 0.0;
}

PointDerivs remainder_derivs(Density d, const Mat3& q, const GradQ& p, const DensityParams& prm) {
  const ElasticConstants& L = prm.L;
  const double s = prm.s_plus;
  PointDerivs out;
  out.dp = zero_gradq();
  out.dq.setZero();
  switch (d) {
  case Density::fE: {
    out.f = elastic_fE(q, p, L) - 0.5 * L.L1 * norm2(p);
    add_quadratic_derivs(0.0, L, p, out.dp);
    add_weighted_gram_dp(0.5 * L.L4, q, p, out.dp);
    out.dq = 0.5 * L.L4 * gram(p);
    break;
  }
  case Density::fE1: {
    const DensityBreakdown b = elastic_fE1(q, p, L, s);
    out.f = b.square_sum();
    add_quadratic_derivs(L.L1 - 2 * s * L.L4 / 3 - bar_alpha(L, s), L, p, out.dp);
    const double w = 1.5 * L.L4 / s;
    add_weighted_gram_dp(w, q * q.transpose(), p, out.dp);
    const Mat3 G = gram(p);
    out.dq = w * (G * q + G.transpose() * q);
    break;
  }
  case Density::fE2:
  case Density::modified: {
    const FE2Frank c = fe2_coefficients(L, s);
    if (c.ct == 0.0 && c.cS == 0.0 && c.cK == 0.0 && c.cb == 0.0) break; // one-constant: V vanishes identically
    GradQ dp2v;
    Mat3 dq2v;
    const FE2Parts parts = fe2_remainder(q, p, s, c, &dp2v, &dq2v);
    const double V = 0.5 * parts.two_v();
    double eta = 1.0;
    if (d == Density::modified) {
      const double r = q.norm();
      eta = cutoff_eta(r, prm.M);
      const double deta = cutoff_eta_prime(r, prm.M);
      if (deta != 0.0) out.dq += deta * V / r * q;
    }
    out.f = eta * V;
    for (int k = 0; k < 3; ++k) out.dp[k] = 0.5 * eta * dp2v[k];
    out.dq += 0.5 * eta * dq2v;
    break;
  }
  }
  return out;
}

PointDerivs density_derivs(Density d, const Mat3& q, const GradQ& p, const DensityParams& prm) {
  PointDerivs out = remainder_derivs(d, q, p, prm);
  const double c = isotropic_constant(d, prm.L, prm.s_plus);
  out.f += 0.5 * c * norm2(p);
  for (int k = 0; k < 3; ++k) out.dp[k] += c * p[k];
  return out;
}

FalsifyResult coercivity_falsify(const ElasticConstants& L, double /*s_plus*/, long budget, std::uint64_t seed) {
  Rng rng(seed);
  FalsifyResult res;
  while (res.evaluations + 2 <= budget) {
    const QTensor q = random_s0(rng);
    const GradQ p = random_gradq(rng);
    const double A = elastic_fE(Mat3::Zero(), p, L);
    const double B = elastic_fE(q, p, L) - A;
    res.evaluations += 2;
    if (!(B < 0.0)) continue;
    // f(tQ, tp) = A t^2 + B t^3: double t until the density is below -1e6.
    double t = 1.0;
    while (res.evaluations < budget) {
      GradQ tp;
      for (int k = 0; k < 3; ++k) tp[k] = t * p[k];
      const double f = elastic_fE(t * q, tp, L);
      ++res.evaluations;
      if (f < -1e6) {
        res.witness = FalsifyWitness{q, p, t, f, res.evaluations};
        return res;
      }
      t *= 2.0;
    }
  }
  return res;
}

} // namespace lcq
