#include <doctest.h>

#include "lcq/densities.hpp"
#include "lcq/frames.hpp"
#include "lcq/sampling.hpp"

#include <cmath>

using namespace lcq;

namespace {
Mat3 diag(double a, double b, double c) { return Vec3(a, b, c).asDiagonal(); }
const BulkParams kUnit(1, 1, 1);
const ElasticConstants kGeneral{1, 0.5, -0.2, 0.3};

double rel(double a, double b) { return std::abs(a - b) / (1.0 + std::abs(b)); }
} // namespace

TEST_CASE("bulk density values") {
  CHECK(bulk_f(Mat3::Zero(), kUnit) == 0.0);
  CHECK(bulk_f(diag(-0.5, -0.5, 1.0), kUnit) == doctest::Approx(-0.4375).epsilon(1e-15));
  CHECK(bulk_f_tilde(Mat3::Zero(), kUnit) == doctest::Approx(0.4375).epsilon(1e-15));
  CHECK(std::abs(bulk_f_tilde(diag(-0.5, -0.5, 1.0), kUnit)) < 1e-15);

  Rng rng(31);
  for (int n = 0; n < 100; ++n) {
    const Mat3 q = random_s0(rng), R = random_rotation(rng);
    CHECK(std::abs(bulk_f(R * q * R.transpose(), kUnit) - bulk_f(q, kUnit)) < 1e-12);
  }
  std::uniform_real_distribution<double> uni(-1, 1);
  for (int n = 0; n < 100000; ++n) {
    Mat3 q = random_s0(rng);
    q *= 3.0 * std::abs(uni(rng)) / q.norm();
    CHECK(bulk_f_tilde(q, kUnit) >= -1e-12);
  }
}

TEST_CASE("bulk gradient and Hessian against finite differences") {
  Rng rng(32);
  const double h = 1e-5;
  for (int n = 0; n < 100; ++n) {
    const Mat3 q = random_s0(rng);
    const Vec5 c = to_coeffs(q);
    const Vec5 g = to_coeffs(bulk_gradient(q, kUnit));
    const Mat5 H = bulk_hessian(q, kUnit);
    for (int a = 0; a < 5; ++a) {
      Vec5 cp = c, cm = c;
      cp(a) += h;
      cm(a) -= h;
      const double fd = (bulk_f(from_coeffs(cp), kUnit) - bulk_f(from_coeffs(cm), kUnit)) / (2 * h);
      CHECK(rel(g(a), fd) < 1e-6);
      const Vec5 gp = to_coeffs(bulk_gradient(from_coeffs(cp), kUnit));
      const Vec5 gm = to_coeffs(bulk_gradient(from_coeffs(cm), kUnit));
      for (int b = 0; b < 5; ++b) CHECK(rel(H(a, b), (gp(b) - gm(b)) / (2 * h)) < 1e-6);
    }
  }
  for (int n = 0; n < 100; ++n)
    CHECK(bulk_gradient(from_director(random_unit(rng), 1.5), kUnit).norm() < 1e-10);
  CHECK(bulk_gradient(Mat3::Zero(), kUnit).norm() == 0.0);
}

TEST_CASE("bulk Hessian on the uniaxial manifold") {
  const Mat3 qp = diag(-0.5, -0.5, 1.0);
  const auto full = bulk_hessian_full(qp, kUnit);
  // Direct assembly: a/3 + 10 s b/9 and 4a/3 - 5 s b/9.
  CHECK(full(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(full(8, 8) == doctest::Approx(0.5).epsilon(1e-14));
  // f_B is constant along rotations of Q+, so the Hessian has a kernel there.
  const Mat3 xi = (Mat3() << 0, 0, 1, 0, 0, 0, 1, 0, 0).finished() / std::sqrt(2.0);
  CHECK(std::abs(bulk_second_derivative(qp, xi, xi, kUnit)) < 1e-14);
  Eigen::SelfAdjointEigenSolver<Mat5> es(bulk_hessian(qp, kUnit));
  CHECK(std::abs(es.eigenvalues()(0)) < 1e-12);
  CHECK(std::abs(es.eigenvalues()(1)) < 1e-12);
  // Normal directions: b s (twice) and 2a + b s/3.
  CHECK(es.eigenvalues()(2) == doctest::Approx(1.5));
  CHECK(es.eigenvalues()(3) == doctest::Approx(1.5));
  CHECK(es.eigenvalues()(4) == doctest::Approx(2.5));
}

TEST_CASE("elastic f_E basic values") {
  const GradQ z = zero_gradq();
  CHECK(elastic_fE(diag(-0.5, -0.5, 1.0), z, kGeneral) == 0.0);
  Rng rng(33);
  const GradQ p = random_gradq(rng);
  CHECK(elastic_fE(random_s0(rng), p, {1, 0, 0, 0}) == doctest::Approx(0.5 * norm2(p)).epsilon(1e-14));
}

TEST_CASE("f_E, f_E1, f_E2 and W agree on uniaxial samples") {
  Rng rng(34);
  for (int set = 0; set < 10; ++set) {
    const double s = set % 2 ? 1.5 : 0.8;
    const ElasticConstants L = random_elastic(
        rng, s, [s](const ElasticConstants& l) { return check_L_cond(l, s) && check_er1(l, s); });
    const FrankConstants k = frank_from_elastic(L, s);
    for (int n = 0; n < 1000; ++n) {
      const UniaxialSample smp = random_uniaxial_sample(rng, s);
      const double fe = elastic_fE(smp.q, smp.p, L);
      const double scale = 1e-9 * (1 + norm2(smp.p));
      CHECK(std::abs(elastic_fE1(smp.q, smp.p, L, s).total - fe) < scale);
      CHECK(std::abs(elastic_fE2(smp.q, smp.p, L, s).total - fe) < scale);
      CHECK(std::abs(oseen_frank_W(smp.u, smp.g, k) - fe) < scale);
    }
  }
}

TEST_CASE("f_E1 with the printed sign differs from f_E when L3 != 0") {
  Rng rng(35);
  const UniaxialSample smp = random_uniaxial_sample(rng, 1.5);
  const double fe = elastic_fE(smp.q, smp.p, kGeneral);
  CHECK(std::abs(elastic_fE1(smp.q, smp.p, kGeneral, 1.5).total - fe) < 1e-12);
  CHECK(std::abs(elastic_fE1_printed_sign(smp.q, smp.p, kGeneral, 1.5).total - fe) > 1e-3);
}

TEST_CASE("f_E1 equals the expanded form for every Q and is bounded below off S_*") {
  Rng rng(36);
  for (int n = 0; n < 100000; ++n) {
    const Mat3 q = random_s0(rng, 2.0);
    const GradQ p = random_gradq(rng);
    const DensityBreakdown b = elastic_fE1(q, p, kGeneral, 1.5);
    CHECK(b.total >= 0.5 * bar_alpha(kGeneral, 1.5) * norm2(p) - 1e-12);
    for (const auto& t : b.square_terms) CHECK(t.second >= 0.0);
    if (n < 1000) {
      // (L1/2 - s L4/3)|p|^2 + L2, L3 terms + (3 L4/2s) Q_ln Q_kn d_l Q : d_k Q
      const Mat3 qq = q * q.transpose();
      double w = 0;
      for (int l = 0; l < 3; ++l)
        for (int k = 0; k < 3; ++k) w += qq(l, k) * (p[l].array() * p[k].array()).sum();
      const ElasticConstants L = kGeneral;
      const double fe_no_l4 = elastic_fE(q, p, {L.L1, L.L2, L.L3, 0.0});
      const double expanded = fe_no_l4 - 1.5 * L.L4 / 3 * norm2(p) + 1.5 * L.L4 / 1.5 * w;
      CHECK(rel(b.total, expanded) < 1e-12);
    }
  }
}

TEST_CASE("f_E2 breakdown and coercivity with the sharp constant") {
  Rng rng(37);
  const double a2 = alpha_e2(kGeneral, 1.5);
  CHECK(a2 == doctest::Approx(0.75));
  CHECK(elastic_fE2(diag(-0.5, -0.5, 1.0), zero_gradq(), kGeneral, 1.5).total == 0.0);
  for (int n = 0; n < 10000; ++n) {
    const Mat3 q = random_s0(rng, 2.0);
    const GradQ p = random_gradq(rng);
    const DensityBreakdown b = elastic_fE2(q, p, kGeneral, 1.5);
    CHECK(b.total >= 0.5 * a2 * norm2(p) - 1e-12);
    CHECK(std::abs(b.isotropic + b.square_sum() - b.total) < 1e-12);
    for (const auto& t : b.square_terms) CHECK(t.second >= 0.0);
    CHECK(b.square_sum() <= fE2_growth_constant(kGeneral, 1.5, q.norm()) * norm2(p) + 1e-12);
  }
  CHECK_THROWS_AS(elastic_fE2(Mat3::Zero(), zero_gradq(), {1, 0, 0, 5}, 1.5), precondition_error);
}

TEST_CASE("printed alpha is not a valid isotropic constant") {
  // One-constant case: f_E = |p|^2/2 on S_*, but alpha/2 |p|^2 = |p|^2.
  Rng rng(38);
  const ElasticConstants one{1, 0, 0, 0};
  const UniaxialSample smp = random_uniaxial_sample(rng, 1.5);
  const double fe = elastic_fE(smp.q, smp.p, one);
  CHECK(fe < 0.5 * alpha(one, 1.5) * norm2(smp.p));
  CHECK(fe == doctest::Approx(0.5 * alpha_e2(one, 1.5) * norm2(smp.p)));
}

TEST_CASE("f_E2 is rotation invariant and chart independent") {
  Rng rng(39);
  for (int n = 0; n < 1000; ++n) {
    const Mat3 q = random_s0(rng);
    const GradQ p = random_gradq(rng);
    const double v = elastic_fE2(q, p, kGeneral, 1.5).total;
    const ChartWeights cw = tensor_partition(q);
    double blended = 0.0;
    for (int c = 1; c <= 3; ++c) {
      const auto [qr, pr] = rotate_tensor_sample(tensor_chart_rotation(c), q, p);
      blended += cw.w[c - 1] * elastic_fE2(qr, pr, kGeneral, 1.5).total;
    }
    CHECK(rel(blended, v) < 1e-12);
    const auto [qr, pr] = rotate_tensor_sample(random_rotation(rng), q, p);
    CHECK(rel(elastic_fE2(qr, pr, kGeneral, 1.5).total, v) < 1e-11);
  }
}

TEST_CASE("frame indifference of f_E on uniaxial samples") {
  Rng rng(40);
  for (int n = 0; n < 100; ++n) {
    const UniaxialSample smp = random_uniaxial_sample(rng, 1.5);
    const auto [qr, pr] = rotate_tensor_sample(random_rotation(rng), smp.q, smp.p);
    CHECK(rel(elastic_fE(qr, pr, kGeneral), elastic_fE(smp.q, smp.p, kGeneral)) < 1e-10);
  }
}

TEST_CASE("corollary form of V") {
  // Regime: L3 <= 0 and min(k1,k2,k3) >= k2 + k4 > 0.
  const ElasticConstants L{1, 0.4, -0.2, 0.1};
  const double s = 1.5;
  const FrankConstants k = frank_from_elastic(L, s);
  REQUIRE(std::min({k.k1, k.k2, k.k3}) >= k.k2 + k.k4);
  Rng rng(41);
  for (int n = 0; n < 1000; ++n) {
    const UniaxialSample smp = random_uniaxial_sample(rng, s);
    const DensityBreakdown g = v_giaq(smp.q, smp.p, L, s);
    const DensityBreakdown e2 = elastic_fE2(smp.q, smp.p, L, s);
    CHECK(std::abs(g.square_sum() - e2.square_sum()) < 1e-9 * (1 + norm2(smp.p)));
    CHECK(std::abs(g.total - elastic_fE(smp.q, smp.p, L)) < 1e-9 * (1 + norm2(smp.p)));
  }
  const DensityBreakdown one = v_giaq(diag(-0.5, -0.5, 1.0), random_gradq(rng), {1, 0, 0, 0}, s);
  CHECK(std::abs(one.square_sum()) < 1e-14);
  CHECK(v_giaq(diag(-0.5, -0.5, 1.0), zero_gradq(), L, s).total == 0.0);
  CHECK_THROWS_AS(v_giaq(Mat3::Zero(), zero_gradq(), {1, 0, 0.2, 0}, s), precondition_error);
}

TEST_CASE("cutoff and modified density") {
  CHECK(cutoff_eta(10.5, 10) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(cutoff_eta(3, 10) == 1.0);
  CHECK(cutoff_eta(11, 10) == 0.0);
  double prev = 1.0;
  for (int i = 0; i <= 100; ++i) {
    const double e = cutoff_eta(10 + i / 100.0, 10);
    CHECK(e <= prev);
    prev = e;
  }
  Rng rng(42);
  const double M = 2.0;
  const double C = modified_fE_upper_constant(kGeneral, 1.5, M);
  for (int n = 0; n < 2000; ++n) {
    const Mat3 q = random_s0(rng, 2.0);
    const GradQ p = random_gradq(rng);
    const double f = modified_fE(q, p, kGeneral, 1.5, M);
    const double p2 = norm2(p);
    CHECK(f >= 0.5 * alpha_e2(kGeneral, 1.5) * p2 - 1e-12);
    CHECK(f <= C * p2);
    if (q.norm() <= M) CHECK(f == doctest::Approx(elastic_fE2(q, p, kGeneral, 1.5).total));
    if (q.norm() >= M + 1) CHECK(f == doctest::Approx(0.5 * alpha_e2(kGeneral, 1.5) * p2));
  }
}

TEST_CASE("pointwise density derivatives against finite differences") {
  Rng rng(43);
  const double h = 1e-6;
  for (Density d : {Density::fE, Density::fE1, Density::fE2, Density::modified}) {
    DensityParams prm{kGeneral, 1.5, 1.0};
    for (int n = 0; n < 30; ++n) {
      Mat3 q = random_s0(rng);
      if (d == Density::modified) q *= (1.2 + 0.7 * n / 30.0) / q.norm(); // inside the cutoff ramp
      const GradQ p = random_gradq(rng);
      const PointDerivs pd = density_derivs(d, q, p, prm);
      CHECK(rel(pd.f, density_value(d, q, p, prm)) < 1e-14);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          Mat3 qp = q, qm = q;
          qp(i, j) += h;
          qm(i, j) -= h;
          const double fd = (density_value(d, qp, p, prm) - density_value(d, qm, p, prm)) / (2 * h);
          CHECK(std::abs(pd.dq(i, j) - fd) < 1e-6 * (1 + std::abs(fd)));
          for (int k = 0; k < 3; ++k) {
            GradQ pp = p, pm = p;
            pp[k](i, j) += h;
            pm[k](i, j) -= h;
            const double fdp = (density_value(d, q, pp, prm) - density_value(d, q, pm, prm)) / (2 * h);
            CHECK(std::abs(pd.dp[k](i, j) - fdp) < 1e-6 * (1 + std::abs(fdp)));
          }
        }
    }
  }
}

TEST_CASE("Oseen-Frank density examples") {
  const FrankConstants one{1, 1, 1, 0};
  CHECK(oseen_frank_W(Vec3(0, 0, 1), GradU::Zero(), one) == 0.0);
  // u = (cos x3, sin x3, 0) at x3 = 0.7
  const double x3 = 0.7;
  const Vec3 u(std::cos(x3), std::sin(x3), 0);
  GradU g = GradU::Zero();
  g(2, 0) = -std::sin(x3);
  g(2, 1) = std::cos(x3);
  CHECK(oseen_frank_W(u, g, one) == doctest::Approx(0.5).epsilon(1e-15));
  // u = x/|x| at (0,0,1): grad u = I - e3 e3, div u = 2, curl u = 0.
  const GradU gs = Vec3(1, 1, 0).asDiagonal();
  const FrankConstants k{2, 1.2, 1.5, 0.3};
  CHECK(oseen_frank_W(Vec3(0, 0, 1), gs, k) == doctest::Approx(2 * k.k1 - (k.k2 + k.k4)).epsilon(1e-15));
  CHECK(oseen_frank_W(Vec3(0, 0, 1), gs, {2, 1, 1, -1}) == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("Oseen-Frank remainder V") {
  const FrankConstants k{2, 1.2, 1.5, 0.3};
  const DensityBreakdown c = oseen_frank_V(Vec3(0, 0, 1), GradU::Zero(), k);
  CHECK(c.total == 0.0);
  Rng rng(44);
  for (int n = 0; n < 1000; ++n) {
    const Vec3 u = random_unit(rng);
    const GradU g = random_tangent_grad(rng, u);
    const DensityBreakdown one = oseen_frank_V(u, g, {1, 1, 1, 0});
    CHECK(std::abs(one.square_sum()) < 1e-14);
    CHECK(one.total == doctest::Approx(0.5 * g.squaredNorm()));
    const DensityBreakdown b = oseen_frank_V(u, g, k);
    CHECK(std::abs(b.total - oseen_frank_W(u, g, k)) < 1e-10);
    for (const auto& t : b.square_terms) CHECK(t.second >= 0.0);
    // Per-chart values coincide on overlaps.
    double first = -1;
    for (int ch = 1; ch <= 6; ++ch) {
      if (!in_sphere_chart(u, ch)) continue;
      const auto [ur, gr] = rotate_sample(rotation_to_pole(u, ch), u, g);
      const DensityBreakdown at_pole = oseen_frank_V(ur, gr, k);
      if (first < 0) first = at_pole.square_sum();
      CHECK(std::abs(at_pole.square_sum() - first) < 1e-10);
    }
  }
  CHECK_THROWS_AS(oseen_frank_V(Vec3(0, 0, 1), GradU::Zero(), {1, 1, 1, 1.5}), precondition_error);
}

TEST_CASE("coercivity falsifier") {
  const auto hit = coercivity_falsify({1, 0, 0, 5}, 1.5, 100000);
  REQUIRE(hit.witness.has_value());
  CHECK(hit.witness->density < -1e6);
  GradQ tp;
  for (int k = 0; k < 3; ++k) tp[k] = hit.witness->t * hit.witness->p[k];
  CHECK(elastic_fE(hit.witness->t * hit.witness->q, tp, {1, 0, 0, 5}) == doctest::Approx(hit.witness->density));
  CHECK_FALSE(coercivity_falsify({1, 0, 0, 0}, 1.5, 1000000).witness.has_value());
  CHECK_FALSE(coercivity_falsify({1, 0.3, -0.4, 0}, 1.5, 100000).witness.has_value());
}
