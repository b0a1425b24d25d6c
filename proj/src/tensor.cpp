#include "lcq/tensor.hpp"

#include <cmath>

namespace lcq {

namespace {
constexpr double kUnitTol = 1e-10;
constexpr double kGapTol = 1e-12;

double sgn(double x) { return x < 0.0 ? -1.0 : 1.0; }
} // namespace

QTensor sym_traceless(const Mat3& m) {
  Mat3 s = 0.5 * (m + m.transpose());
  s.diagonal().array() -= s.trace() / 3.0;
  return s;
}

QTensor from_director(const Vec3& u, double s) {
  if (std::abs(u.norm() - 1.0) > kUnitTol)
    throw precondition_error("from_director: director is not a unit vector");
  Mat3 q;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) q(i, j) = q(j, i) = s * u(i) * u(j);
  q.diagonal().array() -= s / 3.0;
  return q;
}

SpectralData eigendecompose(const QTensor& q) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(0.5 * (q + q.transpose()));
  SpectralData d;
  for (int i = 0; i < 3; ++i) {
    d.eigenvalues(i) = es.eigenvalues()(2 - i);
    d.eigenvectors.col(i) = es.eigenvectors().col(2 - i);
  }
  return d;
}

Projection project_uniaxial(const QTensor& q, double s_plus) {
  if (!(s_plus > 0.0)) throw precondition_error("project_uniaxial: s_plus must be positive");
  const SpectralData d = eigendecompose(q);
  Projection out;
  Vec3 n = d.eigenvectors.col(0);
  if (d.eigenvalues(0) - d.eigenvalues(1) < kGapTol) {
    // Top eigenspace is not one-dimensional: take the coordinate axis with the
    // largest projection onto it, smallest index first.
    out.degenerate = true;
    int dim = 2;
    if (d.eigenvalues(0) - d.eigenvalues(2) < kGapTol) dim = 3;
    Mat3 proj = Mat3::Zero();
    for (int i = 0; i < dim; ++i) proj += d.eigenvectors.col(i) * d.eigenvectors.col(i).transpose();
    int best = 0;
    double best_norm = -1.0;
    for (int i = 0; i < 3; ++i) {
      const double nrm = proj.col(i).norm();
      if (nrm > best_norm + 1e-12) {
        best_norm = nrm;
        best = i;
      }
    }
    n = proj.col(best).normalized();
  }
  int imax = 0;
  n.cwiseAbs().maxCoeff(&imax);
  if (n(imax) < 0.0) n = -n;
  out.director = n;
  out.q = from_director(n, s_plus);
  return out;
}

double uniaxial_identity_residual(const QTensor& q, double s_plus) {
  const Mat3 r = q * q.transpose() - (s_plus / 3.0) * q - (2.0 * s_plus * s_plus / 9.0) * Mat3::Identity();
  return r.norm();
}

Vec3 director_from_Q(const QTensor& q, double s_plus) {
  if (uniaxial_identity_residual(q, s_plus) > 1e-8)
    throw precondition_error("director_from_Q: tensor is not on the uniaxial manifold");
  Vec3 m;
  for (int i = 0; i < 3; ++i) m(i) = std::sqrt(std::abs(q(i, i) / s_plus + 1.0 / 3.0));
  Vec3 u;
  if (m(0) >= 1e-8) {
    u << m(0), sgn(q(0, 1)) * m(1), sgn(q(0, 2)) * m(2);
  } else if (m(1) >= 1e-8) {
    // u1 vanishes: pivot on u2 and read the sign of u3 from Q23.
    u << 0.0, m(1), sgn(q(1, 2)) * m(2);
  } else {
    u << 0.0, 0.0, 1.0;
  }
  return u.normalized();
}

const std::array<Mat3, 5>& s0_basis() {
  static const std::array<Mat3, 5> basis = [] {
    std::array<Mat3, 5> e;
    for (auto& m : e) m.setZero();
    const double r2 = 1.0 / std::sqrt(2.0), r6 = 1.0 / std::sqrt(6.0);
    e[0](0, 0) = r2;
    e[0](1, 1) = -r2;
    e[1](0, 0) = r6;
    e[1](1, 1) = r6;
    e[1](2, 2) = -2.0 * r6;
    e[2](0, 1) = e[2](1, 0) = r2;
    e[3](0, 2) = e[3](2, 0) = r2;
    e[4](1, 2) = e[4](2, 1) = r2;
    return e;
  }();
  return basis;
}

Vec5 to_coeffs(const QTensor& q) {
  const auto& e = s0_basis();
  Vec5 c;
  for (int a = 0; a < 5; ++a) c(a) = (q.array() * e[a].array()).sum();
  return c;
}

QTensor from_coeffs(const Vec5& c) {
  const auto& e = s0_basis();
  Mat3 q = Mat3::Zero();
  for (int a = 0; a < 5; ++a) q += c(a) * e[a];
  return q;
}

} // namespace lcq
