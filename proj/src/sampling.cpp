#include "lcq/sampling.hpp"

namespace lcq {

namespace {
double normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }
} // namespace

Vec3 random_unit(Rng& rng) {
  for (;;) {
    Vec3 v(normal(rng), normal(rng), normal(rng));
    const double n = v.norm();
    if (n > 1e-3) return v / n;
  }
}

GradU random_tangent_grad(Rng& rng, const Vec3& u, double scale) {
  const Mat3 proj = Mat3::Identity() - u * u.transpose();
  GradU g;
  for (int k = 0; k < 3; ++k) {
    Vec3 v(normal(rng), normal(rng), normal(rng));
    g.row(k) = scale * (proj * v).transpose();
  }
  return g;
}

QTensor random_s0(Rng& rng, double scale) {
  Vec5 c;
  for (int a = 0; a < 5; ++a) c(a) = scale * normal(rng);
  return from_coeffs(c);
}

GradQ random_gradq(Rng& rng, double scale) {
  GradQ p;
  for (auto& m : p) m = random_s0(rng, scale);
  return p;
}

Mat3 random_rotation(Rng& rng) {
  Mat3 a;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = normal(rng);
  Eigen::HouseholderQR<Mat3> qr(a);
  Mat3 q = qr.householderQ();
  const Mat3 r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < 3; ++i)
    if (r(i, i) < 0) q.col(i) = -q.col(i);
  if (q.determinant() < 0) q.col(0) = -q.col(0);
  return q;
}

UniaxialSample random_uniaxial_sample(Rng& rng, double s, double grad_scale) {
  UniaxialSample out;
  out.u = random_unit(rng);
  out.g = random_tangent_grad(rng, out.u, grad_scale);
  out.q = from_director(out.u, s);
  out.p = induced_gradq(out.u, out.g, s);
  return out;
}

ElasticConstants random_elastic(Rng& rng, double s, const std::function<bool(const ElasticConstants&)>& pred,
                                double box) {
  std::uniform_real_distribution<double> uni(-box, box);
  for (;;) {
    ElasticConstants L{std::abs(uni(rng)), uni(rng), uni(rng), uni(rng) / s};
    if (pred(L)) return L;
  }
}

} // namespace lcq
