#include "lcq/frames.hpp"

#include <algorithm>
#include <cmath>

namespace lcq {

namespace {
constexpr double kSphereWidth = 0.25;
constexpr double kTensorWidth = 0.1;

// Axis and sign defining each sphere chart.
constexpr int kAxis[6] = {2, 2, 1, 1, 0, 0};
constexpr double kSign[6] = {1, -1, 1, -1, 1, -1};

Mat3 cyclic() {
  // (u1,u2,u3) -> (u2,u3,u1)
  Mat3 p = Mat3::Zero();
  p(0, 1) = p(1, 2) = p(2, 0) = 1.0;
  return p;
}
} // namespace

double smoothstep5(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
}

bool in_sphere_chart(const Vec3& u, int chart) {
  if (chart < 1 || chart > 6) throw precondition_error("sphere chart index must be 1..6");
  return kSign[chart - 1] * u(kAxis[chart - 1]) > 0.5;
}

Mat3 pole_rotation_closed_form(const Vec3& u) {
  const double rho = std::hypot(u(1), u(2));
  if (!(rho > 0.0)) throw precondition_error("pole rotation: u2 = u3 = 0");
  Mat3 R;
  R << rho, -u(0) * u(1) / rho, -u(0) * u(2) / rho,
       0.0, u(2) / rho, -u(1) / rho,
       u(0), u(1), u(2);
  return R;
}

Mat3 rotation_to_pole(const Vec3& u, int chart) {
  if (std::abs(u.norm() - 1.0) > 1e-10) throw precondition_error("rotation_to_pole: u is not a unit vector");
  if (!in_sphere_chart(u, chart)) throw precondition_error("rotation_to_pole: u outside the chart");
  if (chart <= 4) return pole_rotation_closed_form(u);
  const Mat3 p = cyclic();
  return pole_rotation_closed_form(p * u) * p;
}

ChartWeights sphere_partition(const Vec3& u) {
  const double n = u.norm();
  if (!(n > 0.0)) throw precondition_error("sphere_partition: u = 0");
  const Vec3 v = u / n;
  ChartWeights cw;
  cw.w.resize(6);
  double sum = 0.0;
  for (int i = 0; i < 6; ++i) {
    cw.w[i] = smoothstep5((kSign[i] * v(kAxis[i]) - 0.5) / kSphereWidth);
    sum += cw.w[i];
  }
  for (double& w : cw.w) w /= sum;
  return cw;
}

bool in_tensor_chart(const QTensor& q, int chart) {
  if (chart < 1 || chart > 3) throw precondition_error("tensor chart index must be 1..3");
  return std::abs(q(chart - 1, chart - 1)) < q.norm() / std::sqrt(3.0);
}

ChartWeights tensor_partition(const QTensor& q) {
  const double n = q.norm();
  if (!(n > 0.0)) throw precondition_error("tensor_partition: Q = 0");
  ChartWeights cw;
  cw.w.resize(3);
  double sum = 0.0;
  for (int i = 0; i < 3; ++i) {
    cw.w[i] = smoothstep5((1.0 / std::sqrt(3.0) - std::abs(q(i, i)) / n) / kTensorWidth);
    sum += cw.w[i];
  }
  for (double& w : cw.w) w /= sum;
  return cw;
}

Mat3 tensor_chart_rotation(int chart) {
  if (chart < 1 || chart > 3) throw precondition_error("tensor chart index must be 1..3");
  Mat3 p = Mat3::Identity();
  const Mat3 c = cyclic();
  for (int i = 1; i < chart; ++i) p = c * p;
  return p;
}

std::pair<Vec3, GradU> rotate_sample(const Mat3& R, const Vec3& u, const GradU& g) {
  return {R * u, R * g * R.transpose()};
}

std::pair<QTensor, GradQ> rotate_tensor_sample(const Mat3& R, const QTensor& q, const GradQ& p) {
  GradQ out;
  for (int a = 0; a < 3; ++a) {
    Mat3 acc = Mat3::Zero();
    for (int k = 0; k < 3; ++k) acc += R(a, k) * p[k];
    out[a] = R * acc * R.transpose();
  }
  return {R * q * R.transpose(), out};
}

} // namespace lcq
