#pragma once

#include "lcq/densities.hpp"
#include "lcq/tensor.hpp"

#include <utility>
#include <vector>

namespace lcq {

struct ChartWeights {
  std::vector<double> w;
};

// Sphere charts 1..6: u3 > 1/2, u3 < -1/2, u2 > 1/2, u2 < -1/2, u1 > 1/2, u1 < -1/2.
bool in_sphere_chart(const Vec3& u, int chart);
// Rotation R in SO(3) with R u = e3. Charts 1-4 use the closed form built from
// rotations about the x and y axes; charts 5-6 apply it after a cyclic
// permutation of coordinates so that the same formula stays nonsingular.
Mat3 rotation_to_pole(const Vec3& u, int chart);
// Closed form for chart 1, valid whenever u2^2 + u3^2 > 0.
Mat3 pole_rotation_closed_form(const Vec3& u);

ChartWeights sphere_partition(const Vec3& u);

// Tensor charts 1..3: |Q_ii| < |Q|/sqrt(3).
bool in_tensor_chart(const QTensor& q, int chart);
ChartWeights tensor_partition(const QTensor& q);
// Rotation used on tensor chart i: a coordinate permutation moving axis i to axis 1.
Mat3 tensor_chart_rotation(int chart);

std::pair<Vec3, GradU> rotate_sample(const Mat3& R, const Vec3& u, const GradU& g);
std::pair<QTensor, GradQ> rotate_tensor_sample(const Mat3& R, const QTensor& q, const GradQ& p);

double smoothstep5(double x);

} // namespace lcq
