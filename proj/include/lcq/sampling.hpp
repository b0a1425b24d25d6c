#pragma once

#include "lcq/constants.hpp"
#include "lcq/densities.hpp"

#include <functional>
#include <random>

namespace lcq {

using Rng = std::mt19937_64;

Vec3 random_unit(Rng& rng);
// Gradient with every row orthogonal to u, entries of size ~scale.
GradU random_tangent_grad(Rng& rng, const Vec3& u, double scale = 1.0);
QTensor random_s0(Rng& rng, double scale = 1.0);
GradQ random_gradq(Rng& rng, double scale = 1.0);
Mat3 random_rotation(Rng& rng);

struct UniaxialSample {
  Vec3 u;
  GradU g;
  QTensor q;
  GradQ p;
};
UniaxialSample random_uniaxial_sample(Rng& rng, double s, double grad_scale = 1.0);

// Rejection sampling of elastic constants in a box until pred holds.
ElasticConstants random_elastic(Rng& rng, double s, const std::function<bool(const ElasticConstants&)>& pred,
                                double box = 2.0);

} // namespace lcq
