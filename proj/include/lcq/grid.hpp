#pragma once

#include "lcq/constants.hpp"
#include "lcq/densities.hpp"
#include "lcq/tensor.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace lcq {

// Neumaier compensated sum; keeps energy differences meaningful near convergence.
struct CompensatedSum {
  double sum = 0.0, comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

struct GridSpec {
  std::array<int, 3> dims{9, 9, 9};
  double h = 0.25;
  Vec3 origin{-1.0, -1.0, -1.0};

  void validate() const;
  long num_nodes() const { return static_cast<long>(dims[0]) * dims[1] * dims[2]; }
  long index(int i, int j, int k) const { return i + static_cast<long>(dims[0]) * (j + static_cast<long>(dims[1]) * k); }
  std::array<int, 3> coords(long n) const;
  Vec3 position(long n) const;
  bool on_boundary(long n) const;
  bool operator==(const GridSpec& o) const { return dims == o.dims && h == o.h && origin == o.origin; }
};

// Cube [-half, half]^3 with n nodes per side.
GridSpec cube_grid(int n, double half = 1.0);

struct QField {
  GridSpec spec;
  std::vector<Mat3> values;
  std::vector<std::uint8_t> boundary;

  QField() = default;
  explicit QField(const GridSpec& s);
};

struct DirectorField {
  GridSpec spec;
  std::vector<Vec3> values;

  DirectorField() = default;
  explicit DirectorField(const GridSpec& s);
};

// Central differences in the interior, one-sided second order at the boundary.
template <class T>
std::array<T, 3> fd_gradient_of(const GridSpec& spec, const std::vector<T>& v, long node) {
  const auto c = spec.coords(node);
  std::array<T, 3> out;
  for (int a = 0; a < 3; ++a) {
    const int n = spec.dims[a];
    auto at = [&](int shift) {
      auto cc = c;
      cc[a] += shift;
      return v[spec.index(cc[0], cc[1], cc[2])];
    };
    const double inv = 1.0 / (2.0 * spec.h);
    if (c[a] == 0) out[a] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) * inv;
    else if (c[a] == n - 1) out[a] = (3.0 * at(0) - 4.0 * at(-1) + at(-2)) * inv;
    else out[a] = (at(1) - at(-1)) * inv;
  }
  return out;
}

GradQ fd_gradient(const QField& field, long node);
GradU fd_gradient(const DirectorField& field, long node);

// 7-point Laplacian at an interior node.
template <class T>
T fd_laplacian_of(const GridSpec& spec, const std::vector<T>& v, long node) {
  const auto c = spec.coords(node);
  T acc = -6.0 * v[node];
  for (int a = 0; a < 3; ++a) {
    auto cp = c, cm = c;
    cp[a] += 1;
    cm[a] -= 1;
    acc += v[spec.index(cp[0], cp[1], cp[2])] + v[spec.index(cm[0], cm[1], cm[2])];
  }
  return acc / (spec.h * spec.h);
}

struct EnergyModel {
  Density density = Density::modified;
  ElasticConstants L{1, 0, 0, 0};
  BulkParams bp;
  double L_param = 1.0;
  double M = 10.0;
  bool include_bulk = true;

  DensityParams density_params() const { return {L, bp.s_plus, M}; }
  void validate() const;
};

// Quadrature weight of each node: h^3 times (adjacent cells)/8.
std::vector<double> node_weights(const GridSpec& spec);

// Each cell contributes h^3/8 per corner, evaluated with the corner value and
// the three cell edges through that corner. Exact on linear fields.
double total_energy(const QField& field, const EnergyModel& model);
double elastic_energy(const QField& field, const EnergyModel& model);
// (1/L) * integral of the shifted bulk density.
double penalty_integral(const QField& field, const EnergyModel& model);

QField constant_field(const GridSpec& spec, const QTensor& q);
// Boundary nodes carry s(n n - I/3), n = (x - center)/|x - center|. Interior zero.
QField hedgehog_boundary(const GridSpec& spec, double s_plus, const Vec3& center = Vec3::Zero());

// Boundary directors (sin t, 0, cos t) with t = amplitude * beta(y) beta(z) on each face, where y, z are
// the face coordinates scaled to [-1,1] and beta(y) = (1-y^2)^3. The datum is flat to third order at every
// edge of the box, which keeps minimizers smooth up to the edges. Interior zero.
QField twist_bump_boundary(const GridSpec& spec, double s_plus, double amplitude);

double w12_distance(const QField& a, const QField& b);
double dist_to_Sstar_L2(const QField& field, double s_plus);
double max_q_norm(const QField& field);

QField qfield_from_directors(const DirectorField& d, double s_plus, const std::vector<std::uint8_t>& boundary);
DirectorField directors_from_qfield(const QField& q);

// Legacy VTK structured points, ASCII. Q as a 9-component tensor per node plus scalars.
void write_vtk(const QField& field, const std::string& path, double s_plus, const std::string& title = "lcq field");
// Per node: i, j, k, x, y, z, |Q|, distance to S_*, elastic density at the node.
void write_node_csv(const QField& field, const std::string& path, const EnergyModel& model);

} // namespace lcq
