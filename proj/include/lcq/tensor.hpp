#pragma once

#include <Eigen/Dense>
#include <array>
#include <stdexcept>
#include <string>

namespace lcq {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;
using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;

// Symmetric traceless 3x3 tensor. Stored as a full matrix; every constructor
// below symmetrizes and removes the trace.
using QTensor = Mat3;

struct precondition_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SpectralData {
  Vec3 eigenvalues;  // descending
  Mat3 eigenvectors; // column i pairs with eigenvalues(i)
};

struct Projection {
  QTensor q;
  Vec3 director;
  bool degenerate = false;
};

QTensor sym_traceless(const Mat3& m);

QTensor from_director(const Vec3& u, double s);
SpectralData eigendecompose(const QTensor& q);
Projection project_uniaxial(const QTensor& q, double s_plus);
double uniaxial_identity_residual(const QTensor& q, double s_plus);
Vec3 director_from_Q(const QTensor& q, double s_plus);

// Orthonormal basis of S0: |Q|_F equals the 2-norm of its coefficients.
const std::array<Mat3, 5>& s0_basis();
Vec5 to_coeffs(const QTensor& q);
QTensor from_coeffs(const Vec5& c);

inline double frob2(const Mat3& m) { return m.squaredNorm(); }

} // namespace lcq
