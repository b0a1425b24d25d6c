#pragma once

#include "lcq/constants.hpp"
#include "lcq/tensor.hpp"

#include <array>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace lcq {

// p[k](i,j) = d_k Q_ij
using GradQ = std::array<Mat3, 3>;
// g(k,i) = d_k u_i
using GradU = Mat3;

GradQ zero_gradq();
double norm2(const GradQ& p);

struct DensityBreakdown {
  double isotropic = 0.0;
  std::vector<std::pair<std::string, double>> square_terms;
  double total = 0.0;

  double square_sum() const;
};

// Bulk potential

double bulk_f(const QTensor& q, const BulkParams& bp);
double bulk_min_value(const BulkParams& bp);
double bulk_f_tilde(const QTensor& q, const BulkParams& bp);
QTensor bulk_gradient(const QTensor& q, const BulkParams& bp);
// Second derivative along (xi, eta) of f_B viewed as a function of all nine entries.
double bulk_second_derivative(const Mat3& q, const Mat3& xi, const Mat3& eta, const BulkParams& bp);
// Hessian in the orthonormal S0 basis of to_coeffs.
Mat5 bulk_hessian(const QTensor& q, const BulkParams& bp);
// Hessian in the nine entries Q_ij, row index 3*i+j.
Eigen::Matrix<double, 9, 9> bulk_hessian_full(const Mat3& q, const BulkParams& bp);

// Elastic densities

double elastic_fE(const QTensor& q, const GradQ& p, const ElasticConstants& L);
DensityBreakdown elastic_fE1(const QTensor& q, const GradQ& p, const ElasticConstants& L, double s_plus);
// Same as above with the printed minus sign inside the L3 square (kept for comparison).
DensityBreakdown elastic_fE1_printed_sign(const QTensor& q, const GradQ& p, const ElasticConstants& L, double s_plus);
DensityBreakdown elastic_fE2(const QTensor& q, const GradQ& p, const ElasticConstants& L, double s_plus);
DensityBreakdown v_giaq(const QTensor& q, const GradQ& p, const ElasticConstants& L, double s_plus);

// Upper bound C(|Q|) with V(Q,p) <= C |p|^2 for the f_E2 remainder.
double fE2_growth_constant(const ElasticConstants& L, double s_plus, double q_norm);

double cutoff_eta(double r, double M);
double cutoff_eta_prime(double r, double M);
double modified_fE(const QTensor& q, const GradQ& p, const ElasticConstants& L, double s_plus, double M);
// C with modified_fE <= C |p|^2 everywhere.
double modified_fE_upper_constant(const ElasticConstants& L, double s_plus, double M);

// Oseen-Frank

double oseen_frank_W(const Vec3& u, const GradU& g, const FrankConstants& k);
DensityBreakdown oseen_frank_V(const Vec3& u, const GradU& g, const FrankConstants& k);

// Gradient of s(u (x) u - I/3) induced by g through the product rule.
GradQ induced_gradq(const Vec3& u, const GradU& g, double s);

// Pointwise density with partial derivatives, used by the discrete solver.

enum class Density { fE, fE1, fE2, modified };

Density parse_density(const std::string& name);
std::string density_name(Density d);

struct DensityParams {
  ElasticConstants L;
  double s_plus = 1.5;
  double M = 10.0;
};

struct PointDerivs {
  double f = 0.0;
  GradQ dp;  // d f / d p[k](i,j), entries treated as independent
  Mat3 dq;   // d f / d Q_ij, entries treated as independent
};

double density_value(Density d, const Mat3& q, const GradQ& p, const DensityParams& dp);
PointDerivs density_derivs(Density d, const Mat3& q, const GradQ& p, const DensityParams& dp);

// Each density splits as (c/2)|p|^2 + remainder. c is L1 for f_E, bar_alpha for
// f_E1 and alpha_e2 for f_E2 and the modified density.
double isotropic_constant(Density d, const ElasticConstants& L, double s_plus);
PointDerivs remainder_derivs(Density d, const Mat3& q, const GradQ& p, const DensityParams& dp);

// Throws precondition_error naming the first failing inequality.
void validate_density(Density d, const ElasticConstants& L, double s_plus);

// Coercivity falsifier

struct FalsifyWitness {
  QTensor q;
  GradQ p;
  double t = 0.0;
  double density = 0.0;
  long evaluations = 0;
};

struct FalsifyResult {
  std::optional<FalsifyWitness> witness;
  long evaluations = 0;
};

FalsifyResult coercivity_falsify(const ElasticConstants& L, double s_plus, long budget, std::uint64_t seed = 1);

} // namespace lcq
