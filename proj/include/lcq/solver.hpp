#pragma once

#include "lcq/grid.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lcq {

struct SolveConfig {
  int max_iters = 20000;
  double step0 = 0.01;
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  double grad_tol = 1e-6;
  double L_param = 0.1;
  double M_cutoff = 10.0;
  std::uint64_t seed = 1;
  Density density = Density::modified;

  void validate() const;
};

struct SolveReport {
  int iterations = 0;
  double final_energy = 0.0;
  double final_grad_norm = 0.0;
  std::vector<double> max_Q_norm_trace; // entry 0 is the initial iterate
  std::vector<double> energy_trace;
  std::vector<double> grad_norm_trace;
  std::vector<double> penalty_trace;
  bool converged = false;
  bool failed = false;
  std::string message;
};

EnergyModel model_from(const ElasticConstants& L, const BulkParams& bp, const SolveConfig& cfg);

// Exact gradient of total_energy in the nine entries of every node, projected
// to S0 and zeroed on boundary nodes.
std::vector<Mat3> discrete_energy_gradient(const QField& field, const EnergyModel& model);
// L2 norm of the Riesz representative: sqrt(sum |g_n|^2 / w_n) over free nodes.
double gradient_norm(const QField& field, const std::vector<Mat3>& grad);

struct InitPolicy {
  bool harmonic = true;      // componentwise harmonic extension of the boundary data
  bool project = true;       // then snap every interior node to S_*
  double noise = 0.0;        // seeded perturbation amplitude added afterwards
  std::uint64_t seed = 1;
};
void initialize_interior(QField& field, double s_plus, const InitPolicy& policy);

std::pair<QField, SolveReport> minimize(const QField& field, const ElasticConstants& L, const BulkParams& bp,
                                        const SolveConfig& cfg);
std::pair<QField, SolveReport> minimize(const QField& field, const EnergyModel& model, const SolveConfig& cfg);

// Strong form of the modified Euler-Lagrange system at each interior node:
// div sym0(c p + V_p) - sym0 V_Q - (1/L) grad f_B, with the divergence taken by central
// differences of the nodal flux. Independent of the solver's cell stencil, so it measures
// consistency rather than echoing the descent gradient. Boundary entries are zero.
std::vector<Mat3> el_residual_modified_nodes(const QField& field, const EnergyModel& model);
// One-constant form: c Lap Q - (1/L) grad f_B, same nested Laplacian.
std::vector<Mat3> el_residual_one_constant_nodes(const QField& field, double c, const BulkParams& bp, double L_param);
double interior_l2(const QField& field, const std::vector<Mat3>& r);
double el_residual_modified(const QField& field, const EnergyModel& model);

struct TestTensor {
  Vec3 center;
  double radius;
  int basis; // index into s0_basis()
};
// 27 bumps on a 3x3x3 lattice over the domain times the 5 basis tensors of S0.
std::vector<TestTensor> test_bank(const GridSpec& spec);
double bump(const TestTensor& t, const Vec3& x);

// Weight on the harmonic-map block: bar_alpha (the system as derived) or 1,
// a comparison form that drops the constant.
enum class ConstrainedForm { bar_alpha, unit };

// Constrained Euler-Lagrange expression on S_* (harmonic block plus the
// remainder terms of f_E1), nodal strong form.
std::vector<Mat3> el_constrained_nodes(const QField& field, const ElasticConstants& L, double s_plus,
                                       ConstrainedForm form = ConstrainedForm::bar_alpha);
// bar_alpha (-s Lap Q + 2 dQ dQ - 2 (Q/s + I/3)|dQ|^2)
std::vector<Mat3> el_constrained_one_constant_nodes(const QField& field, double bar_alpha, double s_plus);
double weak_residual(const QField& field, const std::vector<Mat3>& nodes);
double el_residual_constrained(const QField& field, const ElasticConstants& L, double s_plus,
                               ConstrainedForm form = ConstrainedForm::bar_alpha);

double harmonic_residual(const DirectorField& d);
double qh_residual(const QField& field, double s_plus);

bool max_norm_monitor(const SolveReport& report, double M);

double oseen_frank_energy(const DirectorField& d, const FrankConstants& k);
// Derivatives of W(u, g) in u and g.
void oseen_frank_derivs(const Vec3& u, const GradU& g, const FrankConstants& k, Vec3& du, GradU& dg);
std::vector<Vec3> oseen_frank_gradient(const DirectorField& d, const FrankConstants& k);
std::pair<DirectorField, SolveReport> minimize_on_Sstar(const DirectorField& d, const FrankConstants& k,
                                                        const SolveConfig& cfg);

void write_report_csv(const SolveReport& r, const std::string& path);

} // namespace lcq
