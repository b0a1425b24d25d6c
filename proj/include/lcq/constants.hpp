#pragma once

#include <string>
#include <vector>

namespace lcq {

double s_plus(double a, double b, double c);

struct BulkParams {
  double a = 1.0, b = 1.0, c = 1.0;
  double s_plus = 1.5;

  BulkParams() = default;
  BulkParams(double a_, double b_, double c_);
};

struct ElasticConstants {
  double L1 = 0.0, L2 = 0.0, L3 = 0.0, L4 = 0.0;
};

struct FrankConstants {
  double k1 = 0.0, k2 = 0.0, k3 = 0.0, k4 = 0.0;
};

FrankConstants frank_from_elastic(const ElasticConstants& L, double s_plus);
ElasticConstants elastic_from_frank(const FrankConstants& k, double s_plus);

// One inequality of an admissibility condition, written as margin > 0
// (or margin >= 0 when strict is false).
struct Clause {
  std::string text;
  double margin;
  bool strict = true;
  bool holds() const { return strict ? margin > 0.0 : margin >= 0.0; }
};

std::vector<Clause> stability_L4zero_clauses(const ElasticConstants& L);
std::vector<Clause> L_cond_clauses(const ElasticConstants& L, double s_plus);
std::vector<Clause> coercivity_iff_clauses(const ElasticConstants& L, double s_plus);
std::vector<Clause> ericksen_clauses(const FrankConstants& k);
std::vector<Clause> er1_clauses(const ElasticConstants& L, double s_plus);

bool all_hold(const std::vector<Clause>& clauses);
// First failing clause, or an empty string.
std::string first_failure(const std::vector<Clause>& clauses);

bool check_stability_L4zero(const ElasticConstants& L);
bool check_L_cond(const ElasticConstants& L, double s_plus);
// Valid only for L4 >= 0.
bool check_coercivity_iff(const ElasticConstants& L, double s_plus);
bool check_ericksen(const FrankConstants& k);
bool check_er1(const ElasticConstants& L, double s_plus);

// min(k1,k2,k3)/s^2 written in the elastic constants.
double alpha(const ElasticConstants& L, double s_plus);
// Sharp isotropic constant of the uniaxial decomposition: tilde_alpha(k)/(2 s^2).
// Positive iff check_er1 holds.
double alpha_e2(const ElasticConstants& L, double s_plus);
double tilde_alpha(const FrankConstants& k);
double bar_alpha(const ElasticConstants& L, double s_plus);

} // namespace lcq
