#include "lcq/constants.hpp"
#include "lcq/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace lcq {

double s_plus(double a, double b, double c) {
  if (!(a > 0.0 && b > 0.0 && c > 0.0))
    throw precondition_error("s_plus: bulk coefficients must be positive");
  return (b + std::sqrt(b * b + 24.0 * a * c)) / (4.0 * c);
}

BulkParams::BulkParams(double a_, double b_, double c_) : a(a_), b(b_), c(c_), s_plus(lcq::s_plus(a_, b_, c_)) {}

FrankConstants frank_from_elastic(const ElasticConstants& L, double s) {
  if (!(s > 0.0)) throw precondition_error("frank_from_elastic: s_plus must be positive");
  const double s2 = s * s;
  return {s2 * (2 * L.L1 + L.L2 + L.L3 - 2 * s * L.L4 / 3), s2 * (2 * L.L1 - 2 * s * L.L4 / 3),
          s2 * (2 * L.L1 + L.L2 + L.L3 + 4 * s * L.L4 / 3), s2 * L.L3};
}

ElasticConstants elastic_from_frank(const FrankConstants& k, double s) {
  if (!(s > 0.0)) throw precondition_error("elastic_from_frank: s_plus must be positive");
  const double s2 = s * s;
  ElasticConstants L;
  L.L3 = k.k4 / s2;
  L.L4 = (k.k3 - k.k1) / (2 * s2 * s);
  L.L1 = -k.k1 / (6 * s2) + k.k2 / (2 * s2) + k.k3 / (6 * s2);
  L.L2 = k.k1 / s2 - 2 * L.L1 - L.L3 + 2 * s * L.L4 / 3;
  return L;
}

std::vector<Clause> stability_L4zero_clauses(const ElasticConstants& L) {
  return {{"L1+L3>0", L.L1 + L.L3},
          {"2L1-L3>0", 2 * L.L1 - L.L3},
          {"L1+5/3L2+1/6L3>0", L.L1 + 5.0 / 3.0 * L.L2 + L.L3 / 6.0}};
}

std::vector<Clause> L_cond_clauses(const ElasticConstants& L, double s) {
  return {{"L2>=0", L.L2, false},
          {"L4>=0", L.L4, false},
          {"L1-|L3|-2s/3 L4>0", L.L1 - std::abs(L.L3) - 2 * s * L.L4 / 3}};
}

std::vector<Clause> coercivity_iff_clauses(const ElasticConstants& L, double s) {
  return {{"L1+L3-s/6 L4>0", L.L1 + L.L3 - s * L.L4 / 6},
          {"2L1-L3-s/3 L4>0", 2 * L.L1 - L.L3 - s * L.L4 / 3},
          {"L1+5/3L2+1/6L3-s/6 L4>0", L.L1 + 5.0 / 3.0 * L.L2 + L.L3 / 6.0 - s * L.L4 / 6}};
}

std::vector<Clause> ericksen_clauses(const FrankConstants& k) {
  return {{"k1>0", k.k1},
          {"k2>|k4|", k.k2 - std::abs(k.k4)},
          {"k3>0", k.k3},
          {"2k1>k2+k4", 2 * k.k1 - k.k2 - k.k4}};
}

std::vector<Clause> er1_clauses(const ElasticConstants& L, double s) {
  return {{"L1-|L3|/2>s/3 L4", L.L1 - std::abs(L.L3) / 2 - s * L.L4 / 3},
          {"L1+L2/2+L3/2+2s/3 L4>0", L.L1 + L.L2 / 2 + L.L3 / 2 + 2 * s * L.L4 / 3},
          {"L1+L2+L3/2>s/3 L4", L.L1 + L.L2 + L.L3 / 2 - s * L.L4 / 3}};
}

bool all_hold(const std::vector<Clause>& clauses) {
  return std::all_of(clauses.begin(), clauses.end(), [](const Clause& c) { return c.holds(); });
}

std::string first_failure(const std::vector<Clause>& clauses) {
  for (const auto& c : clauses)
    if (!c.holds()) return c.text;
  return {};
}

bool check_stability_L4zero(const ElasticConstants& L) { return all_hold(stability_L4zero_clauses(L)); }
bool check_L_cond(const ElasticConstants& L, double s) { return all_hold(L_cond_clauses(L, s)); }
bool check_coercivity_iff(const ElasticConstants& L, double s) { return all_hold(coercivity_iff_clauses(L, s)); }
bool check_ericksen(const FrankConstants& k) { return all_hold(ericksen_clauses(k)); }
bool check_er1(const ElasticConstants& L, double s) { return all_hold(er1_clauses(L, s)); }

double alpha(const ElasticConstants& L, double s) {
  return std::min({2 * L.L1 + L.L2 + L.L3 - 2 * s * L.L4 / 3, 2 * L.L1 - 2 * s * L.L4 / 3,
                   2 * L.L1 + L.L2 + L.L3 + 4 * s * L.L4 / 3});
}

double alpha_e2(const ElasticConstants& L, double s) {
  return std::min({L.L1 + L.L2 + L.L3 / 2 - s * L.L4 / 3, L.L1 + L.L2 / 2 + L.L3 / 2 + 2 * s * L.L4 / 3,
                   L.L1 - std::abs(L.L3) / 2 - s * L.L4 / 3});
}

double tilde_alpha(const FrankConstants& k) {
  return std::min({k.k2 + k.k4, 2 * k.k1 - k.k2 - k.k4, k.k2 - std::abs(k.k4), k.k3});
}

double bar_alpha(const ElasticConstants& L, double s) { return L.L1 - std::abs(L.L3) - 2 * s * L.L4 / 3; }

} // namespace lcq
