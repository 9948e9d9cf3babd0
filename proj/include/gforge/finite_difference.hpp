#pragma once

#include <json.hpp>

#include <vector>

namespace gforge {

struct SystemConstants {
  double c = 1.0;         // 1/Bohr
  double e_frak = 1.0;    // Ha
  double lambda_H = 1.0;  // Ha
  double gap = 1.0;       // Ha
  int n_atoms = 1;
  double max_dH = 1.0;    // Ha/Bohr
  double a0 = 1.0;
  double a_min = 1.0;

  void validate() const;
};

// unknown keys rejected
SystemConstants system_constants_from_json(const nlohmann::json& j);

// a_l for l = -m..m (index l + m), a_0 = 0.
std::vector<double> stencil(int m);

// values[k] = E(R + l dR), l = -m..m skipping 0 (size 2m); a value at l = 0
// may be included (size 2m+1), it carries zero weight.
double fd_apply(const std::vector<double>& values, double dR, int m);

double eps_fd_bound(int m, double dR, const SystemConstants& k);

struct PeAllocation {
  std::vector<double> T_l;  // l = -m..m, T_0 = 0
  double T_total;
  double Gamma;
};
PeAllocation allocate_pe_time(int m, double dR, double lambda_H, double eps_pe);
// eps_PE from eq. for a given allocation: pi dR^-1 lambda_H sqrt(sum |a_l|^2 (2 T_l)^-2)
double pe_error(int m, double dR, double lambda_H, const std::vector<double>& T_l);

double choose_dR(int m, const SystemConstants& k, double eps);
double total_queries(int m, const SystemConstants& k, double eps);

struct FDPlan {
  int m;
  double dR;
  std::vector<double> a;
  std::vector<double> T_l;
  double eps_pe, eps_fd;
  double T_total;
  double Gamma;
  double query_model;  // total_queries at m
};
FDPlan optimize_m(const SystemConstants& k, double eps, int m_max = 64);
nlohmann::json to_json(const FDPlan& p);

double gradient_vector_queries(const SystemConstants& k, double eps_2norm, bool reuse);

double overlap_stability(double delta1_norm, double delta2_norm, double gap, double max_dH, double delta);

}  // namespace gforge
