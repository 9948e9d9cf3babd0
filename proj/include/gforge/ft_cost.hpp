#pragma once

#include <json.hpp>

#include <map>
#include <string>
#include <vector>

#include "gforge/finite_difference.hpp"

namespace gforge {

enum class ErrNorm { One, Two };
enum class ReflectionMode { Simplified, Full };

struct FTInputs {
  std::vector<double> lambda_F_i;  // empty -> 3 N_a copies of lambda_F
  double lambda_F = 1.0;
  double lambda_H = 1.0;
  std::vector<double> T_F_i;  // empty -> T_F
  double T_F = 1.0, T_H = 1.0, T_phi = 1.0;
  double gap = 1.0;
  double a0 = 1.0;
  int N = 1;    // spin-orbitals
  int N_a = 1;
  double c_sgn = 1.0;
  double delta_z = 1.0;
  double eps_A = 1.0;
  // (1/lambda_F_i) dE/dR_i, used by the recycling model; empty -> 0
  std::vector<double> normalized_gradients;
  bool assume_TF_le_TH = true;
  ReflectionMode reflection = ReflectionMode::Simplified;

  int n_components() const { return 3 * N_a; }
  double lambda_i(int i) const;
  double T_F_at(int i) const;
  void validate() const;
};

FTInputs ft_inputs_from_json(const nlohmann::json& j);

struct CostReport {
  std::string method;
  double total = 0.0;
  std::map<std::string, double> breakdown;
  std::vector<std::string> model_flags;
  nlohmann::json to_json() const;
};

double oea_calls(double eps);
double oea_component_cost(int i, double eps_i, const FTInputs& in, double T_R, double T_P_i);
std::vector<double> allocate_eps(const std::vector<double>& lams_times_costs, double eps_total,
                                 ErrNorm norm);
double reflection_cost(const FTInputs& in, double eps_r, ReflectionMode mode);
double prep_cost_first(const FTInputs& in, double T_R);
double prep_cost_recycle(double x, double T_R);

CostReport oea_total_cost(const FTInputs& in, double eps, ErrNorm norm);
// sum of oea_component_cost over an explicit allocation (no Chernoff factor)
double oea_sum_components(const FTInputs& in, const std::vector<double>& eps_i, double T_R);
CostReport gbeve_cost(const FTInputs& in, double eps);

struct TauReport {
  double tau_oea, tau_gbev, tau_fd1, tau_fd2, tau_fd3;
  double fd_dominant;  // max(fd1, min(fd2, fd3))
  std::string verdict;
  nlohmann::json to_json() const;
};
TauReport tau_report(const SystemConstants& k, double lambda_F, double eps);

}  // namespace gforge
