#pragma once

#include <string>
#include <vector>

#include "gforge/bundle_io.hpp"
#include "gforge/operator_core.hpp"

namespace gforge {

struct LambdaRow {
  std::string label;  // "H" or force_label(i)
  std::string method; // sparse | df
  double lambda1, lambda2, total;
};

// 1 + 3 N_a rows per method
std::vector<LambdaRow> lambda_rows(const IntegralBundle& b, const std::vector<std::string>& methods);

struct LambdaSummary {
  double lambda_H;
  double lambda_F_mean, lambda_F_std;
};
LambdaSummary summarize(const std::vector<LambdaRow>& rows, const std::string& method);

struct NisqGammas {
  double separate, parallel, no_importance;  // Pauli-coefficient sigma matrix
  double shadow;                             // sum_i shadow bounds
  double brg, brg_with_one_body;
  double sum_induced_one_norm;
};
NisqGammas nisq_gammas(const IntegralBundle& b);
NisqGammas nisq_gammas(const std::vector<FermionOp>& forces, int n_electrons);

}  // namespace gforge
