#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "gforge/operator_core.hpp"

namespace gforge {

struct Factor {
  int w_sign = 1;
  double w_abs = 0.0;
  Eigen::MatrixXd g_matrix;         // unit Frobenius norm, symmetric
  Eigen::VectorXd f;                // eigenvalues of W = sqrt|w| g, empty until double_factorize
  Eigen::MatrixXd basis_rotation;   // columns are eigenvectors of g_matrix
};

struct Factorization {
  std::vector<Factor> factors;
  double truncation_error = 0.0;
  bool doubled = false;
  int rank() const { return int(factors.size()); }
};

struct Lambdas {
  double lambda1 = 0.0, lambda2 = 0.0, total = 0.0;
};

// Factorises the chemist tensor g = 2V of op (the tensor the sparse and DF
// rescaling factors are written in).
Factorization single_factorize(const FermionOp& op, std::optional<int> rank = std::nullopt,
                               double tol = 0.0);
Factorization double_factorize(Factorization f);

// T + sum_r g_pqrr, the one-body matrix both lambda formulas use.
Eigen::MatrixXd lambda_one_body(const FermionOp& op);

Lambdas lambda_sparse(const FermionOp& op);
Lambdas lambda_df(const FermionOp& op, const Factorization& fac);

struct MeanStd {
  double mean, stddev;
  int count;
};
MeanStd lambda_force_mean(const std::vector<double>& lams);

// ||M - sum_{l<k} w_l g_l (x) g_l||_F, recomputed from the factors.
double truncate_check(const FermionOp& op, const Factorization& fac, int k);

// Differentiated-factorisation rescaling factor for caller-paired W, dW.
double lambda_f_low_rank(const std::vector<Eigen::MatrixXd>& W, const std::vector<Eigen::MatrixXd>& dW);

}  // namespace gforge
