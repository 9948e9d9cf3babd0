#pragma once

#include <Eigen/Dense>

#include <ostream>
#include <string>
#include <vector>

#include "gforge/factorization.hpp"
#include "gforge/qubit_rep.hpp"

namespace gforge {

// rows: estimation targets i, cols: measurement groups j; entries >= 0.
using SigmaMatrix = Eigen::MatrixXd;

double gamma2_parallel(const SigmaMatrix& s);
double gamma2_separate(const SigmaMatrix& s);
double gamma2_no_importance(const SigmaMatrix& s);

double shadow_norm_factor(int n_modes, int k);  // C(2n,2k)/C(n,k)
double shadow_variance_bound(const MajoranaPolynomial& m, int n_modes);

// sigma bar = rbar/2, rbar = max(s+^2, s-^2) over f with multiplicity 2.
double brg_sigma_bound(const std::vector<double>& f_values, int eta);
// (s+ - s-)/2 for a plain one-body term sum_p t_p n_p.
double one_body_sigma_bound(const std::vector<double>& t_values, int eta);

struct BrgSigmas {
  std::vector<double> two_body;  // one per factor
  double one_body = 0.0;
};
// Per-fragment sigma bounds for op = T + sum_l (W_l / sqrt 2)^2, using the
// double factorisation of the chemist tensor.
BrgSigmas brg_sigmas(const FermionOp& op, const Factorization& doubled, int eta);

double shots_one_norm(const std::vector<std::vector<double>>& q_norms, double eps);

double rms_to_2norm(double rms, int n_atoms);

struct PowerFit {
  double exponent, stderr_;
  double prefactor;
};
PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y, int k_last);

struct NisqRow {
  std::string method;
  double system_size;
  double gamma;
  double shots_at_eps;
};
void write_nisq_csv(const std::vector<NisqRow>& rows, std::ostream& out);

}  // namespace gforge
