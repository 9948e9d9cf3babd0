#pragma once

#include <Eigen/Dense>

#include <array>

namespace gforge {

struct PWGrid {
  int n_side = 3;     // odd
  double Omega = 1.0; // Bohr^3

  int size() const { return n_side * n_side * n_side; }
  double length() const;
  // centred integer vector for flat index p = (ix n + iy) n + iz
  std::array<int, 3> nu(int p) const;
  // wraps an integer vector onto the centred range
  std::array<int, 3> alias(std::array<int, 3> v) const;
  void validate() const;
};

constexpr int kPwDenseMax = 9;

// dH/dR_A[axis] in the plane-wave basis
Eigen::MatrixXcd pw_force_matrix(const PWGrid& g, double Z, const Eigen::Vector3d& R, int axis);

// U_pr = N^{-1/2} exp(i k_p . r_r), r_r = nu(r) L / n
Eigen::MatrixXcd dft_matrix(const PWGrid& g, int sign = +1);

// closed-form eigenvalue of the force matrix attached to grid point r:
// -(4 pi i Z / Omega) sum_{s != 0} k_s exp(i k_s.(R + sign r_r)) / |k_s|^2
double pw_force_eigenvalue(const PWGrid& g, double Z, const Eigen::Vector3d& R, int axis, int r,
                           int sign = +1);

struct DiagCheck {
  double max_offdiag;
  double max_diag_error;
  double max_diag_imag;
};
DiagCheck fft_diagonalize_check(const Eigen::MatrixXcd& F, const PWGrid& g, double Z,
                                const Eigen::Vector3d& R, int axis, int sign = +1);

// max |[F_a, F_b]| elementwise
double pw_commutator(const PWGrid& g, double Z, const Eigen::Vector3d& R, int a, int b);

// (4 pi eta Z / Omega) sum_{nu != 0} |k_nu . d| / |k_nu|^2 with d = R / |R|
double pw_lambda_force(const PWGrid& g, double Z, int eta, const Eigen::Vector3d& R);
double pw_lambda_force_serial(const PWGrid& g, double Z, int eta, const Eigen::Vector3d& R);

// 2^{-(2n+2)} sum over the signed cube |nu_x| <= 2^{n-1}-1, nu != 0, of |nu_x|/|nu|^2
double momentum_prep_probability(int n);
// int_0^1 sqrt(1+z^2) arccot sqrt(1+z^2) dz
double momentum_prep_integral();
double momentum_prep_constant();

}  // namespace gforge
