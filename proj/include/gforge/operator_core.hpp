#pragma once

#include <Eigen/Dense>

#include <string>

#include "gforge/bundle_io.hpp"
#include "gforge/tensor.hpp"

namespace gforge {

// shift + sum_{pq,s} T_pq a+_{ps} a_{qs} + sum_{pqrs,s,t} V_pqrs a+_{ps} a_{qs} a+_{rt} a_{st}
//
// V holds half the chemist integrals (V = g/2) and T carries the contraction
// that comes from writing the two-body term in this E_pq E_rs order:
// T = h - 1/2 sum_r g_prrq.
struct FermionOp {
  double shift = 0.0;
  Eigen::MatrixXd one_body;
  Tensor4 two_body;
  std::string label;

  int n_spatial() const { return int(one_body.rows()); }
};

// g-type tensor back from the stored V.
Tensor4 chemist_tensor(const FermionOp& op);

FermionOp build_hamiltonian(const IntegralBundle& b);

// Derivative of the Lowdin-orthonormalised integrals at frozen orbitals,
// i.e. the Pulay-corrected dh/dg, in FermionOp form.
FermionOp build_force_operator(const IntegralBundle& b, int i);
std::vector<FermionOp> build_all_force_operators(const IntegralBundle& b);

// Orthonormalised derivative integrals (dh~, dg~) for component i, before
// they are folded into FermionOp form.
void pulay_integrals(const IntegralBundle& b, int i, Eigen::MatrixXd& dh_t, Tensor4& dg_t);

// Build from physicist-ready one-electron h and chemist g.
FermionOp from_integrals(const Eigen::MatrixXd& h, const Tensor4& g, double shift,
                         std::string label);

std::string force_label(int i);

double max_symmetry_violation(const FermionOp& op);

}  // namespace gforge
