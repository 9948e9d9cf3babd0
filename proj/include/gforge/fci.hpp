#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "gforge/bundle_io.hpp"
#include "gforge/operator_core.hpp"

namespace gforge {

inline constexpr int kFciMaxSpinOrbitals = 16;

// Fixed-S_z determinant space. Determinants are bit masks over spin-orbitals
// 2p (alpha) and 2p+1 (beta).
struct DetSpace {
  int n_spatial = 0;
  int n_alpha = 0, n_beta = 0;
  std::vector<std::uint64_t> dets;

  static DetSpace make(int n_spatial, int n_electrons);
  int find(std::uint64_t det) const;  // -1 if absent
};

// y = op * x on the determinant space.
Eigen::VectorXd apply_op(const FermionOp& op, const DetSpace& space, const Eigen::VectorXd& x);
Eigen::MatrixXd op_matrix(const FermionOp& op, const DetSpace& space);

struct FciResult {
  double energy;  // electronic, no e_nuc
  Eigen::VectorXd psi;
  DetSpace space;
};

FciResult fci_ground_state(const FermionOp& hamiltonian, int n_electrons);

// <psi0|op|psi0>, psi0 the ground state of the bundle's own Hamiltonian.
double fci_expectation(const FermionOp& op, const IntegralBundle& b);
double fci_expectation(const FermionOp& op, const FciResult& ground);

}  // namespace gforge
