#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "gforge/operator_core.hpp"

namespace gforge {

inline constexpr int kMaxQubits = 64;
inline constexpr double kDropTol = 1e-12;

// Per qubit k: (x_k, z_k) = (0,0) I, (1,0) X, (1,1) Y, (0,1) Z.
struct PauliString {
  std::uint64_t x = 0, z = 0;
  bool operator==(const PauliString& o) const { return x == o.x && z == o.z; }
  bool is_identity() const { return (x | z) == 0; }
};

// Qubit 0 first, letters I/X/Y/Z.
std::string pauli_to_string(const PauliString& p, int n_qubits);
PauliString pauli_from_string(const std::string& s);
// Lexicographic order of pauli_to_string.
bool pauli_less(const PauliString& a, const PauliString& b);

struct PauliTerm {
  PauliString p;
  double c;
};

struct PauliPolynomial {
  int n_qubits = 0;
  double identity = 0.0;
  std::vector<PauliTerm> terms;  // sorted by pauli_less, no identity, no |c| < kDropTol

  double coeff(const PauliString& p) const;
};

PauliPolynomial jordan_wigner(const FermionOp& op);
double induced_one_norm(const PauliPolynomial& poly);
void write_pauli_csv(const PauliPolynomial& poly, std::ostream& out);

// Dense 2^n matrix; only sensible for small n.
Eigen::MatrixXcd pauli_dense(const PauliPolynomial& poly);

// Majorana monomial as a bit mask over indices [0, 128).
struct MajoranaKey {
  std::uint64_t lo = 0, hi = 0;
  bool operator==(const MajoranaKey& o) const { return lo == o.lo && hi == o.hi; }
  bool operator<(const MajoranaKey& o) const { return hi != o.hi ? hi < o.hi : lo < o.lo; }
  int degree() const;
  std::vector<int> indices() const;
  static MajoranaKey from_indices(const std::vector<int>& idx);
};

struct MajoranaTerm {
  MajoranaKey mu;
  double f;  // coefficient of Gamma_mu = i^k gamma_mu1 ... gamma_mu2k
};

struct MajoranaPolynomial {
  int n_modes = 0;   // spin-orbitals; Majorana indices run over [0, 2*n_modes)
  double constant = 0.0;
  std::vector<MajoranaTerm> terms;  // degree 2 or 4, sorted by key

  double two_norm_sq() const;
};

// gamma_2j = a_j + a_j^+, gamma_2j+1 = -i(a_j - a_j^+), j = 2p + spin.
MajoranaPolynomial to_majorana(const FermionOp& op);

// Maps monomials through gamma_2j = X_j Z_<j, gamma_2j+1 = Y_j Z_<j.
PauliPolynomial majorana_to_pauli(const MajoranaPolynomial& m);

struct PauliUnion {
  int n_qubits = 0;
  std::vector<PauliString> terms;  // lexicographic
  Eigen::MatrixXd h;               // rows: operators, cols: terms
};

PauliUnion pauli_union(const std::vector<PauliPolynomial>& polys);

}  // namespace gforge
