#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <string>
#include <vector>

#include "gforge/tensor.hpp"

namespace gforge {

struct Geometry {
  std::vector<std::string> symbols;
  Eigen::VectorXd charges;      // Z_A
  Eigen::MatrixXd positions;    // n_atoms x 3, Bohr
  int n_atoms() const { return int(charges.size()); }
};

enum class OrbitalKind { Canonical, Localized };

struct IntegralBundle {
  Geometry geometry;
  int n_spatial = 0;
  int n_electrons = 0;
  OrbitalKind orbital_kind = OrbitalKind::Canonical;
  std::string basis;
  Eigen::MatrixXd S, h;
  Tensor4 g;  // chemist order (pq|rs)
  // index i = 3*atom + axis
  std::vector<Eigen::MatrixXd> dS, dh;
  std::vector<Tensor4> dg;
  double e_nuc = 0.0;
  Eigen::VectorXd de_nuc;
  // anything else found in the manifest (fci_energy_electronic, ...), kept
  // so that a round trip does not lose it
  nlohmann::json extra = nlohmann::json::object();

  int n_derivs() const { return 3 * geometry.n_atoms(); }
};

struct SumRuleEntry {
  std::string tensor;
  int axis;
  double max_violation;
};

struct SumRuleReport {
  std::vector<SumRuleEntry> entries;
  double worst() const;
};

// Tolerances used on load.
inline constexpr double kSymmetryTol = 1e-10;
inline constexpr double kOrthonormalTol = 1e-8;
inline constexpr double kSumRuleTol = 1e-7;

IntegralBundle read_bundle(const std::string& dir);
void write_bundle(const IntegralBundle& b, const std::string& dir);

// Throws on the first broken invariant. read_bundle calls this.
void validate_bundle(const IntegralBundle& b);
SumRuleReport validate_sum_rules(const IntegralBundle& b);

}  // namespace gforge
